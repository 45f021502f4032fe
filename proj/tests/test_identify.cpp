#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcid/errors.hpp"
#include "lcid/identify.hpp"
#include "lcid/rng.hpp"

using namespace lcid;
using doctest::Approx;

namespace {

double u(Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

Eigen::VectorXd vec(Rng& r, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = u(r, lo, hi);
    return v;
}

ApRwParams random_ap(Rng& r, int X) {
    return ApRwParams{vec(r, X + 1, -6, -1), normalize_betas(vec(r, X + 1, 0.1, 1.0)), u(r, -0.5, 0.5),
                      u(r, 0.1, 2.0), u(r, 0.05, 1.0)};
}

ApcRwParams random_apc(Rng& r, int X) {
    return ApcRwParams{vec(r, X + 1, -6, -1),
                       normalize_betas(vec(r, X + 1, 0.1, 1.0)),
                       normalize_betas(vec(r, X + 1, 0.1, 1.0)),
                       u(r, -0.5, 0.5),
                       u(r, -0.5, 0.5),
                       u(r, 0.1, 2.0),
                       u(r, 0.1, 2.0),
                       u(r, 0.05, 1.0)};
}

double max_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

double ap_error(const ApRwParams& a, const ApRwParams& b) {
    return std::max({max_diff(a.alpha, b.alpha), max_diff(a.beta, b.beta), std::abs(a.mu - b.mu),
                     std::abs(a.sigma2_e - b.sigma2_e), std::abs(a.sigma2_eps - b.sigma2_eps)});
}

double apc_error(const ApcRwParams& a, const ApcRwParams& b) {
    return std::max({max_diff(a.alpha, b.alpha), max_diff(a.beta0, b.beta0), max_diff(a.beta1, b.beta1),
                     std::abs(a.mu0 - b.mu0), std::abs(a.mu1 - b.mu1), std::abs(a.sigma2_e0 - b.sigma2_e0),
                     std::abs(a.sigma2_e1 - b.sigma2_e1), std::abs(a.sigma2_eps - b.sigma2_eps)});
}

MomentGrid perturbed(MomentGrid g, Rng& r, double size) {
    for (Eigen::Index i = 0; i < g.means.size(); ++i) g.means.data()[i] += size * (2 * r.uniform() - 1);
    for (Eigen::Index j = 0; j < g.covs.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double e = size * (2 * r.uniform() - 1);
            g.covs(i, j) += e;
            if (i != j) g.covs(j, i) += e;
        }
    return g;
}

}  // namespace

TEST_CASE("identical values are equivalent") {
    Rng r(RngSpec{1, 0});
    const ApRwParams p = random_ap(r, 2);
    const EquivalenceReport rep = check_equivalence(p, p, {}, {2, 6});
    CHECK(rep.verdict == Verdict::Equivalent);
    CHECK(rep.momentResidual == 0.0);
    CHECK(rep.paramDistance == 0.0);
}

TEST_CASE("verdict classification") {
    const EquivalenceOptions o{1e-10, 1e-6, true};
    CHECK(classify(0.0, 1.0, o) == Verdict::Equivalent);
    CHECK(classify(1e-3, 1.0, o) == Verdict::Distinct);
    CHECK(classify(1e-3, 1e-9, o) == Verdict::Inconclusive);
    CHECK(verdict_name(Verdict::Distinct) == "distinct");
}

TEST_CASE("family mismatch is an input error") {
    const ApRwParams a{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0, 1, 1};
    const ApArima110Params b{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0, 1, 1, 0.2};
    CHECK_THROWS_AS((void)check_equivalence(a, b, {}, {1, 4}), InputError);
}

TEST_CASE("drift-free mean counterexample") {
    const auto [a, b] = counterexample_ap_means_mu0(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.6, 0.4),
                                                    Eigen::Vector2d(0, 0), 2.0);
    CHECK(b.alpha[0] == Approx(-0.6).epsilon(1e-15));
    CHECK(b.alpha[1] == Approx(0.6).epsilon(1e-15));
    const InitialConditions init{2.0, 0, 0};
    const EquivalenceReport means = check_equivalence(a, b, init, {1, 8}, {1e-10, 1e-6, false});
    CHECK(means.verdict == Verdict::Equivalent);
    CHECK(means.meanResidual < 1e-14);
    CHECK(means.paramDistance > 0.1);
    const EquivalenceReport full = check_equivalence(a, b, init, {1, 8});
    CHECK(full.verdict == Verdict::Distinct);

    const auto [c, d] = counterexample_ap_means_mu0(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.6, 0.4),
                                                    Eigen::Vector2d(-1, -2), 0.0);
    CHECK(d.alpha == c.alpha);
    CHECK(d.beta != c.beta);
    CHECK_THROWS_AS((void)counterexample_ap_means_mu0(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.3, 0.7),
                                                      Eigen::Vector2d(0, 0), 2.0),
                    InputError);
}

TEST_CASE("fully parametric cohort pair shares one predictor") {
    const FullyParametricPair fp = counterexample_apc_fullyparam(3, 5);
    CHECK(fp.residual == 0.0);
    CHECK(fp.predictorA == fp.predictorB);
    CHECK(fp.cohortTermA == fp.cohortTermB);
    CHECK(fp.cohortTermA(1, 0) == 0.25);
    CHECK(fp.cohortTermA(0, 4) == 0.75);
    CHECK(fp.cohortTermA.cwiseAbs().sum() == 1.0);
    CHECK(fp.paramDistance >= 0.25);
    CHECK(fp.a.beta0.head(2) == Eigen::Vector2d(0.75, 0.25));
    CHECK(fp.b.beta0.head(2) == Eigen::Vector2d(0.5, 0.5));
    // iota index h + X - 1 for cohort h = 1-X..T
    CHECK(fp.a.iota[0] == -2.0);
    CHECK(fp.a.iota[2] == 1.0);
    CHECK(fp.b.iota[2] == 0.5);
    CHECK(fp.b.iota[7] == 1.5);
    CHECK_THROWS_AS((void)counterexample_apc_fullyparam(2, 5), InputError);
}

TEST_CASE("drift swap under equal loadings") {
    ApcRwParams p;
    p.alpha = Eigen::Vector2d(0, 0);
    p.beta0 = p.beta1 = Eigen::Vector2d(0.5, 0.5);
    p.mu0 = 1.0;
    p.mu1 = 2.0;
    p.sigma2_e0 = p.sigma2_e1 = p.sigma2_eps = 1.0;
    const auto [a, b] = counterexample_apc_equal_loadings(p);
    CHECK(b.alpha[0] == Approx(-0.5).epsilon(1e-15));
    CHECK(b.alpha[1] == 0.0);
    const EquivalenceReport rep = check_equivalence(a, b, InitialConditions{0, 0.3, -0.4}, {1, 7});
    CHECK(rep.momentResidual < 1e-12);
    CHECK(rep.verdict == Verdict::Equivalent);

    p.beta1 = Eigen::Vector2d(0.4, 0.6);
    CHECK_THROWS_AS((void)counterexample_apc_equal_loadings(p), InputError);
}

TEST_CASE("single-age variance trade") {
    ApcRwParams p;
    p.alpha = Eigen::VectorXd::Zero(1);
    p.beta0 = p.beta1 = Eigen::VectorXd::Ones(1);
    p.sigma2_e0 = 1.0;
    p.sigma2_e1 = 2.0;
    p.sigma2_eps = 0.5;
    const auto [a, b] = counterexample_apc_x0_variance_trade(p, 0.5);
    CHECK(b.sigma2_e0 == 1.5);
    CHECK(b.sigma2_e1 == 1.5);
    CHECK(moment_grid(a, {}, {0, 9}).covs == moment_grid(b, {}, {0, 9}).covs);
    const auto [c, d] = counterexample_apc_x0_variance_trade(p, 0.0);
    CHECK(d.sigma2_e0 == c.sigma2_e0);
    CHECK_THROWS_AS((void)counterexample_apc_x0_variance_trade(p, 2.0), InputError);
}

TEST_CASE("random-walk recovery round trip") {
    Rng r(RngSpec{2, 0});
    for (int i = 0; i < 100; ++i) {
        const int X = i % 5;
        const int T = 2 + (i * 7) % 29;
        const ApRwParams p = random_ap(r, X);
        const InitialConditions init{u(r, -1, 1), 0, 0};
        const auto rec = recover_ap_rw(moment_grid(p, init, {X, T}), init);
        CHECK(ap_error(rec.thetaHat, p) < 1e-8);
        CHECK_FALSE(rec.stepsLog.empty());
    }
}

TEST_CASE("single-age random walk fixes beta = 1") {
    const ApRwParams p{Eigen::VectorXd::Constant(1, -3.0), Eigen::VectorXd::Ones(1), 0.2, 0.9, 0.4};
    const auto rec = recover_ap_rw(moment_grid(p, {}, {0, 2}), {});
    CHECK(rec.thetaHat.beta[0] == 1.0);
    CHECK(rec.thetaHat.sigma2_e == Approx(0.9).epsilon(1e-12));
}

TEST_CASE("zero and negative loadings are recovered") {
    const ApRwParams p{Eigen::Vector4d(-4, -3, -2, -1), Eigen::Vector4d(0.0, -0.3, 0.8, 0.5), 0.1, 1.2, 0.3};
    const auto rec = recover_ap_rw(moment_grid(p, {}, {3, 5}), {});
    CHECK(ap_error(rec.thetaHat, p) < 1e-8);
}

TEST_CASE("covariances pin down the generator of the mean counterexample") {
    const auto [a, b] = counterexample_ap_means_mu0(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.6, 0.4),
                                                    Eigen::Vector2d(-1, -2), 2.0);
    const InitialConditions init{2.0, 0, 0};
    const auto rec = recover_ap_rw(moment_grid(a, init, {1, 6}), init);
    CHECK(ap_error(rec.thetaHat, a) < 1e-8);
    CHECK(max_diff(rec.thetaHat.beta, b.beta) > 0.1);
}

TEST_CASE("recovery refuses grids from another family") {
    const ApArima110Params p{Eigen::Vector3d(-3, -2, -1), Eigen::Vector3d(0.2, 0.3, 0.5), 0.1, 1.0, 0.2, 0.6};
    CHECK_THROWS_AS((void)recover_ap_rw(moment_grid(p, {}, {2, 8}), {}), NumericalDiagnostic);
    CHECK_THROWS_AS((void)recover_ap_rw(moment_grid(p, {}, {2, 1}), {}), InputError);
}

TEST_CASE("recovery is stable under tiny grid noise") {
    Rng r(RngSpec{3, 0});
    const RecoveryOptions noisy{true, 1e-10, 1e-3};
    for (int i = 0; i < 20; ++i) {
        const ApRwParams p = random_ap(r, 3);
        const MomentGrid g = moment_grid(p, {}, {3, 10});
        const auto rec = recover_ap_rw(perturbed(g, r, 1e-10), {}, noisy);
        CHECK(ap_error(rec.thetaHat, p) < 1e-6);
    }
}

TEST_CASE("cohort recovery round trip") {
    Rng r(RngSpec{4, 0});
    for (int i = 0; i < 100; ++i) {
        const int X = 1 + i % 3;
        const ApcRwParams p = random_apc(r, X);
        const InitialConditions init{0, u(r, -1, 1), u(r, -1, 1)};
        const auto rec = recover_apc_rw(moment_grid(p, init, {X, X + 4}), init);
        CHECK(apc_error(rec.thetaHat, p) < 1e-7);
    }
}

TEST_CASE("cohort recovery with zero loadings at some ages") {
    ApcRwParams p;
    p.alpha = Eigen::Vector4d(-4, -3, -2, -1);
    p.beta0 = Eigen::Vector4d(0.0, 0.5, 0.5, 0.0);
    p.beta1 = Eigen::Vector4d(0.4, 0.0, 0.2, 0.4);
    p.mu0 = 0.2;
    p.mu1 = -0.1;
    p.sigma2_e0 = 0.7;
    p.sigma2_e1 = 1.1;
    p.sigma2_eps = 0.3;
    const auto rec = recover_apc_rw(moment_grid(p, {}, {3, 8}), {});
    CHECK(apc_error(rec.thetaHat, p) < 1e-7);
}

TEST_CASE("cohort recovery refusals") {
    Rng r(RngSpec{5, 0});
    ApcRwParams single = random_apc(r, 0);
    single.beta1 = single.beta0;
    CHECK_THROWS_AS((void)recover_apc_rw(moment_grid(single, {}, {0, 8}), {}), InputError);
    const ApcRwParams p = random_apc(r, 2);
    CHECK_THROWS_AS((void)recover_apc_rw(moment_grid(p, {}, {2, 4}), {}), InputError);
    CHECK_NOTHROW((void)recover_apc_rw(moment_grid(p, {}, {2, 5}), {}));

    ApcRwParams equal = p;
    equal.beta1 = equal.beta0;
    equal.mu1 = equal.mu0 + 0.3;
    CHECK_THROWS_AS((void)recover_apc_rw(moment_grid(equal, {}, {2, 6}), {}), NumericalDiagnostic);
}

TEST_CASE("ARIMA(1,1,0) recovery round trip") {
    Rng r(RngSpec{6, 0});
    for (const double rho : {-0.8, -0.3, 0.0, 0.3, 0.8})
        for (const int X : {0, 1, 3})
            for (const int T : {4, 10, 30}) {
                const ApRwParams b = random_ap(r, X);
                const ApArima110Params p{b.alpha, b.beta, b.mu, b.sigma2_e, b.sigma2_eps, rho};
                const auto rec = recover_ap_arima110(moment_grid(p, {}, {X, T}), {});
                CHECK(std::abs(rec.thetaHat.rho - rho) < 1e-6);
                CHECK(max_diff(rec.thetaHat.beta, p.beta) < 1e-6);
                CHECK(std::abs(rec.thetaHat.sigma2_e - p.sigma2_e) < 1e-6);
                CHECK(std::abs(rec.thetaHat.sigma2_eps - p.sigma2_eps) < 1e-6);
                CHECK(std::abs(rec.thetaHat.mu - p.mu) < 1e-6);
                CHECK(max_diff(rec.thetaHat.alpha, p.alpha) < 1e-6);
                CHECK(std::abs(rec.thetaHat.rho) < 1.0);
            }
}

TEST_CASE("ARIMA(1,1,0) with rho = 0 goes through the random-walk branch") {
    const ApArima110Params p{Eigen::Vector2d(-1, -2), Eigen::Vector2d(0.4, 0.6), 0.1, 1.0, 0.5, 0.0};
    const auto rec = recover_ap_arima110(moment_grid(p, {}, {1, 6}), {});
    CHECK(std::abs(rec.thetaHat.rho) < 1e-8);
    CHECK_THROWS_AS((void)recover_ap_arima110(moment_grid(p, {}, {1, 3}), {}), InputError);
}

TEST_CASE("ARIMA(0,1,1) recovery round trip") {
    Rng r(RngSpec{7, 0});
    for (const double phi : {-0.9, -0.4, 0.0, 0.4, 0.9})
        for (const int X : {0, 2})
            for (const int T : {2, 10, 30}) {
                const ApRwParams b = random_ap(r, X);
                const ApArima011Params p{b.alpha, b.beta, b.mu, b.sigma2_e, b.sigma2_eps, phi};
                const auto rec = recover_ap_arima011(moment_grid(p, {}, {X, T}), {});
                CHECK(std::abs(rec.thetaHat.phi - phi) < 1e-6);
                CHECK(max_diff(rec.thetaHat.beta, p.beta) < 1e-6);
                CHECK(std::abs(rec.thetaHat.sigma2_e - p.sigma2_e) < 1e-6);
                CHECK(std::abs(rec.thetaHat.sigma2_eps - p.sigma2_eps) < 1e-6);
                CHECK(max_diff(rec.thetaHat.alpha, p.alpha) < 1e-6);
            }
}

TEST_CASE("MA(1) root pair") {
    const Ma1Roots half = ma1_roots(0.5 / 2.25);
    CHECK(half.inside == Approx(0.5).epsilon(1e-14));
    CHECK(half.outside == Approx(2.0).epsilon(1e-14));
    const Ma1Roots zero = ma1_roots(0.0);
    CHECK(zero.inside == 0.0);
    CHECK(std::isinf(zero.outside));
    for (int i = -99; i <= 99; ++i) {
        const double phi = i / 100.0;
        const Ma1Roots roots = ma1_roots(phi / ((1 + phi) * (1 + phi)));
        CHECK(std::abs(roots.inside) < 1.0);
        CHECK(roots.inside == Approx(phi).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("family dispatch") {
    Rng r(RngSpec{8, 0});
    const ModelParams p = random_apc(r, 2);
    const auto rec = recover(Family::ApcRw, moment_grid(p, {}, {2, 6}), {});
    CHECK(family_of(rec.thetaHat) == Family::ApcRw);
    CHECK(param_distance(rec.thetaHat, p) < 1e-7);
}
