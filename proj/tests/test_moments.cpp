#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcid/errors.hpp"
#include "lcid/moments.hpp"
#include "lcid/oracle.hpp"
#include "lcid/rng.hpp"

using namespace lcid;
using doctest::Approx;

namespace {

ApRwParams ap(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double mu, double s2e, double s2eps) {
    return ApRwParams{alpha, beta, mu, s2e, s2eps};
}

ModelParams random_theta(Rng& r, int family, int X) {
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * r.uniform(); };
    Eigen::VectorXd alpha(X + 1), b0(X + 1), b1(X + 1);
    for (int x = 0; x <= X; ++x) {
        alpha[x] = u(-6, -1);
        b0[x] = u(-0.3, 1.0);
        b1[x] = u(0.1, 1.0);
    }
    b0 = normalize_betas(b0);
    b1 = normalize_betas(b1);
    switch (family) {
        case 0: return ApRwParams{alpha, b0, u(-1, 1), u(0.1, 2), u(0.05, 1)};
        case 1: return ApArima110Params{alpha, b0, u(-1, 1), u(0.1, 2), u(0.05, 1), u(-0.95, 0.95)};
        case 2: return ApArima011Params{alpha, b0, u(-1, 1), u(0.1, 2), u(0.05, 1), u(-0.95, 0.95)};
        default: return ApcRwParams{alpha, b0, b1, u(-1, 1), u(-1, 1), u(0.1, 2), u(0.1, 2), u(0.05, 1)};
    }
}

}  // namespace

TEST_CASE("random-walk means") {
    const auto p = ap(Eigen::Vector2d(-1, -2), Eigen::Vector2d(0.3, 0.7), 0.1, 1.0, 1.0);
    CHECK(mean_ap_rw(p, {}, 1, 10) == Approx(-1.3).epsilon(1e-15));
    const auto flat = ap(Eigen::Vector2d(-1, -2), Eigen::Vector2d(0.3, 0.7), 0.0, 1.0, 1.0);
    CHECK(mean_ap_rw(flat, {}, 0, 7) == -1.0);
    const auto shifted = ap(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0.0, 1.0, 1.0);
    CHECK(mean_ap_rw(shifted, InitialConditions{5.0, 0, 0}, 1, 3) == 2.5);
    CHECK_THROWS_AS((void)mean_ap_rw(p, {}, 2, 1), InputError);
    CHECK_THROWS_AS((void)mean_ap_rw(p, {}, 0, 0), InputError);
}

TEST_CASE("random-walk covariances against the innovation double sum") {
    const auto p = ap(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0.0, 4.0, 1.0);
    const double oracle = 0.25 * oracle_cov_doublesum(LatentModel::RandomWalk, 0.0, 4.0, 3, 3) + 1.0;
    CHECK(cov_ap_rw(p, 0, 0, 3, 3) == oracle);
    CHECK(oracle == 4.0);
    const auto q = ap(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0.0, 1.0, 1.0);
    CHECK(cov_ap_rw(q, 0, 1, 2, 3) == 0.25 * oracle_cov_doublesum(LatentModel::RandomWalk, 0.0, 1.0, 2, 3));
    CHECK(cov_ap_rw(q, 0, 1, 2, 3) == 0.5);
    const auto z = ap(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.0, 1.0), 0.0, 1.0, 1.0);
    for (int s = 1; s <= 4; ++s)
        for (int t = 1; t <= 4; ++t) CHECK(cov_ap_rw(z, 0, 1, s, t) == 0.0);
}

TEST_CASE("cohort means") {
    ApcRwParams p;
    p.alpha = Eigen::Vector2d(0, 0);
    p.beta0 = Eigen::Vector2d(0.2, 0.8);
    p.beta1 = Eigen::Vector2d(0.6, 0.4);
    p.mu0 = 1.0;
    p.mu1 = 2.0;
    p.sigma2_e0 = p.sigma2_e1 = p.sigma2_eps = 1.0;
    CHECK(mean_apc_rw(p, {}, 0, 3) == Approx(4.4).epsilon(1e-15));
    CHECK(mean_apc_rw(p, {}, 1, 3) == Approx(0.8 * 3 + 0.4 * 2 * 3).epsilon(1e-15));
    p.mu0 = p.mu1 = 0.0;
    CHECK(mean_apc_rw(p, {}, 1, 5) == 0.0);
}

TEST_CASE("cohort covariances") {
    ApcRwParams p;
    p.alpha = Eigen::Vector2d(0, 0);
    p.beta0 = Eigen::Vector2d(0.2, 0.8);
    p.beta1 = Eigen::Vector2d(0.6, 0.4);
    p.sigma2_e0 = 1.5;
    p.sigma2_e1 = 0.7;
    p.sigma2_eps = 0.3;
    const double cohort = oracle_cov_doublesum(LatentModel::RandomWalk, 0.0, 1.5, 2 - 0 + 1, 3 - 1 + 1);
    const double period = oracle_cov_doublesum(LatentModel::RandomWalk, 0.0, 0.7, 2, 3);
    CHECK(cov_apc_rw(p, 0, 1, 2, 3) == Approx(0.2 * 0.8 * cohort + 0.6 * 0.4 * period).epsilon(1e-15));
    CHECK(cohort == 1.5 * 3);

    ApcRwParams single;
    single.alpha = Eigen::VectorXd::Zero(1);
    single.beta0 = single.beta1 = Eigen::VectorXd::Ones(1);
    single.sigma2_e0 = 1.0;
    single.sigma2_e1 = 2.0;
    single.sigma2_eps = 0.5;
    for (int s = 1; s <= 5; ++s)
        for (int t = 1; t <= 5; ++t)
            CHECK(cov_apc_rw(single, 0, 0, s, t) == 3.0 * std::min(s, t) + (s == t ? 0.5 : 0.0));

    ApcRwParams zero = p;
    zero.beta0 = Eigen::Vector2d(0.0, 1.0);
    zero.beta1 = Eigen::Vector2d(0.0, 1.0);
    CHECK(cov_apc_rw(zero, 0, 1, 2, 4) == 0.0);
}

TEST_CASE("ARIMA(1,1,0) latent covariance") {
    CHECK(cov_latent_arima110(0.5, 1.0, 1, 1) == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(cov_latent_arima110(0.5, 1.0, 2, 1) == Approx(2.0).epsilon(1e-14));
    CHECK(oracle_cov_doublesum(LatentModel::Arima110, 0.5, 1.0, 1, 1) == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(oracle_cov_doublesum(LatentModel::Arima110, 0.5, 1.0, 2, 1) == Approx(2.0).epsilon(1e-14));
    for (int t = 1; t <= 12; ++t)
        for (int q = 1; q <= 12; ++q) CHECK(cov_latent_arima110(0.0, 1.7, t, q) == 1.7 * std::min(t, q));

    const ApArima110Params p{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), 0.0, 1.0, 2.0, 0.5};
    CHECK(cov_ap_arima110(p, 0, 0, 1, 1) == Approx(4.0 / 3.0 + 2.0).epsilon(1e-14));
    const ApArima110Params z{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.0, 1.0), 0.0, 1.0, 2.0, 0.5};
    CHECK(cov_ap_arima110(z, 0, 1, 3, 5) == 0.0);
}

TEST_CASE("ARIMA(1,1,0) closed form is continuous across the series switch") {
    for (const double rho : {-2e-4, -1.0001e-4, -0.9999e-4, -1e-6, 1e-6, 0.9999e-4, 1.0001e-4, 2e-4}) {
        for (int t = 1; t <= 30; t += 7)
            for (int q = 1; q <= 30; q += 5) {
                const double closed = cov_latent_arima110(rho, 1.3, t, q);
                const double sum = oracle_cov_doublesum(LatentModel::Arima110, rho, 1.3, t, q);
                CHECK(closed == Approx(sum).epsilon(1e-11));
            }
    }
}

TEST_CASE("ARIMA(0,1,1) latent covariance") {
    CHECK(cov_latent_arima011(0.5, 1.0, 1, 1) == Approx(1.25).epsilon(1e-15));
    CHECK(cov_latent_arima011(0.5, 1.0, 2, 1) == Approx(1.75).epsilon(1e-15));
    CHECK(oracle_cov_doublesum(LatentModel::Arima011, 0.5, 1.0, 1, 1) == Approx(1.25).epsilon(1e-15));
    CHECK(oracle_cov_doublesum(LatentModel::Arima011, 0.5, 1.0, 2, 1) == Approx(1.75).epsilon(1e-15));
    for (int t = 1; t <= 9; ++t)
        for (int q = 1; q <= 9; ++q) CHECK(cov_latent_arima011(0.0, 0.8, t, q) == 0.8 * std::min(t, q));
}

TEST_CASE("closed forms match the double sums on the full 50 x 50 grid") {
    for (const double c : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        double e110 = 0.0;
        double e011 = 0.0;
        for (int t = 1; t <= 50; ++t)
            for (int q = 1; q <= 50; ++q) {
                e110 = std::max(e110, std::abs(cov_latent_arima110(c, 1.0, t, q) -
                                               oracle_cov_doublesum(LatentModel::Arima110, c, 1.0, t, q)));
                e011 = std::max(e011, std::abs(cov_latent_arima011(c, 1.0, t, q) -
                                               oracle_cov_doublesum(LatentModel::Arima011, c, 1.0, t, q)));
            }
        CHECK(e110 < 1e-9);
        CHECK(e011 < 1e-9);
    }
}

TEST_CASE("degenerate coefficients reproduce the random-walk grid exactly") {
    const Eigen::Vector3d alpha(-3, -2, -1);
    const Eigen::Vector3d beta(0.2, -0.1, 0.9);
    const PanelDims dims{2, 9};
    const InitialConditions init{0.4, 0, 0};
    const MomentGrid rw = moment_grid(ApRwParams{alpha, beta, 0.2, 0.7, 0.3}, init, dims);
    const MomentGrid a = moment_grid(ApArima110Params{alpha, beta, 0.2, 0.7, 0.3, 0.0}, init, dims);
    const MomentGrid m = moment_grid(ApArima011Params{alpha, beta, 0.2, 0.7, 0.3, 0.0}, init, dims);
    CHECK(a.covs == rw.covs);
    CHECK(m.covs == rw.covs);
    CHECK(a.means == rw.means);
    CHECK(m.means == rw.means);
}

TEST_CASE("single-cell grid") {
    const MomentGrid g = moment_grid(ApRwParams{Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Ones(1), 0.3,
                                                1.5, 0.25},
                                     InitialConditions{0.1, 0, 0}, PanelDims{0, 1});
    CHECK(g.means(0, 0) == Approx(-2.0 + 0.3 + 0.1).epsilon(1e-15));
    CHECK(g.covs(0, 0) == 1.75);
}

TEST_CASE("grid invariants hold for random parameters") {
    Rng r(RngSpec{5, 0});
    for (int i = 0; i < 100; ++i) {
        const int family = i % 4;
        const int X = 1 + i % 5;
        const ModelParams theta = random_theta(r, family, X);
        const MomentGrid g = moment_grid(theta, InitialConditions{0.3, -0.2, 0.1}, PanelDims{X, 8 + i % 7});
        const GridInvariantReport rep = check_grid_invariants(g, measurement_variance(theta));
        CHECK(rep.ok());
        CHECK(rep.asymmetry == 0.0);
    }
}

TEST_CASE("kernel symmetry on a large grid") {
    Rng r(RngSpec{6, 0});
    const int X = 5;
    const int T = 30;
    for (int family = 0; family < 4; ++family) {
        const ModelParams theta = random_theta(r, family, X);
        const MomentGrid g = moment_grid(theta, {}, PanelDims{X, T});
        CHECK((g.covs - g.covs.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("random-walk variance is affine in t") {
    Rng r(RngSpec{7, 0});
    const ModelParams theta = random_theta(r, 0, 3);
    const MomentGrid g = moment_grid(theta, {}, PanelDims{3, 25});
    for (int x = 0; x <= 3; ++x)
        for (int t = 1; t + 2 <= 25; ++t) {
            const double d2 = g.cov(x, x, t + 2, t + 2) - 2.0 * g.cov(x, x, t + 1, t + 1) + g.cov(x, x, t, t);
            CHECK(std::abs(d2) < 1e-12);
        }
}

TEST_CASE("ARIMA(1,1,0) variance second difference is geometric") {
    // V(t+2) - 2V(t+1) + V(t) = 2 gamma(t+1), gamma the AR(1) autocovariance.
    for (const double rho : {-0.7, -0.2, 0.3, 0.8}) {
        const double s2 = 1.4;
        const ApArima110Params p{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.3, 0.7), 0.0, s2, 0.2, rho};
        const MomentGrid g = moment_grid(p, {}, PanelDims{1, 20});
        for (int x = 0; x <= 1; ++x) {
            const double b2 = p.beta[x] * p.beta[x];
            for (int t = 1; t + 2 <= 20; ++t) {
                const double d2 = g.cov(x, x, t + 2, t + 2) - 2.0 * g.cov(x, x, t + 1, t + 1) + g.cov(x, x, t, t);
                const double expected = 2.0 * b2 * s2 * std::pow(rho, t + 1) / (1.0 - rho * rho);
                CHECK(std::abs(d2 - expected) <= 1e-11);
            }
        }
    }
}

TEST_CASE("grid residual and measurement variance") {
    const ModelParams a = ApRwParams{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 0.0, 1.0, 0.25};
    const ModelParams b = ApRwParams{Eigen::Vector2d(0, 0.1), Eigen::Vector2d(0.5, 0.5), 0.0, 1.0, 0.5};
    const GridResidual r = grid_residual(moment_grid(a, {}, {1, 3}), moment_grid(b, {}, {1, 3}));
    CHECK(r.means == Approx(0.1));
    CHECK(r.covs == Approx(0.25));
    CHECK(measurement_variance(a) == 0.25);
}
