#include "lcid/verification.hpp"

#include "lcid/errors.hpp"
#include "lcid/estimate.hpp"
#include "lcid/identify.hpp"
#include "lcid/moments.hpp"
#include "lcid/oracle.hpp"
#include "lcid/simulate.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace lcid {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "FAILED " << what << "; ";
        }
    }
};

double uniform(Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

int pick(Rng& r, int lo, int hi) { return lo + static_cast<int>(r.engine()() % static_cast<std::uint64_t>(hi - lo + 1)); }

Eigen::VectorXd random_vector(Rng& r, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(r, lo, hi);
    return v;
}

Eigen::VectorXd random_loadings(Rng& r, int n) { return normalize_betas(random_vector(r, n, 0.1, 1.0)); }

ApRwParams random_ap_rw(Rng& r, int X) {
    return ApRwParams{random_vector(r, X + 1, -8.0, -1.0), random_loadings(r, X + 1), uniform(r, -0.5, 0.5),
                      uniform(r, 0.1, 2.0), uniform(r, 0.05, 1.0)};
}

ApcRwParams random_apc_rw(Rng& r, int X) {
    ApcRwParams p;
    p.alpha = random_vector(r, X + 1, -8.0, -1.0);
    p.beta0 = random_loadings(r, X + 1);
    p.beta1 = random_loadings(r, X + 1);
    p.mu0 = uniform(r, -0.5, 0.5);
    p.mu1 = uniform(r, -0.5, 0.5);
    p.sigma2_e0 = uniform(r, 0.1, 2.0);
    p.sigma2_e1 = uniform(r, 0.1, 2.0);
    p.sigma2_eps = uniform(r, 0.05, 1.0);
    return p;
}

InitialConditions random_init(Rng& r) { return {uniform(r, -1.0, 1.0), uniform(r, -1.0, 1.0), uniform(r, -1.0, 1.0)}; }

// Max absolute difference over every scalar of two same-family values.
double raw_error(const ModelParams& a, const ModelParams& b) {
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            const P& q = std::get<P>(b);
            double e = (p.alpha - q.alpha).cwiseAbs().maxCoeff();
            e = std::max(e, std::abs(p.sigma2_eps - q.sigma2_eps));
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                e = std::max(e, (p.beta0 - q.beta0).cwiseAbs().maxCoeff());
                e = std::max(e, (p.beta1 - q.beta1).cwiseAbs().maxCoeff());
                e = std::max({e, std::abs(p.mu0 - q.mu0), std::abs(p.mu1 - q.mu1)});
                e = std::max({e, std::abs(p.sigma2_e0 - q.sigma2_e0), std::abs(p.sigma2_e1 - q.sigma2_e1)});
            } else {
                e = std::max(e, (p.beta - q.beta).cwiseAbs().maxCoeff());
                e = std::max({e, std::abs(p.mu - q.mu), std::abs(p.sigma2_e - q.sigma2_e)});
            }
            if constexpr (std::is_same_v<P, ApArima110Params>) e = std::max(e, std::abs(p.rho - q.rho));
            if constexpr (std::is_same_v<P, ApArima011Params>) e = std::max(e, std::abs(p.phi - q.phi));
            return e;
        },
        a);
}

// Round trip theta -> grid -> recover; returns the raw error, or infinity
// if recovery threw.
double round_trip(const ModelParams& theta, const InitialConditions& init, const PanelDims& dims,
                  std::string& failure) {
    try {
        const MomentGrid grid = moment_grid(theta, init, dims);
        return raw_error(recover(family_of(theta), grid, init).thetaHat, theta);
    } catch (const std::exception& e) {
        failure = e.what();
        return std::numeric_limits<double>::infinity();
    }
}

CriterionResult latent_closed_forms(const VerificationOptions&) {
    Outcome o;
    const double coefs[] = {-0.9, -0.5, 0.0, 0.5, 0.9};
    double err110 = 0.0;
    double err011 = 0.0;
    double errRw = 0.0;
    for (const double c : coefs) {
        for (int t = 1; t <= 50; ++t) {
            for (int q = 1; q <= 50; ++q) {
                err110 = std::max(err110, std::abs(cov_latent_arima110(c, 1.0, t, q) -
                                                   oracle_cov_doublesum(LatentModel::Arima110, c, 1.0, t, q)));
                err011 = std::max(err011, std::abs(cov_latent_arima011(c, 1.0, t, q) -
                                                   oracle_cov_doublesum(LatentModel::Arima011, c, 1.0, t, q)));
            }
        }
    }
    for (int t = 1; t <= 50; ++t)
        for (int q = 1; q <= 50; ++q)
            errRw = std::max(errRw, std::abs(cov_latent_rw(1.5, t, q) -
                                             oracle_cov_doublesum(LatentModel::RandomWalk, 0.0, 1.5, t, q)));
    o.require(err110 < 1e-9, "ARIMA(1,1,0) closed form");
    o.require(err011 < 1e-9, "ARIMA(0,1,1) closed form");
    o.require(errRw == 0.0, "random-walk closed form");
    o.detail << "max |closed - double sum|: arima110 " << err110 << ", arima011 " << err011 << ", rw " << errRw;
    return {1, "latent covariance closed forms", o.passed, o.detail.str(), 0.0};
}

CriterionResult monte_carlo_moments(const VerificationOptions& options) {
    Outcome o;
    const long reps = options.quick ? 2000 : 10000;
    struct Case {
        const char* name;
        ModelParams theta;
        PanelDims dims;
    };
    const Eigen::Vector3d alpha(-4.0, -3.0, -2.0);
    const Eigen::Vector3d beta(0.2, 0.3, 0.5);
    ApcRwParams apc;
    apc.alpha = Eigen::Vector4d(-5.0, -4.0, -3.0, -2.0);
    apc.beta0 = Eigen::Vector4d(0.4, 0.3, 0.2, 0.1);
    apc.beta1 = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
    apc.mu0 = -0.1;
    apc.mu1 = 0.2;
    apc.sigma2_e0 = 0.8;
    apc.sigma2_e1 = 1.2;
    apc.sigma2_eps = 0.3;
    const Case cases[] = {
        {"ap_rw", ApRwParams{alpha, beta, -0.2, 1.0, 0.25}, {2, 10}},
        {"apc_rw", apc, {3, 12}},
        {"ap_arima110", ApArima110Params{alpha, beta, -0.2, 1.0, 0.25, 0.6}, {2, 10}},
        {"ap_arima011", ApArima011Params{alpha, beta, -0.2, 1.0, 0.25, -0.5}, {2, 10}},
    };
    const InitialConditions init{0.5, -0.3, 0.2};
    std::uint64_t stream = 0;
    for (const Case& c : cases) {
        const McMoments mc = mc_moments(c.theta, init, c.dims, reps, RngSpec{options.seed, ++stream}, {},
                                        options.threads);
        const McComparison cmp = compare_moments(mc, moment_grid(c.theta, init, c.dims));
        o.require(cmp.meanFraction >= 0.99, std::string(c.name) + " means");
        o.require(cmp.covFraction >= 0.98, std::string(c.name) + " covariances");
        o.detail << c.name << ": means " << cmp.meanFraction << ", covs " << cmp.covFraction << "; ";
    }
    o.detail << reps << " replicates";
    return {2, "Monte Carlo moments", o.passed, o.detail.str(), 0.0};
}

CriterionResult random_walk_identification(const VerificationOptions& options) {
    Outcome o;
    Rng r(RngSpec{options.seed, 3});
    double worst = 0.0;
    std::string failure;
    for (int i = 0; i < 100; ++i) {
        const int X = pick(r, 0, 4);
        const int T = pick(r, 2, 30);
        worst = std::max(worst, round_trip(random_ap_rw(r, X), random_init(r), PanelDims{X, T}, failure));
    }
    o.require(worst < 1e-8, "round trip" + (failure.empty() ? "" : " (" + failure + ")"));
    o.detail << "round-trip max error " << worst << " over 100 values; ";

    const int searches = options.quick ? 4 : 20;
    SearchOptions so;
    so.delta = 1e-3;
    so.threads = options.threads;
    double smallest = std::numeric_limits<double>::infinity();
    int found = 0;
    for (int i = 0; i < searches; ++i) {
        const int X = pick(r, 0, 2);
        const int T = pick(r, 2, 8);
        const SearchReport rep = search_equivalent(random_ap_rw(r, X), random_init(r), PanelDims{X, T}, so,
                                                   RngSpec{options.seed, 1000 + static_cast<std::uint64_t>(i)});
        found += rep.found;
        smallest = std::min(smallest, rep.best.momentResidual);
    }
    o.require(found == 0, "search found an equivalent");
    o.detail << searches << " searches at delta 1e-3, smallest best residual " << smallest;
    return {3, "random-walk age-period identification", o.passed, o.detail.str(), 0.0};
}

template <typename Fn>
bool throws_input_error(Fn&& fn) {
    try {
        fn();
    } catch (const InputError&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

CriterionResult cohort_identification(const VerificationOptions& options) {
    Outcome o;
    Rng r(RngSpec{options.seed, 4});
    double worst = 0.0;
    std::string failure;
    for (int i = 0; i < 100; ++i) {
        const int X = pick(r, 1, 3);
        worst = std::max(worst, round_trip(random_apc_rw(r, X), random_init(r), PanelDims{X, X + 4}, failure));
    }
    o.require(worst < 1e-7, "round trip" + (failure.empty() ? "" : " (" + failure + ")"));
    o.detail << "round-trip max error " << worst << " over 100 values; ";

    ApcRwParams single = random_apc_rw(r, 0);
    single.beta1 = single.beta0;
    const bool refusesX0 = throws_input_error([&] {
        (void)recover_apc_rw(moment_grid(single, {}, PanelDims{0, 6}), {});
    });
    bool refusesShort = true;
    for (int X = 1; X <= 3; ++X) {
        for (int T = 1; T <= X + 2; ++T) {
            const ApcRwParams p = random_apc_rw(r, X);
            refusesShort = refusesShort && throws_input_error([&] {
                (void)recover_apc_rw(moment_grid(p, {}, PanelDims{X, T}), {});
            });
        }
    }
    o.require(refusesX0, "refusal at X = 0");
    o.require(refusesShort, "refusal at T <= X + 2");
    o.detail << "refuses X = 0: " << (refusesX0 ? "yes" : "no") << ", refuses T <= X + 2: "
             << (refusesShort ? "yes" : "no");
    return {4, "cohort identification", o.passed, o.detail.str(), 0.0};
}

CriterionResult arima_identification(const VerificationOptions& options) {
    Outcome o;
    Rng r(RngSpec{options.seed, 5});
    double worst110 = 0.0;
    double worst011 = 0.0;
    std::string failure;
    for (const double rho : {-0.8, -0.3, 0.0, 0.3, 0.8})
        for (const int X : {0, 1, 3})
            for (const int T : {4, 10, 30}) {
                const ApRwParams b = random_ap_rw(r, X);
                const ApArima110Params p{b.alpha, b.beta, b.mu, b.sigma2_e, b.sigma2_eps, rho};
                worst110 = std::max(worst110, round_trip(p, random_init(r), PanelDims{X, T}, failure));
            }
    bool rootsInside = true;
    for (const double phi : {-0.9, -0.4, 0.0, 0.4, 0.9})
        for (const int X : {0, 2})
            for (const int T : {2, 10, 30}) {
                const ApRwParams b = random_ap_rw(r, X);
                const ApArima011Params p{b.alpha, b.beta, b.mu, b.sigma2_e, b.sigma2_eps, phi};
                const InitialConditions init = random_init(r);
                worst011 = std::max(worst011, round_trip(p, init, PanelDims{X, T}, failure));
                try {
                    const auto rec = recover_ap_arima011(moment_grid(p, init, PanelDims{X, T}), init);
                    rootsInside = rootsInside && std::abs(rec.thetaHat.phi) < 1.0;
                } catch (const std::exception&) {
                    rootsInside = false;
                }
            }
    for (int i = 0; i <= 1000; ++i) {
        const double phi = -0.999 + 1.998 * i / 1000.0;
        const Ma1Roots roots = ma1_roots(phi / ((1.0 + phi) * (1.0 + phi)));
        rootsInside = rootsInside && std::abs(roots.inside) < 1.0 && std::abs(roots.inside - phi) < 1e-6;
    }
    o.require(worst110 < 1e-6, "ARIMA(1,1,0) round trip" + (failure.empty() ? "" : " (" + failure + ")"));
    o.require(worst011 < 1e-6, "ARIMA(0,1,1) round trip");
    o.require(rootsInside, "MA(1) root selection");
    o.detail << "max error arima110 " << worst110 << ", arima011 " << worst011
             << "; invertible root always selected: " << (rootsInside ? "yes" : "no");
    return {5, "ARIMA identification", o.passed, o.detail.str(), 0.0};
}

CriterionResult counterexamples(const VerificationOptions&) {
    Outcome o;
    const PanelDims dims{1, 6};
    const auto [a, b] = counterexample_ap_means_mu0(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.6, 0.4),
                                                    Eigen::Vector2d(-1.0, -2.0), 2.0);
    const InitialConditions initC{2.0, 0.0, 0.0};
    const GridResidual rMeans = grid_residual(moment_grid(a, initC, dims), moment_grid(b, initC, dims));
    const double betaDistance = (a.beta - b.beta).cwiseAbs().maxCoeff();
    o.require(rMeans.means < 1e-14 && betaDistance >= 0.1, "mu = 0 mean pair");
    o.detail << "(a) mean residual " << rMeans.means << ", beta distance " << betaDistance << "; ";

    const FullyParametricPair fp = counterexample_apc_fullyparam(3, 5);
    FullyParametricApcParams fa = fp.a;
    FullyParametricApcParams fb = fp.b;
    bool bothSets = true;
    for (const auto set : {ApcConstraintSet::A, ApcConstraintSet::B}) {
        fa.constraints = set;
        fb.constraints = set;
        bothSets = bothSets && validate(fa, 3, 5).ok() && validate(fb, 3, 5).ok();
    }
    o.require(fp.residual == 0.0 && fp.paramDistance > 0.0 && bothSets, "fully parametric cohort pair");
    o.detail << "(b) predictor residual " << fp.residual << ", valid under both constraint sets: "
             << (bothSets ? "yes" : "no") << "; ";

    ApcRwParams eq;
    eq.alpha = Eigen::Vector3d(-3.0, -2.0, -1.0);
    eq.beta0 = Eigen::Vector3d(0.2, 0.3, 0.5);
    eq.beta1 = eq.beta0;
    eq.mu0 = 0.3;
    eq.mu1 = -0.1;
    eq.sigma2_e0 = 1.0;
    eq.sigma2_e1 = 0.5;
    eq.sigma2_eps = 0.2;
    const auto [e1, e2] = counterexample_apc_equal_loadings(eq);
    const InitialConditions initE{0.0, 0.4, -0.2};
    const GridResidual rSwap = grid_residual(moment_grid(e1, initE, {2, 8}), moment_grid(e2, initE, {2, 8}));
    o.require(rSwap.total() < 1e-12, "drift swap pair");
    o.detail << "(c) drift-swap residual " << rSwap.total() << "; ";

    ApcRwParams x0;
    x0.alpha = Eigen::VectorXd::Constant(1, -2.0);
    x0.beta0 = Eigen::VectorXd::Ones(1);
    x0.beta1 = x0.beta0;
    x0.mu0 = 0.1;
    x0.mu1 = 0.2;
    x0.sigma2_e0 = 1.0;
    x0.sigma2_e1 = 2.0;
    x0.sigma2_eps = 0.5;
    const auto [v1, v2] = counterexample_apc_x0_variance_trade(x0, 0.5);
    const GridResidual rTrade = grid_residual(moment_grid(v1, {}, {0, 10}), moment_grid(v2, {}, {0, 10}));
    o.require(rTrade.total() == 0.0, "variance trade");
    o.detail << "(d) variance-trade residual " << rTrade.total();
    return {6, "counterexample exactness", o.passed, o.detail.str(), 0.0};
}

CriterionResult sum_to_zero_demos(const VerificationOptions& options) {
    Outcome o;
    const long reps = options.quick ? 10000 : 100000;
    const DistributionalReport dist =
        demo_distributional_constraint(0.1, 1.0, 0.0, 20, reps, RngSpec{options.seed, 7}, options.threads);
    const double z = std::abs(dist.varSum - dist.varSumExact) / dist.varSumSe;
    o.require(dist.fractionBelow1e6 == 0.0, "zero fraction at 1e-6");
    o.require(z <= 4.0, "variance of the sum");
    o.detail << "fraction |sum| < 1e-6: " << dist.fractionBelow1e6 << " over " << reps << " paths, var z-score " << z
             << "; ";

    Rng r(RngSpec{options.seed, 8});
    const PanelDims dims{4, 21};
    const ApRwParams theta{Eigen::VectorXd::LinSpaced(5, -6.0, -2.0), normalize_betas(random_vector(r, 5, 0.1, 1.0)),
                           -0.3, 0.5, 0.01};
    const Surface longer = simulate_surface(theta, {}, dims, r);
    const Surface shorter{PanelDims{4, 20}, longer.values.leftCols(20)};
    const DynamicReport dyn = demo_dynamic_constraint(shorter, longer);
    bool allZero = true;
    for (const double v : dyn.forcedSequence) allZero = allZero && v == 0.0;
    o.require(dyn.forcedNext == 0.0 && allZero, "forced zero extension");
    o.detail << "forced kappa_{T+1} = " << dyn.forcedNext << ", re-estimation shift " << dyn.maxKappaShift;
    return {7, "sum-to-zero demonstrations", o.passed, o.detail.str(), 0.0};
}

CriterionResult stage_one(const VerificationOptions& options) {
    Outcome o;
    Rng r(RngSpec{options.seed, 9});
    double worst = 0.0;
    double constraint = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int X = pick(r, 0, 6);
        const int T = pick(r, 2, 40);
        const Eigen::VectorXd alpha = random_vector(r, X + 1, -8.0, -1.0);
        const Eigen::VectorXd beta = normalize_betas(random_vector(r, X + 1, 0.05, 1.0));
        Eigen::VectorXd kappa = random_vector(r, T, -5.0, 5.0);
        kappa.array() -= kappa.mean();
        kappa[T - 1] = -kappa.head(T - 1).sum();
        const Surface s{PanelDims{X, T}, (alpha * Eigen::RowVectorXd::Ones(T)) + beta * kappa.transpose()};
        const FitResult f = fit_lee_carter_stage1(s);
        worst = std::max({worst, (f.alphaHat - alpha).cwiseAbs().maxCoeff(), (f.betaHat - beta).cwiseAbs().maxCoeff(),
                          (f.kappaHat - kappa).cwiseAbs().maxCoeff()});
        constraint = std::max({constraint, std::abs(f.betaHat.sum() - 1.0), std::abs(f.kappaHat.sum())});

        const ApRwParams theta{alpha, beta, uniform(r, -0.5, 0.5), uniform(r, 0.1, 2.0), uniform(r, 0.05, 1.0)};
        const FitResult noisy = fit_lee_carter_stage1(simulate_surface(theta, {}, PanelDims{X, T}, r));
        constraint = std::max({constraint, std::abs(noisy.betaHat.sum() - 1.0), std::abs(noisy.kappaHat.sum())});
    }
    o.require(worst <= 1e-10, "noiseless recovery");
    o.require(constraint <= 1e-10, "ad hoc constraints");
    o.detail << "noiseless max error " << worst << ", max constraint violation " << constraint;
    return {8, "stage-one exactness", o.passed, o.detail.str(), 0.0};
}

}  // namespace

CriterionResult run_criterion(int id, const VerificationOptions& options) {
    using Fn = CriterionResult (*)(const VerificationOptions&);
    static const Fn table[kCriterionCount] = {latent_closed_forms,  monte_carlo_moments,   random_walk_identification,
                                              cohort_identification, arima_identification, counterexamples,
                                              sum_to_zero_demos,    stage_one};
    if (id < 1 || id > kCriterionCount) throw InputError("criterion id must be in 1.." + std::to_string(kCriterionCount));
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
        res = table[id - 1](options);
    } catch (const std::exception& e) {
        res = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0};
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::vector<CriterionResult> run_all_criteria(const VerificationOptions& options) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
    return out;
}

}  // namespace lcid
