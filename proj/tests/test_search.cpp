#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcid/errors.hpp"
#include "lcid/identify.hpp"

using namespace lcid;

namespace {

ApRwParams ap() { return ApRwParams{Eigen::Vector3d(-3, -2, -1), Eigen::Vector3d(0.2, 0.3, 0.5), 0.1, 1.0, 0.4}; }

ApcRwParams equal_loadings() {
    ApcRwParams p;
    p.alpha = Eigen::Vector2d(-2, -1);
    p.beta0 = p.beta1 = Eigen::Vector2d(0.4, 0.6);
    p.mu0 = 0.3;
    p.mu1 = -0.2;
    p.sigma2_e0 = 1.0;
    p.sigma2_e1 = 2.0;
    p.sigma2_eps = 0.5;
    return p;
}

SearchOptions quick(int starts = 8) {
    SearchOptions o;
    o.nStarts = starts;
    o.maxEvaluations = 20000;
    return o;
}

}  // namespace

TEST_CASE("identified random walk: nothing equivalent at distance 1e-3") {
    const SearchReport rep = search_equivalent(ap(), {}, {2, 6}, quick(), RngSpec{1, 0});
    CHECK_FALSE(rep.found);
    CHECK(rep.best.momentResidual > 1e-6);
    CHECK(rep.best.paramDistance >= 1e-3);
    CHECK(rep.summary.find("supports") != std::string::npos);
    CHECK(rep.summary.find("not a proof") != std::string::npos);
}

TEST_CASE("lifting the loading exclusion exposes the drift swap") {
    SearchOptions o = quick();
    o.liftLoadingExclusion = true;
    const SearchReport rep = search_equivalent(equal_loadings(), {}, {1, 6}, o, RngSpec{2, 0});
    CHECK(rep.found);
    CHECK(rep.best.momentResidual < 1e-10);
    CHECK(rep.best.verdict == Verdict::Equivalent);
}

TEST_CASE("single-age cohort model admits a variance trade") {
    ApcRwParams p;
    p.alpha = Eigen::VectorXd::Constant(1, -1.0);
    p.beta0 = p.beta1 = Eigen::VectorXd::Ones(1);
    p.mu0 = 0.3;
    p.mu1 = -0.2;
    p.sigma2_e0 = 1.0;
    p.sigma2_e1 = 2.0;
    p.sigma2_eps = 0.5;
    const SearchReport rep = search_equivalent(p, {}, {0, 6}, quick(), RngSpec{3, 0});
    CHECK(rep.found);
    CHECK(rep.best.momentResidual < 1e-10);
}

TEST_CASE("equal loadings without the lift are rejected") {
    CHECK_THROWS_AS((void)search_equivalent(equal_loadings(), {}, {1, 6}, quick(), RngSpec{4, 0}), InputError);
    SearchOptions bad = quick();
    bad.delta = 0.0;
    CHECK_THROWS_AS((void)search_equivalent(ap(), {}, {2, 6}, bad, RngSpec{4, 0}), InputError);
}

TEST_CASE("search results do not depend on the thread count") {
    SearchOptions one = quick(6);
    one.threads = 1;
    SearchOptions many = quick(6);
    many.threads = 3;
    const SearchReport a = search_equivalent(ap(), {}, {2, 5}, one, RngSpec{5, 0});
    const SearchReport b = search_equivalent(ap(), {}, {2, 5}, many, RngSpec{5, 0});
    CHECK(a.bestStart == b.bestStart);
    CHECK(a.best.momentResidual == b.best.momentResidual);
    CHECK(canonical_vector(a.best.thetaB) == canonical_vector(b.best.thetaB));
}

TEST_CASE("an equivalent verdict always means grids agree to epsilon") {
    for (const auto& [theta, dims, lift] :
         {std::tuple<ModelParams, PanelDims, bool>{ap(), {2, 4}, false},
          std::tuple<ModelParams, PanelDims, bool>{equal_loadings(), {1, 5}, true}}) {
        SearchOptions o = quick(4);
        o.liftLoadingExclusion = lift;
        const SearchReport rep = search_equivalent(theta, {}, dims, o, RngSpec{6, 0});
        const GridResidual r = grid_residual(moment_grid(rep.best.thetaA, {}, dims), moment_grid(rep.best.thetaB, {}, dims));
        if (rep.best.verdict == Verdict::Equivalent) CHECK(r.total() <= o.epsilonM);
        CHECK(r.total() == rep.best.momentResidual);
    }
}
