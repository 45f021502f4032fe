#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcid/errors.hpp"
#include "lcid/params.hpp"
#include "lcid/rng.hpp"

#include <algorithm>

using namespace lcid;

namespace {

ApRwParams two_age(double b0, double b1) {
    return ApRwParams{Eigen::Vector2d(-1.0, -2.0), Eigen::Vector2d(b0, b1), 0.1, 1.0, 1.0};
}

bool mentions(const ValidationVerdict& v, const std::string& text) {
    return std::any_of(v.violations.begin(), v.violations.end(),
                       [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("half-half loadings are valid") { CHECK(validate(two_age(0.5, 0.5)).ok()); }

TEST_CASE("loadings summing to 1.1 are named in the verdict") {
    const auto v = validate(two_age(0.5, 0.6));
    REQUIRE_FALSE(v.ok());
    CHECK(mentions(v, "sum(beta)=1.1≠1"));
}

TEST_CASE("equal cohort and period loadings are excluded") {
    ApcRwParams p;
    p.alpha = Eigen::Vector2d(0.0, 0.0);
    p.beta0 = Eigen::Vector2d(0.3, 0.7);
    p.beta1 = p.beta0;
    p.sigma2_e0 = p.sigma2_e1 = p.sigma2_eps = 1.0;
    const auto v = validate(p);
    CHECK(mentions(v, "beta0 = beta1 excluded"));
    p.beta1 = Eigen::Vector2d(0.3 + 1e-9, 0.7 - 1e-9);
    CHECK(validate(p).ok());
}

TEST_CASE("variances and AR/MA coefficients are range-checked") {
    ApRwParams p = two_age(0.5, 0.5);
    p.sigma2_e = 0.0;
    CHECK_FALSE(validate(p).ok());
    p = two_age(0.5, 0.5);
    p.sigma2_eps = -1.0;
    CHECK_FALSE(validate(p).ok());

    ApArima110Params a{p.alpha, p.beta, 0.0, 1.0, 1.0, 1.0};
    CHECK(mentions(validate(a), "(-1,1)"));
    a.rho = -0.999;
    CHECK(validate(a).ok());
    ApArima011Params m{p.alpha, p.beta, 0.0, 1.0, 1.0, -1.0};
    CHECK_FALSE(validate(m).ok());
}

TEST_CASE("vector lengths must match dims") {
    const ModelParams p = two_age(0.5, 0.5);
    CHECK(validate(p, PanelDims{1, 4}).ok());
    CHECK_FALSE(validate(p, PanelDims{2, 4}).ok());
    CHECK_FALSE(validate(PanelDims{-1, 3}).ok());
    CHECK_FALSE(validate(PanelDims{0, 0}).ok());
}

TEST_CASE("fully parametric constraint sets") {
    FullyParametricApcParams p;
    p.alpha = Eigen::Vector2d(0.0, 0.0);
    p.beta0 = Eigen::Vector2d(0.5, 0.5);
    p.beta1 = Eigen::Vector2d(0.4, 0.6);
    p.kappa = Eigen::Vector3d(0.0, 1.0, -1.0);
    p.iota = Eigen::Vector4d(1.0, -1.0, 0.0, 0.0);
    p.constraints = ApcConstraintSet::A;
    CHECK(validate(p, 1, 3).ok());
    p.constraints = ApcConstraintSet::B;
    CHECK(validate(p, 1, 3).ok());
    p.kappa = Eigen::Vector3d(0.5, 1.0, -1.0);
    CHECK_FALSE(validate(p, 1, 3).ok());
    p.constraints = ApcConstraintSet::A;
    CHECK(mentions(validate(p, 1, 3), "kappa_1"));
}

TEST_CASE("normalize_betas examples") {
    CHECK(normalize_betas(Eigen::Vector2d(2.0, 2.0)) == Eigen::Vector2d(0.5, 0.5));
    CHECK(normalize_betas(Eigen::Vector3d(1.0, 0.0, 0.0)) == Eigen::Vector3d(1.0, 0.0, 0.0));
    CHECK_THROWS_AS((void)normalize_betas(Eigen::Vector2d(0.5, -0.5)), InputError);
}

TEST_CASE("normalised loadings always validate") {
    Rng rng(RngSpec{11, 0});
    for (int i = 0; i < 2000; ++i) {
        const int n = 1 + static_cast<int>(rng.engine()() % 8);
        Eigen::VectorXd v(n);
        for (int k = 0; k < n; ++k) v[k] = 10.0 * (rng.uniform() - 0.3);
        if (std::abs(v.sum()) <= 1e-9) continue;
        const Eigen::VectorXd b = normalize_betas(v);
        CHECK(std::abs(compensated_sum(b) - 1.0) <= 1e-14);
        ApRwParams p{Eigen::VectorXd::Zero(n), b, 0.0, 1.0, 1.0};
        CHECK(validate(p).ok());
    }
}

TEST_CASE("family tags round trip") {
    for (const Family f : {Family::ApRw, Family::ApArima110, Family::ApArima011, Family::ApcRw}) {
        CHECK(family_from_tag(family_tag(f)) == f);
    }
    CHECK(family_tag(Family::ApRw) == "ap_rw");
    CHECK(family_tag(Family::ApcRw) == "apc_rw");
    CHECK_THROWS_AS((void)family_from_tag("ap_garch"), InputError);
}

TEST_CASE("checked throws with the violation list") {
    CHECK_NOTHROW((void)checked(two_age(0.25, 0.75)));
    CHECK_THROWS_WITH_AS((void)checked(two_age(0.5, 0.6)), doctest::Contains("sum(beta)"), InputError);
}
