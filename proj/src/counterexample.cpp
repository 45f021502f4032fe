#include "lcid/identify.hpp"

#include <cmath>
#include <string>

namespace lcid {

std::pair<ApRwParams, ApRwParams> counterexample_ap_means_mu0(const Eigen::VectorXd& beta,
                                                             const Eigen::VectorXd& betaTilde,
                                                             const Eigen::VectorXd& alpha, double c, double sigma2_e,
                                                             double sigma2_eps) {
    if (beta.size() != betaTilde.size() || beta.size() != alpha.size()) {
        throw InputError("counterexample_ap_means_mu0: alpha, beta and betaTilde must share a length");
    }
    if ((beta - betaTilde).cwiseAbs().maxCoeff() == 0.0) {
        throw InputError("counterexample_ap_means_mu0: beta and betaTilde must differ");
    }
    ApRwParams a{alpha, beta, 0.0, sigma2_e, sigma2_eps};
    ApRwParams b{alpha + c * (beta - betaTilde), betaTilde, 0.0, sigma2_e, sigma2_eps};
    return {checked(std::move(a)), checked(std::move(b))};
}

Eigen::MatrixXd fully_parametric_predictor(const FullyParametricApcParams& p, int X, int T) {
    Eigen::MatrixXd out(X + 1, T);
    for (int x = 0; x <= X; ++x) {
        for (int t = 1; t <= T; ++t) {
            out(x, t - 1) = p.alpha[x] + p.beta1[x] * p.kappa[t - 1] + p.beta0[x] * p.iota[t - x + X - 1];
        }
    }
    return out;
}

namespace {

Eigen::MatrixXd cohort_term(const FullyParametricApcParams& p, int X, int T) {
    Eigen::MatrixXd out(X + 1, T);
    for (int x = 0; x <= X; ++x)
        for (int t = 1; t <= T; ++t) out(x, t - 1) = p.beta0[x] * p.iota[t - x + X - 1];
    return out;
}

double fully_parametric_distance(const FullyParametricApcParams& a, const FullyParametricApcParams& b) {
    double d = (a.alpha - b.alpha).cwiseAbs().maxCoeff();
    d = std::max(d, (a.beta0 - b.beta0).cwiseAbs().maxCoeff());
    d = std::max(d, (a.beta1 - b.beta1).cwiseAbs().maxCoeff());
    d = std::max(d, (a.kappa - b.kappa).cwiseAbs().maxCoeff());
    return std::max(d, (a.iota - b.iota).cwiseAbs().maxCoeff());
}

}  // namespace

FullyParametricPair counterexample_apc_fullyparam(int X, int T) {
    if (X <= 2 || T <= 2) throw InputError("counterexample_apc_fullyparam requires X > 2 and T > 2");

    // Shared part satisfying both constraint sets: equal positive period
    // loadings, kappa_1 = 0 and sum kappa = 0.
    FullyParametricApcParams shared;
    shared.alpha = Eigen::VectorXd::LinSpaced(X + 1, -6.0, -1.0);
    shared.beta1 = Eigen::VectorXd::Constant(X + 1, 1.0 / (X + 1));
    shared.kappa = Eigen::VectorXd::Zero(T);
    shared.kappa[1] = 1.0;
    shared.kappa[2] = -1.0;

    auto iota_at = [X](Eigen::VectorXd& iota, int h) -> double& { return iota[h + X - 1]; };

    FullyParametricPair out;
    out.a = shared;
    out.a.beta0 = Eigen::VectorXd::Zero(X + 1);
    out.a.beta0[0] = 0.75;
    out.a.beta0[1] = 0.25;
    out.a.iota = Eigen::VectorXd::Zero(T + X);
    iota_at(out.a.iota, 1 - X) = -2.0;
    iota_at(out.a.iota, 0) = 1.0;
    iota_at(out.a.iota, T) = 1.0;

    out.b = shared;
    out.b.beta0 = Eigen::VectorXd::Zero(X + 1);
    out.b.beta0[0] = 0.5;
    out.b.beta0[1] = 0.5;
    out.b.iota = Eigen::VectorXd::Zero(T + X);
    iota_at(out.b.iota, 1 - X) = -2.0;
    iota_at(out.b.iota, 0) = 0.5;
    iota_at(out.b.iota, T) = 1.5;

    out.predictorA = fully_parametric_predictor(out.a, X, T);
    out.predictorB = fully_parametric_predictor(out.b, X, T);
    out.cohortTermA = cohort_term(out.a, X, T);
    out.cohortTermB = cohort_term(out.b, X, T);
    out.residual = (out.predictorA - out.predictorB).cwiseAbs().maxCoeff();
    out.paramDistance = fully_parametric_distance(out.a, out.b);
    return out;
}

std::pair<ApcRwParams, ApcRwParams> counterexample_apc_equal_loadings(const ApcRwParams& p) {
    if (p.beta0.size() != p.beta1.size() || p.beta0.size() != p.alpha.size()) {
        throw InputError("counterexample_apc_equal_loadings: vector lengths differ");
    }
    if ((p.beta0 - p.beta1).cwiseAbs().maxCoeff() > kDistinctLoadingsTolerance) {
        throw InputError("counterexample_apc_equal_loadings requires beta0 == beta1");
    }
    if (p.mu0 == p.mu1) throw InputError("counterexample_apc_equal_loadings requires mu0 != mu1");
    if (!(p.sigma2_e0 > 0.0 && p.sigma2_e1 > 0.0 && p.sigma2_eps > 0.0)) {
        throw InputError("counterexample_apc_equal_loadings: variances must be positive");
    }

    const int X = static_cast<int>(p.alpha.size()) - 1;
    ApcRwParams b = p;
    b.beta0 = p.beta0;
    b.beta1 = p.beta0;
    b.mu0 = p.mu1;
    b.mu1 = p.mu0;
    for (int x = 0; x <= X; ++x) {
        b.alpha[x] = p.alpha[x] - (X - x) * b.beta0[x] * b.mu0 + (X - x) * b.beta1[x] * p.mu0;
    }
    return {p, b};
}

std::pair<ApcRwParams, ApcRwParams> counterexample_apc_x0_variance_trade(const ApcRwParams& p, double z) {
    if (p.alpha.size() != 1) throw InputError("counterexample_apc_x0_variance_trade requires X = 0");
    if (!(z > -p.sigma2_e0 && z < p.sigma2_e1)) {
        throw InputError("z=" + std::to_string(z) + " outside (-sigma2_e0, sigma2_e1)");
    }
    ApcRwParams b = p;
    b.sigma2_e0 = p.sigma2_e0 + z;
    b.sigma2_e1 = p.sigma2_e1 - z;
    return {p, b};
}

}  // namespace lcid
