#include "lcid/identify.hpp"

#include <cmath>

namespace lcid {

std::string_view verdict_name(Verdict v) noexcept {
    switch (v) {
        case Verdict::Equivalent: return "equivalent";
        case Verdict::Distinct: return "distinct";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Eigen::VectorXd canonical_vector(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> Eigen::VectorXd {
            using P = std::decay_t<decltype(p)>;
            const Eigen::Index n = p.alpha.size();
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                Eigen::VectorXd v(3 * n + 5);
                v << p.alpha, p.beta0, p.beta1, p.mu0, p.mu1, std::log(p.sigma2_e0), std::log(p.sigma2_e1),
                    std::log(p.sigma2_eps);
                return v;
            } else if constexpr (std::is_same_v<P, ApRwParams>) {
                Eigen::VectorXd v(2 * n + 3);
                v << p.alpha, p.beta, p.mu, std::log(p.sigma2_e), std::log(p.sigma2_eps);
                return v;
            } else if constexpr (std::is_same_v<P, ApArima110Params>) {
                Eigen::VectorXd v(2 * n + 4);
                v << p.alpha, p.beta, p.mu, std::log(p.sigma2_e), std::log(p.sigma2_eps), p.rho;
                return v;
            } else {
                Eigen::VectorXd v(2 * n + 4);
                v << p.alpha, p.beta, p.mu, std::log(p.sigma2_e), std::log(p.sigma2_eps), p.phi;
                return v;
            }
        },
        params);
}

double param_distance(const ModelParams& a, const ModelParams& b) {
    if (a.index() != b.index()) throw InputError("param_distance: parameter families differ");
    const Eigen::VectorXd va = canonical_vector(a);
    const Eigen::VectorXd vb = canonical_vector(b);
    if (va.size() != vb.size()) throw InputError("param_distance: parameter dimensions differ");
    return (va - vb).cwiseAbs().maxCoeff();
}

Verdict classify(double momentResidual, double paramDistance, const EquivalenceOptions& options) noexcept {
    if (momentResidual <= options.epsilonM) return Verdict::Equivalent;
    if (paramDistance >= options.delta) return Verdict::Distinct;
    return Verdict::Inconclusive;
}

EquivalenceReport check_equivalence(const ModelParams& thetaA, const ModelParams& thetaB, const InitialConditions& init,
                                    const PanelDims& dims, const EquivalenceOptions& options) {
    if (thetaA.index() != thetaB.index()) {
        throw InputError("check_equivalence: family mismatch (" + std::string(family_tag(family_of(thetaA))) +
                         " vs " + std::string(family_tag(family_of(thetaB))) + ")");
    }
    EquivalenceReport r{thetaA, thetaB};
    const MomentGrid ga = moment_grid(thetaA, init, dims);
    const MomentGrid gb = moment_grid(thetaB, init, dims);
    const GridResidual res = grid_residual(ga, gb);
    r.meanResidual = res.means;
    r.covResidual = res.covs;
    r.momentResidual = options.includeCovariances ? res.total() : res.means;
    r.paramDistance = param_distance(thetaA, thetaB);
    r.verdict = classify(r.momentResidual, r.paramDistance, options);
    return r;
}

}  // namespace lcid
