#pragma once

// Observational equivalence of plug-in Lee-Carter parameterisations:
// equivalence checks, the constructive non-identifiability counterexamples,
// moment inversion for the identified families, and a numerical search for
// equivalent parameter values.

#include "lcid/moments.hpp"
#include "lcid/params.hpp"
#include "lcid/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace lcid {

enum class Verdict { Equivalent, Distinct, Inconclusive };

[[nodiscard]] std::string_view verdict_name(Verdict v) noexcept;

struct EquivalenceOptions {
    double epsilonM = 1e-10;  ///< moment residual at or below which grids are equal
    double delta = 1e-6;      ///< parameter distance at or above which values differ
    bool includeCovariances = true;
};

struct EquivalenceReport {
    ModelParams thetaA;
    ModelParams thetaB;
    double meanResidual = 0.0;
    double covResidual = 0.0;
    double momentResidual = 0.0;  ///< max of the two above (covariances only if included)
    double paramDistance = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

/// Canonical flattening used for parameter distances: alpha, loadings,
/// drifts, log-variances, then rho or phi.
[[nodiscard]] Eigen::VectorXd canonical_vector(const ModelParams& params);
[[nodiscard]] double param_distance(const ModelParams& a, const ModelParams& b);

/// Throws InputError when the two values belong to different families or
/// do not fit dims.
[[nodiscard]] EquivalenceReport check_equivalence(const ModelParams& thetaA, const ModelParams& thetaB,
                                                  const InitialConditions& init, const PanelDims& dims,
                                                  const EquivalenceOptions& options = {});

[[nodiscard]] Verdict classify(double momentResidual, double paramDistance, const EquivalenceOptions& options) noexcept;

// ---------------------------------------------------------------------------
// Counterexamples

/// Two random-walk age-period values with mu = 0 and equal mean grids:
/// alphaTilde_x = alpha_x + c (beta_x - betaTilde_x). The variances are
/// shared and do not enter the means.
[[nodiscard]] std::pair<ApRwParams, ApRwParams> counterexample_ap_means_mu0(const Eigen::VectorXd& beta,
                                                                           const Eigen::VectorXd& betaTilde,
                                                                           const Eigen::VectorXd& alpha, double c,
                                                                           double sigma2_e = 1.0,
                                                                           double sigma2_eps = 1.0);

struct FullyParametricPair {
    FullyParametricApcParams a;
    FullyParametricApcParams b;
    Eigen::MatrixXd predictorA;  ///< alpha_x + beta1_x kappa_t + beta0_x iota_{t-x}
    Eigen::MatrixXd predictorB;
    Eigen::MatrixXd cohortTermA;  ///< beta0_x iota_{t-x}
    Eigen::MatrixXd cohortTermB;
    double residual = 0.0;       ///< max |predictorA - predictorB|
    double paramDistance = 0.0;  ///< max-norm over (alpha, beta0, beta1, kappa, iota)
};

/// alpha_x + beta1_x kappa_t + beta0_x iota_{t-x} over the panel.
[[nodiscard]] Eigen::MatrixXd fully_parametric_predictor(const FullyParametricApcParams& p, int X, int T);

/// The two fully parametric cohort parameterisations with identical
/// predictors under either identifying constraint set. Needs X > 2, T > 2.
[[nodiscard]] FullyParametricPair counterexample_apc_fullyparam(int X, int T);

/// Drift swap for cohort models with beta0 == beta1 (outside the identified
/// space on purpose). Needs mu0 != mu1.
[[nodiscard]] std::pair<ApcRwParams, ApcRwParams> counterexample_apc_equal_loadings(const ApcRwParams& p);

/// Variance trade for a single-age cohort model: sigma2_e0 + z, sigma2_e1 - z,
/// z in (-sigma2_e0, sigma2_e1).
[[nodiscard]] std::pair<ApcRwParams, ApcRwParams> counterexample_apc_x0_variance_trade(const ApcRwParams& p, double z);

// ---------------------------------------------------------------------------
// Moment inversion

struct RecoveryOptions {
    bool noisy = false;       ///< least-squares affine fits instead of two-point differences
    double zeroTol = 1e-10;   ///< |beta_x| sigma below this (relative to the largest) counts as zero
    double consistencyTol = 1e-8;  ///< relative reconstruction error tolerated before a diagnostic
};

template <typename Params>
struct RecoveryResult {
    Params thetaHat;
    double residual = 0.0;  ///< max |grid(thetaHat) - grid|
    std::vector<std::string> stepsLog;
};

[[nodiscard]] RecoveryResult<ApRwParams> recover_ap_rw(const MomentGrid& grid, const InitialConditions& init,
                                                       const RecoveryOptions& options = {});
[[nodiscard]] RecoveryResult<ApcRwParams> recover_apc_rw(const MomentGrid& grid, const InitialConditions& init,
                                                         const RecoveryOptions& options = {});
[[nodiscard]] RecoveryResult<ApArima110Params> recover_ap_arima110(const MomentGrid& grid,
                                                                   const InitialConditions& init,
                                                                   const RecoveryOptions& options = {});
[[nodiscard]] RecoveryResult<ApArima011Params> recover_ap_arima011(const MomentGrid& grid,
                                                                   const InitialConditions& init,
                                                                   const RecoveryOptions& options = {});

/// Family-dispatching wrapper returning the recovered value as ModelParams.
[[nodiscard]] RecoveryResult<ModelParams> recover(Family family, const MomentGrid& grid, const InitialConditions& init,
                                                  const RecoveryOptions& options = {});

/// Roots of w phi^2 + (2w - 1) phi + w = 0 where w = phi / (1 + phi)^2.
/// The roots are reciprocal; `inside` is the one with |phi| <= 1.
struct Ma1Roots {
    double inside = 0.0;
    double outside = 0.0;  ///< infinity when w == 0
};
[[nodiscard]] Ma1Roots ma1_roots(double w);

// ---------------------------------------------------------------------------
// Numerical equivalence search

struct SearchOptions {
    double delta = 1e-3;              ///< required parameter distance from theta
    double epsilonM = 1e-10;          ///< equivalence threshold for the verdict
    double reportThreshold = 1e-6;    ///< "no equivalent found" above this
    int nStarts = 32;
    long maxEvaluations = 50000;      ///< per start
    bool liftLoadingExclusion = false;  ///< cohort family: allow beta0 == beta1
    int threads = 0;
};

struct SearchReport {
    EquivalenceReport best;
    int bestStart = -1;
    bool found = false;  ///< best residual <= reportThreshold with distance >= delta
    long evaluations = 0;
    std::string summary;  ///< "equivalent found" or "no equivalent found (supports ...)"
};

[[nodiscard]] SearchReport search_equivalent(const ModelParams& theta, const InitialConditions& init,
                                             const PanelDims& dims, const SearchOptions& options, RngSpec rng);

}  // namespace lcid
