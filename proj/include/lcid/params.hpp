#pragma once

#include "lcid/errors.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lcid {

/// Panel of ages 0..X and periods 1..T.
struct PanelDims {
    int X = 0;
    int T = 1;

    [[nodiscard]] int ages() const noexcept { return X + 1; }
    [[nodiscard]] int cells() const noexcept { return (X + 1) * T; }
    /// Flattened position of the (age, period) cell; periods are 1-based.
    [[nodiscard]] int flat(int x, int t) const noexcept { return x * T + (t - 1); }

    friend bool operator==(const PanelDims&, const PanelDims&) = default;
};

/// Fixed, known starting values of the latent factors. Never estimated.
struct InitialConditions {
    double c = 0.0;   ///< kappa_0 for age-period models
    double c0 = 0.0;  ///< iota_{-X} for the cohort model
    double c1 = 0.0;  ///< kappa_0 for the cohort model
};

/// Age-period model with a random-walk-with-drift period factor.
struct ApRwParams {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double mu = 0.0;
    double sigma2_e = 1.0;
    double sigma2_eps = 1.0;
};

/// Age-period model whose period factor is ARIMA(1,1,0).
struct ApArima110Params {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double mu = 0.0;
    double sigma2_e = 1.0;
    double sigma2_eps = 1.0;
    double rho = 0.0;
};

/// Age-period model whose period factor is ARIMA(0,1,1).
struct ApArima011Params {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double mu = 0.0;
    double sigma2_e = 1.0;
    double sigma2_eps = 1.0;
    double phi = 0.0;
};

/// Age-period-cohort model with independent random walks for the cohort
/// factor (loadings beta0) and the period factor (loadings beta1).
struct ApcRwParams {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta0;
    Eigen::VectorXd beta1;
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma2_e0 = 1.0;
    double sigma2_e1 = 1.0;
    double sigma2_eps = 1.0;
};

/// Identifying restrictions used for fully parametric cohort models.
enum class ApcConstraintSet {
    A,  ///< sum beta0 = sum beta1 = 1, kappa_1 = 0, beta1 > 0
    B,  ///< sum beta0 = sum beta1 = 1, sum kappa = 0, sum iota = 0
};

/// Classical cohort model where kappa and iota are parameter vectors.
/// iota holds cohorts h = 1-X, ..., T at positions h + X - 1.
struct FullyParametricApcParams {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta0;
    Eigen::VectorXd beta1;
    Eigen::VectorXd kappa;
    Eigen::VectorXd iota;
    ApcConstraintSet constraints = ApcConstraintSet::B;
};

enum class Family { ApRw, ApArima110, ApArima011, ApcRw };

using ModelParams = std::variant<ApRwParams, ApArima110Params, ApArima011Params, ApcRwParams>;

[[nodiscard]] Family family_of(const ModelParams& params) noexcept;
[[nodiscard]] std::string_view family_tag(Family family) noexcept;
/// Inverse of family_tag; throws InputError on unknown tags.
[[nodiscard]] Family family_from_tag(std::string_view tag);

/// Number of ages implied by the loading vectors.
[[nodiscard]] int age_count(const ModelParams& params) noexcept;

struct ValidationVerdict {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
};

inline constexpr double kSumToOneTolerance = 1e-12;
inline constexpr double kDistinctLoadingsTolerance = 1e-12;

[[nodiscard]] ValidationVerdict validate(const ApRwParams& p);
[[nodiscard]] ValidationVerdict validate(const ApArima110Params& p);
[[nodiscard]] ValidationVerdict validate(const ApArima011Params& p);
[[nodiscard]] ValidationVerdict validate(const ApcRwParams& p);
[[nodiscard]] ValidationVerdict validate(const ModelParams& p);
[[nodiscard]] ValidationVerdict validate(const FullyParametricApcParams& p, int X, int T);
[[nodiscard]] ValidationVerdict validate(const PanelDims& dims);

/// Validates params and additionally checks vector lengths against dims.
[[nodiscard]] ValidationVerdict validate(const ModelParams& p, const PanelDims& dims);

/// Returns params unchanged if they pass validate, otherwise throws
/// InputError listing every violation.
template <typename Params>
[[nodiscard]] Params checked(Params params) {
    const ValidationVerdict verdict = validate(params);
    if (!verdict.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& v : verdict.violations) msg += " " + v + ";";
        throw InputError(msg);
    }
    return params;
}

/// Rescales raw loadings so they sum to one. The last rounding error is
/// pushed into the smallest-magnitude entry so the compensated sum is 1.
[[nodiscard]] Eigen::VectorXd normalize_betas(const Eigen::VectorXd& raw);

/// Compensated (Neumaier) sum, used wherever sum constraints are checked.
[[nodiscard]] double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept;

}  // namespace lcid
