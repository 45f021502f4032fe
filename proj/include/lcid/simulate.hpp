#pragma once

#include "lcid/moments.hpp"
#include "lcid/params.hpp"
#include "lcid/rng.hpp"

#include <Eigen/Dense>

namespace lcid {

/// Log central death rates log(m_{x,t}); row x, column t-1.
struct Surface {
    PanelDims dims;
    Eigen::MatrixXd values;
};

struct SimulationOptions {
    Innovation innovation;   ///< law of the latent innovations
    Innovation noise;        ///< law of the measurement errors
    double guardBand = 0.999;  ///< |rho|, |phi| must not exceed this
};

[[nodiscard]] Eigen::VectorXd simulate_kappa_rw(double mu, double sigma2_e, double c, int T, Rng& rng,
                                                const Innovation& law = {});

/// The AR(1) differences start from their stationary law, which matches the
/// infinite moving-average representation exactly in second moments.
[[nodiscard]] Eigen::VectorXd simulate_kappa_arima110(double mu, double rho, double sigma2_e, double c, int T, Rng& rng,
                                                      const Innovation& law = {}, double guardBand = 0.999);

[[nodiscard]] Eigen::VectorXd simulate_kappa_arima011(double mu, double phi, double sigma2_e, double c, int T, Rng& rng,
                                                      const Innovation& law = {}, double guardBand = 0.999);

struct CohortPaths {
    Eigen::VectorXd kappa;  ///< periods 1..T
    Eigen::VectorXd iota;   ///< cohorts 1-X..T, cohort h at h + X - 1
};

[[nodiscard]] CohortPaths simulate_cohort_paths(const ApcRwParams& p, const InitialConditions& init,
                                                const PanelDims& dims, Rng& rng, const Innovation& law = {});

/// One surface draw; the latent path is shared by all ages.
[[nodiscard]] Surface simulate_surface(const ModelParams& params, const InitialConditions& init, const PanelDims& dims,
                                       Rng& rng, const SimulationOptions& options = {});

struct McMoments {
    PanelDims dims;
    Eigen::MatrixXd meanHat;  ///< (X+1) x T
    Eigen::MatrixXd covHat;   ///< cells x cells, unbiased
    Eigen::MatrixXd meanSe;   ///< sd / sqrt(n)
    Eigen::MatrixXd covSe;    ///< sqrt((g_ii g_jj + g_ij^2) / n), Gaussian theory
    long nReps = 0;
};

/// Replicate i draws from spec.substream(i). Accumulation happens in fixed
/// blocks reduced in order, so results do not depend on `threads`.
[[nodiscard]] McMoments mc_moments(const ModelParams& params, const InitialConditions& init, const PanelDims& dims,
                                   long nReps, RngSpec spec, const SimulationOptions& options = {}, int threads = 0);

struct McComparison {
    double meanFraction = 0.0;  ///< share of mean entries within k SE
    double covFraction = 0.0;   ///< share of distinct covariance entries within k SE
    double maxMeanZ = 0.0;
    double maxCovZ = 0.0;
    long meanEntries = 0;
    long covEntries = 0;
};

/// Compares MC moments to exact ones at a k-standard-error band. Covariance
/// entries are counted once per unordered pair (upper triangle incl. diagonal).
[[nodiscard]] McComparison compare_moments(const McMoments& mc, const MomentGrid& exact, double k = 4.0);

/// Resolves a thread request: 0 means all hardware threads.
[[nodiscard]] int resolve_threads(int requested) noexcept;

}  // namespace lcid
