#pragma once

// Exact first and second moments of the plug-in Lee-Carter families.
//
// Latent kernels are templated on the scalar type so the same expressions
// can be evaluated in extended precision; the panel-level kernels and the
// MomentGrid container work in double.

#include "lcid/errors.hpp"
#include "lcid/params.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace lcid {

/// Below this |rho| the ARIMA(1,1,0) kernel switches to its power series.
inline constexpr double kArima110SeriesThreshold = 1e-4;

namespace detail {

/// Number of pairs (s, r) in [1,t] x [1,q] with s - r == lag.
inline long lag_pair_count(int t, int q, int lag) noexcept {
    const int lo = std::max(1, 1 - lag);
    const int hi = std::min(q, t - lag);
    return hi >= lo ? hi - lo + 1 : 0;
}

}  // namespace detail

/// Cov(kappa_t, kappa_q) of a random walk with innovation variance sigma2.
template <typename Scalar>
[[nodiscard]] Scalar cov_latent_rw(Scalar sigma2, int t, int q) noexcept {
    return sigma2 * Scalar(std::min(t, q));
}

/// Cov(kappa_t, kappa_q) of an ARIMA(1,1,0) process with a stationary
/// AR(1) difference: (t∧q)σ²/(1−ρ)² − σ²ρ(ρ^{t∨q} − ρ^{|t−q|} + ρ^{t∧q} − 1)/((ρ−1)³(ρ+1)).
/// For |rho| below kArima110SeriesThreshold the expansion
/// σ²[m + ρN₁ + ρ²(N₂ + m)] is used, N_h counting index pairs at lag ±h.
template <typename Scalar>
[[nodiscard]] Scalar cov_latent_arima110(Scalar rho, Scalar sigma2, int t, int q) {
    using std::abs;
    using std::pow;
    const int lo = std::min(t, q);
    const int hi = std::max(t, q);
    const int gap = hi - lo;
    if (abs(rho) < Scalar(kArima110SeriesThreshold)) {
        const Scalar n1 = Scalar(detail::lag_pair_count(t, q, 1) + detail::lag_pair_count(t, q, -1));
        const Scalar n2 = Scalar(detail::lag_pair_count(t, q, 2) + detail::lag_pair_count(t, q, -2));
        return sigma2 * (Scalar(lo) + rho * n1 + rho * rho * (n2 + Scalar(lo)));
    }
    const Scalar one(1);
    const Scalar first = Scalar(lo) * sigma2 / ((one - rho) * (one - rho));
    const Scalar num = rho * (pow(rho, hi) - pow(rho, gap) + pow(rho, lo) - one);
    const Scalar den = (rho - one) * (rho - one) * (rho - one) * (rho + one);
    return first - sigma2 * num / den;
}

/// Cov(kappa_t, kappa_q) of an ARIMA(0,1,1) process:
/// σ²[(t∧q)(φ+1)² − (1 + [t=q])φ].
template <typename Scalar>
[[nodiscard]] Scalar cov_latent_arima011(Scalar phi, Scalar sigma2, int t, int q) noexcept {
    const Scalar lo = Scalar(std::min(t, q));
    const Scalar same = t == q ? Scalar(2) : Scalar(1);
    return sigma2 * (lo * (phi + Scalar(1)) * (phi + Scalar(1)) - same * phi);
}

// Panel kernels. Ages are 0-based, periods 1-based; all throw InputError on
// out-of-range indices.

[[nodiscard]] double mean_ap_rw(const ApRwParams& p, const InitialConditions& init, int x, int t);
[[nodiscard]] double mean_ap_arima110(const ApArima110Params& p, const InitialConditions& init, int x, int t);
[[nodiscard]] double mean_ap_arima011(const ApArima011Params& p, const InitialConditions& init, int x, int t);
[[nodiscard]] double mean_apc_rw(const ApcRwParams& p, const InitialConditions& init, int x, int t);

[[nodiscard]] double cov_ap_rw(const ApRwParams& p, int x, int y, int s, int t);
[[nodiscard]] double cov_ap_arima110(const ApArima110Params& p, int x, int y, int s, int t);
[[nodiscard]] double cov_ap_arima011(const ApArima011Params& p, int x, int y, int s, int t);
[[nodiscard]] double cov_apc_rw(const ApcRwParams& p, int x, int y, int s, int t);

/// Means f(x,t) and covariances g(x,y,s,t) over a full panel. Covariances
/// are indexed by PanelDims::flat.
struct MomentGrid {
    PanelDims dims;
    Eigen::MatrixXd means;  ///< (X+1) x T
    Eigen::MatrixXd covs;   ///< cells x cells, symmetric

    [[nodiscard]] double mean(int x, int t) const { return means(x, t - 1); }
    [[nodiscard]] double cov(int x, int y, int s, int t) const { return covs(dims.flat(x, s), dims.flat(y, t)); }
};

/// Dispatches to the family kernels. Vector lengths must match dims; the
/// parameter-space constraints are not re-checked so that deliberately
/// out-of-space values (counterexamples) can be evaluated.
[[nodiscard]] MomentGrid moment_grid(const ModelParams& params, const InitialConditions& init, const PanelDims& dims);

struct GridInvariantReport {
    double asymmetry = 0.0;        ///< max |g(a,b) - g(b,a)|
    double minEigenvalue = 0.0;
    double trace = 0.0;
    double minDiagonalExcess = 0.0;  ///< min diag(covs) - sigma2_eps
    bool symmetric = false;
    bool psd = false;
    bool diagonalBounded = false;

    [[nodiscard]] bool ok() const noexcept { return symmetric && psd && diagonalBounded; }
};

/// Symmetry, PSD (min eigenvalue >= -1e-8 * trace) and diag >= sigma2_eps.
[[nodiscard]] GridInvariantReport check_grid_invariants(const MomentGrid& grid, double sigma2_eps);

/// Measurement variance of any family.
[[nodiscard]] double measurement_variance(const ModelParams& params) noexcept;

/// Max absolute entrywise differences between two grids on the same panel.
struct GridResidual {
    double means = 0.0;
    double covs = 0.0;
    [[nodiscard]] double total() const noexcept { return std::max(means, covs); }
};
[[nodiscard]] GridResidual grid_residual(const MomentGrid& a, const MomentGrid& b);

}  // namespace lcid
