#pragma once

// Independent reference values for the latent covariance kernels, computed
// by direct summation over innovation-level covariances rather than from
// the simplified closed forms.

namespace lcid {

enum class LatentModel { RandomWalk, Arima110, Arima011 };

/// Cov(kappa_t, kappa_q) by double summation.
///  - RandomWalk: sigma2 times the number of coinciding innovation indices.
///  - Arima110:   sum_{s<=t} sum_{r<=q} sigma2 rho^{|s-r|} / (1 - rho^2).
///  - Arima011:   sum_{s<=t} sum_{r<=q} E[A(s,r)], A(s,r) the product of the
///                two MA(1) increments expanded into four innovation terms.
/// `coefficient` is rho or phi (ignored for RandomWalk).
[[nodiscard]] double oracle_cov_doublesum(LatentModel model, double coefficient, double sigma2, int t, int q);

}  // namespace lcid
