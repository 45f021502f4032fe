#include "lcid/moments.hpp"

#include <limits>
#include <string>

namespace lcid {

namespace {

void check_age(int x, Eigen::Index ages) {
    if (x < 0 || x >= ages) {
        throw InputError("age index " + std::to_string(x) + " outside 0.." + std::to_string(ages - 1));
    }
}

void check_period(int t) {
    if (t < 1) throw InputError("period index " + std::to_string(t) + " must be >= 1");
}

double indicator(int x, int y, int s, int t) { return (x == y && s == t) ? 1.0 : 0.0; }

template <typename P>
double mean_age_period(const P& p, const InitialConditions& init, int x, int t) {
    check_age(x, p.alpha.size());
    check_period(t);
    return p.alpha[x] + p.beta[x] * p.mu * t + p.beta[x] * init.c;
}

template <typename P>
void check_pair(const P& p, int x, int y, int s, int t) {
    check_age(x, p.beta.size());
    check_age(y, p.beta.size());
    check_period(s);
    check_period(t);
}

}  // namespace

double mean_ap_rw(const ApRwParams& p, const InitialConditions& init, int x, int t) {
    return mean_age_period(p, init, x, t);
}

double mean_ap_arima110(const ApArima110Params& p, const InitialConditions& init, int x, int t) {
    return mean_age_period(p, init, x, t);
}

double mean_ap_arima011(const ApArima011Params& p, const InitialConditions& init, int x, int t) {
    return mean_age_period(p, init, x, t);
}

double mean_apc_rw(const ApcRwParams& p, const InitialConditions& init, int x, int t) {
    check_age(x, p.alpha.size());
    check_period(t);
    const int X = static_cast<int>(p.alpha.size()) - 1;
    return p.alpha[x] + p.beta0[x] * init.c0 + p.beta0[x] * p.mu0 * (t - x + X) + p.beta1[x] * init.c1 +
           p.beta1[x] * p.mu1 * t;
}

double cov_ap_rw(const ApRwParams& p, int x, int y, int s, int t) {
    check_pair(p, x, y, s, t);
    return p.beta[x] * p.beta[y] * cov_latent_rw(p.sigma2_e, s, t) + indicator(x, y, s, t) * p.sigma2_eps;
}

double cov_ap_arima110(const ApArima110Params& p, int x, int y, int s, int t) {
    check_pair(p, x, y, s, t);
    return p.beta[x] * p.beta[y] * cov_latent_arima110(p.rho, p.sigma2_e, s, t) +
           indicator(x, y, s, t) * p.sigma2_eps;
}

double cov_ap_arima011(const ApArima011Params& p, int x, int y, int s, int t) {
    check_pair(p, x, y, s, t);
    return p.beta[x] * p.beta[y] * cov_latent_arima011(p.phi, p.sigma2_e, s, t) +
           indicator(x, y, s, t) * p.sigma2_eps;
}

double cov_apc_rw(const ApcRwParams& p, int x, int y, int s, int t) {
    check_age(x, p.alpha.size());
    check_age(y, p.alpha.size());
    check_period(s);
    check_period(t);
    const int X = static_cast<int>(p.alpha.size()) - 1;
    const double cohort = p.beta0[x] * p.beta0[y] * p.sigma2_e0 * std::min(s - x + X, t - y + X);
    const double period = p.beta1[x] * p.beta1[y] * p.sigma2_e1 * std::min(s, t);
    return cohort + period + indicator(x, y, s, t) * p.sigma2_eps;
}

namespace {

// The latent covariance depends only on (s,t); the loading products only on
// (x,y). Filling via that factorization keeps the grid exact to the kernels.
template <typename LatentFn>
void fill_age_period_covs(const Eigen::VectorXd& beta, double sigma2_eps, const PanelDims& dims, LatentFn latent,
                          Eigen::MatrixXd& covs) {
    Eigen::MatrixXd k(dims.T, dims.T);
    for (int s = 1; s <= dims.T; ++s) {
        for (int t = s; t <= dims.T; ++t) {
            k(s - 1, t - 1) = latent(s, t);
            k(t - 1, s - 1) = k(s - 1, t - 1);
        }
    }
    for (int x = 0; x <= dims.X; ++x) {
        for (int y = 0; y <= dims.X; ++y) {
            const double bb = beta[x] * beta[y];
            covs.block(dims.flat(x, 1), dims.flat(y, 1), dims.T, dims.T) = bb * k;
        }
    }
    covs.diagonal().array() += sigma2_eps;
}

void check_lengths(const ModelParams& params, const PanelDims& dims) {
    if (dims.X < 0 || dims.T < 1) throw InputError("panel dimensions require X >= 0 and T >= 1");
    if (age_count(params) != dims.ages()) {
        throw InputError("parameter vectors have length " + std::to_string(age_count(params)) + " but X+1=" +
                         std::to_string(dims.ages()));
    }
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                if (p.beta0.size() != dims.ages() || p.beta1.size() != dims.ages()) {
                    throw InputError("cohort loading vectors must have length X+1");
                }
            } else {
                if (p.beta.size() != dims.ages()) throw InputError("beta must have length X+1");
            }
        },
        params);
}

}  // namespace

MomentGrid moment_grid(const ModelParams& params, const InitialConditions& init, const PanelDims& dims) {
    check_lengths(params, dims);
    MomentGrid grid{dims, Eigen::MatrixXd(dims.ages(), dims.T), Eigen::MatrixXd(dims.cells(), dims.cells())};

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            for (int x = 0; x <= dims.X; ++x) {
                for (int t = 1; t <= dims.T; ++t) {
                    if constexpr (std::is_same_v<P, ApcRwParams>) {
                        grid.means(x, t - 1) = mean_apc_rw(p, init, x, t);
                    } else {
                        grid.means(x, t - 1) = mean_age_period(p, init, x, t);
                    }
                }
            }
            if constexpr (std::is_same_v<P, ApRwParams>) {
                fill_age_period_covs(p.beta, p.sigma2_eps, dims,
                                     [&](int s, int t) { return cov_latent_rw(p.sigma2_e, s, t); }, grid.covs);
            } else if constexpr (std::is_same_v<P, ApArima110Params>) {
                fill_age_period_covs(p.beta, p.sigma2_eps, dims,
                                     [&](int s, int t) { return cov_latent_arima110(p.rho, p.sigma2_e, s, t); },
                                     grid.covs);
            } else if constexpr (std::is_same_v<P, ApArima011Params>) {
                fill_age_period_covs(p.beta, p.sigma2_eps, dims,
                                     [&](int s, int t) { return cov_latent_arima011(p.phi, p.sigma2_e, s, t); },
                                     grid.covs);
            } else {
                for (int x = 0; x <= dims.X; ++x)
                    for (int s = 1; s <= dims.T; ++s)
                        for (int y = 0; y <= dims.X; ++y)
                            for (int t = 1; t <= dims.T; ++t)
                                grid.covs(dims.flat(x, s), dims.flat(y, t)) = cov_apc_rw(p, x, y, s, t);
            }
        },
        params);
    return grid;
}

double measurement_variance(const ModelParams& params) noexcept {
    return std::visit([](const auto& p) { return p.sigma2_eps; }, params);
}

GridInvariantReport check_grid_invariants(const MomentGrid& grid, double sigma2_eps) {
    GridInvariantReport r;
    r.asymmetry = (grid.covs - grid.covs.transpose()).cwiseAbs().maxCoeff();
    r.symmetric = r.asymmetry == 0.0;
    r.trace = grid.covs.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(grid.covs, Eigen::EigenvaluesOnly);
    r.minEigenvalue = eig.eigenvalues().minCoeff();
    r.psd = r.minEigenvalue >= -1e-8 * r.trace;
    r.minDiagonalExcess = (grid.covs.diagonal().array() - sigma2_eps).minCoeff();
    // Diagonal = latent variance + sigma2_eps; allow for rounding of the sum.
    r.diagonalBounded = r.minDiagonalExcess >= -4.0 * std::numeric_limits<double>::epsilon() *
                                                   grid.covs.diagonal().cwiseAbs().maxCoeff();
    return r;
}

GridResidual grid_residual(const MomentGrid& a, const MomentGrid& b) {
    if (!(a.dims == b.dims)) throw InputError("grid_residual: panel dimensions differ");
    return {(a.means - b.means).cwiseAbs().maxCoeff(), (a.covs - b.covs).cwiseAbs().maxCoeff()};
}

}  // namespace lcid
