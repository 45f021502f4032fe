#include "lcid/identify.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

// Each recover_* executes the corresponding identification argument as an
// algorithm: affine fits of variance and covariance sequences give loading
// products, a rank-one factorization gives the loadings up to sign and scale,
// and the sum-to-one restriction fixes both.

namespace lcid {

namespace {

struct Affine {
    double intercept = 0.0;
    double slope = 0.0;
};

// Fit y = a + b x. Two-point differencing on the first two samples unless
// `noisy`, in which case ordinary least squares over all samples.
Affine affine_fit(const std::vector<double>& xs, const std::vector<double>& ys, bool noisy) {
    if (xs.size() < 2) throw InputError("affine fit needs at least two samples");
    if (!noisy) {
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return {ys[0] - slope * xs[0], slope};
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

std::vector<double> periods(int from, int to) {
    std::vector<double> out;
    for (int t = from; t <= to; ++t) out.push_back(t);
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

double grid_scale(const MomentGrid& grid) {
    return std::max({1.0, grid.means.cwiseAbs().maxCoeff(), grid.covs.cwiseAbs().maxCoeff()});
}

// Loadings b = beta * sigma from the product matrix P = b b^T. Only rows in
// `pivots` may serve as the pivot; entries of b below zeroTol relative to
// the largest are set to exactly zero (the beta_x = 0 branch).
std::optional<Eigen::VectorXd> rank_one_factor(const Eigen::MatrixXd& products, const std::vector<int>& pivots,
                                               double zeroTol, const char* name, std::vector<std::string>& log) {
    int pivot = -1;
    double best = 0.0;
    for (int p : pivots) {
        if (products(p, p) > best) {
            best = products(p, p);
            pivot = p;
        }
    }
    if (pivot < 0) return std::nullopt;
    const double bp = std::sqrt(best);
    Eigen::VectorXd b = products.row(pivot).transpose() / bp;
    b[pivot] = bp;
    const double cutoff = zeroTol * b.cwiseAbs().maxCoeff();
    if (!(bp > cutoff)) return std::nullopt;
    for (Eigen::Index x = 0; x < b.size(); ++x) {
        if (std::abs(b[x]) <= cutoff) {
            b[x] = 0.0;
            log.push_back(std::string(name) + "[" + std::to_string(x) + "] = 0 branch (below zero threshold)");
        }
    }
    log.push_back(std::string(name) + ": rank-one factor pivoted on age " + std::to_string(pivot));
    return b;
}

// Sign and scale: sum(beta) = 1 forces sigma = |sum b| and beta = b / sum b.
// The opposite sign would need sum(beta) = -1, which is excluded.
std::pair<Eigen::VectorXd, double> fix_sign_and_scale(const Eigen::VectorXd& b, const char* name,
                                                      std::vector<std::string>& log) {
    const double total = compensated_sum(b);
    if (!(std::abs(total) > 1e-12 * b.cwiseAbs().sum())) {
        throw NumericalDiagnostic(std::string(name) + ": loading products sum to zero; no sum-to-one solution");
    }
    log.push_back(std::string(name) + ": sign " + (total > 0 ? "+" : "-") + ", scale K=" + num(std::abs(total)));
    return {normalize_betas(b), total * total};
}

void require_affine(const std::vector<double>& ys, double scale, const RecoveryOptions& options, const char* what) {
    if (options.noisy) return;
    for (std::size_t i = 2; i < ys.size(); ++i) {
        const double d2 = ys[i] - 2.0 * ys[i - 1] + ys[i - 2];
        if (std::abs(d2) > options.consistencyTol * scale) {
            throw NumericalDiagnostic(std::string(what) + " is not affine in t (second difference " + num(d2) +
                                      "); grid inconsistent with the family");
        }
    }
}

std::vector<double> variance_series(const MomentGrid& g, int x) {
    std::vector<double> v;
    for (int t = 1; t <= g.dims.T; ++t) v.push_back(g.cov(x, x, t, t));
    return v;
}

// alpha and mu from means alpha_x + beta_x c + beta_x mu t; sum(beta) = 1
// gives mu as the sum of the per-age slopes.
void recover_age_period_means(const MomentGrid& g, const Eigen::VectorXd& beta, double c, bool noisy,
                              Eigen::VectorXd& alpha, double& mu) {
    const auto ts = periods(1, g.dims.T);
    Eigen::VectorXd intercepts(g.dims.ages());
    Eigen::VectorXd slopes(g.dims.ages());
    for (int x = 0; x <= g.dims.X; ++x) {
        std::vector<double> f;
        for (int t = 1; t <= g.dims.T; ++t) f.push_back(g.mean(x, t));
        const Affine fit = affine_fit(ts, f, noisy);
        intercepts[x] = fit.intercept;
        slopes[x] = fit.slope;
    }
    mu = compensated_sum(slopes);
    alpha = intercepts - beta * c;
}

template <typename Params>
void finish(RecoveryResult<Params>& result, const MomentGrid& grid, const InitialConditions& init,
            const RecoveryOptions& options) {
    const ValidationVerdict verdict = validate(result.thetaHat);
    if (!verdict.ok()) {
        std::string msg = "recovered parameters leave the parameter space:";
        for (const auto& v : verdict.violations) msg += " " + v + ";";
        throw NumericalDiagnostic(msg);
    }
    const MomentGrid rebuilt = moment_grid(ModelParams{result.thetaHat}, init, grid.dims);
    result.residual = grid_residual(rebuilt, grid).total();
    result.stepsLog.push_back("reconstruction residual " + num(result.residual));
    if (!options.noisy && result.residual > options.consistencyTol * grid_scale(grid)) {
        throw NumericalDiagnostic("grid inconsistent with the family: reconstruction residual " +
                                  num(result.residual));
    }
}

// Shared tail of the three age-period recoveries once the loading products
// are known.
void age_period_loadings(const Eigen::MatrixXd& products, const RecoveryOptions& options,
                         std::vector<std::string>& log, Eigen::VectorXd& beta, double& sigma2_e) {
    std::vector<int> all(static_cast<std::size_t>(products.rows()));
    for (int i = 0; i < products.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
    const auto b = rank_one_factor(products, all, options.zeroTol, "beta*sigma_e", log);
    if (!b) throw NumericalDiagnostic("all loading products vanish; no period factor in the grid");
    std::tie(beta, sigma2_e) = fix_sign_and_scale(*b, "beta", log);
}

}  // namespace

RecoveryResult<ApRwParams> recover_ap_rw(const MomentGrid& grid, const InitialConditions& init,
                                         const RecoveryOptions& options) {
    const PanelDims& d = grid.dims;
    if (d.T < 2) throw InputError("recover_ap_rw requires T >= 2");
    RecoveryResult<ApRwParams> r;
    auto& log = r.stepsLog;
    const double scale = grid_scale(grid);
    const auto ts = periods(1, d.T);

    // Var(log m_{x,t}) = beta_x^2 sigma_e^2 t + sigma_eps^2.
    Eigen::MatrixXd products(d.ages(), d.ages());
    double epsSum = 0.0;
    for (int x = 0; x <= d.X; ++x) {
        const auto v = variance_series(grid, x);
        require_affine(v, scale, options, "variance sequence");
        const Affine fit = affine_fit(ts, v, options.noisy);
        products(x, x) = fit.slope;
        epsSum += fit.intercept;
    }
    const double sigma2_eps = epsSum / d.ages();
    log.push_back("affine variance fits: sigma_eps^2=" + num(sigma2_eps));

    // Cov(log m_{x,s}, log m_{y,T}) = beta_x beta_y sigma_e^2 s for x != y.
    for (int x = 0; x <= d.X; ++x) {
        for (int y = 0; y <= d.X; ++y) {
            if (x == y) continue;
            std::vector<double> c;
            for (int s = 1; s <= d.T; ++s) c.push_back(grid.cov(x, y, s, d.T));
            products(x, y) = affine_fit(ts, c, options.noisy).slope;
        }
    }
    if (d.X == 0) log.push_back("X=0: beta_0=1 forced, sigma_e^2 read from the variance slope");

    ApRwParams& p = r.thetaHat;
    age_period_loadings(products, options, log, p.beta, p.sigma2_e);
    p.sigma2_eps = sigma2_eps;
    recover_age_period_means(grid, p.beta, init.c, options.noisy, p.alpha, p.mu);
    log.push_back("means: mu=" + num(p.mu));
    finish(r, grid, init, options);
    return r;
}

RecoveryResult<ApArima110Params> recover_ap_arima110(const MomentGrid& grid, const InitialConditions& init,
                                                     const RecoveryOptions& options) {
    const PanelDims& d = grid.dims;
    if (d.T < 4) throw InputError("recover_ap_arima110 requires T >= 4");
    RecoveryResult<ApArima110Params> r;
    auto& log = r.stepsLog;
    const double scale = grid_scale(grid);

    // Second differences of the variance sequences are geometric with ratio rho.
    std::vector<std::vector<double>> second(static_cast<std::size_t>(d.ages()));
    int pivot = 0;
    double pivotSize = -1.0;
    double varMax = 0.0;
    for (int x = 0; x <= d.X; ++x) {
        const auto v = variance_series(grid, x);
        for (double vi : v) varMax = std::max(varMax, std::abs(vi));
        auto& dx = second[static_cast<std::size_t>(x)];
        for (int t = 3; t <= d.T; ++t) dx.push_back(v[t - 1] - 2.0 * v[t - 2] + v[t - 3]);
        if (std::abs(dx[0]) > pivotSize) {
            pivotSize = std::abs(dx[0]);
            pivot = x;
        }
    }

    if (pivotSize <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(varMax, 1.0)) {
        log.push_back("second differences vanish: rho=0, random-walk branch");
        const auto rw = recover_ap_rw(grid, init, options);
        r.thetaHat = {.alpha = rw.thetaHat.alpha,
                      .beta = rw.thetaHat.beta,
                      .mu = rw.thetaHat.mu,
                      .sigma2_e = rw.thetaHat.sigma2_e,
                      .sigma2_eps = rw.thetaHat.sigma2_eps,
                      .rho = 0.0};
        log.insert(log.end(), rw.stepsLog.begin(), rw.stepsLog.end());
        finish(r, grid, init, options);
        return r;
    }

    const auto& dp = second[static_cast<std::size_t>(pivot)];
    double rho = 0.0;
    if (!options.noisy) {
        rho = dp[1] / dp[0];
    } else {
        double num_ = 0.0, den = 0.0;
        for (std::size_t i = 1; i < dp.size(); ++i) {
            num_ += dp[i] * dp[i - 1];
            den += dp[i - 1] * dp[i - 1];
        }
        rho = num_ / den;
    }
    log.push_back("rho from second-difference ratio at age " + std::to_string(pivot) + ": " + num(rho));
    if (!(std::abs(rho) < 1.0)) {
        throw NumericalDiagnostic("second-difference ratio " + num(rho) + " is outside (-1,1)");
    }
    if (!options.noisy) {
        for (const auto& dx : second) {
            for (std::size_t i = 1; i < dx.size(); ++i) {
                if (std::abs(dx[i] - rho * dx[i - 1]) > options.consistencyTol * scale) {
                    throw NumericalDiagnostic("second differences are not geometric; grid inconsistent with ARIMA(1,1,0)");
                }
            }
        }
    }

    // Var = B_x k(t) + sigma_eps^2 with k the unit-variance latent kernel.
    std::vector<double> k;
    for (int t = 1; t <= d.T; ++t) k.push_back(cov_latent_arima110(rho, 1.0, t, t));
    Eigen::MatrixXd products(d.ages(), d.ages());
    double epsSum = 0.0;
    for (int x = 0; x <= d.X; ++x) {
        const Affine fit = affine_fit(k, variance_series(grid, x), options.noisy);
        products(x, x) = fit.slope;
        epsSum += fit.intercept;
    }
    const double sigma2_eps = epsSum / d.ages();

    // Cross-covariances against the last period: beta_x beta_y sigma^2 K(s, T).
    for (int x = 0; x <= d.X; ++x) {
        for (int y = 0; y <= d.X; ++y) {
            if (x == y) continue;
            double gk = 0.0, kk = 0.0;
            for (int s = 1; s <= d.T; ++s) {
                const double ks = cov_latent_arima110(rho, 1.0, s, d.T);
                gk += grid.cov(x, y, s, d.T) * ks;
                kk += ks * ks;
            }
            products(x, y) = gk / kk;
        }
    }

    ApArima110Params& p = r.thetaHat;
    p.rho = rho;
    age_period_loadings(products, options, log, p.beta, p.sigma2_e);
    p.sigma2_eps = sigma2_eps;
    recover_age_period_means(grid, p.beta, init.c, options.noisy, p.alpha, p.mu);
    finish(r, grid, init, options);
    return r;
}

Ma1Roots ma1_roots(double w) {
    if (w == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
    double disc = 1.0 - 4.0 * w;
    if (disc < 0.0) {
        if (disc < -1e-12) throw NumericalDiagnostic("no real MA(1) root for ratio " + num(w));
        disc = 0.0;
    }
    // Stable form of the smaller root; the other is its reciprocal.
    const double inside = 2.0 * w / ((1.0 - 2.0 * w) + std::sqrt(disc));
    return {inside, 1.0 / inside};
}

RecoveryResult<ApArima011Params> recover_ap_arima011(const MomentGrid& grid, const InitialConditions& init,
                                                     const RecoveryOptions& options) {
    const PanelDims& d = grid.dims;
    if (d.T < 2) throw InputError("recover_ap_arima011 requires T >= 2");
    RecoveryResult<ApArima011Params> r;
    auto& log = r.stepsLog;
    const auto ts = periods(1, d.T);

    // Same-period covariances: P_xy [t (phi+1)^2 - 2 phi] (+ sigma_eps^2 on the diagonal).
    Eigen::MatrixXd slopes(d.ages(), d.ages());
    Eigen::MatrixXd intercepts(d.ages(), d.ages());
    for (int x = 0; x <= d.X; ++x) {
        for (int y = 0; y <= d.X; ++y) {
            std::vector<double> c;
            for (int t = 1; t <= d.T; ++t) c.push_back(grid.cov(x, y, t, t));
            require_affine(c, grid_scale(grid), options, "same-period covariance sequence");
            const Affine fit = affine_fit(ts, c, options.noisy);
            slopes(x, y) = fit.slope;
            intercepts(x, y) = fit.intercept;
        }
    }

    // w = phi / (1 + phi)^2 from one well-conditioned pair.
    int px = -1, py = -1;
    double best = 0.0;
    for (int x = 0; x <= d.X; ++x) {
        for (int y = 0; y <= d.X; ++y) {
            if (x != y && std::abs(slopes(x, y)) > best) {
                best = std::abs(slopes(x, y));
                px = x;
                py = y;
            }
        }
    }
    double w = 0.0;
    if (px >= 0 && best > options.zeroTol * slopes.diagonal().cwiseAbs().maxCoeff()) {
        // intercept = -2 phi P, slope = (1 + phi)^2 P
        w = -intercepts(px, py) / (2.0 * slopes(px, py));
        log.push_back("phi ratio from cross-age pair (" + std::to_string(px) + "," + std::to_string(py) + ")");
    } else {
        // Single loaded age: the lag-one covariance P[t (1+phi)^2 - phi] gives P phi.
        Eigen::Index x = 0;
        slopes.diagonal().maxCoeff(&x);
        const int xi = static_cast<int>(x);
        double acc = 0.0;
        const int n = options.noisy ? d.T - 1 : 1;
        for (int t = 1; t <= n; ++t) acc += t * slopes(xi, xi) - grid.cov(xi, xi, t, t + 1);
        w = (acc / n) / slopes(xi, xi);
        log.push_back("phi ratio from lag-one autocovariance of age " + std::to_string(xi));
    }
    const Ma1Roots roots = ma1_roots(w);
    log.push_back("MA(1) roots: " + num(roots.inside) + ", " + num(roots.outside) + "; invertible root selected");
    const double phi = roots.inside;
    if (!(std::abs(phi) < 1.0)) throw NumericalDiagnostic("both MA(1) roots lie on the unit circle");

    const double scale = (1.0 + phi) * (1.0 + phi);
    const Eigen::MatrixXd products = slopes / scale;
    double epsSum = 0.0;
    for (int x = 0; x <= d.X; ++x) epsSum += intercepts(x, x) + 2.0 * phi * products(x, x);

    ApArima011Params& p = r.thetaHat;
    p.phi = phi;
    age_period_loadings(products, options, log, p.beta, p.sigma2_e);
    p.sigma2_eps = epsSum / d.ages();
    recover_age_period_means(grid, p.beta, init.c, options.noisy, p.alpha, p.mu);
    finish(r, grid, init, options);
    return r;
}

RecoveryResult<ApcRwParams> recover_apc_rw(const MomentGrid& grid, const InitialConditions& init,
                                           const RecoveryOptions& options) {
    const PanelDims& d = grid.dims;
    if (d.X == 0) throw InputError("recover_apc_rw refuses X = 0: cohort and period variances trade off");
    if (d.T <= d.X + 2) throw InputError("recover_apc_rw requires T > X + 2");
    RecoveryResult<ApcRwParams> r;
    auto& log = r.stepsLog;
    const int X = d.X;
    const double scale = grid_scale(grid);
    const auto ts = periods(1, d.T);

    // Var(x,t) = (P0_xx + P1_xx) t + P0_xx (X - x) + sigma_eps^2.
    Eigen::VectorXd varSlope(d.ages());
    Eigen::VectorXd varIntercept(d.ages());
    for (int x = 0; x <= X; ++x) {
        const auto v = variance_series(grid, x);
        require_affine(v, scale, options, "variance sequence");
        const Affine fit = affine_fit(ts, v, options.noisy);
        varSlope[x] = fit.slope;
        varIntercept[x] = fit.intercept;
    }
    const double sigma2_eps = varIntercept[X];
    log.push_back("oldest age variance intercept: sigma_eps^2=" + num(sigma2_eps));

    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(d.ages(), d.ages());
    Eigen::MatrixXd p1 = Eigen::MatrixXd::Zero(d.ages(), d.ages());
    for (int x = 0; x < X; ++x) {
        p0(x, x) = (varIntercept[x] - sigma2_eps) / (X - x);
        p1(x, x) = varSlope[x] - p0(x, x);
    }

    // Lagged pairs: age x at t, age y = x + k at t + k + 1 share the cohort
    // minimum t - x + X, so the sequence is P0 (X - x) + (P0 + P1) t.
    for (int x = 0; x < X; ++x) {
        for (int y = x + 1; y <= X; ++y) {
            const int lag = y - x;
            std::vector<double> tt, c;
            for (int t = 1; t + lag + 1 <= d.T; ++t) {
                tt.push_back(t);
                c.push_back(grid.cov(x, y, t, t + lag + 1));
            }
            const Affine fit = affine_fit(tt, c, options.noisy);
            p0(x, y) = p0(y, x) = fit.intercept / (X - x);
            p1(x, y) = p1(y, x) = fit.slope - p0(x, y);
        }
    }
    log.push_back("lagged cross-covariances give cohort and period loading products");

    std::vector<int> younger;
    for (int x = 0; x < X; ++x) younger.push_back(x);

    Eigen::VectorXd b0, b1;
    if (auto f0 = rank_one_factor(p0, younger, options.zeroTol, "beta0*sigma_e0", log)) {
        b0 = *f0;
        p1(X, X) = varSlope[X] - b0[X] * b0[X];
        std::vector<int> all = younger;
        all.push_back(X);
        auto f1 = rank_one_factor(p1, all, options.zeroTol, "beta1*sigma_e1", log);
        if (!f1) throw NumericalDiagnostic("period loading products vanish");
        b1 = *f1;
    } else {
        // Cohort loadings vanish below the oldest age, so beta0 = e_X.
        log.push_back("branch: beta0_x = 0 for all x < X");
        auto f1 = rank_one_factor(p1, younger, options.zeroTol, "beta1*sigma_e1", log);
        if (!f1) throw NumericalDiagnostic("both loading vectors concentrate on the oldest age (beta0 = beta1)");
        b1 = *f1;
        const double rest = varSlope[X] - b1[X] * b1[X];
        if (!(rest > 0.0)) throw NumericalDiagnostic("no positive cohort variance remains at the oldest age");
        b0 = Eigen::VectorXd::Zero(d.ages());
        b0[X] = std::sqrt(rest);
    }

    ApcRwParams& p = r.thetaHat;
    std::tie(p.beta0, p.sigma2_e0) = fix_sign_and_scale(b0, "beta0", log);
    std::tie(p.beta1, p.sigma2_e1) = fix_sign_and_scale(b1, "beta1", log);
    p.sigma2_eps = sigma2_eps;

    // Means: slope_x = beta0_x mu0 + beta1_x mu1; beta1 = d beta0 only for
    // d = 1, which the parameter space excludes.
    Eigen::VectorXd slopes(d.ages());
    Eigen::VectorXd intercepts(d.ages());
    for (int x = 0; x <= X; ++x) {
        std::vector<double> f;
        for (int t = 1; t <= d.T; ++t) f.push_back(grid.mean(x, t));
        const Affine fit = affine_fit(ts, f, options.noisy);
        slopes[x] = fit.slope;
        intercepts[x] = fit.intercept;
    }
    Eigen::MatrixXd design(d.ages(), 2);
    design << p.beta0, p.beta1;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    if (!(sv[1] > 1e-10 * sv[0])) {
        throw NumericalDiagnostic("recovered beta0 = beta1: drifts are not identified (outside the parameter space)");
    }
    const Eigen::Vector2d drifts = svd.solve(slopes);
    p.mu0 = drifts[0];
    p.mu1 = drifts[1];
    p.alpha = intercepts - p.beta0 * init.c0 - (p.beta0.array() * p.mu0 *
                                                (X - Eigen::ArrayXd::LinSpaced(d.ages(), 0, X))).matrix() -
              p.beta1 * init.c1;
    log.push_back("means: mu0=" + num(p.mu0) + ", mu1=" + num(p.mu1));
    finish(r, grid, init, options);
    return r;
}

RecoveryResult<ModelParams> recover(Family family, const MomentGrid& grid, const InitialConditions& init,
                                    const RecoveryOptions& options) {
    auto wrap = [](auto&& res) {
        return RecoveryResult<ModelParams>{ModelParams{std::move(res.thetaHat)}, res.residual,
                                           std::move(res.stepsLog)};
    };
    switch (family) {
        case Family::ApRw: return wrap(recover_ap_rw(grid, init, options));
        case Family::ApArima110: return wrap(recover_ap_arima110(grid, init, options));
        case Family::ApArima011: return wrap(recover_ap_arima011(grid, init, options));
        case Family::ApcRw: return wrap(recover_apc_rw(grid, init, options));
    }
    throw InputError("unknown family");
}

}  // namespace lcid
