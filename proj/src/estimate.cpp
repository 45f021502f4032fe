#include "lcid/estimate.hpp"

#include "lcid/errors.hpp"
#include "lcid/moments.hpp"
#include "lcid/params.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace lcid {

namespace {

double plain_sum(const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
    return s;
}

// Sets the last entry so that a left-to-right sum is exactly zero.
void close_to_zero_sum(Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    v[n - 1] = 0.0 - plain_sum(v.head(n - 1));
}

Eigen::VectorXd differences(const Eigen::VectorXd& k) { return k.tail(k.size() - 1) - k.head(k.size() - 1); }

}  // namespace

FitResult fit_lee_carter_stage1(const Surface& surface) {
    const Eigen::MatrixXd& y = surface.values;
    if (y.cols() < 2) throw InputError("stage-one fit needs T >= 2 periods");
    if (y.rows() < 1) throw InputError("stage-one fit needs at least one age");
    if (!y.allFinite()) throw InputError("surface has non-finite entries");

    FitResult fit;
    fit.alphaHat = y.rowwise().mean();
    const Eigen::MatrixXd centred = y.colwise() - fit.alphaHat;
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (centred.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        throw InputError("centred surface is zero; loadings are undefined");
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd u = svd.matrixU().col(0);
    Eigen::VectorXd v = svd.matrixV().col(0);
    const double s = svd.singularValues()[0];
    double su = u.sum();
    if (std::abs(su) <= 1e-12 * u.cwiseAbs().sum()) {
        throw NumericalDiagnostic("leading age loading sums to zero; cannot normalise to sum(beta) = 1");
    }
    if (su < 0.0) {
        u = -u;
        v = -v;
        su = -su;
    }
    fit.betaHat = normalize_betas(u);
    fit.kappaHat = (s * su) * v;
    const double shift = fit.kappaHat.mean();
    fit.kappaHat.array() -= shift;
    fit.alphaHat += shift * fit.betaHat;
    close_to_zero_sum(fit.kappaHat);

    const Eigen::MatrixXd resid =
        (y.colwise() - fit.alphaHat) - fit.betaHat * fit.kappaHat.transpose();
    fit.residualSigma2 = resid.squaredNorm() / static_cast<double>(resid.size());
    return fit;
}

SecondStage fit_stage2(const Eigen::VectorXd& kappaHat, const std::string& model) {
    if (!kappaHat.allFinite()) throw InputError("kappa has non-finite entries");
    SecondStage out;
    out.model = model;
    if (model == "rw") {
        if (kappaHat.size() < 3) throw InputError("random-walk fit needs at least 3 periods");
        const Eigen::VectorXd d = differences(kappaHat);
        out.mu = d.mean();
        out.sigma2_e = (d.array() - out.mu).square().sum() / static_cast<double>(d.size() - 1);
        return out;
    }
    if (model == "arima110") {
        if (kappaHat.size() < 4) throw InputError("ARIMA(1,1,0) fit needs at least 4 periods");
        const Eigen::VectorXd d = differences(kappaHat);
        const Eigen::Index m = d.size() - 1;
        Eigen::MatrixXd design(m, 2);
        design.col(0).setOnes();
        design.col(1) = d.head(m);
        const Eigen::VectorXd target = d.tail(m);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < 2) throw NumericalDiagnostic("AR(1) regression is rank deficient (constant differences)");
        const Eigen::Vector2d coef = qr.solve(target);
        const double rho = coef[1];
        if (!(std::abs(rho) < 1.0)) throw NumericalDiagnostic("fitted AR coefficient lies outside (-1,1)");
        out.rho = rho;
        out.mu = coef[0] / (1.0 - rho);
        const double rss = (target - design * coef).squaredNorm();
        out.sigma2_e = rss / static_cast<double>(std::max<Eigen::Index>(1, m - 2));
        return out;
    }
    if (model == "arima011") {
        if (kappaHat.size() < 4) throw InputError("ARIMA(0,1,1) fit needs at least 4 periods");
        const Eigen::VectorXd d = differences(kappaHat);
        const Eigen::Index n = d.size();
        out.mu = d.mean();
        const Eigen::VectorXd z = d.array() - out.mu;
        const double g0 = z.squaredNorm() / static_cast<double>(n);
        const double g1 = z.tail(n - 1).dot(z.head(n - 1)) / static_cast<double>(n);
        if (!(g0 > 0.0)) throw NumericalDiagnostic("differences have zero variance; MA(1) is undefined");
        const double r = g1 / g0;
        if (std::abs(r) > 0.5) {
            throw NumericalDiagnostic("lag-one autocorrelation " + std::to_string(r) +
                                      " exceeds 0.5 in magnitude; no real invertible MA(1) root");
        }
        const double phi = r == 0.0 ? 0.0 : (1.0 - std::sqrt(1.0 - 4.0 * r * r)) / (2.0 * r);
        out.phi = phi;
        out.sigma2_e = g0 / (1.0 + phi * phi);
        return out;
    }
    throw InputError("unknown second-stage model '" + model + "' (expected rw, arima110 or arima011)");
}

DistributionalReport demo_distributional_constraint(double mu, double sigma2_e, double c, int T, long nReps,
                                                    RngSpec rng, int threads) {
    if (nReps < 1000) throw InputError("distributional demo needs nReps >= 1000");
    if (T < 1) throw InputError("distributional demo needs T >= 1");
    if (!(sigma2_e > 0.0)) throw InputError("sigma2_e must be > 0");

    std::vector<double> sums(static_cast<std::size_t>(nReps));
    constexpr long kBlock = 1024;
    const long nBlocks = (nReps + kBlock - 1) / kBlock;
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long b = next++; b < nBlocks; b = next++) {
            const long end = std::min(nReps, (b + 1) * kBlock);
            for (long i = b * kBlock; i < end; ++i) {
                Rng r(rng.substream(static_cast<std::uint64_t>(i)));
                sums[static_cast<std::size_t>(i)] = plain_sum(simulate_kappa_rw(mu, sigma2_e, c, T, r));
            }
        }
    };
    const int n = static_cast<int>(std::min<long>(resolve_threads(threads), nBlocks));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    DistributionalReport rep;
    rep.nReps = nReps;
    rep.T = T;
    const Eigen::Map<const Eigen::VectorXd> s(sums.data(), nReps);
    long below3 = 0;
    long below6 = 0;
    for (const double v : sums) {
        below3 += std::abs(v) < 1e-3;
        below6 += std::abs(v) < 1e-6;
    }
    const double dn = static_cast<double>(nReps);
    rep.fractionBelow1e3 = static_cast<double>(below3) / dn;
    rep.fractionBelow1e6 = static_cast<double>(below6) / dn;
    rep.minAbsSum = s.cwiseAbs().minCoeff();
    rep.meanSum = s.mean();
    rep.varSum = (s.array() - rep.meanSum).square().sum() / (dn - 1.0);
    rep.varSumSe = rep.varSum * std::sqrt(2.0 / (dn - 1.0));
    double pairs = 0.0;
    for (int a = 1; a <= T; ++a)
        for (int b = 1; b <= T; ++b) pairs += cov_latent_rw(sigma2_e, a, b);
    rep.varSumExact = pairs;

    constexpr int kBins = 20;
    rep.histogram.lo = s.minCoeff();
    rep.histogram.hi = s.maxCoeff();
    rep.histogram.counts.assign(kBins, 0);
    const double width = (rep.histogram.hi - rep.histogram.lo) / kBins;
    for (const double v : sums) {
        int bin = width > 0.0 ? static_cast<int>((v - rep.histogram.lo) / width) : 0;
        ++rep.histogram.counts[static_cast<std::size_t>(std::clamp(bin, 0, kBins - 1))];
    }
    return rep;
}

DynamicReport demo_dynamic_constraint(const Surface& surfaceT, const Surface& surfaceTplus1, int forcedSteps) {
    const Eigen::Index T = surfaceT.values.cols();
    if (surfaceT.values.rows() != surfaceTplus1.values.rows()) {
        throw InputError("surfaces differ in the number of ages");
    }
    if (surfaceTplus1.values.cols() != T + 1) {
        throw InputError("second surface must have exactly one more period than the first");
    }
    if (surfaceTplus1.values.leftCols(T) != surfaceT.values) {
        throw InputError("second surface does not extend the first: shared periods differ");
    }
    if (forcedSteps < 1) throw InputError("forcedSteps must be >= 1");

    DynamicReport rep;
    rep.T = static_cast<int>(T);
    rep.fitT = fit_lee_carter_stage1(surfaceT);
    rep.fitTplus1 = fit_lee_carter_stage1(surfaceTplus1);
    rep.maxKappaShift = (rep.fitTplus1.kappaHat.head(T) - rep.fitT.kappaHat).cwiseAbs().maxCoeff();

    // Hold the T-window path fixed and impose a zero sum on every extension.
    double running = plain_sum(rep.fitT.kappaHat);
    rep.sumKappaT = running;
    for (int k = 0; k < forcedSteps; ++k) {
        const double forced = 0.0 - running;
        rep.forcedSequence.push_back(forced);
        running += forced;
    }
    rep.forcedNext = rep.forcedSequence.front();
    return rep;
}

}  // namespace lcid
