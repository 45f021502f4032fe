#include "lcid/simulate.hpp"

#include "lcid/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace lcid {

namespace {

void require_positive_periods(int T) {
    if (T < 1) throw InputError("simulation needs T >= 1");
}

void require_guarded(double coef, double guardBand, const char* name) {
    if (!(std::abs(coef) <= guardBand) || !(std::abs(coef) < 1.0)) {
        throw InputError(std::string(name) + " outside the simulation guard band |" + name + "| <= " +
                         std::to_string(guardBand));
    }
}

}  // namespace

int resolve_threads(int requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

Eigen::VectorXd simulate_kappa_rw(double mu, double sigma2_e, double c, int T, Rng& rng, const Innovation& law) {
    require_positive_periods(T);
    const double sd = std::sqrt(sigma2_e);
    Eigen::VectorXd kappa(T);
    double level = c;
    for (int t = 1; t <= T; ++t) {
        level += mu + sd * law.draw(rng);
        kappa[t - 1] = level;
    }
    return kappa;
}

Eigen::VectorXd simulate_kappa_arima110(double mu, double rho, double sigma2_e, double c, int T, Rng& rng,
                                        const Innovation& law, double guardBand) {
    require_positive_periods(T);
    require_guarded(rho, guardBand, "rho");
    const double sd = std::sqrt(sigma2_e);
    double u = sd / std::sqrt(1.0 - rho * rho) * law.draw(rng);
    Eigen::VectorXd kappa(T);
    double level = c;
    for (int t = 1; t <= T; ++t) {
        u = rho * u + sd * law.draw(rng);
        level += mu + u;
        kappa[t - 1] = level;
    }
    return kappa;
}

Eigen::VectorXd simulate_kappa_arima011(double mu, double phi, double sigma2_e, double c, int T, Rng& rng,
                                        const Innovation& law, double guardBand) {
    require_positive_periods(T);
    require_guarded(phi, guardBand, "phi");
    const double sd = std::sqrt(sigma2_e);
    double previous = sd * law.draw(rng);  // e_0
    Eigen::VectorXd kappa(T);
    double level = c;
    for (int t = 1; t <= T; ++t) {
        const double e = sd * law.draw(rng);
        level += mu + e + phi * previous;
        previous = e;
        kappa[t - 1] = level;
    }
    return kappa;
}

CohortPaths simulate_cohort_paths(const ApcRwParams& p, const InitialConditions& init, const PanelDims& dims, Rng& rng,
                                  const Innovation& law) {
    require_positive_periods(dims.T);
    CohortPaths paths;
    paths.kappa = simulate_kappa_rw(p.mu1, p.sigma2_e1, init.c1, dims.T, rng, law);
    // iota_h = c0 + (h+X) mu0 + sum_{r=1}^{h+X} e0, for h = 1-X..T.
    paths.iota = simulate_kappa_rw(p.mu0, p.sigma2_e0, init.c0, dims.T + dims.X, rng, law);
    return paths;
}

Surface simulate_surface(const ModelParams& params, const InitialConditions& init, const PanelDims& dims, Rng& rng,
                         const SimulationOptions& options) {
    if (age_count(params) != dims.ages()) throw InputError("parameter length does not match X+1");
    require_positive_periods(dims.T);
    Surface surface{dims, Eigen::MatrixXd(dims.ages(), dims.T)};
    const double noiseSd = std::sqrt(measurement_variance(params));

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                const CohortPaths paths = simulate_cohort_paths(p, init, dims, rng, options.innovation);
                for (int x = 0; x <= dims.X; ++x) {
                    for (int t = 1; t <= dims.T; ++t) {
                        // cohort h = t - x sits at index h + X - 1
                        const double iota = paths.iota[t - x + dims.X - 1];
                        surface.values(x, t - 1) = p.alpha[x] + p.beta0[x] * iota + p.beta1[x] * paths.kappa[t - 1];
                    }
                }
            } else {
                Eigen::VectorXd kappa;
                if constexpr (std::is_same_v<P, ApRwParams>) {
                    kappa = simulate_kappa_rw(p.mu, p.sigma2_e, init.c, dims.T, rng, options.innovation);
                } else if constexpr (std::is_same_v<P, ApArima110Params>) {
                    kappa = simulate_kappa_arima110(p.mu, p.rho, p.sigma2_e, init.c, dims.T, rng, options.innovation,
                                                    options.guardBand);
                } else {
                    kappa = simulate_kappa_arima011(p.mu, p.phi, p.sigma2_e, init.c, dims.T, rng, options.innovation,
                                                    options.guardBand);
                }
                surface.values = p.alpha.rowwise().replicate(dims.T) + p.beta * kappa.transpose();
            }
        },
        params);

    for (int x = 0; x <= dims.X; ++x) {
        for (int t = 0; t < dims.T; ++t) surface.values(x, t) += noiseSd * options.noise.draw(rng);
    }
    return surface;
}

namespace {

Eigen::VectorXd flatten(const Surface& s) {
    // Row-major flattening matches PanelDims::flat.
    Eigen::VectorXd v(s.dims.cells());
    for (int x = 0; x <= s.dims.X; ++x) v.segment(s.dims.flat(x, 1), s.dims.T) = s.values.row(x).transpose();
    return v;
}

struct Block {
    Eigen::VectorXd sum;
    Eigen::MatrixXd outer;
};

}  // namespace

McMoments mc_moments(const ModelParams& params, const InitialConditions& init, const PanelDims& dims, long nReps,
                     RngSpec spec, const SimulationOptions& options, int threads) {
    if (nReps < 100) throw InputError("mc_moments needs at least 100 replicates");
    const int cells = dims.cells();

    auto draw = [&](long i) {
        Rng rng(spec.substream(static_cast<std::uint64_t>(i)));
        return flatten(simulate_surface(params, init, dims, rng, options));
    };
    const Eigen::VectorXd shift = draw(0);

    constexpr long kBlock = 256;
    const long nBlocks = (nReps + kBlock - 1) / kBlock;
    std::vector<Block> blocks(static_cast<std::size_t>(nBlocks));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long b = next++; b < nBlocks; b = next++) {
            Block blk{Eigen::VectorXd::Zero(cells), Eigen::MatrixXd::Zero(cells, cells)};
            const long end = std::min(nReps, (b + 1) * kBlock);
            for (long i = b * kBlock; i < end; ++i) {
                const Eigen::VectorXd d = draw(i) - shift;
                blk.sum += d;
                blk.outer.selfadjointView<Eigen::Lower>().rankUpdate(d);
            }
            blocks[static_cast<std::size_t>(b)] = std::move(blk);
        }
    };
    const int nThreads = std::min<long>(resolve_threads(threads), nBlocks);
    std::vector<std::thread> pool;
    for (int i = 1; i < nThreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(cells);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(cells, cells);
    for (const auto& blk : blocks) {
        sum += blk.sum;
        outer += blk.outer;
    }
    outer = outer.selfadjointView<Eigen::Lower>();

    const double n = static_cast<double>(nReps);
    const Eigen::VectorXd centeredMean = sum / n;
    Eigen::MatrixXd cov = (outer - n * centeredMean * centeredMean.transpose()) / (n - 1.0);
    cov = 0.5 * (cov + cov.transpose()).eval();
    const Eigen::VectorXd mean = centeredMean + shift;

    McMoments mc;
    mc.dims = dims;
    mc.nReps = nReps;
    mc.meanHat.resize(dims.ages(), dims.T);
    mc.meanSe.resize(dims.ages(), dims.T);
    for (int x = 0; x <= dims.X; ++x) {
        for (int t = 1; t <= dims.T; ++t) {
            const int i = dims.flat(x, t);
            mc.meanHat(x, t - 1) = mean[i];
            mc.meanSe(x, t - 1) = std::sqrt(std::max(cov(i, i), 0.0) / n);
        }
    }
    mc.covHat = cov;
    const Eigen::VectorXd d = cov.diagonal().cwiseMax(0.0);
    mc.covSe = ((d * d.transpose()).array() + cov.array().square()).matrix() / n;
    mc.covSe = mc.covSe.cwiseSqrt();
    return mc;
}

McComparison compare_moments(const McMoments& mc, const MomentGrid& exact, double k) {
    if (!(mc.dims == exact.dims)) throw InputError("compare_moments: panel dimensions differ");
    McComparison out;
    long hits = 0;
    for (Eigen::Index i = 0; i < mc.meanHat.size(); ++i) {
        const double se = mc.meanSe.data()[i];
        const double z = std::abs(mc.meanHat.data()[i] - exact.means.data()[i]) / (se > 0.0 ? se : 1e-300);
        out.maxMeanZ = std::max(out.maxMeanZ, z);
        hits += z <= k;
        ++out.meanEntries;
    }
    out.meanFraction = static_cast<double>(hits) / static_cast<double>(out.meanEntries);

    hits = 0;
    const Eigen::Index n = mc.covHat.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double se = mc.covSe(i, j);
            const double z = std::abs(mc.covHat(i, j) - exact.covs(i, j)) / (se > 0.0 ? se : 1e-300);
            out.maxCovZ = std::max(out.maxCovZ, z);
            hits += z <= k;
            ++out.covEntries;
        }
    }
    out.covFraction = static_cast<double>(hits) / static_cast<double>(out.covEntries);
    return out;
}

}  // namespace lcid
