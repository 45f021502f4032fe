#include "lcid/identify.hpp"
#include "lcid/simulate.hpp"

#include "nelder_mead.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace lcid {

namespace {

// Unconstrained coordinates: loadings drop their last entry (restored from
// sum-to-one), variances are logged, rho/phi pass through tanh.
Eigen::VectorXd free_loadings(const Eigen::VectorXd& beta) { return beta.head(beta.size() - 1); }

Eigen::VectorXd full_loadings(const Eigen::VectorXd& z, Eigen::Index n) {
    Eigen::VectorXd beta(n);
    beta.head(n - 1) = z;
    beta[n - 1] = 1.0 - z.sum();
    return beta;
}

Eigen::VectorXd encode(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> Eigen::VectorXd {
            using P = std::decay_t<decltype(p)>;
            const Eigen::Index n = p.alpha.size();
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                Eigen::VectorXd z(3 * n + 3);
                z << p.alpha, free_loadings(p.beta0), free_loadings(p.beta1), p.mu0, p.mu1, std::log(p.sigma2_e0),
                    std::log(p.sigma2_e1), std::log(p.sigma2_eps);
                return z;
            } else {
                const bool hasCoef = !std::is_same_v<P, ApRwParams>;
                Eigen::VectorXd z(2 * n + 2 + (hasCoef ? 1 : 0));
                z.head(n) = p.alpha;
                z.segment(n, n - 1) = free_loadings(p.beta);
                z[2 * n - 1] = p.mu;
                z[2 * n] = std::log(p.sigma2_e);
                z[2 * n + 1] = std::log(p.sigma2_eps);
                if constexpr (std::is_same_v<P, ApArima110Params>) z[2 * n + 2] = std::atanh(p.rho);
                if constexpr (std::is_same_v<P, ApArima011Params>) z[2 * n + 2] = std::atanh(p.phi);
                return z;
            }
        },
        params);
}

ModelParams decode(const Eigen::VectorXd& z, const ModelParams& like) {
    return std::visit(
        [&](const auto& proto) -> ModelParams {
            using P = std::decay_t<decltype(proto)>;
            const Eigen::Index n = proto.alpha.size();
            P p;
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                p.alpha = z.head(n);
                p.beta0 = full_loadings(z.segment(n, n - 1), n);
                p.beta1 = full_loadings(z.segment(2 * n - 1, n - 1), n);
                p.mu0 = z[3 * n - 2];
                p.mu1 = z[3 * n - 1];
                p.sigma2_e0 = std::exp(z[3 * n]);
                p.sigma2_e1 = std::exp(z[3 * n + 1]);
                p.sigma2_eps = std::exp(z[3 * n + 2]);
            } else {
                p.alpha = z.head(n);
                p.beta = full_loadings(z.segment(n, n - 1), n);
                p.mu = z[2 * n - 1];
                p.sigma2_e = std::exp(z[2 * n]);
                p.sigma2_eps = std::exp(z[2 * n + 1]);
                if constexpr (std::is_same_v<P, ApArima110Params>) p.rho = std::tanh(z[2 * n + 2]);
                if constexpr (std::is_same_v<P, ApArima011Params>) p.phi = std::tanh(z[2 * n + 2]);
            }
            return p;
        },
        like);
}

Eigen::VectorXd moment_vector(const MomentGrid& g) {
    const Eigen::Index cells = g.covs.rows();
    Eigen::VectorXd v(g.means.size() + cells * (cells + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < g.means.size(); ++i) v[k++] = g.means.data()[i];
    for (Eigen::Index j = 0; j < cells; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) v[k++] = g.covs(i, j);
    return v;
}

class Problem {
public:
    Problem(const ModelParams& theta, const InitialConditions& init, const PanelDims& dims, double delta)
        : theta_(theta), init_(init), dims_(dims), delta_(delta),
          target_(moment_vector(moment_grid(theta, init, dims))) {
        const double scale = std::max(1.0, target_.cwiseAbs().maxCoeff());
        penaltyWeight_ = 1e8 * scale * scale;
    }

    [[nodiscard]] Eigen::Index residual_count() const { return target_.size() + 1; }

    void residuals(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
        const ModelParams candidate = decode(z, theta_);
        out.resize(residual_count());
        if (!z.allFinite()) {
            out.setConstant(1e150);
            return;
        }
        out.head(target_.size()) = moment_vector(moment_grid(candidate, init_, dims_)) - target_;
        const double shortfall = std::max(0.0, delta_ - param_distance(candidate, theta_)) / delta_;
        out[target_.size()] = std::sqrt(penaltyWeight_) * shortfall;
        for (Eigen::Index i = 0; i < out.size(); ++i)
            if (!std::isfinite(out[i])) out[i] = 1e150;
    }

    [[nodiscard]] double objective(const Eigen::VectorXd& z) const {
        Eigen::VectorXd r;
        residuals(z, r);
        return r.squaredNorm();
    }

    [[nodiscard]] const ModelParams& theta() const { return theta_; }

private:
    ModelParams theta_;
    InitialConditions init_;
    PanelDims dims_;
    double delta_;
    Eigen::VectorXd target_;
    double penaltyWeight_ = 1.0;
};

struct LmFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const Problem* problem;
    Eigen::Index nInputs;

    [[nodiscard]] int inputs() const { return static_cast<int>(nInputs); }
    [[nodiscard]] int values() const { return static_cast<int>(problem->residual_count()); }
    int operator()(const Eigen::VectorXd& z, Eigen::VectorXd& r) const {
        problem->residuals(z, r);
        return 0;
    }
};

// The exterior penalty can leave a candidate marginally inside the
// excluded ball; push it radially outward from theta until it clears delta.
Eigen::VectorXd clear_ball(const Eigen::VectorXd& z, const Eigen::VectorXd& origin, const ModelParams& theta,
                           double delta) {
    Eigen::VectorXd out = z;
    for (int i = 0; i < 60; ++i) {
        const double d = param_distance(decode(out, theta), theta);
        if (d >= delta) break;
        const double factor = d > 0.0 ? std::min(2.0, delta / d * (1.0 + 1e-9)) : 2.0;
        out = origin + factor * (out - origin);
        if (d == 0.0) out.array() += delta;
    }
    return out;
}

struct StartOutcome {
    Eigen::VectorXd z;
    double residual = std::numeric_limits<double>::infinity();
    double distance = 0.0;
    long evaluations = 0;
};

}  // namespace

SearchReport search_equivalent(const ModelParams& theta, const InitialConditions& init, const PanelDims& dims,
                               const SearchOptions& options, RngSpec rng) {
    if (!(options.delta > 0.0)) throw InputError("search_equivalent requires delta > 0");
    if (options.nStarts < 1) throw InputError("search_equivalent requires at least one start");
    {
        ValidationVerdict v = validate(theta, dims);
        if (options.liftLoadingExclusion || dims.X == 0) {
            std::erase(v.violations, std::string("beta0 = beta1 excluded"));
        }
        if (!v.ok()) throw InputError("search_equivalent: invalid theta: " + v.violations.front());
    }

    const Problem problem(theta, init, dims, options.delta);
    const Eigen::VectorXd origin = encode(theta);
    const double scales[3] = {0.05, 0.3, 1.5};
    const EquivalenceOptions eqOptions{options.epsilonM, options.delta, true};

    std::vector<StartOutcome> outcomes(static_cast<std::size_t>(options.nStarts));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int s = next++; s < options.nStarts; s = next++) {
            Rng r(rng.substream(static_cast<std::uint64_t>(s)));
            Eigen::VectorXd start = origin;
            const double scale = scales[s % 3];
            for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += scale * r.normal();

            auto f = [&](const Eigen::VectorXd& z) { return problem.objective(z); };
            detail::SimplexResult nm = detail::nelder_mead(f, start, 0.1, options.maxEvaluations);

            LmFunctor functor{&problem, origin.size()};
            Eigen::NumericalDiff<LmFunctor> numeric(functor);
            Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LmFunctor>> lm(numeric);
            lm.parameters.maxfev = 4000;
            lm.parameters.ftol = 1e-30;
            lm.parameters.xtol = 1e-16;
            Eigen::VectorXd z = nm.x;
            lm.minimize(z);
            if (!(problem.objective(z) <= nm.value)) z = nm.x;
            z = clear_ball(z, origin, theta, options.delta);

            StartOutcome out;
            const ModelParams candidate = decode(z, theta);
            const EquivalenceReport rep = check_equivalence(theta, candidate, init, dims, eqOptions);
            out.z = z;
            out.residual = rep.momentResidual;
            out.distance = rep.paramDistance;
            out.evaluations = nm.evaluations + lm.nfev;
            outcomes[static_cast<std::size_t>(s)] = std::move(out);
        }
    };
    const int nThreads = std::min(resolve_threads(options.threads), options.nStarts);
    std::vector<std::thread> pool;
    for (int i = 1; i < nThreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SearchReport report;
    for (int s = 0; s < options.nStarts; ++s) {
        const auto& o = outcomes[static_cast<std::size_t>(s)];
        report.evaluations += o.evaluations;
        if (o.distance < options.delta) continue;
        if (report.bestStart < 0 || o.residual < outcomes[static_cast<std::size_t>(report.bestStart)].residual) {
            report.bestStart = s;
        }
    }
    if (report.bestStart < 0) {
        report.best = check_equivalence(theta, theta, init, dims, eqOptions);
        report.best.verdict = Verdict::Inconclusive;
        report.summary = "no candidate cleared the distance constraint";
        return report;
    }
    const ModelParams candidate = decode(outcomes[static_cast<std::size_t>(report.bestStart)].z, theta);
    report.best = check_equivalence(theta, candidate, init, dims, eqOptions);
    report.found = report.best.momentResidual <= options.reportThreshold;
    report.summary = report.found ? "equivalent parameter value found"
                                  : "no equivalent found (supports identifiability; numerical search, not a proof)";
    return report;
}

}  // namespace lcid
