#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

namespace lcid::detail {

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    long evaluations = 0;
};

/// Nelder-Mead downhill simplex with the standard coefficients, restarted
/// from the incumbent whenever the simplex collapses before the budget runs
/// out and the restart still improves.
template <typename Fn>
SimplexResult nelder_mead(Fn&& f, Eigen::VectorXd start, double step, long budget, double ftol = 1e-15) {
    const Eigen::Index n = start.size();
    SimplexResult best{start, f(start), 1};

    while (best.evaluations < budget) {
        std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), best.x);
        std::vector<double> vals(static_cast<std::size_t>(n + 1), best.value);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& p = pts[static_cast<std::size_t>(i + 1)];
            p[i] += step * std::max(1.0, std::abs(p[i]));
            vals[static_cast<std::size_t>(i + 1)] = f(p);
        }
        long evals = n;
        std::vector<std::size_t> order(pts.size());

        while (best.evaluations + evals < budget) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
            const std::size_t lo = order.front();
            const std::size_t hi = order.back();
            const std::size_t second = order[order.size() - 2];
            if (vals[hi] - vals[lo] <= ftol * std::abs(vals[lo]) + 1e-300) break;

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (i != hi) centroid += pts[i];
            centroid /= static_cast<double>(n);

            const Eigen::VectorXd reflected = centroid + (centroid - pts[hi]);
            const double fr = f(reflected);
            ++evals;
            if (fr < vals[lo]) {
                const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[hi]);
                const double fe = f(expanded);
                ++evals;
                if (fe < fr) {
                    pts[hi] = expanded;
                    vals[hi] = fe;
                } else {
                    pts[hi] = reflected;
                    vals[hi] = fr;
                }
            } else if (fr < vals[second]) {
                pts[hi] = reflected;
                vals[hi] = fr;
            } else {
                const bool outside = fr < vals[hi];
                const Eigen::VectorXd contracted =
                    outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                            : Eigen::VectorXd(centroid + 0.5 * (pts[hi] - centroid));
                const double fc = f(contracted);
                ++evals;
                if (fc < (outside ? fr : vals[hi])) {
                    pts[hi] = contracted;
                    vals[hi] = fc;
                } else {
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        if (i == lo) continue;
                        pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
                        vals[i] = f(pts[i]);
                        ++evals;
                    }
                }
            }
            if ((pts[hi] - pts[lo]).cwiseAbs().maxCoeff() < 1e-15 * (1.0 + pts[lo].cwiseAbs().maxCoeff())) break;
        }

        const auto it = std::min_element(vals.begin(), vals.end());
        const std::size_t idx = static_cast<std::size_t>(it - vals.begin());
        best.evaluations += evals;
        const bool improved = vals[idx] < best.value * (1.0 - 1e-9);
        if (vals[idx] < best.value) {
            best.value = vals[idx];
            best.x = pts[idx];
        }
        if (!improved) break;
        step *= 0.5;
    }
    return best;
}

}  // namespace lcid::detail
