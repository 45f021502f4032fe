#include "lcid/oracle.hpp"

#include "lcid/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace lcid {

namespace {

// E[e_a e_b] for iid innovations of variance sigma2.
double innovation_cov(int a, int b, double sigma2) { return a == b ? sigma2 : 0.0; }

}  // namespace

double oracle_cov_doublesum(LatentModel model, double coefficient, double sigma2, int t, int q) {
    if (t < 1 || q < 1) throw InputError("oracle_cov_doublesum: periods must be >= 1");
    if (model != LatentModel::RandomWalk && !(std::abs(coefficient) < 1.0)) {
        throw InputError("oracle_cov_doublesum: coefficient must lie in (-1,1)");
    }
    double total = 0.0;
    for (int s = 1; s <= t; ++s) {
        for (int r = 1; r <= q; ++r) {
            switch (model) {
                case LatentModel::RandomWalk:
                    total += innovation_cov(s, r, sigma2);
                    break;
                case LatentModel::Arima110:
                    // Stationary AR(1) autocovariance at lag s - r.
                    total += sigma2 * std::pow(coefficient, std::abs(s - r)) / (1.0 - coefficient * coefficient);
                    break;
                case LatentModel::Arima011: {
                    const double phi = coefficient;
                    total += innovation_cov(s, r, sigma2) + phi * innovation_cov(s - 1, r, sigma2) +
                             phi * innovation_cov(s, r - 1, sigma2) + phi * phi * innovation_cov(s - 1, r - 1, sigma2);
                    break;
                }
            }
        }
    }
    return total;
}

}  // namespace lcid
