#pragma once

// Self-checks run by `lcid theorems` and the acceptance binary. Each
// criterion builds its own inputs from a seed and reports pass/fail with a
// short numeric summary.

#include <cstdint>
#include <string>
#include <vector>

namespace lcid {

struct VerificationOptions {
    bool quick = false;  ///< fewer replicates and searches; same tolerances
    std::uint64_t seed = 20240607;
    int threads = 0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

constexpr int kCriterionCount = 8;

/// id in 1..kCriterionCount:
///  1 latent covariance closed forms vs double sums
///  2 Monte Carlo moments vs closed forms
///  3 random-walk age-period recovery and search
///  4 cohort recovery and refusals
///  5 ARIMA recoveries and MA(1) root selection
///  6 counterexample exactness
///  7 sum-to-zero demonstrations
///  8 stage-one exactness and constraints
[[nodiscard]] CriterionResult run_criterion(int id, const VerificationOptions& options);
[[nodiscard]] std::vector<CriterionResult> run_all_criteria(const VerificationOptions& options);

}  // namespace lcid
