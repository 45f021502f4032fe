#pragma once

// Two-step Lee-Carter estimation (SVD first stage, time-series second
// stage) and the demonstrations of why the ad hoc constraints clash with a
// stochastic period factor.

#include "lcid/rng.hpp"
#include "lcid/simulate.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace lcid {

struct SecondStage {
    std::string model;  ///< "rw" | "arima110" | "arima011"
    double mu = 0.0;
    double sigma2_e = 0.0;
    std::optional<double> rho;
    std::optional<double> phi;
};

struct FitResult {
    Eigen::VectorXd alphaHat;
    Eigen::VectorXd betaHat;   ///< sums to 1
    Eigen::VectorXd kappaHat;  ///< sums to 0
    std::optional<SecondStage> secondStage;
    double residualSigma2 = 0.0;  ///< mean squared rank-one residual
};

/// Row means, then the leading singular triple of the centred matrix,
/// oriented so sum(beta) > 0 and rescaled to sum(beta) = 1, sum(kappa) = 0.
[[nodiscard]] FitResult fit_lee_carter_stage1(const Surface& surface);

/// model: "rw" (length >= 3), "arima110" or "arima011" (length >= 4).
[[nodiscard]] SecondStage fit_stage2(const Eigen::VectorXd& kappaHat, const std::string& model);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> counts;
};

struct DistributionalReport {
    long nReps = 0;
    int T = 0;
    double fractionBelow1e3 = 0.0;
    double fractionBelow1e6 = 0.0;
    double minAbsSum = 0.0;
    double meanSum = 0.0;
    double varSum = 0.0;       ///< sample variance of sum_t kappa_t
    double varSumSe = 0.0;     ///< normal-theory standard error of varSum
    double varSumExact = 0.0;  ///< sigma2_e * sum_s sum_t min(s, t)
    Histogram histogram;
};

/// Simulates random-walk paths and reports how often sum_{t<=T} kappa_t
/// lands near zero. nReps >= 1000.
[[nodiscard]] DistributionalReport demo_distributional_constraint(double mu, double sigma2_e, double c, int T,
                                                                  long nReps, RngSpec rng, int threads = 0);

struct DynamicReport {
    int T = 0;
    double maxKappaShift = 0.0;   ///< max_t |kappaHat_t(T+1) - kappaHat_t(T)|, t <= T
    double sumKappaT = 0.0;       ///< sum of the T-window kappaHat
    double forcedNext = 0.0;      ///< -sum_{t<=T} kappaHat_t
    std::vector<double> forcedSequence;  ///< forced kappa_{T+k}, k = 1..
    FitResult fitT;
    FitResult fitTplus1;
};

/// surfaceTplus1 must agree with surfaceT on the first T periods.
[[nodiscard]] DynamicReport demo_dynamic_constraint(const Surface& surfaceT, const Surface& surfaceTplus1,
                                                    int forcedSteps = 5);

}  // namespace lcid
