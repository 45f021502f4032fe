#pragma once

#include <cstdint>
#include <random>

namespace lcid {

/// A seed plus a substream index. Equal specs give identical draws on one
/// build; replicate i of a Monte Carlo run uses RngSpec::substream(i).
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    [[nodiscard]] RngSpec substream(std::uint64_t index) const noexcept;
};

/// mt19937_64 seeded from (seed, stream) through SplitMix64 mixing.
class Rng {
public:
    explicit Rng(RngSpec spec);

    [[nodiscard]] double normal() { return normal_(engine_); }
    [[nodiscard]] double uniform() { return uniform_(engine_); }
    [[nodiscard]] double student_t(double df);
    [[nodiscard]] std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Unit-variance, mean-zero innovation law.
struct Innovation {
    enum class Kind { Gaussian, Uniform, StudentT };
    Kind kind = Kind::Gaussian;
    double df = 8.0;  ///< StudentT only; must exceed 4

    [[nodiscard]] double draw(Rng& rng) const;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace lcid
