#include "lcid/rng.hpp"

#include "lcid/errors.hpp"

#include <cmath>

namespace lcid {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngSpec RngSpec::substream(std::uint64_t index) const noexcept {
    return {seed, splitmix64(stream ^ splitmix64(index + 0x632BE59BD9B4E019ULL))};
}

Rng::Rng(RngSpec spec) {
    const std::uint64_t a = splitmix64(spec.seed);
    const std::uint64_t b = splitmix64(a ^ spec.stream);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

double Rng::student_t(double df) {
    std::student_t_distribution<double> dist(df);
    return dist(engine_);
}

double Innovation::draw(Rng& rng) const {
    switch (kind) {
        case Kind::Gaussian:
            return rng.normal();
        case Kind::Uniform:
            // U(-sqrt3, sqrt3) has unit variance.
            return std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
        case Kind::StudentT:
            if (!(df > 4.0)) throw InputError("Student-t innovations need df > 4");
            return rng.student_t(df) * std::sqrt((df - 2.0) / df);
    }
    return 0.0;
}

}  // namespace lcid
