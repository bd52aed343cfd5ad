#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace dimscope {

struct Seed {
    std::uint64_t value = 0;
    friend bool operator==(Seed, Seed) = default;
};

/// Seed for an independent stream keyed by (seed, label, indices).
/// Streams do not depend on call order, so results are identical whatever
/// order or thread the work runs on.
Seed derive_seed(Seed seed, std::string_view label, std::initializer_list<std::uint64_t> indices = {});

/// Mersenne twister with hand-written transforms. The std distributions are
/// implementation-defined, so they are avoided to keep output identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed.value) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, bound), unbiased.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dimscope
