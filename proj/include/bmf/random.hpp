#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace bmf {

// Stream tags for the keyed generators; each sampler phase draws from its own
// family of streams so adding a phase never shifts another phase's numbers.
enum class Stream : std::uint64_t {
    init_z = 1,
    init_u,
    sweep_z,
    sweep_u,
    ibp_row,
    synth_z,
    synth_u,
    noise,
    prior,
};

// SplitMix64 generator keyed by (seed, stream, indices...). Construction is a
// handful of multiplies, so one generator per (sweep, row) is cheap; that is
// what makes row-parallel sweeps independent of the thread count.
class StreamRng {
public:
    using result_type = std::uint64_t;

    explicit StreamRng(std::uint64_t seed) : state_(mix(seed)) {}

    StreamRng(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> key)
        : state_(mix(seed))
    {
        state_ = mix(state_ ^ mix(static_cast<std::uint64_t>(stream)));
        for (std::uint64_t k : key) state_ = mix(state_ ^ mix(k + 0x632be59bd9b4e019ULL));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace bmf
