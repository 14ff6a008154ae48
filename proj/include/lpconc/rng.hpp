#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpconc/specfun.hpp"

namespace lpconc {

// Counter-based splittable generator: every output is a pure function of
// (seed, stream_id, counter), so a stream can be recreated at any point
// regardless of thread scheduling. Outputs are SplitMix64 finalizations of
// the running counter keyed per (seed, stream).
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0)
        : seed_(seed), stream_id_(stream_id), counter_(counter),
          key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() {
        return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ull);
    }

    // 53-bit uniform, strictly inside (0,1)
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // standard normal via inverse-CDF transform of the 53-bit uniform
    double next_normal() { return specfun::std_normal_inv_cdf(next_uniform()); }

    void fill_normal(std::span<double> out) {
        for (double& v : out) v = next_normal();
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_;
    std::uint64_t key_;
};

inline std::vector<double> sample_gaussian_vector(RngStream& stream, std::size_t n) {
    if (n == 0) throw std::domain_error("sample_gaussian_vector: requires n >= 1");
    std::vector<double> x(n);
    stream.fill_normal(x);
    return x;
}

// Stable stream-id derivation for (experiment, chunk) pairs.
inline std::uint64_t derive_stream_id(std::uint64_t experiment_id, std::uint64_t chunk) {
    return experiment_id * 0x100000001b3ull + chunk;
}

}  // namespace lpconc
