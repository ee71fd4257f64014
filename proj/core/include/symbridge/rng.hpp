#pragma once

#include <cstdint>
#include <cmath>

namespace symbridge {

// Counter-based stream: the state advances by a fixed odd constant and every
// output is a bijective finalizer of the state (splitmix64 construction).
// Two generators with the same key produce the same sequence on any platform,
// independent of how many values other streams consumed.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : state_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    // Key fan-out: one master seed -> per-(stream, item) keys. Used by the
    // samplers so that item i of stream s is reproducible in isolation.
    static std::uint64_t derive_key(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
        std::uint64_t k = mix(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return mix(k ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0,1], safe under log
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Unbiased integer in [0,n) (Lemire with rejection).
    std::uint64_t bounded(std::uint64_t n) {
        while (true) {
            std::uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // Standard normal, Box-Muller with one cached value.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

// Standard normal CDF and quantile. The quantile is Wichura's AS241
// (double-precision rational approximations), used for exact inverse-CDF
// sampling of truncated Gaussians.
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace symbridge
