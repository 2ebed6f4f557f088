#ifndef MFLAB_COMMON_HPP
#define MFLAB_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mflab {

using Vec = std::vector<double>;

// Metric on Omega = [0,1]: plain interval distance or the flat torus.
enum class OmegaMetric { interval, torus };

inline double omega_dist(double a, double b, OmegaMetric m) {
    double d = std::fabs(a - b);
    if (m == OmegaMetric::torus) d = std::min(d, 1.0 - d);
    return d;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double sq(double x) { return x * x; }

inline double norm2(const Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Counter-based deterministic RNG: the k-th draw for a given seed is a pure
// function of (seed, k), so streams are reproducible across platforms and
// thread counts.  Mixing function is splitmix64.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [a,b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // uniform integer in {0,...,n-1}
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

// Chunked parallel map over [0,n).  Each index is processed exactly once and
// writes only to its own slot, so results do not depend on the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 1) {
    if (threads <= 1 || n < 2 * threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mflab

#endif
