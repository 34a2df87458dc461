#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>

namespace phasecon {

// log I0(x) for x >= 0 without overflow. Power series up to x = 20, the
// large-argument expansion x - log(2 pi x)/2 + log(1 + 1/(8x) + ...) above.
double log_bessel_i0(double x);

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(sum exp(v)) over the span, subtracting the maximum first.
double log_sum_exp(std::span<const double> v) noexcept;

inline double log_add_exp(double a, double b) noexcept {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Number of worker threads for internal parallel loops. Reads
// PHASECON_THREADS; defaults to 1.
unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` threads. Each index is
// processed exactly once; callers write results into per-index slots and
// reduce them in index order, so results do not depend on `threads`.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace phasecon
