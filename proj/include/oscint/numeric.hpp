#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

namespace oscint {

// Accumulator type used internally by streaming recursions and reductions.
// float/double promote to long double; extended types keep their own width.
template <class Real>
using acc_t = std::conditional_t<std::is_same_v<Real, double> || std::is_same_v<Real, float>,
                                 long double, Real>;

// Neumaier-compensated summation.
template <class T>
class CompensatedSum {
public:
    void add(T x) noexcept {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    T value() const noexcept { return sum_ + comp_; }

private:
    T sum_ = T(0);
    T comp_ = T(0);
};

// Uniform double in [0,1) from the top 53 bits of a 64-bit generator word.
// Avoids std::uniform_real_distribution so streams are identical across
// standard library implementations.
template <class Rng>
double uniform01(Rng& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

template <class Rng>
double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Least-squares slope of log10(y) against log10(x).
inline double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log10(x[i]);
        const double ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = double(m) * sxx - sx * sx;
    return (double(m) * sxy - sx * sy) / denom;
}

} // namespace oscint
