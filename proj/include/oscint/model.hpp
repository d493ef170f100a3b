#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "oscint/errors.hpp"

namespace oscint {

// Physical inputs for the oscillator kernel V(x) = m lambda^2 x^2 / 2.
// q0/q are per-coordinate endpoints; dim replicates the problem across
// coordinates (the kernel factorizes). lambda == 0 selects the free-particle
// limit, which every formula below supports analytically.
struct OscillatorParams {
    double mass = 1.0;
    double lambda = 1.0;
    double hbar = 1.0;
    double t = 1.0;
    double q0 = 0.0;
    double q = 1.0;
    int dim = 1;

    // Evaluation window of the closed-form kernel: lambda*t < pi. The kernel
    // degenerates at the caustic t = pi/lambda.
    bool in_window() const noexcept { return lambda * t < std::numbers::pi; }
};

enum class GridPurpose {
    propagator,         // requires lambda*t < pi
    eigen_exploration,  // out-of-window t permitted, flagged
};

// Time discretization. The action step is epsilon = t/n while the reference
// path is sampled at s_j = j*t/(n+1); the two spacings differ by O(1/n^2) and
// both are kept as-is. See the robustness test in the model suite.
struct SliceGrid {
    long long n = 1;
    double t = 0.0;
    double epsilon = 0.0;
    bool out_of_window = false;

    double node(long long j) const noexcept { return double(j) * t / double(n + 1); }
    double node_step() const noexcept { return t / double(n + 1); }
    long long sample_count() const noexcept { return n + 2; }
};

inline SliceGrid validate(const OscillatorParams& p, long long n,
                          GridPurpose purpose = GridPurpose::propagator) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(p.mass)) throw NonPositiveParameter("mass must be > 0");
    if (!positive(p.hbar)) throw NonPositiveParameter("hbar must be > 0");
    if (!positive(p.t)) throw NonPositiveParameter("t must be > 0");
    if (!(std::isfinite(p.lambda) && p.lambda >= 0.0))
        throw NonPositiveParameter("lambda must be >= 0 (0 = free-particle limit)");
    if (n < 1) throw NonPositiveParameter("n must be >= 1");
    if (p.dim < 1) throw NonPositiveParameter("dim must be >= 1");

    SliceGrid grid;
    grid.n = n;
    grid.t = p.t;
    grid.epsilon = p.t / double(n);
    grid.out_of_window = !p.in_window();
    if (grid.out_of_window && purpose == GridPurpose::propagator)
        throw OutOfWindow("lambda*t >= pi: outside the kernel window t < pi/lambda");
    return grid;
}

// Fixed branch for every complex square root of 1/i in the amplitude
// prefactors: 1/sqrt(i) := exp(-i pi/4). Prefactors are assembled as
// (positive real)^(1/2) times this constant.
inline std::complex<double> sqrt_reciprocal_i_branch() noexcept {
    const double r = std::sqrt(0.5);
    return {r, -r};
}

// sqrt(x / i) for x > 0 with the fixed branch above.
inline std::complex<double> prefactor_sqrt(double x) {
    return std::sqrt(x) * sqrt_reciprocal_i_branch();
}

// Amplitude value carrying the branch convention with it.
struct ComplexAmplitude {
    std::complex<double> value{0.0, 0.0};

    static std::complex<double> branch_tag() noexcept { return sqrt_reciprocal_i_branch(); }
    double modulus() const noexcept { return std::abs(value); }
    double phase() const noexcept { return std::arg(value); }
};

} // namespace oscint
