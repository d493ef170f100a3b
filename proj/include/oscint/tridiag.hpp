#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <span>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/numeric.hpp"

// Structured-matrix layer for the sliced action matrix
//   S_n = tridiag(-1, 2 - e, -1),   e = (lambda * epsilon)^2,
// the n x n interior block of the discretized quadratic action. Everything
// here runs in O(n) with O(1) auxiliary memory; dense cross-checks live in
// the oracle layer.
namespace oscint::tridiag {

// Dense-oracle size cutoff, overridable via OSCINT_DENSE_THRESHOLD.
inline long long dense_threshold() {
    if (const char* env = std::getenv("OSCINT_DENSE_THRESHOLD")) {
        const long long v = std::atoll(env);
        if (v > 0) return v;
    }
    return 512;
}

template <class Real = double>
struct SlicedActionMatrix {
    long long n = 1;
    Real e = Real(0);  // (lambda * epsilon)^2

    Real diag() const noexcept { return Real(2) - e; }
    static constexpr Real offdiag() noexcept { return Real(-1); }
};

// mu_k = 2 - 2 cos(k pi/(n+1)) - e, ascending in k. The 4 sin^2 form keeps
// full relative accuracy for the small leading eigenvalues.
template <class Real = double>
std::vector<Real> eigenvalues(long long n, Real e) {
    if (n < 1) throw NonPositiveParameter("eigenvalues: n must be >= 1");
    std::vector<Real> mu(static_cast<std::size_t>(n));
    const Real half_step = std::numbers::pi_v<Real> / (Real(2) * Real(n + 1));
    for (long long k = 1; k <= n; ++k) {
        const Real s = std::sin(Real(k) * half_step);
        mu[static_cast<std::size_t>(k - 1)] = Real(4) * s * s - e;
    }
    return mu;
}

template <class Real = double>
Real min_eigenvalue(long long n, Real e) {
    const Real s = std::sin(std::numbers::pi_v<Real> / (Real(2) * Real(n + 1)));
    return Real(4) * s * s - e;
}

// Infinity-norm residual of the analytic eigenpair
//   v_{k,j} = sin(j k pi/(n+1)),  S_n v_k = mu_k v_k.
template <class Real = double>
Real eigenvector_residual(long long n, Real e, long long k) {
    if (k < 1 || k > n) throw IndexOutOfRange("eigenvector_residual: k must satisfy 1 <= k <= n");
    const Real step = Real(k) * std::numbers::pi_v<Real> / Real(n + 1);
    const Real sh = std::sin(step / Real(2));
    const Real mu = Real(4) * sh * sh - e;
    const Real diag = Real(2) - e;
    auto v = [&](long long j) { return std::sin(Real(j) * step); };
    Real worst = Real(0);
    for (long long j = 1; j <= n; ++j) {
        const Real lhs = -v(j - 1) + diag * v(j) - v(j + 1);
        const Real r = std::abs(lhs - mu * v(j));
        if (r > worst) worst = r;
    }
    return worst;
}

// Conservative positive-definiteness bound:
//   t < (n pi / ((n+1) lambda)) sqrt(1 - pi^2 / (12 (n+1)^2)).
// Approaches pi/lambda from below as n grows.
template <class Real = double>
Real positivity_bound_t(long long n, Real lambda) {
    if (n < 1) throw NonPositiveParameter("positivity_bound_t: n must be >= 1");
    if (!(lambda > Real(0))) throw NonPositiveParameter("positivity_bound_t: lambda must be > 0");
    const Real pi = std::numbers::pi_v<Real>;
    const Real ratio = Real(n) / Real(n + 1);
    const Real bracket = Real(1) - pi * pi / (Real(12) * Real(n + 1) * Real(n + 1));
    return ratio * (pi / lambda) * std::sqrt(bracket);
}

// Determinant ladder. D_j is the j x j minor with last diagonal entry 1
// (all other diagonal entries 2 - e); S_j is the ordinary j x j leading
// principal minor of S_n, so S_n here equals det S_n exactly.
//   D_1 = 1, D_2 = 1 - e, D_j = (2-e) D_{j-1} - D_{j-2}
//   S_0 = 1, S_1 = 2 - e, S_j = D_j + (1-e) S_{j-1}
template <class Real = double>
struct DetSequences {
    Real S_n = Real(0);
    Real S_n_minus_1 = Real(0);
    std::vector<Real> D;  // filled only when requested; D[j-1] = D_j
};

template <class Real = double>
void require_root_range(Real e) {
    if (!(e >= Real(0)))
        throw OutOfRootRange("e = (lambda*epsilon)^2 must be >= 0");
    if (e >= Real(4))
        throw OutOfRootRange("e = (lambda*epsilon)^2 must be < 4 (oscillatory root regime)");
}

template <class Real = double>
DetSequences<Real> det_sequences(long long n, Real e, bool store_D = false) {
    if (n < 1) throw NonPositiveParameter("det_sequences: n must be >= 1");
    require_root_range(e);
    using A = acc_t<Real>;
    const A ea = A(e);
    const A diag = A(2) - ea;

    DetSequences<Real> out;
    if (store_D) out.D.resize(static_cast<std::size_t>(n));

    A d_prev = A(1);         // D_1
    A d_prev2 = A(0);
    A s_prev = diag;         // S_1
    A s_prev2 = A(1);        // S_0
    if (store_D) out.D[0] = Real(1);

    for (long long j = 2; j <= n; ++j) {
        const A d = (j == 2) ? A(1) - ea : diag * d_prev - d_prev2;
        const A s = d + (A(1) - ea) * s_prev;
        d_prev2 = d_prev;
        d_prev = d;
        s_prev2 = s_prev;
        s_prev = s;
        if (store_D) out.D[static_cast<std::size_t>(j - 1)] = Real(d);
    }
    out.S_n = Real(s_prev);
    out.S_n_minus_1 = Real(s_prev2);
    return out;
}

// Closed-form parameters of the D recursion: roots a± = exp(±i theta) with
// cos(theta) = 1 - e/2, coefficients fixed by D_1 = 1, D_2 = 1 - e.
template <class Real = double>
struct ClosedFormParams {
    Real e = Real(0);
    Real theta = Real(0);
    std::complex<Real> root_plus, root_minus;
    std::complex<Real> coeff_plus, coeff_minus;
};

template <class Real = double>
ClosedFormParams<Real> make_closed_form(Real e) {
    require_root_range(e);
    if (e == Real(0))
        throw OutOfRootRange("closed form needs 0 < e < 4 (theta > 0)");
    ClosedFormParams<Real> p;
    p.e = e;
    // theta = arccos(1 - e/2) evaluated as 2 asin(sqrt(e)/2) for accuracy at
    // small e.
    const Real sqrt_e = std::sqrt(e);
    p.theta = Real(2) * std::asin(sqrt_e / Real(2));
    p.root_plus = std::polar(Real(1), p.theta);
    p.root_minus = std::polar(Real(1), -p.theta);
    const Real imbalance = sqrt_e / (Real(2) * std::sqrt(Real(4) - e));
    p.coeff_plus = {Real(0.5), imbalance};
    p.coeff_minus = {Real(0.5), -imbalance};
    return p;
}

// Real form of A+ a+^{j-1} + A- a-^{j-1}:
//   D_j = cos((j-1) theta) - (lambda*eps / sqrt(4-e)) sin((j-1) theta).
template <class Real = double>
Real det_D_closed(long long j, const ClosedFormParams<Real>& p) {
    if (j < 1) throw IndexOutOfRange("det_D_closed: j must be >= 1");
    const Real phase = Real(j - 1) * p.theta;
    const Real slope = std::sqrt(p.e) / std::sqrt(Real(4) - p.e);
    return std::cos(phase) - slope * std::sin(phase);
}

template <class Real = double>
std::complex<Real> det_D_closed_complex(long long j, const ClosedFormParams<Real>& p) {
    if (j < 1) throw IndexOutOfRange("det_D_closed: j must be >= 1");
    const std::complex<Real> ph{Real(0), Real(j - 1) * p.theta};
    return p.coeff_plus * std::exp(ph) + p.coeff_minus * std::exp(-ph);
}

namespace detail {
template <class Real>
void require_in_window(Real lambda, Real t) {
    if (!(lambda >= Real(0)) || !(t > Real(0)))
        throw NonPositiveParameter("lambda must be >= 0 and t > 0");
    if (!(lambda * t < std::numbers::pi_v<Real>))
        throw OutOfWindow("lambda*t >= pi");
}

template <class Real>
Real slice_e(long long n, Real lambda, Real t) {
    const Real le = lambda * t / Real(n);
    return le * le;
}
}  // namespace detail

// max_k |D_k - cos(k lambda epsilon)| for k = 1..n. Decays like 1/n; the
// dominant term is the coefficient imbalance, O(lambda epsilon).
template <class Real = double>
Real fluctuation_cosine_error(long long n, Real lambda, Real t) {
    if (n < 1) throw NonPositiveParameter("fluctuation_cosine_error: n must be >= 1");
    detail::require_in_window(lambda, t);
    const Real e = detail::slice_e(n, lambda, t);
    require_root_range(e);
    using A = acc_t<Real>;
    const A ea = A(e);
    const A diag = A(2) - ea;
    const A lam_eps = A(lambda) * A(t) / A(n);

    A d_prev = A(1), d_prev2 = A(0);
    A worst = std::abs(A(1) - std::cos(lam_eps));
    for (long long j = 2; j <= n; ++j) {
        const A d = (j == 2) ? A(1) - ea : diag * d_prev - d_prev2;
        const A err = std::abs(d - std::cos(A(j) * lam_eps));
        if (err > worst) worst = err;
        d_prev2 = d_prev;
        d_prev = d;
    }
    return Real(worst);
}

// epsilon * det S_n, the reciprocal square of the fluctuation prefactor.
// Tends to sin(lambda t)/lambda at O(1/n).
template <class Real = double>
Real scaled_det(long long n, Real lambda, Real t) {
    if (n < 1) throw NonPositiveParameter("scaled_det: n must be >= 1");
    detail::require_in_window(lambda, t);
    const Real e = detail::slice_e(n, lambda, t);
    const auto seq = det_sequences<Real>(n, e);
    return (t / Real(n)) * seq.S_n;
}

// The four corner entries of S_n^{-1}: cofactor expansion gives
//   (S^{-1})_11 = (S^{-1})_nn = S_{n-1}/S_n,
//   (S^{-1})_1n = (S^{-1})_n1 = 1/S_n,
// the two off-corner sign factors multiplying to +1 for every n (regression
// tested densely for both parities).
template <class Real = double>
struct CornerInverse {
    Real c11, c1n, cn1, cnn;
};

template <class Real = double>
CornerInverse<Real> corner_inverse(long long n, Real e) {
    const auto seq = det_sequences<Real>(n, e);
    if (seq.S_n == Real(0))
        throw SingularMatrix("corner_inverse: det S_n = 0 (window edge)");
    const Real ratio = seq.S_n_minus_1 / seq.S_n;
    const Real inv = Real(1) / seq.S_n;
    return {ratio, inv, inv, ratio};
}

// Thomas elimination for S_n x = rhs. The matrix must be positive definite
// (in-window); a non-positive pivot aborts with SingularMatrix. Runs in the
// accumulator type end to end.
template <class Real = double>
std::vector<Real> solve(const SlicedActionMatrix<Real>& m, std::span<const Real> rhs) {
    if (static_cast<long long>(rhs.size()) != m.n)
        throw DimensionMismatch("solve: rhs length must equal n");
    using A = acc_t<Real>;
    const A diag = A(2) - A(m.e);
    const std::size_t n = rhs.size();

    std::vector<A> pivot(n), y(n);
    A p = diag;
    if (!(p > A(0))) throw SingularMatrix("solve: non-positive pivot (matrix not positive definite)");
    pivot[0] = p;
    y[0] = A(rhs[0]);
    for (std::size_t i = 1; i < n; ++i) {
        p = diag - A(1) / pivot[i - 1];
        if (!(p > A(0)))
            throw SingularMatrix("solve: non-positive pivot (matrix not positive definite)");
        pivot[i] = p;
        y[i] = A(rhs[i]) + y[i - 1] / pivot[i - 1];
    }
    std::vector<Real> x(n);
    A xi = y[n - 1] / pivot[n - 1];
    x[n - 1] = Real(xi);
    for (std::size_t i = n - 1; i-- > 0;) {
        xi = (y[i] + xi) / pivot[i];
        x[i] = Real(xi);
    }
    return x;
}

template <class Real = double>
std::vector<Real> solve(long long n, Real e, std::span<const Real> rhs) {
    return solve(SlicedActionMatrix<Real>{n, e}, rhs);
}

// S_n * x without materializing the matrix.
template <class Real = double>
std::vector<Real> apply(long long n, Real e, std::span<const Real> x) {
    if (static_cast<long long>(x.size()) != n)
        throw DimensionMismatch("apply: x length must equal n");
    const Real diag = Real(2) - e;
    std::vector<Real> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        Real v = diag * x[j];
        if (j > 0) v -= x[j - 1];
        if (j + 1 < x.size()) v -= x[j + 1];
        out[j] = v;
    }
    return out;
}

// Diagnostic for the telescoped minor bound |S_{j-1}| <= sum_{k<=j-1} |D_k|
// + |S_1|, valid in the e <= 2 regime. Returns the minimum slack over j;
// nonnegative means the bound held everywhere.
template <class Real = double>
Real minor_bound_margin(long long n, Real e) {
    if (n < 2) return Real(0);
    require_root_range(e);
    using A = acc_t<Real>;
    const A ea = A(e);
    const A diag = A(2) - ea;
    A d_prev = A(1), d_prev2 = A(0);
    A s_prev = diag;
    CompensatedSum<A> abs_d;
    abs_d.add(A(1));
    A margin = std::abs(diag);  // j = 2 case: |S_1| <= |D_1| + |S_1| trivially
    for (long long j = 2; j <= n; ++j) {
        const A d = (j == 2) ? A(1) - ea : diag * d_prev - d_prev2;
        const A s = d + (A(1) - ea) * s_prev;
        const A slack = (abs_d.value() + std::abs(diag)) - std::abs(s_prev);
        if (slack < margin) margin = slack;
        abs_d.add(std::abs(d));
        d_prev2 = d_prev;
        d_prev = d;
        s_prev = s;
    }
    return Real(margin);
}

} // namespace oscint::tridiag
