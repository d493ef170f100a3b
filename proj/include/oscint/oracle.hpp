#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/numeric.hpp"
#include "oscint/propagator.hpp"

// Independent verification paths. The composition chain and the dense LU
// below share no code with the determinant recursions or the assembled
// kernels they are used to check; agreement between the two routes is
// evidence, not tautology.
namespace oscint::oracle {

// ------------------------------ Fresnel kernels ------------------------------

// One-step or composed kernel in closed form:
//   k(x, y) = prefactor * exp[i (a x^2 + 2 b x y + c y^2)],
// x the later endpoint, y the earlier one. Composition under the Gaussian
// integral is closed in this family.
template <class Real>
struct BasicQuadraticKernel {
    std::complex<Real> prefactor{1, 0};
    std::complex<Real> a{0, 0}, b{0, 0}, c{0, 0};
};

using QuadraticKernel = BasicQuadraticKernel<double>;

// Where the potential is sampled on each slice. The action sum evaluates V at
// the later slice point; the alternatives change the finite-n value at O(1/n)
// but not the limit and exist for diagnostics.
enum class PotentialSampling { later, earlier, midpoint };

namespace detail {

template <class Real>
BasicQuadraticKernel<Real> one_step_kernel_impl(Real mass, Real hbar, Real lambda,
                                                std::complex<Real> eps, PotentialSampling sampling) {
    const std::complex<Real> kappa = mass / (Real(2) * hbar * eps);
    const std::complex<Real> e = eps * eps * lambda * lambda;
    BasicQuadraticKernel<Real> k;
    switch (sampling) {
        case PotentialSampling::later:
            k.a = kappa * (Real(1) - e);
            k.b = -kappa;
            k.c = kappa;
            break;
        case PotentialSampling::earlier:
            k.a = kappa;
            k.b = -kappa;
            k.c = kappa * (Real(1) - e);
            break;
        case PotentialSampling::midpoint:
            k.a = kappa * (Real(1) - e / Real(4));
            k.b = -kappa * (Real(1) + e / Real(4));
            k.c = kappa * (Real(1) - e / Real(4));
            break;
    }
    // sqrt(m/(2 pi i hbar eps)), principal branch
    const std::complex<Real> i{Real(0), Real(1)};
    k.prefactor = std::sqrt(mass / (Real(2) * std::numbers::pi_v<Real> * i * hbar * eps));
    return k;
}

// integral over the shared middle point u of k_late(x,u) k_early(u,y), using
//   int exp(i alpha u^2 + i beta u) du = sqrt(i pi/alpha) exp(-i beta^2/(4 alpha)).
template <class Real>
BasicQuadraticKernel<Real> compose_impl(const BasicQuadraticKernel<Real>& late,
                                        const BasicQuadraticKernel<Real>& early) {
    const std::complex<Real> alpha = late.c + early.a;
    const Real scale = std::abs(late.c) + std::abs(early.a);
    if (!(std::abs(alpha) > Real(1e-14) * scale))
        throw DegenerateComposition("compose: inner Gaussian coefficient vanishes");
    const std::complex<Real> i{Real(0), Real(1)};
    BasicQuadraticKernel<Real> out;
    out.prefactor = late.prefactor * early.prefactor *
                    std::sqrt(i * std::numbers::pi_v<Real> / alpha);
    out.a = late.a - late.b * late.b / alpha;
    out.b = -late.b * early.b / alpha;
    out.c = early.c - early.b * early.b / alpha;
    return out;
}

template <class Real>
std::complex<Real> evaluate_impl(const BasicQuadraticKernel<Real>& k, Real x, Real y) {
    const std::complex<Real> i{Real(0), Real(1)};
    return k.prefactor * std::exp(i * (k.a * x * x + Real(2) * k.b * x * y + k.c * y * y));
}

template <class Real>
BasicQuadraticKernel<Real> chain_impl(Real mass, Real hbar, Real lambda, std::complex<Real> eps,
                                      long long steps, PotentialSampling sampling) {
    BasicQuadraticKernel<Real> cur = one_step_kernel_impl(mass, hbar, lambda, eps, sampling);
    for (long long s = 1; s < steps; ++s)
        cur = compose_impl(one_step_kernel_impl(mass, hbar, lambda, eps, sampling), cur);
    return cur;
}

}  // namespace detail

inline QuadraticKernel one_step_kernel(const OscillatorParams& p, double eps,
                                       PotentialSampling sampling = PotentialSampling::later) {
    if (!(eps > 0.0)) throw NonPositiveParameter("one_step_kernel: eps must be > 0");
    return detail::one_step_kernel_impl<double>(p.mass, p.hbar, p.lambda, eps, sampling);
}

inline QuadraticKernel compose(const QuadraticKernel& late, const QuadraticKernel& early) {
    return detail::compose_impl(late, early);
}

inline std::complex<double> evaluate(const QuadraticKernel& k, double x, double y) {
    return detail::evaluate_impl(k, x, y);
}

inline constexpr long long fresnel_max_n = 64;

// Full n-fold iterated integral, done one variable at a time in closed form
// (long double internally). n = 0 means a single slice spanning [0, t];
// n >= 1 composes n+1 slices of width t/n, matching the action convention.
inline std::complex<double> fresnel_compose(const OscillatorParams& p, long long n,
                                            PotentialSampling sampling = PotentialSampling::later) {
    if (n < 0 || n > fresnel_max_n)
        throw IndexOutOfRange("fresnel_compose: n must lie in [0, 64] (oracle scale)");
    if (!p.in_window()) throw OutOfWindow("fresnel_compose: lambda*t >= pi");
    const long double eps = n == 0 ? (long double)p.t : (long double)p.t / (long double)n;
    const auto k = detail::chain_impl<long double>((long double)p.mass, (long double)p.hbar,
                                                   (long double)p.lambda, eps, n + 1, sampling);
    const std::complex<long double> v =
        detail::evaluate_impl<long double>(k, (long double)p.q, (long double)p.q0);
    return {double(v.real()), double(v.imag())};
}

// Same chain with the rotated time t -> t (1 - i delta), delta > 0, which
// makes every slice integral absolutely convergent. As delta -> 0+ the value
// approaches fresnel_compose, justifying the principal-branch evaluation.
inline std::complex<double> fresnel_compose_regularized(const OscillatorParams& p, long long n,
                                                        double delta,
                                                        PotentialSampling sampling = PotentialSampling::later) {
    if (n < 0 || n > fresnel_max_n)
        throw IndexOutOfRange("fresnel_compose_regularized: n must lie in [0, 64]");
    if (!(delta > 0.0)) throw NonPositiveParameter("fresnel_compose_regularized: delta must be > 0");
    const long double base = n == 0 ? (long double)p.t : (long double)p.t / (long double)n;
    const std::complex<long double> eps{base, -base * (long double)delta};
    const auto k = detail::chain_impl<long double>((long double)p.mass, (long double)p.hbar,
                                                   (long double)p.lambda, eps, n + 1, sampling);
    const std::complex<long double> v =
        detail::evaluate_impl<long double>(k, (long double)p.q, (long double)p.q0);
    return {double(v.real()), double(v.imag())};
}

// --------------------------- PDE residual stencil ---------------------------

// max over a small q-patch of |i hbar dK/dt + hbar^2/(2m) d^2K/dq^2 - V(q) K|
// with central differences on the closed-form kernel. Second order in both
// steps for the corrected kernel; the printed-form variant stays O(1).
inline double schrodinger_residual(const OscillatorParams& p, double h, double tau,
                                   prop::ExponentMode mode = prop::ExponentMode::corrected) {
    if (!(h > 0.0) || !(tau > 0.0))
        throw NonPositiveParameter("schrodinger_residual: h and tau must be > 0");
    if (!(p.t - tau > 0.0) || !(p.lambda * (p.t + tau) < std::numbers::pi))
        throw OutOfWindow("schrodinger_residual: t must be bounded away from 0 and pi/lambda");

    auto kernel = [&](double q, double t) {
        OscillatorParams pp = p;
        pp.q = q;
        pp.t = t;
        return prop::exact_propagator(pp, mode).amplitude.value;
    };

    const std::complex<double> ih{0.0, p.hbar};
    double worst = 0.0;
    for (const double dq : {-0.05, 0.0, 0.05}) {
        const double q = p.q + dq;
        const std::complex<double> k0 = kernel(q, p.t);
        const std::complex<double> dt =
            (kernel(q, p.t + tau) - kernel(q, p.t - tau)) / (2.0 * tau);
        const std::complex<double> dqq =
            (kernel(q + h, p.t) - 2.0 * k0 + kernel(q - h, p.t)) / (h * h);
        const double v = 0.5 * p.mass * p.lambda * p.lambda * q * q;
        const double r = std::abs(ih * dt + (p.hbar * p.hbar / (2.0 * p.mass)) * dqq - v * k0);
        if (r > worst) worst = r;
    }
    return worst;
}

// ------------------------------- Riemann sums -------------------------------

// sum_{m=1}^{n} (t/n) cos(m lambda t / n); first-order approximation of
// integral_0^t cos(lambda s) ds = sin(lambda t)/lambda.
inline double riemann_cos_sum(double lambda, double t, long long n) {
    if (n < 1) throw NonPositiveParameter("riemann_cos_sum: n must be >= 1");
    CompensatedSum<long double> acc;
    const long double step = (long double)t / (long double)n;
    const long double phase = (long double)lambda * step;
    for (long long m = 1; m <= n; ++m) acc.add(step * std::cos(phase * (long double)m));
    return double(acc.value());
}

// --------------------------- dense linear algebra ---------------------------

struct DenseCorners {
    double c11, c1n, cn1, cnn;
};

struct DenseReference {
    double det = 0.0;
    DenseCorners corners{};
};

// Row-major dense S_n = tridiag(-1, 2-e, -1).
inline std::vector<double> dense_sliced_action(long long n, double e) {
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    for (long long i = 0; i < n; ++i) {
        m[static_cast<std::size_t>(i * n + i)] = 2.0 - e;
        if (i + 1 < n) {
            m[static_cast<std::size_t>(i * n + i + 1)] = -1.0;
            m[static_cast<std::size_t>((i + 1) * n + i)] = -1.0;
        }
    }
    return m;
}

// Row-major dense (n+2) x (n+2) full action matrix T_n: corner rows pin the
// endpoints (diagonal 1 and 1-e), the interior block is S_n.
inline std::vector<double> dense_full_action(long long n, double e) {
    const long long d = n + 2;
    std::vector<double> m(static_cast<std::size_t>(d * d), 0.0);
    auto at = [&](long long i, long long j) -> double& {
        return m[static_cast<std::size_t>(i * d + j)];
    };
    at(0, 0) = 1.0;
    at(0, 1) = at(1, 0) = -1.0;
    at(d - 1, d - 1) = 1.0 - e;
    at(d - 2, d - 1) = at(d - 1, d - 2) = -1.0;
    for (long long i = 1; i <= n; ++i) {
        at(i, i) = 2.0 - e;
        if (i + 1 <= n) at(i, i + 1) = at(i + 1, i) = -1.0;
    }
    return m;
}

inline double dense_quad_form(std::span<const double> m, std::span<const double> x) {
    const std::size_t n = x.size();
    CompensatedSum<long double> acc;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            acc.add((long double)x[i] * (long double)m[i * n + j] * (long double)x[j]);
    return double(acc.value());
}

// LU with partial pivoting in long double. Small n only.
class DenseLU {
public:
    DenseLU(std::span<const double> matrix, long long n) : n_(n) {
        lu_.assign(matrix.begin(), matrix.end());
        piv_.resize(static_cast<std::size_t>(n));
        factor();
    }

    double det() const {
        long double d = sign_;
        for (long long i = 0; i < n_; ++i) d *= lu_[idx(i, i)];
        return double(d);
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        if (static_cast<long long>(rhs.size()) != n_)
            throw DimensionMismatch("DenseLU::solve: rhs size mismatch");
        std::vector<long double> y(rhs.size());
        for (long long i = 0; i < n_; ++i) y[static_cast<std::size_t>(i)] = rhs[piv_[static_cast<std::size_t>(i)]];
        for (long long i = 0; i < n_; ++i)
            for (long long j = 0; j < i; ++j)
                y[static_cast<std::size_t>(i)] -= lu_[idx(i, j)] * y[static_cast<std::size_t>(j)];
        for (long long i = n_ - 1; i >= 0; --i) {
            for (long long j = i + 1; j < n_; ++j)
                y[static_cast<std::size_t>(i)] -= lu_[idx(i, j)] * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] /= lu_[idx(i, i)];
        }
        std::vector<double> x(rhs.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(y[i]);
        return x;
    }

private:
    std::size_t idx(long long i, long long j) const {
        return static_cast<std::size_t>(i * n_ + j);
    }

    void factor() {
        for (long long i = 0; i < n_; ++i) piv_[static_cast<std::size_t>(i)] = i;
        for (long long col = 0; col < n_; ++col) {
            long long best = col;
            long double best_abs = std::abs(lu_[idx(col, col)]);
            for (long long r = col + 1; r < n_; ++r) {
                const long double a = std::abs(lu_[idx(r, col)]);
                if (a > best_abs) {
                    best = r;
                    best_abs = a;
                }
            }
            if (best_abs == 0.0L) throw SingularMatrix("DenseLU: singular matrix");
            if (best != col) {
                for (long long j = 0; j < n_; ++j) std::swap(lu_[idx(col, j)], lu_[idx(best, j)]);
                std::swap(piv_[static_cast<std::size_t>(col)], piv_[static_cast<std::size_t>(best)]);
                sign_ = -sign_;
            }
            for (long long r = col + 1; r < n_; ++r) {
                const long double f = lu_[idx(r, col)] / lu_[idx(col, col)];
                lu_[idx(r, col)] = f;
                for (long long j = col + 1; j < n_; ++j) lu_[idx(r, j)] -= f * lu_[idx(col, j)];
            }
        }
    }

    long long n_;
    std::vector<long double> lu_;
    std::vector<long long> piv_;
    long double sign_ = 1.0L;
};

inline std::vector<double> dense_solve(long long n, double e, std::span<const double> rhs) {
    const auto m = dense_sliced_action(n, e);
    return DenseLU(m, n).solve(rhs);
}

inline DenseReference dense_reference(long long n, double e) {
    if (n < 1) throw NonPositiveParameter("dense_reference: n must be >= 1");
    if (n > tridiag::dense_threshold())
        throw IndexOutOfRange("dense_reference: n exceeds the dense threshold");
    const auto m = dense_sliced_action(n, e);
    DenseLU lu(m, n);
    DenseReference out;
    out.det = lu.det();

    std::vector<double> e1(static_cast<std::size_t>(n), 0.0), en(static_cast<std::size_t>(n), 0.0);
    e1.front() = 1.0;
    en.back() = 1.0;
    const auto col1 = lu.solve(e1);
    const auto coln = lu.solve(en);
    out.corners = {col1.front(), coln.front(), col1.back(), coln.back()};
    return out;
}

// ------------------------ classical trajectory (RK4) ------------------------

struct PhasePoint {
    double q, p;
};

// Fixed-step RK4 on q' = p/m, p' = -m lambda^2 q. Knows nothing about the
// closed-form solution it is used to check.
inline PhasePoint classical_trajectory_rk4(double lambda, double mass, double q0, double p0,
                                           double t, long long steps) {
    const double dt = t / double(steps);
    double q = q0, p = p0;
    auto fq = [&](double, double pv) { return pv / mass; };
    auto fp = [&](double qv, double) { return -mass * lambda * lambda * qv; };
    for (long long s = 0; s < steps; ++s) {
        const double k1q = fq(q, p), k1p = fp(q, p);
        const double k2q = fq(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p);
        const double k2p = fp(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p);
        const double k3q = fq(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p);
        const double k3p = fp(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p);
        const double k4q = fq(q + dt * k3q, p + dt * k3p);
        const double k4p = fp(q + dt * k3q, p + dt * k3p);
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    return {q, p};
}

// -------------------------- positivity by bisection --------------------------

// Exact positive-definiteness threshold in t, located by bisection on the
// sign of the minimum eigenvalue. Oracle for positivity_bound_t.
inline double positivity_threshold_bisect(long long n, double lambda) {
    auto min_eig = [&](double t) {
        const double le = lambda * t / double(n);
        return tridiag::min_eigenvalue<double>(n, le * le);
    };
    double lo = 0.0;
    double hi = 1.5 * std::numbers::pi / lambda;
    if (min_eig(hi) >= 0.0) throw OutOfRootRange("positivity_threshold_bisect: no sign change");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (min_eig(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace oscint::oracle
