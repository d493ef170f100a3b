#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/numeric.hpp"
#include "oscint/oracle.hpp"
#include "oscint/pathdecomp.hpp"
#include "oscint/propagator.hpp"
#include "oscint/tridiag.hpp"

// The `verify` battery: every module invariant exercised at least once, each
// check reporting a measured value against its pinned threshold.
namespace oscint::verify {

struct VerifyConfig {
    OscillatorParams params{1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1};
    long long n_max = 512;
    std::uint64_t seed = 1234;
    int jobs = 1;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;

    void add(CheckResult c) {
        all_pass = all_pass && c.pass;
        checks.push_back(std::move(c));
    }
};

// Positive floor for the PDE residual of the doubled-exponent kernel at the
// standard battery point (lambda = t = 1, q0 = 0.3, q = 0.7); the corrected
// kernel's residual refines to zero while this one converges to a defect
// measured at ~0.181. Frozen below that as a regression guard.
inline constexpr double faithful_residual_floor = 0.15;

namespace detail {

// lt_max bounds lambda*t. The continuum window is lambda*t < pi, but the
// finite-n prefactor needs S_n positive definite, which at n = 1 already
// requires lambda*t < ~1.4; stay below that when small n are in play.
inline OscillatorParams random_in_window_params(std::mt19937_64& rng, double lt_max = 2.8) {
    OscillatorParams p;
    p.mass = uniform_in(rng, 0.5, 2.0);
    p.hbar = uniform_in(rng, 0.5, 2.0);
    p.lambda = uniform_in(rng, 0.3, 2.0);
    p.t = uniform_in(rng, 0.4, lt_max) / p.lambda;
    p.q0 = uniform_in(rng, -1.5, 1.5);
    p.q = uniform_in(rng, -1.5, 1.5);
    return p;
}

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace detail

inline VerifyReport run_verify_battery(const VerifyConfig& cfg) {
    using namespace oscint;
    VerifyReport report;
    const OscillatorParams& P = cfg.params;
    const double lam = P.lambda, t = P.t;
    auto slice_e = [&](long long n) {
        const double le = lam * t / double(n);
        return le * le;
    };
    const long long n_dense = std::min(cfg.n_max, tridiag::dense_threshold());

    // --- tridiag -------------------------------------------------------------

    {  // recursion vs closed form
        double worst = 0.0;
        for (long long n : {7LL, 64LL, std::max<long long>(65, n_dense)}) {
            const double e = slice_e(n);
            const auto cf = tridiag::make_closed_form(e);
            const auto seq = tridiag::det_sequences<double>(n, e, true);
            for (long long j = 1; j <= n; ++j)
                worst = std::max(worst, std::abs(seq.D[std::size_t(j - 1)] - tridiag::det_D_closed(j, cf)));
        }
        report.add({"tridiag/recursion-vs-closed-form", worst <= 1e-10, worst, 1e-10, ""});
    }
    {  // dense determinant + corner inverse (covers both parities small n)
        double worst_det = 0.0, worst_corner = 0.0;
        std::vector<long long> sizes{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 33, 64};
        sizes.push_back(n_dense);
        for (long long n : sizes) {
            const double e = slice_e(std::max<long long>(n, 4));
            const auto seq = tridiag::det_sequences<double>(n, e);
            const auto ref = oracle::dense_reference(n, e);
            worst_det = std::max(worst_det, detail::rel_diff(seq.S_n, ref.det));
            const auto c = tridiag::corner_inverse<double>(n, e);
            worst_corner = std::max({worst_corner, detail::rel_diff(c.c11, ref.corners.c11),
                                     detail::rel_diff(c.c1n, ref.corners.c1n),
                                     detail::rel_diff(c.cn1, ref.corners.cn1),
                                     detail::rel_diff(c.cnn, ref.corners.cnn)});
        }
        report.add({"tridiag/dense-determinant", worst_det <= 1e-10, worst_det, 1e-10, ""});
        report.add({"tridiag/dense-corner-inverse", worst_corner <= 1e-10, worst_corner, 1e-10,
                    "cofactor sign product = +1, both parities"});
    }
    {  // determinant as eigenvalue product
        double worst = 0.0;
        for (long long n : {4LL, 64LL, n_dense}) {
            const double e = slice_e(std::max<long long>(n, 4));
            long double prod = 1.0L;
            for (double mu : tridiag::eigenvalues<double>(n, e)) prod *= (long double)mu;
            worst = std::max(worst, detail::rel_diff(double(prod), tridiag::det_sequences<double>(n, e).S_n));
        }
        report.add({"tridiag/det-as-eigenproduct", worst <= 1e-9, worst, 1e-9, ""});
    }
    {  // analytic eigenpairs
        double worst_scaled = 0.0;
        for (auto [n, k] : std::vector<std::pair<long long, long long>>{{8, 3}, {n_dense, 1}, {n_dense, n_dense}}) {
            const double r = tridiag::eigenvector_residual<double>(n, slice_e(n), k);
            worst_scaled = std::max(worst_scaled, r / (1e-12 * double(n)));
        }
        report.add({"tridiag/eigenvector-residual", worst_scaled <= 1.0, worst_scaled, 1.0,
                    "residual / (1e-12 * n)"});
    }
    {  // window sharpness
        const long long n = std::max<long long>(1000, cfg.n_max);
        const double bound = tridiag::positivity_bound_t<double>(n, lam);
        const double t_in = bound * (1.0 - 1e-6);
        const double t_out = (std::numbers::pi / lam) * (1.0 + 1e-3);
        const double mu_in = tridiag::min_eigenvalue<double>(n, (lam * t_in / n) * (lam * t_in / n));
        const double mu_out = tridiag::min_eigenvalue<double>(n, (lam * t_out / n) * (lam * t_out / n));
        report.add({"tridiag/window-sharpness", mu_in > 0.0 && mu_out < 0.0, mu_in, 0.0,
                    "min eigenvalue sign below bound / beyond caustic"});
    }
    {  // conservative bound vs bisection oracle
        bool conservative = true;
        for (long long n : {1LL, 100LL})
            conservative = conservative &&
                           tridiag::positivity_bound_t<double>(n, lam) <= oracle::positivity_threshold_bisect(n, lam);
        const long long n = 10000;
        const double gap = std::abs(tridiag::positivity_bound_t<double>(n, lam) -
                                    oracle::positivity_threshold_bisect(n, lam));
        report.add({"tridiag/positivity-bound-vs-bisection", conservative && gap <= 1e-6, gap, 1e-6,
                    "bound stays below the exact threshold and meets it by n=1e4"});
    }
    {  // scaled determinant halving toward sin(lambda t)/lambda
        const double limit = lam == 0.0 ? t : std::sin(lam * t) / lam;
        double worst = 0.0;
        for (long long n : {1000LL, 10000LL, 100000LL, 500000LL}) {
            const double e1 = std::abs(tridiag::scaled_det<double>(n, lam, t) - limit);
            const double e2 = std::abs(tridiag::scaled_det<double>(2 * n, lam, t) - limit);
            worst = std::max(worst, std::abs(e1 / e2 - 2.0));
        }
        report.add({"tridiag/scaled-det-halving", worst <= 0.3, worst, 0.3,
                    "|ratio - 2| when n doubles"});
    }
    {  // fluctuation cosine error decreasing
        const double e2 = tridiag::fluctuation_cosine_error<double>(100, lam, t);
        const double e3 = tridiag::fluctuation_cosine_error<double>(1000, lam, t);
        const double e4 = tridiag::fluctuation_cosine_error<double>(10000, lam, t);
        report.add({"tridiag/fluctuation-cosine", e2 > e3 && e3 > e4 && e4 < 1e-3, e4, 1e-3,
                    "max_k |D_k - cos(k lambda eps)| at n=1e2,1e3,1e4"});
    }
    {  // tridiagonal solve residual
        std::mt19937_64 rng(cfg.seed + 17);
        const long long n = 1000;
        const double e = slice_e(n);
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (auto& v : rhs) v = uniform_in(rng, -1.0, 1.0);
        const auto x = tridiag::solve<double>(n, e, rhs);
        const auto back = tridiag::apply<double>(n, e, x);
        double rnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            rnorm = std::max(rnorm, std::abs(back[i] - rhs[i]));
            bnorm = std::max(bnorm, std::abs(rhs[i]));
        }
        report.add({"tridiag/solve-residual", rnorm <= 1e-10 * bnorm, rnorm / bnorm, 1e-10,
                    "n=1000 random rhs"});
    }
    {  // telescoped minor bound (diagnostic)
        const double m = tridiag::minor_bound_margin<double>(n_dense, slice_e(n_dense));
        report.add({"tridiag/minor-bound-diagnostic", m >= 0.0, m, 0.0, "min slack over j"});
    }

    // --- pathdecomp ----------------------------------------------------------

    {  // path independence + route agreement, 100 seeded paths
        const long long n = 1000;
        const SliceGrid grid = validate(P, n, GridPurpose::propagator);
        const double q_reduced = pathdecomp::classical_exponent_reduced(P, grid);
        const double scale = std::max(std::abs(q_reduced), 1.0);
        double qmin = q_reduced, qmax = q_reduced, worst_route = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto path = pathdecomp::build_sine_perturbed_path(P, grid, cfg.seed + 1000 + k);
            const double qd = pathdecomp::classical_exponent_direct(P, grid, path);
            qmin = std::min(qmin, qd);
            qmax = std::max(qmax, qd);
            worst_route = std::max(worst_route, std::abs(qd - q_reduced));
        }
        const double spread = (qmax - qmin) / scale;
        report.add({"pathdecomp/path-independence", spread <= 1e-9, spread, 1e-9,
                    "relative spread of Q_n over 100 random paths, n=1000"});
        report.add({"pathdecomp/route-agreement", worst_route / scale <= 1e-9, worst_route / scale,
                    1e-9, "direct solve route vs endpoint-only route"});
    }
    {  // decomposition identity, dense check
        const long long n = 64;
        const SliceGrid grid = validate(P, n, GridPurpose::propagator);
        const double e = slice_e(n);
        std::mt19937_64 rng(cfg.seed + 51);
        const auto w = pathdecomp::build_sine_perturbed_path(P, grid, cfg.seed + 52);
        std::vector<double> x(w.w);
        for (long long j = 1; j <= n; ++j) x[std::size_t(j)] += uniform_in(rng, -1.0, 1.0);
        const auto dense_t = oracle::dense_full_action(n, e);
        const double lhs = oracle::dense_quad_form(dense_t, x);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (long long j = 1; j <= n; ++j) y[std::size_t(j - 1)] = x[std::size_t(j)] - w.w[std::size_t(j)];
        const auto rho = pathdecomp::build_rho(w, e);
        const double rhs = oracle::dense_quad_form(dense_t, w.w) + pathdecomp::interior_quad_form(y, e) +
                           2.0 * pathdecomp::dot(rho, y);
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0);
        report.add({"pathdecomp/decomposition-identity", rel <= 1e-10, rel, 1e-10,
                    "x^T T x = w^T T w + y^T S y + 2 rho^T y, n=64"});
    }
    {  // classical path offset decays at least one order faster than generic
        std::vector<double> ns{100, 1000, 10000};
        std::vector<double> rho_cl, rho_gen;
        for (double nd : ns) {
            const long long n = (long long)nd;
            const SliceGrid grid = validate(P, n, GridPurpose::propagator);
            const double e = slice_e(n);
            auto inf_norm = [](const std::vector<double>& v) {
                double m = 0.0;
                for (double x : v) m = std::max(m, std::abs(x));
                return m;
            };
            rho_cl.push_back(inf_norm(pathdecomp::build_rho(pathdecomp::build_classical_path(P, grid), e)));
            rho_gen.push_back(inf_norm(pathdecomp::build_rho(pathdecomp::build_sine_perturbed_path(P, grid, cfg.seed + 3), e)));
        }
        const double slope_cl = fit_loglog_slope(ns, rho_cl);
        const double slope_gen = fit_loglog_slope(ns, rho_gen);
        report.add({"pathdecomp/rho-decay-distinction", slope_cl <= -2.0 && slope_cl <= slope_gen - 1.0,
                    slope_cl - slope_gen, -1.0, "classical vs generic offset decay slopes"});
    }
    {  // free-particle exponent, exact at every n
        OscillatorParams free = P;
        free.lambda = 0.0;
        const long long n = 1000;
        const SliceGrid grid = validate(free, n, GridPurpose::propagator);
        const double expect = (free.q - free.q0) * (free.q - free.q0) * double(n) / (double(n + 1) * free.t);
        const double got = pathdecomp::classical_exponent_reduced(free, grid);
        const double rel = detail::rel_diff(got, expect);
        report.add({"pathdecomp/free-particle-exponent", rel <= 1e-13, rel, 1e-13, "lambda=0"});
    }
    {  // completed square identity
        const long long n = 50;
        const SliceGrid grid = validate(P, n, GridPurpose::propagator);
        const double e = slice_e(n);
        const auto path = pathdecomp::build_sine_perturbed_path(P, grid, cfg.seed + 7);
        std::mt19937_64 rng(cfg.seed + 8);
        std::vector<double> probe(static_cast<std::size_t>(n));
        for (auto& v : probe) v = uniform_in(rng, -2.0, 2.0);
        const double resid = pathdecomp::completed_square_residual(path, e, probe);
        const double scale = std::max(1.0, std::abs(pathdecomp::interior_quad_form(probe, e)));
        report.add({"pathdecomp/completed-square", resid <= 1e-10 * scale, resid / scale, 1e-10, ""});
    }

    // --- propagator ----------------------------------------------------------

    {  // fixed prefactor branch across the window
        double worst = 0.0;
        for (double frac : {0.05, 0.3, 0.6, 0.9, 0.999}) {
            OscillatorParams pp = P;
            pp.t = lam == 0.0 ? P.t * frac : frac * std::numbers::pi / lam;
            const auto k = prop::exact_propagator(pp);
            const double mod = std::abs(k.amplitude.value);
            const double expected_phase = -std::numbers::pi / 4.0;
            // strip the endpoint phase: prefactor = amplitude * exp(-i phase_exp)
            OscillatorParams p0 = pp;
            p0.q0 = 0.0;
            p0.q = 0.0;
            const auto k0 = prop::exact_propagator(p0);
            worst = std::max(worst, std::abs(std::arg(k0.amplitude.value) - expected_phase));
            worst = std::max(worst, mod > 0.0 ? 0.0 : 1.0);
        }
        report.add({"propagator/branch-sanity", worst <= 1e-12, worst, 1e-12,
                    "prefactor phase = -pi/4 across 0 < t < pi/lambda"});
    }
    {  // finite-n kernel vs n-fold composition oracle
        std::mt19937_64 rng(cfg.seed + 101);
        double worst = 0.0;
        for (int s = 0; s < 20; ++s) {
            const OscillatorParams pp = detail::random_in_window_params(rng, 1.3);
            for (long long n = 1; n <= 8; ++n) {
                const SliceGrid grid = validate(pp, n, GridPurpose::propagator);
                worst = std::max(worst, detail::rel_diff(prop::finite_n_propagator(pp, grid).amplitude.value,
                                                         oracle::fresnel_compose(pp, n)));
            }
        }
        report.add({"propagator/oracle-equivalence", worst <= 1e-12, worst, 1e-12,
                    "20 seeded parameter sets, n <= 8"});
    }
    {  // first-order convergence of K_n
        double worst = 0.0;
        const auto exact = prop::exact_propagator(P).amplitude.value;
        for (long long n : {1000LL, 10000LL, 100000LL}) {
            const double err1 = std::abs(prop::finite_n_propagator(P, validate(P, n)).amplitude.value - exact);
            const double err2 = std::abs(prop::finite_n_propagator(P, validate(P, 2 * n)).amplitude.value - exact);
            worst = std::max(worst, std::abs(err1 / err2 - 2.0));
        }
        report.add({"propagator/first-order-convergence", worst <= 0.3, worst, 0.3,
                    "|K_n - K| halves when n doubles"});
    }
    {  // d-dimensional factorization
        std::mt19937_64 rng(cfg.seed + 202);
        OscillatorParams pp = P;
        pp.dim = 3;
        double worst_ulps = 0.0;
        for (int s = 0; s < 50; ++s) {
            std::vector<double> a(3), b(3);
            for (auto& v : a) v = uniform_in(rng, -1.0, 1.0);
            for (auto& v : b) v = uniform_in(rng, -1.0, 1.0);
            const auto prod = prop::d_dim_propagator(pp, a, b).amplitude.value;
            const auto asm_ = prop::d_dim_assembled(pp, a, b);
            const double ulps = std::abs(prod - asm_) /
                                (std::numeric_limits<double>::epsilon() * std::abs(asm_));
            worst_ulps = std::max(worst_ulps, ulps);
        }
        report.add({"propagator/factorization-exactness", worst_ulps <= 4.0 * pp.dim, worst_ulps,
                    4.0 * pp.dim, "ulps between product and assembled value, d=3"});
    }
    {  // semigroup under analytic composition
        double worst = 0.0;
        for (double split : {0.3, 0.5, 0.7}) {
            OscillatorParams p1 = P;
            p1.t = P.t * split;
            OscillatorParams p2 = P;
            p2.t = P.t * (1.0 - split);
            auto to_kernel = [](const OscillatorParams& pp) {
                oracle::QuadraticKernel k;
                const double s = std::sin(pp.lambda * pp.t);
                const double g = pp.mass * pp.lambda / (2.0 * pp.hbar * s);
                k.a = k.c = g * std::cos(pp.lambda * pp.t);
                k.b = -g;
                k.prefactor = prefactor_sqrt(pp.mass * pp.lambda /
                                             (2.0 * std::numbers::pi * pp.hbar * s));
                return k;
            };
            const auto composed = oracle::compose(to_kernel(p2), to_kernel(p1));
            const auto whole = prop::exact_propagator(P).amplitude.value;
            worst = std::max(worst, detail::rel_diff(oracle::evaluate(composed, P.q, P.q0), whole));
        }
        report.add({"propagator/semigroup-composition", worst <= 1e-10, worst, 1e-10,
                    "K(t1) compose K(t2) = K(t1+t2)"});
    }
    {  // ground state is stationary up to the phase exp(-i lambda t / 2)
        const auto gs = prop::ground_state(P);
        const auto ev = prop::evolve_gaussian(P, gs);
        const std::complex<double> phase = std::exp(ev.log_norm - gs.log_norm);
        const std::complex<double> expect = std::exp(std::complex<double>(0.0, -0.5 * lam * t));
        const double worst = std::max({std::abs(ev.alpha - gs.alpha) / std::abs(gs.alpha),
                                       std::abs(ev.center), std::abs(ev.momentum),
                                       std::abs(phase - expect)});
        report.add({"propagator/gaussian-ground-state", worst <= 1e-11, worst, 1e-11,
                    "alpha, center, momentum, global phase"});
    }
    {  // wavepacket center follows the classical trajectory
        double worst = 0.0;
        for (double frac : {0.3, 0.6, 0.9}) {
            OscillatorParams pp = P;
            pp.t = P.t * frac;
            prop::GaussianState st = prop::ground_state(P);
            st.center = 1.0;
            st.momentum = 0.5;
            const auto ev = prop::evolve_gaussian(pp, st);
            const auto ode = oracle::classical_trajectory_rk4(lam, P.mass, st.center, st.momentum,
                                                              pp.t, 20000);
            worst = std::max(worst, std::abs(ev.center - ode.q));
        }
        report.add({"propagator/gaussian-classical-center", worst <= 1e-8, worst, 1e-8,
                    "evolved center vs RK4 integration of qdotdot = -lambda^2 q"});
    }

    // --- oracle --------------------------------------------------------------

    {  // Riemann sum first-order rate
        const double limit = lam == 0.0 ? t : std::sin(lam * t) / lam;
        const double e1 = std::abs(oracle::riemann_cos_sum(lam, t, 100000) - limit);
        const double e2 = std::abs(oracle::riemann_cos_sum(lam, t, 200000) - limit);
        const double ratio = e1 / e2;
        report.add({"oracle/riemann-sum-rate", std::abs(ratio - 2.0) <= 0.2 && e1 <= 1e-4, ratio, 2.0,
                    "error ratio n vs 2n"});
    }
    {  // corrected kernel satisfies the PDE at second order in the stencil
        OscillatorParams pp = P;
        pp.q0 = 0.3;
        pp.q = 0.7;
        const double r0 = oracle::schrodinger_residual(pp, 1e-2, 1e-2);
        const double r1 = oracle::schrodinger_residual(pp, 5e-3, 5e-3);
        const double r2 = oracle::schrodinger_residual(pp, 2.5e-3, 2.5e-3);
        const bool ok = std::abs(r0 / r1 - 4.0) <= 0.8 && std::abs(r1 / r2 - 4.0) <= 0.8;
        report.add({"oracle/schrodinger-corrected-order", ok, r0 / r1, 4.0,
                    "residual shrinks x4 per h,tau halving"});
        const double rf = oracle::schrodinger_residual(pp, 1e-2, 1e-2, prop::ExponentMode::faithful);
        const double rf2 = oracle::schrodinger_residual(pp, 2.5e-3, 2.5e-3, prop::ExponentMode::faithful);
        report.add({"oracle/schrodinger-faithful-floor",
                    rf >= faithful_residual_floor && rf2 >= faithful_residual_floor,
                    std::min(rf, rf2), faithful_residual_floor,
                    "doubled-exponent kernel residual stays O(1)"});
    }
    {  // regularized Fresnel limit justifies the branch
        const std::complex<double> k = oracle::fresnel_compose(P, 6);
        double prev = std::numeric_limits<double>::infinity();
        bool decreasing = true;
        double last = 0.0;
        for (double delta : {1e-3, 1e-4, 1e-5}) {
            last = std::abs(oracle::fresnel_compose_regularized(P, 6, delta) - k) / std::abs(k);
            decreasing = decreasing && last < prev;
            prev = last;
        }
        report.add({"oracle/regularized-branch-limit", decreasing && last <= 1e-4, last, 1e-4,
                    "t -> t(1 - i delta), delta -> 0+"});
    }

    // --- model ---------------------------------------------------------------

    {  // branch constant
        const std::complex<double> b = sqrt_reciprocal_i_branch();
        const double resid = std::abs(b * b + std::complex<double>(0.0, 1.0));
        report.add({"model/branch-consistency", resid <= 1e-15, resid, 1e-15,
                    "(1/sqrt(i))^2 = -i"});
    }
    {  // the eps = t/n vs t/(n+1) bookkeeping mismatch is O(1/n^2)-irrelevant
        const long long n = 10000;
        const double limit = lam == 0.0 ? t : std::sin(lam * t) / lam;
        const double std_det = tridiag::scaled_det<double>(n, lam, t);
        const double eps_alt = t / double(n + 1);
        const double e_alt = (lam * eps_alt) * (lam * eps_alt);
        const double alt_det = eps_alt * tridiag::det_sequences<double>(n, e_alt).S_n;
        const double gap = std::abs(std_det - alt_det);
        const double err = std::abs(std_det - limit);
        report.add({"model/grid-mismatch-robustness", gap <= 5.0 * std::max(err, 1e-12), gap,
                    5.0 * std::max(err, 1e-12), "alternate eps = t/(n+1) stays within the convergence envelope"});
    }

    return report;
}

} // namespace oscint::verify
