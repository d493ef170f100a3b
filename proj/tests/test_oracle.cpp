#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oscint/numeric.hpp"
#include "oscint/oracle.hpp"
#include "oscint/propagator.hpp"
#include "oscint/verify.hpp"

using namespace oscint;
using std::complex;

namespace {
double rel(complex<double> a, complex<double> b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}
}  // namespace

TEST_CASE("one-step kernel", "[oracle]") {
    OscillatorParams p{1.2, 0.9, 1.1, 1.0, 0.0, 0.0, 1};
    const double eps = 0.05;
    const auto k = oracle::one_step_kernel(p, eps);

    SECTION("coefficients") {
        const double kappa = p.mass / (2.0 * p.hbar * eps);
        CHECK(k.b.real() == Catch::Approx(-kappa).epsilon(1e-15));
        CHECK(k.b.imag() == 0.0);
        CHECK(k.c.real() == Catch::Approx(kappa).epsilon(1e-15));
        CHECK(k.a.real() ==
              Catch::Approx(kappa * (1.0 - eps * eps * p.lambda * p.lambda)).epsilon(1e-15));
    }
    SECTION("prefactor phase is the fixed branch") {
        CHECK(std::arg(k.prefactor) == Catch::Approx(-std::numbers::pi / 4.0).margin(1e-15));
    }
    SECTION("lambda = 0 is the free kernel") {
        OscillatorParams f = p;
        f.lambda = 0.0;
        const auto kf = oracle::one_step_kernel(f, eps);
        CHECK(rel(oracle::evaluate(kf, 0.7, 0.2),
                  prop::free_kernel(f.mass, f.hbar, eps, 0.2, 0.7)) <= 1e-15);
    }
    SECTION("eps must be positive") {
        CHECK_THROWS_AS(oracle::one_step_kernel(p, 0.0), NonPositiveParameter);
    }
}

TEST_CASE("kernel composition", "[oracle]") {
    OscillatorParams p{1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1};

    SECTION("free compose free = free at the doubled step") {
        const double eps = 0.1;
        const auto k = oracle::compose(oracle::one_step_kernel(p, eps), oracle::one_step_kernel(p, eps));
        CHECK(rel(oracle::evaluate(k, 0.9, -0.4),
                  prop::free_kernel(1.0, 1.0, 2.0 * eps, -0.4, 0.9)) <= 1e-14);
    }
    SECTION("associativity") {
        OscillatorParams h{1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1};
        const auto k1 = oracle::one_step_kernel(h, 0.2);
        const auto k2 = oracle::one_step_kernel(h, 0.3);
        const auto k3 = oracle::one_step_kernel(h, 0.25);
        const auto left = oracle::compose(oracle::compose(k3, k2), k1);
        const auto right = oracle::compose(k3, oracle::compose(k2, k1));
        CHECK(rel(oracle::evaluate(left, 0.8, 0.1), oracle::evaluate(right, 0.8, 0.1)) <= 1e-12);
        CHECK(rel(oracle::evaluate(left, -1.2, 0.6), oracle::evaluate(right, -1.2, 0.6)) <= 1e-12);
    }
    SECTION("near-identity kernel acts as a delta") {
        OscillatorParams h{1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1};
        const auto k = oracle::one_step_kernel(h, 0.3);
        const auto almost = oracle::compose(k, oracle::one_step_kernel(h, 1e-9));
        CHECK(rel(oracle::evaluate(almost, 0.7, -0.2), oracle::evaluate(k, 0.7, -0.2)) <= 1e-6);
    }
    SECTION("degenerate composition is rejected") {
        oracle::QuadraticKernel k1, k2;
        k1.a = {1.0, 0.0};
        k1.b = {-1.0, 0.0};
        k1.c = {2.0, 0.0};
        k2 = k1;
        k2.a = {-2.0, 0.0};  // late.c + early.a = 0
        CHECK_THROWS_AS(oracle::compose(k1, k2), DegenerateComposition);
    }
}

TEST_CASE("n-fold composition", "[oracle]") {
    OscillatorParams p{1.0, 1.0, 1.0, 1.0, 0.3, 1.1, 1};

    SECTION("n = 0 is a single slice of width t") {
        const auto k = oracle::one_step_kernel(p, p.t);
        CHECK(rel(oracle::fresnel_compose(p, 0), oracle::evaluate(k, p.q, p.q0)) <= 1e-15);
    }
    SECTION("cross-implementation agreement at n = 5") {
        const auto kf = oracle::fresnel_compose(p, 5);
        const auto kn = prop::finite_n_propagator(p, validate(p, 5)).amplitude.value;
        CHECK(rel(kf, kn) <= 1e-12);
    }
    SECTION("free case composes to the sliced-time kernel") {
        OscillatorParams f = p;
        f.lambda = 0.0;
        for (long long n : {1LL, 4LL, 9LL}) {
            const auto kf = oracle::fresnel_compose(f, n);
            const auto ref =
                prop::free_kernel(f.mass, f.hbar, f.t * double(n + 1) / double(n), f.q0, f.q);
            CHECK(rel(kf, ref) <= 1e-13);
        }
    }
    SECTION("oracle scale and window guards") {
        CHECK_THROWS_AS(oracle::fresnel_compose(p, 65), IndexOutOfRange);
        CHECK_THROWS_AS(oracle::fresnel_compose(p, -1), IndexOutOfRange);
        OscillatorParams oow = p;
        oow.t = 3.2;
        CHECK_THROWS_AS(oracle::fresnel_compose(oow, 4), OutOfWindow);
    }
}

TEST_CASE("potential sampling conventions agree in the limit", "[oracle]") {
    OscillatorParams p{1.0, 1.0, 1.0, 1.0, 0.2, 0.9, 1};
    const auto exact = prop::exact_propagator(p).amplitude.value;
    const auto later8 = oracle::fresnel_compose(p, 8, oracle::PotentialSampling::later);
    for (auto sampling : {oracle::PotentialSampling::earlier, oracle::PotentialSampling::midpoint}) {
        const auto k8 = oracle::fresnel_compose(p, 8, sampling);
        const auto k64 = oracle::fresnel_compose(p, 64, sampling);
        CHECK(std::abs(k8 - later8) > 1e-6);               // differs at finite n ...
        CHECK(std::abs(k64 - exact) < std::abs(k8 - exact) / 4.0);  // ... same limit
    }
}

TEST_CASE("regularized chain justifies the principal branch", "[oracle]") {
    OscillatorParams p{1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1};
    const auto k = oracle::fresnel_compose(p, 6);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1e-3, 1e-4, 1e-5}) {
        const double gap = std::abs(oracle::fresnel_compose_regularized(p, 6, delta) - k) / std::abs(k);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev <= 1e-4);  // measured 7.7e-6 at delta = 1e-5
    CHECK_THROWS_AS(oracle::fresnel_compose_regularized(p, 6, 0.0), NonPositiveParameter);
}

TEST_CASE("PDE residual stencil", "[oracle]") {
    OscillatorParams p{1.0, 1.0, 1.0, 1.0, 0.3, 0.7, 1};

    SECTION("corrected kernel refines at second order") {
        const double r0 = oracle::schrodinger_residual(p, 1e-2, 1e-2);
        const double r1 = oracle::schrodinger_residual(p, 5e-3, 5e-3);
        const double r2 = oracle::schrodinger_residual(p, 2.5e-3, 2.5e-3);
        CHECK(r0 / r1 == Catch::Approx(4.0).margin(0.8));
        CHECK(r1 / r2 == Catch::Approx(4.0).margin(0.8));
    }
    SECTION("free kernel behaves the same way") {
        OscillatorParams f = p;
        f.lambda = 0.0;
        const double r0 = oracle::schrodinger_residual(f, 1e-2, 1e-2);
        const double r1 = oracle::schrodinger_residual(f, 5e-3, 5e-3);
        CHECK(r0 / r1 == Catch::Approx(4.0).margin(0.8));
    }
    SECTION("doubled exponent violates the equation") {
        const double rf = oracle::schrodinger_residual(p, 1e-2, 1e-2, prop::ExponentMode::faithful);
        const double rf2 =
            oracle::schrodinger_residual(p, 2.5e-3, 2.5e-3, prop::ExponentMode::faithful);
        CHECK(rf >= verify::faithful_residual_floor);
        CHECK(rf2 >= verify::faithful_residual_floor);  // does not refine away
    }
    SECTION("stays away from t = 0 and the caustic") {
        OscillatorParams small = p;
        small.t = 5e-3;
        CHECK_THROWS_AS(oracle::schrodinger_residual(small, 1e-2, 1e-2), OutOfWindow);
        OscillatorParams edge = p;
        edge.t = std::numbers::pi - 1e-3;
        CHECK_THROWS_AS(oracle::schrodinger_residual(edge, 1e-2, 1e-2), OutOfWindow);
    }
}

TEST_CASE("Riemann cosine sums", "[oracle]") {
    SECTION("lambda -> 0 sums to t exactly") {
        CHECK(oracle::riemann_cos_sum(0.0, 2.5, 1000) == Catch::Approx(2.5).epsilon(1e-15));
    }
    SECTION("value at n = 1e5") {
        CHECK(oracle::riemann_cos_sum(1.0, 1.0, 100000) == Catch::Approx(0.841471).margin(1e-5));
        CHECK(std::abs(oracle::riemann_cos_sum(1.0, 1.0, 100000) - std::sin(1.0)) <= 1e-5);
    }
    SECTION("first-order error decay") {
        const double limit = std::sin(1.0);
        for (long long n : {1000LL, 10000LL}) {
            const double e1 = std::abs(oracle::riemann_cos_sum(1.0, 1.0, n) - limit);
            const double e2 = std::abs(oracle::riemann_cos_sum(1.0, 1.0, 2 * n) - limit);
            CHECK(e1 / e2 == Catch::Approx(2.0).epsilon(0.10));
        }
    }
}

TEST_CASE("dense reference", "[oracle]") {
    SECTION("n = 1") {
        const auto ref = oracle::dense_reference(1, 0.25);
        CHECK(ref.det == Catch::Approx(1.75).margin(1e-15));
        CHECK(ref.corners.c11 == Catch::Approx(1.0 / 1.75).epsilon(1e-15));
    }
    SECTION("discrete Laplacian determinant") {
        CHECK(oracle::dense_reference(4, 0.0).det == Catch::Approx(5.0).margin(1e-12));
    }
    SECTION("agreement with the streaming ladder at n = 300") {
        const double e = (1.0 / 300.0) * (1.0 / 300.0);
        const auto ref = oracle::dense_reference(300, e);
        CHECK(ref.det ==
              Catch::Approx(tridiag::det_sequences<double>(300, e).S_n).epsilon(1e-10));
    }
    SECTION("threshold guard and singularity") {
        CHECK_THROWS_AS(oracle::dense_reference(tridiag::dense_threshold() + 1, 0.0),
                        IndexOutOfRange);
        CHECK_THROWS_AS(oracle::dense_reference(1, 2.0), SingularMatrix);
    }
    SECTION("full action matrix structure") {
        const long long n = 5;
        const double e = 0.1;
        const auto t = oracle::dense_full_action(n, e);
        const long long d = n + 2;
        CHECK(t[0] == 1.0);
        CHECK(t[1] == -1.0);
        CHECK(t[std::size_t(d * d - 1)] == Catch::Approx(1.0 - e));
        CHECK(t[std::size_t(1 * d + 1)] == Catch::Approx(2.0 - e));
        CHECK(t[std::size_t(2 * d + 1)] == -1.0);
        CHECK(t[std::size_t(0 * d + 2)] == 0.0);
    }
}

TEST_CASE("classical RK4 trajectory oracle", "[oracle]") {
    SECTION("harmonic solution") {
        const auto end = oracle::classical_trajectory_rk4(1.0, 1.0, 1.0, 0.5, 1.0, 20000);
        CHECK(end.q == Catch::Approx(std::cos(1.0) + 0.5 * std::sin(1.0)).margin(1e-12));
        CHECK(end.p == Catch::Approx(-std::sin(1.0) + 0.5 * std::cos(1.0)).margin(1e-12));
    }
    SECTION("free motion") {
        const auto end = oracle::classical_trajectory_rk4(0.0, 2.0, 1.0, 3.0, 2.0, 100);
        CHECK(end.q == Catch::Approx(1.0 + 3.0 / 2.0 * 2.0).margin(1e-13));
        CHECK(end.p == Catch::Approx(3.0).margin(1e-13));
    }
}

TEST_CASE("extended-precision cross-check hook", "[oracle]") {
    // The streaming ladder is instantiable at long double; the double route
    // must sit on top of it.
    const long long n = 100000;
    const double e_d = (1.0 / double(n)) * (1.0 / double(n));
    const long double e_ld = (1.0L / (long double)n) * (1.0L / (long double)n);
    const auto d = tridiag::det_sequences<double>(n, e_d);
    const auto ld = tridiag::det_sequences<long double>(n, e_ld);
    CHECK(std::abs(double(ld.S_n) - d.S_n) <= 1e-11 * std::abs(d.S_n));
    CHECK(std::abs(double(ld.S_n_minus_1) - d.S_n_minus_1) <= 1e-11 * std::abs(d.S_n_minus_1));
}
