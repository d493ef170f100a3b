#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/numeric.hpp"
#include "oscint/tridiag.hpp"

// Shift of integration variables around an endpoint-pinned reference path w:
// x_j = w(j t/(n+1)) + y_j. The quadratic form splits as
//   x^T T x = w^T T w + y^T S y + 2 rho^T y,   rho = S w_int - w_ends,
// and the Gaussian reduction leaves the endpoint-only classical exponent
//   Q_n = (1/eps) (w^T T w - rho^T S^{-1} rho),
// identical for every admissible w.
namespace oscint::pathdecomp {

enum class PathSource { linear, classical, sine_perturbed, table, callable };

inline const char* to_string(PathSource s) {
    switch (s) {
        case PathSource::linear: return "linear";
        case PathSource::classical: return "classical";
        case PathSource::sine_perturbed: return "sine";
        case PathSource::table: return "table";
        case PathSource::callable: return "callable";
    }
    return "?";
}

struct ReferencePath {
    std::vector<double> w;  // w_0 .. w_{n+1}
    PathSource source = PathSource::linear;

    long long interior_count() const noexcept { return static_cast<long long>(w.size()) - 2; }
};

namespace detail {
inline void pin_endpoints(ReferencePath& path, const OscillatorParams& p) {
    path.w.front() = p.q0;
    path.w.back() = p.q;
    for (double v : path.w)
        if (!std::isfinite(v)) throw NonPositiveParameter("reference path samples must be finite");
}
}  // namespace detail

inline ReferencePath build_linear_path(const OscillatorParams& p, const SliceGrid& grid) {
    ReferencePath path;
    path.source = PathSource::linear;
    path.w.resize(static_cast<std::size_t>(grid.sample_count()));
    const double span = p.q - p.q0;
    for (long long j = 0; j <= grid.n + 1; ++j)
        path.w[static_cast<std::size_t>(j)] = p.q0 + span * double(j) / double(grid.n + 1);
    detail::pin_endpoints(path, p);
    return path;
}

// x_cl(s) = (q sin(lambda s) + q0 sin(lambda (t-s))) / sin(lambda t);
// at lambda = 0 this degenerates to the straight line.
inline ReferencePath build_classical_path(const OscillatorParams& p, const SliceGrid& grid) {
    if (p.lambda == 0.0) {
        ReferencePath path = build_linear_path(p, grid);
        path.source = PathSource::classical;
        return path;
    }
    if (!p.in_window())
        throw CausticSingularity("classical path undefined at/beyond the caustic sin(lambda t) = 0");
    const double s_lt = std::sin(p.lambda * p.t);
    ReferencePath path;
    path.source = PathSource::classical;
    path.w.resize(static_cast<std::size_t>(grid.sample_count()));
    for (long long j = 0; j <= grid.n + 1; ++j) {
        const double s = grid.node(j);
        path.w[static_cast<std::size_t>(j)] =
            (p.q * std::sin(p.lambda * s) + p.q0 * std::sin(p.lambda * (p.t - s))) / s_lt;
    }
    detail::pin_endpoints(path, p);
    return path;
}

// Endpoint-pinned random path: straight line plus sum_{k<=5} c_k sin(k pi s/t)
// with c_k uniform in [-1,1] from the given seed.
inline ReferencePath build_sine_perturbed_path(const OscillatorParams& p, const SliceGrid& grid,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double c[5];
    for (double& ck : c) ck = uniform_in(rng, -1.0, 1.0);

    ReferencePath path = build_linear_path(p, grid);
    path.source = PathSource::sine_perturbed;
    const double pi_over_t = std::numbers::pi / p.t;
    for (long long j = 1; j <= grid.n; ++j) {
        const double s = grid.node(j);
        double bump = 0.0;
        for (int k = 0; k < 5; ++k) bump += c[k] * std::sin(double(k + 1) * pi_over_t * s);
        path.w[static_cast<std::size_t>(j)] += bump;
    }
    detail::pin_endpoints(path, p);
    return path;
}

inline ReferencePath build_callable_path(const OscillatorParams& p, const SliceGrid& grid,
                                         const std::function<double(double)>& fn) {
    ReferencePath path;
    path.source = PathSource::callable;
    path.w.resize(static_cast<std::size_t>(grid.sample_count()));
    for (long long j = 0; j <= grid.n + 1; ++j)
        path.w[static_cast<std::size_t>(j)] = fn(grid.node(j));
    detail::pin_endpoints(path, p);
    return path;
}

// Single-column numeric text, one sample per line, n+2 lines. Endpoints must
// match q0/q to 1e-12; they are then pinned exactly.
inline ReferencePath load_table_path(const OscillatorParams& p, const SliceGrid& grid,
                                     const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open path table: " + file);
    ReferencePath path;
    path.source = PathSource::table;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double v;
        if (ls >> v) path.w.push_back(v);
        else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
            throw IoError("malformed path table line: '" + line + "'");
    }
    if (static_cast<long long>(path.w.size()) != grid.sample_count())
        throw IoError("path table must contain exactly n+2 samples");
    if (std::abs(path.w.front() - p.q0) > 1e-12 || std::abs(path.w.back() - p.q) > 1e-12)
        throw IoError("path table endpoints do not match q0/q (tolerance 1e-12)");
    detail::pin_endpoints(path, p);
    return path;
}

inline ReferencePath build_path(const OscillatorParams& p, const SliceGrid& grid, PathSource source,
                                std::uint64_t seed = 0) {
    switch (source) {
        case PathSource::linear: return build_linear_path(p, grid);
        case PathSource::classical: return build_classical_path(p, grid);
        case PathSource::sine_perturbed: return build_sine_perturbed_path(p, grid, seed);
        default:
            throw NonPositiveParameter("build_path: table/callable sources need their own builder");
    }
}

// rho = S_n w_int - w_ends, evaluated row-wise in O(n).
inline std::vector<double> build_rho(const ReferencePath& path, double e) {
    const long long n = path.interior_count();
    if (n < 1) throw NonPositiveParameter("build_rho: path needs at least one interior sample");
    const double diag = 2.0 - e;
    const auto& w = path.w;
    std::vector<double> rho(static_cast<std::size_t>(n));
    for (long long j = 1; j <= n; ++j)
        rho[static_cast<std::size_t>(j - 1)] =
            -w[static_cast<std::size_t>(j - 1)] + diag * w[static_cast<std::size_t>(j)] -
            w[static_cast<std::size_t>(j + 1)];
    return rho;
}

// w^T T_n w = sum_{j=1}^{n+1} (w_j - w_{j-1})^2 - e sum_{j=1}^{n+1} w_j^2,
// computed from the sum form (the potential sum skips w_0).
inline double quad_form_T(const ReferencePath& path, double e) {
    const auto& w = path.w;
    CompensatedSum<long double> acc;
    for (std::size_t j = 1; j < w.size(); ++j) {
        const long double d = (long double)w[j] - (long double)w[j - 1];
        acc.add(d * d);
        acc.add(-(long double)e * (long double)w[j] * (long double)w[j]);
    }
    return double(acc.value());
}

// y^T S_n y for an interior vector.
inline double interior_quad_form(std::span<const double> y, double e) {
    CompensatedSum<long double> acc;
    const long double diag = 2.0L - (long double)e;
    for (std::size_t j = 0; j < y.size(); ++j) {
        acc.add(diag * (long double)y[j] * (long double)y[j]);
        if (j + 1 < y.size()) acc.add(-2.0L * (long double)y[j] * (long double)y[j + 1]);
    }
    return double(acc.value());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    CompensatedSum<long double> acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add((long double)a[i] * (long double)b[i]);
    return double(acc.value());
}

enum class ExponentRoute { reduced, direct };

// Q_n by the endpoint-only reduction: with the determinant ladder S_j,
//   Q_n = (1/(eps S_n)) [ (q0^2+q^2)(S_n - S_{n-1}) - 2 q q0 ] - eps lambda^2 q^2.
inline double classical_exponent_reduced(const OscillatorParams& p, const SliceGrid& grid) {
    const double e = (p.lambda * grid.epsilon) * (p.lambda * grid.epsilon);
    const auto seq = tridiag::det_sequences<double>(grid.n, e);
    if (seq.S_n == 0.0) throw SingularMatrix("classical exponent: det S_n = 0");
    const long double sn = seq.S_n, snm1 = seq.S_n_minus_1;
    const long double eps = grid.epsilon;
    const long double q0 = p.q0, q = p.q;
    const long double lead = ((q0 * q0 + q * q) * (sn - snm1) - 2.0L * q * q0) / (eps * sn);
    return double(lead - eps * (long double)(p.lambda * p.lambda) * q * q);
}

// Q_n by the arbitrary-path route: (w^T T w - rho^T S^{-1} rho)/eps.
inline double classical_exponent_direct(const OscillatorParams& p, const SliceGrid& grid,
                                        const ReferencePath& path) {
    if (path.interior_count() != grid.n)
        throw DimensionMismatch("classical_exponent: path sample count does not match grid");
    const double e = (p.lambda * grid.epsilon) * (p.lambda * grid.epsilon);
    const auto rho = build_rho(path, e);
    const auto x = tridiag::solve<double>(grid.n, e, rho);
    const long double quad = quad_form_T(path, e);
    const long double corr = dot(rho, x);
    return double((quad - corr) / (long double)grid.epsilon);
}

inline double classical_exponent(const OscillatorParams& p, const SliceGrid& grid,
                                 ExponentRoute route = ExponentRoute::reduced,
                                 const ReferencePath* path = nullptr) {
    if (route == ExponentRoute::reduced) return classical_exponent_reduced(p, grid);
    if (path != nullptr) return classical_exponent_direct(p, grid, *path);
    const ReferencePath fallback = build_linear_path(p, grid);
    return classical_exponent_direct(p, grid, fallback);
}

// | (y^T S y + 2 rho^T y) - ((y+S^{-1}rho)^T S (y+S^{-1}rho) - rho^T S^{-1} rho) |,
// the completed-square identity behind the Gaussian reduction.
inline double completed_square_residual(const ReferencePath& path, double e,
                                        std::span<const double> probe) {
    const long long n = path.interior_count();
    if (static_cast<long long>(probe.size()) != n)
        throw DimensionMismatch("completed_square_residual: probe length must equal n");
    const auto rho = build_rho(path, e);
    const auto shift = tridiag::solve<double>(n, e, rho);

    const double lhs = interior_quad_form(probe, e) + 2.0 * dot(rho, probe);

    std::vector<double> z(probe.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = probe[i] + shift[i];
    const double rhs = interior_quad_form(z, e) - dot(rho, shift);
    return std::abs(lhs - rhs);
}

} // namespace oscint::pathdecomp
