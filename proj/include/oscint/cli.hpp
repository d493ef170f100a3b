#pragma once

#include <complex>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/oracle.hpp"
#include "oscint/parallel.hpp"
#include "oscint/pathdecomp.hpp"
#include "oscint/propagator.hpp"
#include "oscint/report.hpp"
#include "oscint/tridiag.hpp"
#include "oscint/verify.hpp"

namespace oscint::cli {

enum class Command {
    det_sweep,
    propagator,
    converge,
    fluctuation,
    classical_exponent,
    evolve,
    verify,
};

inline const char* to_string(Command c) {
    switch (c) {
        case Command::det_sweep: return "det-sweep";
        case Command::propagator: return "propagator";
        case Command::converge: return "converge";
        case Command::fluctuation: return "fluctuation";
        case Command::classical_exponent: return "classical-exponent";
        case Command::evolve: return "evolve";
        case Command::verify: return "verify";
    }
    return "?";
}

struct PathSpec {
    pathdecomp::PathSource source = pathdecomp::PathSource::linear;
    std::string file;  // for source == table

    std::string describe() const {
        return source == pathdecomp::PathSource::table ? "file:" + file
                                                       : pathdecomp::to_string(source);
    }
};

// Parses "linear" | "classical" | "sine" | "file:<path>".
inline PathSpec parse_path_spec(const std::string& text) {
    PathSpec spec;
    if (text == "linear") spec.source = pathdecomp::PathSource::linear;
    else if (text == "classical") spec.source = pathdecomp::PathSource::classical;
    else if (text == "sine") spec.source = pathdecomp::PathSource::sine_perturbed;
    else if (text.rfind("file:", 0) == 0) {
        spec.source = pathdecomp::PathSource::table;
        spec.file = text.substr(5);
        if (spec.file.empty()) throw IoError("--path file: requires a path");
    } else {
        throw IoError("unknown --path value: " + text);
    }
    return spec;
}

struct RunConfig {
    Command command = Command::verify;
    OscillatorParams params;
    std::vector<long long> n_list;  // empty selects a per-command default
    long long n_max = 512;
    PathSpec path;
    Format format = Format::csv;
    std::string out;  // empty = stdout
    std::uint64_t seed = 1234;
    bool faithful = false;
    int jobs = 1;
};

namespace detail {

inline std::vector<long long> n_list_or_default(const RunConfig& cfg, std::vector<long long> def) {
    return cfg.n_list.empty() ? def : cfg.n_list;
}

inline nlohmann::ordered_json meta_echo(const RunConfig& cfg) {
    nlohmann::ordered_json meta;
    meta["command"] = to_string(cfg.command);
    meta["lambda"] = cfg.params.lambda;
    meta["t"] = cfg.params.t;
    meta["mass"] = cfg.params.mass;
    meta["hbar"] = cfg.params.hbar;
    meta["q0"] = cfg.params.q0;
    meta["q"] = cfg.params.q;
    meta["dim"] = cfg.params.dim;
    meta["n_list"] = cfg.n_list;
    meta["n_max"] = cfg.n_max;
    meta["path"] = cfg.path.describe();
    meta["seed"] = cfg.seed;
    meta["format"] = to_string(cfg.format);
    meta["out"] = cfg.out;
    meta["faithful"] = cfg.faithful;
    meta["jobs"] = cfg.jobs;
    meta["version"] = artifact_version;
    return meta;
}

inline pathdecomp::ReferencePath make_path(const RunConfig& cfg, const SliceGrid& grid) {
    if (cfg.path.source == pathdecomp::PathSource::table)
        return pathdecomp::load_table_path(cfg.params, grid, cfg.path.file);
    return pathdecomp::build_path(cfg.params, grid, cfg.path.source, cfg.seed);
}

inline void append_amplitude_row(Table& table, const std::string& kind, const Cell& n,
                                 std::complex<double> v) {
    table.add_row({kind, n, v.real(), v.imag(), std::abs(v), std::arg(v)});
}

}  // namespace detail

// Executes one parsed run configuration. Exit codes: 0 = success (all checks
// passed), 1 = a executed check failed or a numeric error surfaced mid-run,
// 2 = configuration/validation error. Identical configuration (including
// seed) produces byte-identical artifacts.
inline int run(const RunConfig& cfg, std::ostream& out_stream = std::cout,
               std::ostream& err_stream = std::cerr) {
    const prop::ExponentMode mode =
        cfg.faithful ? prop::ExponentMode::faithful : prop::ExponentMode::corrected;

    // validation phase: reject unusable configurations before any work
    std::vector<long long> n_list;
    try {
        switch (cfg.command) {
            case Command::det_sweep:
            case Command::converge:
                n_list = detail::n_list_or_default(cfg, {1000, 10000, 100000});
                break;
            case Command::propagator:
                n_list = detail::n_list_or_default(cfg, {1000});
                break;
            case Command::fluctuation:
                n_list = detail::n_list_or_default(cfg, {10000});
                break;
            case Command::classical_exponent:
                n_list = detail::n_list_or_default(cfg, {1000});
                break;
            case Command::evolve:
                n_list = detail::n_list_or_default(cfg, {50});
                break;
            case Command::verify:
                n_list = detail::n_list_or_default(cfg, {});
                break;
        }
        for (long long n : n_list) validate(cfg.params, n, GridPurpose::propagator);
        if (cfg.command == Command::verify) validate(cfg.params, 8, GridPurpose::propagator);
        if (cfg.jobs < 1) throw NonPositiveParameter("--jobs must be >= 1");
        if (cfg.n_max < 8) throw NonPositiveParameter("--n-max must be >= 8");
    } catch (const Error& e) {
        err_stream << e.name() << ": " << e.what() << "\n";
        return 2;
    }

    Table table;
    nlohmann::ordered_json meta = detail::meta_echo(cfg);
    int exit_code = 0;

    try {
        switch (cfg.command) {
            case Command::det_sweep: {
                table.columns = {"n", "eps_det", "abs_err"};
                const double limit = cfg.params.lambda == 0.0
                                         ? cfg.params.t
                                         : std::sin(cfg.params.lambda * cfg.params.t) / cfg.params.lambda;
                std::vector<std::vector<Cell>> rows(n_list.size());
                parallel_for_index(n_list.size(), cfg.jobs, [&](std::size_t i) {
                    const double det = tridiag::scaled_det<double>(n_list[i], cfg.params.lambda, cfg.params.t);
                    rows[i] = {n_list[i], det, std::abs(det - limit)};
                });
                table.rows = std::move(rows);
                meta["limit_sin_lambda_t_over_lambda"] = limit;
                break;
            }
            case Command::propagator: {
                table.columns = {"kind", "n", "re", "im", "modulus", "phase"};
                for (long long n : n_list) {
                    const SliceGrid grid = validate(cfg.params, n);
                    const auto kn = prop::finite_n_propagator(cfg.params, grid, mode);
                    detail::append_amplitude_row(table, "finite_n", n, kn.amplitude.value);
                }
                const auto kx = prop::exact_propagator(cfg.params, mode);
                detail::append_amplitude_row(table, "exact", std::string("exact"), kx.amplitude.value);
                break;
            }
            case Command::converge: {
                table.columns = {"n", "abs_err", "eps_det", "Q_n", "slope_running"};
                const auto sweep = prop::convergence_sweep(cfg.params, n_list, mode, cfg.jobs);
                for (const auto& row : sweep.rows)
                    table.add_row({row.n, row.abs_err, row.eps_det, row.q_exponent, row.slope_running});
                meta["fitted_slope"] = sweep.fitted_slope;
                break;
            }
            case Command::fluctuation: {
                table.columns = {"k", "D_k", "cos_k_lambda_eps", "abs_diff"};
                const long long n = n_list.front();
                const double lam_eps = cfg.params.lambda * cfg.params.t / double(n);
                const double e = lam_eps * lam_eps;
                const auto seq = tridiag::det_sequences<double>(n, e, true);
                for (long long k = 1; k <= n; ++k) {
                    const double dk = seq.D[std::size_t(k - 1)];
                    const double ck = std::cos(double(k) * lam_eps);
                    table.add_row({k, dk, ck, std::abs(dk - ck)});
                }
                break;
            }
            case Command::classical_exponent: {
                table.columns = {"path", "source", "Q_direct", "Q_reduced", "rel_diff"};
                const long long n = n_list.front();
                const SliceGrid grid = validate(cfg.params, n);
                const double q_red = pathdecomp::classical_exponent_reduced(cfg.params, grid);
                const double scale = std::max(std::abs(q_red), 1.0);
                double qmin = q_red, qmax = q_red;
                auto add_path = [&](long long idx, const pathdecomp::ReferencePath& path) {
                    const double qd = pathdecomp::classical_exponent_direct(cfg.params, grid, path);
                    qmin = std::min(qmin, qd);
                    qmax = std::max(qmax, qd);
                    table.add_row({idx, std::string(pathdecomp::to_string(path.source)), qd, q_red,
                                   std::abs(qd - q_red) / scale});
                };
                add_path(0, pathdecomp::build_linear_path(cfg.params, grid));
                add_path(1, pathdecomp::build_classical_path(cfg.params, grid));
                if (cfg.path.source == pathdecomp::PathSource::table)
                    add_path(2, pathdecomp::load_table_path(cfg.params, grid, cfg.path.file));
                for (long long k = 0; k < 20; ++k)
                    add_path(3 + k, pathdecomp::build_sine_perturbed_path(cfg.params, grid,
                                                                          cfg.seed + std::uint64_t(k)));
                meta["relative_spread"] = (qmax - qmin) / scale;
                break;
            }
            case Command::evolve: {
                table.columns = {"t", "center", "momentum", "alpha_re", "alpha_im",
                                 "log_norm_re", "log_norm_im"};
                const long long steps = n_list.front();
                prop::GaussianState initial = prop::ground_state(cfg.params);
                initial.center = cfg.params.q0;
                table.add_row({0.0, initial.center, initial.momentum, initial.alpha.real(),
                               initial.alpha.imag(), initial.log_norm.real(), initial.log_norm.imag()});
                for (long long i = 1; i <= steps; ++i) {
                    OscillatorParams pp = cfg.params;
                    pp.t = cfg.params.t * double(i) / double(steps);
                    const auto ev = prop::evolve_gaussian(pp, initial, mode);
                    table.add_row({pp.t, ev.center, ev.momentum, ev.alpha.real(), ev.alpha.imag(),
                                   ev.log_norm.real(), ev.log_norm.imag()});
                }
                break;
            }
            case Command::verify: {
                table.columns = {"check", "pass", "measured", "threshold", "note"};
                verify::VerifyConfig vcfg;
                vcfg.params = cfg.params;
                vcfg.n_max = cfg.n_max;
                vcfg.seed = cfg.seed;
                vcfg.jobs = cfg.jobs;
                const auto report = verify::run_verify_battery(vcfg);
                for (const auto& c : report.checks)
                    table.add_row({c.name, std::string(c.pass ? "pass" : "FAIL"), c.measured,
                                   c.threshold, c.note});
                meta["all_pass"] = report.all_pass;
                if (!report.all_pass) exit_code = 1;
                break;
            }
        }
    } catch (const Error& e) {
        err_stream << e.name() << ": " << e.what() << "\n";
        return 1;
    }

    try {
        emit(table, cfg.format, cfg.out, meta, out_stream);
    } catch (const Error& e) {
        err_stream << e.name() << ": " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

} // namespace oscint::cli
