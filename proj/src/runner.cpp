#include "qubitbath/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "qubitbath/errors.hpp"
#include "qubitbath/master_equation.hpp"
#include "qubitbath/observables.hpp"
#include "qubitbath/pseudomode.hpp"
#include "qubitbath/stochastic.hpp"

namespace qubitbath {

namespace {

constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-10;
constexpr double kMinEigTol = -1e-6;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

MasterEquationMethod me_method(RunMethod m) {
    switch (m) {
        case RunMethod::Approx: return MasterEquationMethod::ApproxNoFirstOrderNoise;
        case RunMethod::Lindblad: return MasterEquationMethod::MarkovLindblad;
        default: return MasterEquationMethod::Exact;
    }
}

std::vector<double> qsd_grid(double t_final, std::size_t n_out) {
    std::vector<double> g(n_out + 1, 0.0);
    for (std::size_t k = 1; k <= n_out; ++k) g[k] = t_final * static_cast<double>(k) / static_cast<double>(n_out);
    return g;
}

}  // namespace

RunSeries simulate(const RunConfig& cfg) {
    validate(cfg);
    const DensityMatrix rho0 = density_from_pure(cfg.initial_state.amplitudes);
    const double dt_out = cfg.effective_dt_out();
    RunSeries out;
    auto& d = out.diagnostics;

    switch (cfg.method) {
        case RunMethod::Exact:
        case RunMethod::Approx:
        case RunMethod::Lindblad: {
            const auto grid = uniform_grid(cfg.t_final, dt_out);
            const auto method = me_method(cfg.method);
            const EvolutionResult r = evolve(rho0, cfg.params, method, cfg.t_final, grid, cfg.integrator);
            for (const auto& s : r.samples) {
                out.t.push_back(s.t);
                out.rho.push_back(s.rho);
            }
            d["accepted_steps"] = r.stats.accepted;
            d["rejected_steps"] = r.stats.rejected;
            d["rhs_evaluations"] = r.stats.rhs_evals;
            d["max_rhs_trace"] = r.max_rhs_trace;
            d["max_rhs_herm_defect"] = r.max_rhs_herm_defect;
            d["max_step_herm_drift"] = r.max_step_herm_drift;
            d["positivity_warnings"] = r.positivity_warnings;
            if (cfg.params.symmetric())
                d["rho11_closed_form_deviation"] = rho11_closed_form_check(r, cfg.params, method, cfg.integrator);
            break;
        }
        case RunMethod::Qsd: {
            EnsembleConfig e = cfg.effective_ensemble();
            // Shrink the trajectory step so that every output time is a whole number of steps.
            const double substeps = std::max(1.0, std::ceil(dt_out / e.dt - 1e-9));
            const auto n_out = static_cast<std::size_t>(std::llround(cfg.t_final / dt_out));
            if (n_out > 0) e.dt = cfg.t_final / (static_cast<double>(n_out) * substeps);
            const auto grid = qsd_grid(cfg.t_final, n_out);
            const EnsembleResult r = ensemble_average(cfg.params, cfg.initial_state.amplitudes, e, grid);
            out.t = r.t;
            out.rho = r.rho;
            d["n_traj"] = e.n_traj;
            d["seed"] = e.seed;
            d["trajectory_dt"] = e.dt;
            d["max_trace_drift"] = r.trace_drift.empty() ? 0.0 : *std::max_element(r.trace_drift.begin(), r.trace_drift.end());
            break;
        }
        case RunMethod::Pseudomode: {
            const auto grid = uniform_grid(cfg.t_final, dt_out);
            out.t = grid;
            out.rho = pseudomode_reference(cfg.params, rho0, grid, cfg.integrator);
            break;
        }
    }

    int trace_violations = 0, herm_violations = 0, positivity_violations = 0;
    double min_eig = 1.0;
    for (const auto& rho : out.rho) {
        const SanityReport s = sanity_monitor(rho);
        if (!std::isfinite(s.trace) || !std::isfinite(s.min_eig)) throw NanDetected("non-finite state in output");
        trace_violations += std::abs(s.trace - 1.0) > kTraceTol;
        herm_violations += s.herm_defect > kHermTol;
        positivity_violations += s.min_eig < kMinEigTol;
        min_eig = std::min(min_eig, s.min_eig);
    }
    d["rows"] = out.t.size();
    d["min_eigenvalue"] = min_eig;
    d["sanity"] = {{"trace_tolerance", kTraceTol},
                   {"herm_tolerance", kHermTol},
                   {"min_eig_tolerance", kMinEigTol},
                   {"trace_violations", trace_violations},
                   {"herm_violations", herm_violations},
                   {"positivity_violations", positivity_violations}};
    return out;
}

std::string csv_header() {
    std::string h = "t";
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
            h += ", re_rho_" + ij + ", im_rho_" + ij;
        }
    h += ", purity, concurrence, trace, min_eig";
    return h;
}

void write_csv(std::ostream& os, const RunSeries& series) {
    os << csv_header() << '\n';
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        const auto& rho = series.rho[k];
        std::string line = num(series.t[k]);
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                const cd v = rho.rho(i, j);
                line += ", " + num(v.real()) + ", " + num(v.imag());
            }
        const ObservableRecord o = observe(series.t[k], rho);
        line += ", " + num(o.purity) + ", " + num(o.concurrence) + ", " + num(o.trace) + ", " + num(o.min_eig);
        os << line << '\n';
    }
}

RunSeries read_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot read '" + file.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) throw ParseError("unexpected CSV header in '" + file.string() + "'");
    RunSeries s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 25) throw ParseError("malformed CSV row in '" + file.string() + "'");
        DensityMatrix rho;
        std::size_t c = 1;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j, c += 2) {
                rho.rho(i, j) = {v[c], v[c + 1]};
                rho.rho(j, i) = std::conj(rho.rho(i, j));
            }
        s.t.push_back(v[0]);
        s.rho.push_back(rho);
    }
    return s;
}

RunOutcome run(const RunConfig& cfg) {
    RunOutcome o;
    o.name = cfg.name;
    o.csv = cfg.output_path / (cfg.name + ".csv");
    o.metadata = cfg.output_path / (cfg.name + ".json");
    auto cleanup = [&] {
        std::error_code ec;
        std::filesystem::remove(o.csv, ec);
        std::filesystem::remove(o.metadata, ec);
    };
    try {
        const auto start = std::chrono::steady_clock::now();
        const RunSeries series = simulate(cfg);
        const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::filesystem::create_directories(cfg.output_path);
        {
            std::ofstream f(o.csv, std::ios::binary);
            write_csv(f, series);
            if (!f) throw std::runtime_error("failed writing " + o.csv.string());
        }
        nlohmann::json meta;
        meta["artifact"] = "qubitbath";
        meta["artifact_version"] = std::string(artifact_version);
        meta["config"] = to_json(cfg);
        meta["time_window"] = {{"t_final", cfg.t_final}, {"dt_out", cfg.effective_dt_out()}};
        if (!cfg.time_window_note.empty()) meta["time_window"]["note"] = cfg.time_window_note;
        meta["runtime_seconds"] = runtime;
        meta["csv"] = o.csv.filename().string();
        meta["diagnostics"] = series.diagnostics;
        {
            std::ofstream f(o.metadata, std::ios::binary);
            f << meta.dump(2) << '\n';
            if (!f) throw std::runtime_error("failed writing " + o.metadata.string());
        }
    } catch (const ValidationError& e) {
        cleanup();
        o.exit_code = ExitValidation;
        o.message = e.what();
    } catch (const ParseError& e) {
        cleanup();
        o.exit_code = ExitValidation;
        o.message = e.what();
    } catch (const std::invalid_argument& e) {
        cleanup();
        o.exit_code = ExitValidation;
        o.message = e.what();
    } catch (const std::exception& e) {
        cleanup();
        o.exit_code = ExitIntegration;
        o.message = e.what();
    }
    return o;
}

std::vector<RunOutcome> run_all(std::span<const RunConfig> cfgs, unsigned threads) {
    std::vector<RunOutcome> out(cfgs.size());
    if (cfgs.empty()) return out;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfgs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) out[i] = run(cfgs[i]);
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
        worker();
    }
    return out;
}

std::vector<RunConfig> sweep_configs(const RunConfig& base, std::string_view axis, std::span<const double> values) {
    std::vector<RunConfig> cfgs;
    for (double v : values) {
        RunConfig c = base;
        set_param(c.params, axis, v);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%g", v);
        c.name = base.name + "_" + std::string(axis) + buf;
        cfgs.push_back(std::move(c));
    }
    return cfgs;
}

std::vector<RunOutcome> sweep(const RunConfig& base, std::string_view axis, std::span<const double> values,
                              unsigned threads) {
    const auto cfgs = sweep_configs(base, axis, values);
    return run_all(cfgs, threads);
}

int aggregate_exit(std::span<const RunOutcome> outcomes) {
    int code = ExitOk;
    for (const auto& o : outcomes) code = std::max(code, o.exit_code);
    return code;
}

}  // namespace qubitbath
