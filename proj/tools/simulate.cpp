#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qubitbath/config.hpp"
#include "qubitbath/errors.hpp"
#include "qubitbath/runner.hpp"

using namespace qubitbath;

namespace {

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        std::size_t used = 0;
        const double x = std::stod(cell, &used);
        if (used != cell.size()) throw ValidationError("bad sweep value '" + cell + "'");
        v.push_back(x);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two qubits in a common non-Markovian bath: master equation, QSD ensemble and reference solvers."};

    std::string preset, config_file, method, out_dir, sweep_axis, sweep_values;
    std::optional<std::size_t> traj;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_final, dt_out;
    unsigned threads = 0;

    auto* g = app.add_option_group("input");
    g->add_option("--preset", preset, "fig1 | fig2 | fig3 | fig4 | fig5");
    g->add_option("--config", config_file, "JSON run configuration");
    g->require_option(1);
    app.add_option("--method", method, "exact | approx | lindblad | qsd | pseudomode");
    app.add_option("--traj", traj, "QSD trajectories");
    app.add_option("--seed", seed, "QSD seed");
    app.add_option("--t-final", t_final, "final time");
    app.add_option("--dt-out", dt_out, "output spacing");
    app.add_option("--out", out_dir, "output directory (overrides QUBITBATH_OUT_DIR)");
    app.add_option("--sweep-axis", sweep_axis, "parameter to sweep (gamma, omega, kappa, j_xy, ...)");
    app.add_option("--sweep-values", sweep_values, "comma-separated sweep values");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    std::vector<RunConfig> runs;
    try {
        Overrides o;
        if (!method.empty()) o.method = parse_run_method(method);
        o.traj = traj;
        o.seed = seed;
        o.t_final = t_final;
        o.dt_out = dt_out;
        if (threads > 0) o.threads = threads;
        if (!out_dir.empty()) o.out = out_dir;
        else if (const char* env = std::getenv("QUBITBATH_OUT_DIR"); env && *env) o.out = env;

        std::optional<SweepSpec> sweep;
        if (!preset.empty()) {
            runs = figure_preset(parse_figure_preset(preset));
            if (o.method) {
                // One run per initial state / parameter set, with the requested method.
                std::vector<RunConfig> single;
                for (auto& r : runs) {
                    if (r.method != RunMethod::Exact) continue;
                    const auto cut = r.name.rfind('_');
                    r.name = r.name.substr(0, cut) + "_" + method;
                    single.push_back(r);
                }
                runs = std::move(single);
            }
        } else {
            ParsedConfig pc = load_config(config_file);
            runs.push_back(pc.base);
            sweep = pc.sweep;
        }
        if (!sweep_axis.empty() || !sweep_values.empty()) {
            if (sweep_axis.empty()) throw ValidationError("--sweep-values needs --sweep-axis");
            sweep = SweepSpec{sweep_axis, parse_values(sweep_values)};
        }
        for (auto& r : runs) {
            apply_overrides(r, o);
            validate(r);
        }
        if (sweep) {
            std::vector<RunConfig> expanded;
            for (const auto& r : runs) {
                auto s = sweep_configs(r, sweep->axis, sweep->values);
                expanded.insert(expanded.end(), s.begin(), s.end());
            }
            runs = std::move(expanded);
        }
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << '\n';
        return ExitValidation;
    }

    const auto outcomes = run_all(runs, threads);
    for (const auto& r : outcomes) {
        if (r.exit_code == ExitOk)
            std::cout << r.name << ": wrote " << r.csv.string() << '\n';
        else
            std::cerr << r.name << ": failed (exit " << r.exit_code << "): " << r.message << '\n';
    }
    return aggregate_exit(outcomes);
}
