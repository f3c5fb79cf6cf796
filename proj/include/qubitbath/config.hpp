#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qubitbath/algebra.hpp"
#include "qubitbath/master_equation.hpp"
#include "qubitbath/stochastic.hpp"

namespace qubitbath {

enum class RunMethod { Exact, Approx, Lindblad, Qsd, Pseudomode };

std::string_view to_string(RunMethod m);
RunMethod parse_run_method(std::string_view s);  // throws ValidationError

struct InitialState {
    std::string label;  // preset name or "custom"
    PureState4 amplitudes;
};

/// state10, bell_phi, bell_psi, state11, plus_all, no11. Throws ValidationError for other names.
InitialState named_state(std::string_view name);
const std::vector<std::string>& named_state_names();

struct RunConfig {
    std::string name = "run";
    SystemParams params;
    InitialState initial_state = named_state("state10");
    RunMethod method = RunMethod::Exact;
    double t_final = 15.0;
    std::optional<double> dt_out;  // default t_final / 400
    IntegratorConfig integrator;
    std::optional<EnsembleConfig> ensemble;
    std::filesystem::path output_path = "out";
    std::string time_window_note;

    double effective_dt_out() const { return dt_out.value_or(t_final / 400.0); }
    /// The ensemble settings a qsd run would use (defaults when unset).
    EnsembleConfig effective_ensemble() const { return ensemble.value_or(EnsembleConfig{}); }
};

/// Throws ValidationError for any inconsistent or unphysical setting.
void validate(const RunConfig& cfg);

enum class FigurePreset { Fig1, Fig2, Fig3, Fig4, Fig5 };

FigurePreset parse_figure_preset(std::string_view s);  // throws ValidationError
std::string_view to_string(FigurePreset f);

/// The runs behind one named figure preset.
std::vector<RunConfig> figure_preset(FigurePreset f);

/// Parameters shared by the first two figures.
SystemParams fig1_params();

struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

struct ParsedConfig {
    RunConfig base;
    std::optional<SweepSpec> sweep;
};

/// Parses the JSON configuration text. Unknown keys are rejected.
/// Throws ParseError (syntax, with line/column; or field path) and ValidationError.
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::filesystem::path& file);

struct Overrides {
    std::optional<RunMethod> method;
    std::optional<std::size_t> traj;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_final;
    std::optional<double> dt_out;
    std::optional<std::filesystem::path> out;
    std::optional<unsigned> threads;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Sets a SystemParams field by name. "omega" and "kappa" set both qubits.
/// Throws ValidationError for unknown names.
void set_param(SystemParams& p, std::string_view axis, double value);
const std::vector<std::string>& sweep_axes();

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace qubitbath
