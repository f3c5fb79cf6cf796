#include "qubitbath/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qubitbath/errors.hpp"

namespace qubitbath {

using nlohmann::json;

std::string_view to_string(RunMethod m) {
    switch (m) {
        case RunMethod::Exact: return "exact";
        case RunMethod::Approx: return "approx";
        case RunMethod::Lindblad: return "lindblad";
        case RunMethod::Qsd: return "qsd";
        case RunMethod::Pseudomode: return "pseudomode";
    }
    return "?";
}

RunMethod parse_run_method(std::string_view s) {
    for (RunMethod m : {RunMethod::Exact, RunMethod::Approx, RunMethod::Lindblad, RunMethod::Qsd, RunMethod::Pseudomode})
        if (to_string(m) == s) return m;
    throw ValidationError("unknown method '" + std::string(s) + "' (exact|approx|lindblad|qsd|pseudomode)");
}

const std::vector<std::string>& named_state_names() {
    static const std::vector<std::string> names{"state10", "bell_phi", "bell_psi", "state11", "plus_all", "no11"};
    return names;
}

InitialState named_state(std::string_view name) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = 1.0 / std::sqrt(3.0);
    InitialState s;
    s.label = std::string(name);
    auto& c = s.amplitudes.c;
    if (name == "state10") {
        c = {0.0, 1.0, 0.0, 0.0};
    } else if (name == "bell_phi") {
        c = {r2, 0.0, 0.0, r2};
    } else if (name == "bell_psi") {
        c = {0.0, r2, r2, 0.0};
    } else if (name == "state11") {
        c = {1.0, 0.0, 0.0, 0.0};
    } else if (name == "plus_all") {
        c = {0.5, 0.5, 0.5, 0.5};
    } else if (name == "no11") {
        c = {0.0, r3, r3, r3};
    } else {
        throw ValidationError("unknown initial state '" + std::string(name) + "'");
    }
    return s;
}

void validate(const RunConfig& cfg) {
    validate(cfg.params);
    if (!std::isfinite(cfg.t_final) || cfg.t_final < 0.0) throw ValidationError("t_final must be finite and >= 0");
    const double dt_out = cfg.effective_dt_out();
    if (!std::isfinite(dt_out) || (cfg.t_final > 0.0 && !(dt_out > 0.0)))
        throw ValidationError("dt_out must be > 0");
    for (const auto& a : cfg.initial_state.amplitudes.c)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ValidationError("initial state amplitudes must be finite");
    if (!(cfg.initial_state.amplitudes.norm_squared() > 0.0)) throw ValidationError("initial state is empty (zero norm)");
    const auto& ic = cfg.integrator;
    if (!(ic.abs_tol > 0.0) || !(ic.rel_tol > 0.0)) throw ValidationError("integrator tolerances must be > 0");
    if (!std::isfinite(ic.max_step)) throw ValidationError("integrator max_step must be finite");
    if (cfg.method == RunMethod::Qsd) {
        const EnsembleConfig e = cfg.effective_ensemble();
        if (e.n_traj < 1) throw ValidationError("ensemble n_traj must be >= 1");
        if (!(e.dt > 0.0)) throw ValidationError("ensemble dt must be > 0");
        if (!cfg.params.symmetric())
            throw ValidationError("qsd trajectories need omega_a == omega_b and kappa_a == kappa_b");
        if (cfg.t_final > 0.0) {
            const double steps = cfg.t_final / dt_out;
            if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
                throw ValidationError("qsd runs need t_final to be a multiple of dt_out");
        }
    }
    if (cfg.name.empty() || cfg.name.find('/') != std::string::npos)
        throw ValidationError("run name must be non-empty and contain no '/'");
}

FigurePreset parse_figure_preset(std::string_view s) {
    for (FigurePreset f : {FigurePreset::Fig1, FigurePreset::Fig2, FigurePreset::Fig3, FigurePreset::Fig4, FigurePreset::Fig5})
        if (to_string(f) == s) return f;
    throw ValidationError("unknown preset '" + std::string(s) + "' (fig1..fig5)");
}

std::string_view to_string(FigurePreset f) {
    switch (f) {
        case FigurePreset::Fig1: return "fig1";
        case FigurePreset::Fig2: return "fig2";
        case FigurePreset::Fig3: return "fig3";
        case FigurePreset::Fig4: return "fig4";
        case FigurePreset::Fig5: return "fig5";
    }
    return "?";
}

namespace {

SystemParams symmetric_params(double gamma, double omega, double kappa) {
    SystemParams p;
    p.gamma = gamma;
    p.omega_a = p.omega_b = omega;
    p.kappa_a = p.kappa_b = kappa;
    p.j_xy = 0.7;
    p.j_z = 0.3;
    return p;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

RunConfig preset_run(std::string name, SystemParams p, std::string_view state, RunMethod m, double t_final,
                     std::string note) {
    RunConfig c;
    c.name = std::move(name);
    c.params = p;
    c.initial_state = named_state(state);
    c.method = m;
    c.t_final = t_final;
    c.time_window_note = std::move(note);
    return c;
}

// Windows long enough for each run to reach its steady state.
constexpr double kFig1Window = 15.0;
constexpr double kFig2Window = 40.0;
constexpr double kSlowBathWindow = 200.0;

}  // namespace

SystemParams fig1_params() { return symmetric_params(1.0, 0.5, 1.0); }

std::vector<RunConfig> figure_preset(FigurePreset f) {
    std::vector<RunConfig> runs;
    const std::string tag(to_string(f));
    const std::string chosen = "implementation-chosen time window";
    switch (f) {
        case FigurePreset::Fig1:
            for (const char* s : {"state10", "bell_phi", "bell_psi", "state11"})
                runs.push_back(preset_run(tag + "_" + s + "_exact", fig1_params(), s, RunMethod::Exact, kFig1Window, chosen));
            break;
        case FigurePreset::Fig2:
            runs.push_back(preset_run(tag + "_state10_exact", fig1_params(), "state10", RunMethod::Exact, kFig2Window, chosen));
            break;
        case FigurePreset::Fig3:
            for (double gamma : {0.1, 1.0})
                for (double omega : {0.5, 2.0})
                    for (RunMethod m : {RunMethod::Exact, RunMethod::Approx})
                        runs.push_back(preset_run(tag + "_gamma" + fmt_g(gamma) + "_omega" + fmt_g(omega) + "_" +
                                                      std::string(to_string(m)),
                                                  symmetric_params(gamma, omega, 1.0), "plus_all", m, kSlowBathWindow,
                                                  chosen));
            break;
        case FigurePreset::Fig4:
            for (RunMethod m : {RunMethod::Exact, RunMethod::Approx})
                runs.push_back(preset_run(tag + "_plus_all_" + std::string(to_string(m)), symmetric_params(0.1, 0.5, 2.0),
                                          "plus_all", m, kSlowBathWindow, chosen));
            break;
        case FigurePreset::Fig5:
            for (RunMethod m : {RunMethod::Exact, RunMethod::Approx})
                runs.push_back(preset_run(tag + "_no11_" + std::string(to_string(m)), symmetric_params(0.1, 0.5, 2.0),
                                          "no11", m, kSlowBathWindow, chosen));
            break;
    }
    return runs;
}

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"omega_a", "omega_b", "j_xy", "j_z", "kappa_a",
                                               "kappa_b", "gamma",   "omega", "kappa"};
    return axes;
}

void set_param(SystemParams& p, std::string_view axis, double v) {
    if (axis == "omega_a") p.omega_a = v;
    else if (axis == "omega_b") p.omega_b = v;
    else if (axis == "j_xy") p.j_xy = v;
    else if (axis == "j_z") p.j_z = v;
    else if (axis == "kappa_a") p.kappa_a = v;
    else if (axis == "kappa_b") p.kappa_b = v;
    else if (axis == "gamma") p.gamma = v;
    else if (axis == "omega") p.omega_a = p.omega_b = v;
    else if (axis == "kappa") p.kappa_a = p.kappa_b = v;
    else throw ValidationError("unknown sweep axis '" + std::string(axis) + "'");
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.method) cfg.method = *o.method;
    if (o.t_final) cfg.t_final = *o.t_final;
    if (o.dt_out) cfg.dt_out = *o.dt_out;
    if (o.out) cfg.output_path = *o.out;
    if (o.traj || o.seed || o.threads) {
        EnsembleConfig e = cfg.effective_ensemble();
        if (o.traj) e.n_traj = *o.traj;
        if (o.seed) e.seed = *o.seed;
        if (o.threads) e.threads = *o.threads;
        cfg.ensemble = e;
    }
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!ok.count(k)) throw ParseError("unknown key '" + field(k) + "'");
    }

    bool has(const char* k) const { return j_.contains(k); }
    const json& raw(const char* k) const { return j_.at(k); }
    std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    double number(const char* k) const {
        const json& v = j_.at(k);
        if (!v.is_number()) throw ParseError("field '" + field(k) + "': expected a number");
        return v.get<double>();
    }
    std::string string(const char* k) const {
        const json& v = j_.at(k);
        if (!v.is_string()) throw ParseError("field '" + field(k) + "': expected a string");
        return v.get<std::string>();
    }
    bool boolean(const char* k) const {
        const json& v = j_.at(k);
        if (!v.is_boolean()) throw ParseError("field '" + field(k) + "': expected true/false");
        return v.get<bool>();
    }
    std::uint64_t count(const char* k) const {
        const json& v = j_.at(k);
        if (!v.is_number_unsigned()) throw ParseError("field '" + field(k) + "': expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    Reader child(const char* k) const { return Reader(j_.at(k), field(k)); }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + what);
    }
    const json& j_;
    std::string path_;
};

cd parse_amplitude(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ParseError("field '" + where + "': expected a number or [re, im]");
}

InitialState parse_initial_state(const Reader& r) {
    const json& v = r.raw("initial_state");
    if (v.is_string()) return named_state(v.get<std::string>());
    Reader s(v, r.field("initial_state"));
    s.allow({"amplitudes", "unnormalized"});
    if (!s.has("amplitudes")) throw ValidationError("initial_state: empty state (no amplitudes)");
    const json& a = s.raw("amplitudes");
    if (!a.is_array()) throw ParseError("field '" + s.field("amplitudes") + "': expected an array");
    if (a.empty()) throw ValidationError("initial_state: empty state (no amplitudes)");
    if (a.size() != 4) throw ParseError("field '" + s.field("amplitudes") + "': expected 4 amplitudes");
    InitialState st;
    st.label = "custom";
    for (std::size_t k = 0; k < 4; ++k)
        st.amplitudes.c[k] = parse_amplitude(a[k], s.field("amplitudes") + "[" + std::to_string(k) + "]");
    for (const auto& x : st.amplitudes.c)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw ValidationError("initial_state: amplitudes must be finite");
    if (!(st.amplitudes.norm_squared() > 0.0)) throw ValidationError("initial_state: empty state (zero norm)");
    const bool keep = s.has("unnormalized") && s.boolean("unnormalized");
    if (!keep) st.amplitudes = st.amplitudes.normalized();
    return st;
}

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ParsedConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("config syntax error at " + line_col(text, e.byte) + ": " + e.what());
    } catch (const json::out_of_range& e) {
        throw ValidationError(std::string("config holds a non-finite number: ") + e.what());
    }

    ParsedConfig out;
    RunConfig& c = out.base;
    Reader r(j, "");
    r.allow({"name", "params", "initial_state", "method", "t_final", "dt_out", "integrator", "ensemble", "output_path",
             "sweep"});

    if (r.has("name")) c.name = r.string("name");
    if (r.has("params")) {
        Reader p = r.child("params");
        p.allow({"omega_a", "omega_b", "j_xy", "j_z", "kappa_a", "kappa_b", "gamma"});
        if (p.has("omega_a")) c.params.omega_a = p.number("omega_a");
        if (p.has("omega_b")) c.params.omega_b = p.number("omega_b");
        if (p.has("j_xy")) c.params.j_xy = p.number("j_xy");
        if (p.has("j_z")) c.params.j_z = p.number("j_z");
        if (p.has("kappa_a")) c.params.kappa_a = p.number("kappa_a");
        if (p.has("kappa_b")) c.params.kappa_b = p.number("kappa_b");
        if (p.has("gamma")) c.params.gamma = p.number("gamma");
    }
    if (r.has("initial_state")) c.initial_state = parse_initial_state(r);
    if (r.has("method")) c.method = parse_run_method(r.string("method"));
    if (r.has("t_final")) c.t_final = r.number("t_final");
    if (r.has("dt_out")) c.dt_out = r.number("dt_out");
    if (r.has("integrator")) {
        Reader g = r.child("integrator");
        g.allow({"abs_tol", "rel_tol", "max_step", "scheme"});
        if (g.has("abs_tol")) c.integrator.abs_tol = g.number("abs_tol");
        if (g.has("rel_tol")) c.integrator.rel_tol = g.number("rel_tol");
        if (g.has("max_step")) c.integrator.max_step = g.number("max_step");
        if (g.has("scheme")) {
            const std::string s = g.string("scheme");
            if (s == "rk4") c.integrator.scheme = IntegratorConfig::Scheme::RungeKutta4;
            else if (s == "dopri5") c.integrator.scheme = IntegratorConfig::Scheme::DormandPrince45;
            else throw ParseError("field 'integrator.scheme': expected \"rk4\" or \"dopri5\"");
        }
    }
    if (r.has("ensemble")) {
        Reader e = r.child("ensemble");
        e.allow({"n_traj", "seed", "dt", "threads"});
        EnsembleConfig ec;
        if (e.has("n_traj")) ec.n_traj = e.count("n_traj");
        if (e.has("seed")) ec.seed = e.count("seed");
        if (e.has("dt")) ec.dt = e.number("dt");
        if (e.has("threads")) ec.threads = static_cast<unsigned>(e.count("threads"));
        c.ensemble = ec;
    }
    if (r.has("output_path")) c.output_path = r.string("output_path");
    if (r.has("sweep")) {
        Reader s = r.child("sweep");
        s.allow({"axis", "values"});
        SweepSpec sw;
        sw.axis = s.string("axis");
        const json& v = s.raw("values");
        if (!v.is_array()) throw ParseError("field 'sweep.values': expected an array of numbers");
        for (const auto& x : v) {
            if (!x.is_number()) throw ParseError("field 'sweep.values': expected an array of numbers");
            sw.values.push_back(x.get<double>());
        }
        SystemParams probe;
        set_param(probe, sw.axis, 1.0);
        out.sweep = sw;
    }
    validate(c);
    return out;
}

ParsedConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot read config file '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json to_json(const RunConfig& c) {
    json j;
    j["name"] = c.name;
    j["params"] = {{"omega_a", c.params.omega_a}, {"omega_b", c.params.omega_b}, {"j_xy", c.params.j_xy},
                   {"j_z", c.params.j_z},         {"kappa_a", c.params.kappa_a}, {"kappa_b", c.params.kappa_b},
                   {"gamma", c.params.gamma}};
    json amps = json::array();
    for (const auto& a : c.initial_state.amplitudes.c) amps.push_back({a.real(), a.imag()});
    j["initial_state"] = {{"label", c.initial_state.label}, {"amplitudes", amps}};
    j["method"] = std::string(to_string(c.method));
    j["t_final"] = c.t_final;
    j["dt_out"] = c.effective_dt_out();
    j["integrator"] = {{"abs_tol", c.integrator.abs_tol},
                       {"rel_tol", c.integrator.rel_tol},
                       {"max_step", c.integrator.max_step > 0.0 ? c.integrator.max_step : 0.1 / c.params.gamma},
                       {"scheme", std::string(to_string(c.integrator.scheme))}};
    if (c.method == RunMethod::Qsd) {
        const EnsembleConfig e = c.effective_ensemble();
        j["ensemble"] = {{"n_traj", e.n_traj}, {"seed", e.seed}, {"dt", e.dt}};
    }
    j["output_path"] = c.output_path.string();
    if (!c.time_window_note.empty()) j["time_window_note"] = c.time_window_note;
    return j;
}

}  // namespace qubitbath
