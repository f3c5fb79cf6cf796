// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qubitbath/config.hpp"
#include "qubitbath/master_equation.hpp"
#include "qubitbath/observables.hpp"
#include "qubitbath/pseudomode.hpp"
#include "qubitbath/runner.hpp"
#include "qubitbath/stochastic.hpp"
#include "qubitbath/two_time_oracle.hpp"

using namespace qubitbath;
namespace fs = std::filesystem;

namespace {

// Steady state of the fig2 run: |10> = (|psi+> + |psi->)/sqrt2 and psi- = (|10> - |01>)/sqrt2
// is dark for kappa_a = kappa_b, so the state ends in 0.5 |psi-><psi-| + 0.5 |00><00|.
constexpr double kFig2Rho22 = 0.25;
constexpr double kFig2Rho23 = -0.25;
constexpr double kFig2Rho44 = 0.5;
constexpr double kFig2Concurrence = 0.5;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Run {
    std::vector<double> t;
    EvolutionResult r;
};

Run exact_run(const RunConfig& c, MasterEquationMethod m = MasterEquationMethod::Exact) {
    Run out;
    out.t = uniform_grid(c.t_final, c.effective_dt_out());
    out.r = evolve(density_from_pure(c.initial_state.amplitudes), c.params, m, c.t_final, out.t, c.integrator);
    return out;
}

double max_distance(const EvolutionResult& a, const EvolutionResult& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        m = std::max(m, trace_distance(a.samples[k].rho, b.samples[k].rho));
    return m;
}

RunConfig with(RunConfig c, double gamma, double omega, double kappa, const char* state) {
    c.params.gamma = gamma;
    c.params.omega_a = c.params.omega_b = omega;
    c.params.kappa_a = c.params.kappa_b = kappa;
    c.initial_state = named_state(state);
    return c;
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion1() {
    bool pass = true;
    std::string detail;
    for (const RunConfig& c : figure_preset(FigurePreset::Fig1)) {
        const Run run = exact_run(c);
        double min_p = 1.0;
        for (const auto& s : run.r.samples) min_p = std::min(min_p, purity(s.rho));
        const double final_p = purity(run.r.samples.back().rho);
        const bool ok = c.initial_state.label == "state10" ? (final_p >= 0.45 && final_p <= 0.55)
                                                           : (final_p >= 0.99 && min_p < 0.999);
        pass = pass && ok;
        detail += fmt("%s final %.4f min %.4f; ", c.initial_state.label.c_str(), final_p, min_p);
    }
    report(1, pass, detail);
}

void criterion2() {
    const RunConfig c = figure_preset(FigurePreset::Fig2).front();
    const Run run = exact_run(c);
    const DensityMatrix& last = run.r.samples.back().rho;
    const ComplexMatrix4& rho = last.rho;
    double outside = 0.0;  // every element outside the {2,3} block except the ground population rho44
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool block = (i == 1 || i == 2) && (j == 1 || j == 2);
            if (!block && !(i == 3 && j == 3)) outside = std::max(outside, std::abs(rho(i, j)));
        }
    const double diff = std::abs(rho(1, 1) - rho(2, 2));
    const double c23 = std::abs(rho(1, 2));
    const double conc = concurrence(last);
    const double ref_dev = std::max({std::abs(rho(1, 1).real() - kFig2Rho22), std::abs(rho(1, 2) - kFig2Rho23),
                                     std::abs(rho(3, 3).real() - kFig2Rho44), std::abs(conc - kFig2Concurrence)});
    const bool pass = diff <= 1e-3 && c23 >= 0.05 && outside <= 1e-3 && conc > 0.05 && ref_dev <= 1e-3;
    report(2, pass,
           fmt("t=%.0f |rho22-rho33| %.2e |rho23| %.4f max outside block %.2e (rho44 %.4f, ground population) "
               "concurrence %.4f; deviation from steady reference %.2e",
               c.t_final, diff, c23, outside, rho(3, 3).real(), conc, ref_dev));
}

void criterion3() {
    const RunConfig base = figure_preset(FigurePreset::Fig3).front();
    bool pass = true;
    std::string detail;
    for (double omega : {0.5, 2.0}) {
        const RunConfig c = with(base, 0.1, omega, 1.0, "plus_all");
        const double d = max_distance(exact_run(c).r, exact_run(c, MasterEquationMethod::ApproxNoFirstOrderNoise).r);
        pass = pass && d <= 0.02;
        detail += fmt("plus_all omega=%.1f max TD %.4f (<= 0.02); ", omega, d);
    }
    const RunConfig n = figure_preset(FigurePreset::Fig5).front();
    const double d = max_distance(exact_run(n).r, exact_run(n, MasterEquationMethod::ApproxNoFirstOrderNoise).r);
    pass = pass && d <= 1e-4;
    detail += fmt("no11 max TD %.2e (<= 1e-4)", d);
    report(3, pass, detail);
}

void criterion4() {
    const RunConfig c = figure_preset(FigurePreset::Fig4).front();
    const Run e = exact_run(c);
    const Run a = exact_run(c, MasterEquationMethod::ApproxNoFirstOrderNoise);
    const double final_d = trace_distance(e.r.samples.back().rho, a.r.samples.back().rho);
    double peak = 0.0, t_peak = 0.0;
    for (std::size_t k = 0; k + 1 < e.r.samples.size(); ++k) {
        const double d = trace_distance(e.r.samples[k].rho, a.r.samples[k].rho);
        if (d > peak) peak = d, t_peak = e.t[k];
    }
    const bool pass = peak > 5.0 * final_d && final_d <= 1e-2;
    report(4, pass, fmt("peak TD %.4f at t=%.1f, final TD %.2e at t=%.0f", peak, t_peak, final_d, c.t_final));
}

void criterion5() {
    const RunConfig c = figure_preset(FigurePreset::Fig1).front();  // state10
    const Run exact = exact_run(c);

    auto qsd_error = [&](std::size_t n_traj, std::uint64_t seed) {
        RunConfig q = c;
        q.method = RunMethod::Qsd;
        q.ensemble = EnsembleConfig{};
        q.ensemble->n_traj = n_traj;
        q.ensemble->seed = seed;
        const RunSeries s = simulate(q);
        double m = 0.0;
        for (std::size_t k = 0; k < s.rho.size(); ++k) m = std::max(m, trace_distance(s.rho[k], exact.r.samples[k].rho));
        return m;
    };
    const double qsd = qsd_error(2000, EnsembleConfig{}.seed);
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed : {101, 102, 103, 104}) {
        small += qsd_error(500, seed);
        large += qsd_error(2000, seed);
    }
    const double ratio = large / small;
    const bool a = qsd <= 0.05 && ratio >= 0.3 && ratio <= 0.8;

    const OracleConvergence oc = two_time_convergence(c.params, 2.0, 400);
    const bool b = oc.coarse.fbar_deviation <= 1e-3 && oc.coarse.max_deviation() <= 1e-3 && oc.ratio <= 0.5;

    const auto pm = pseudomode_reference(c.params, density_from_pure(c.initial_state.amplitudes), exact.t);
    double pd = 0.0;
    for (std::size_t k = 0; k < pm.size(); ++k) pd = std::max(pd, trace_distance(pm[k], exact.r.samples[k].rho));
    const bool cc = pd <= 1e-3;

    report(5, a && b && cc,
           fmt("(a) qsd n=2000 max TD %.4f, error ratio n 500->2000 %.3f (1/sqrt ideal 0.5); "
               "(b) two-time oracle dev %.2e at n_s=400, %.2e at 800, ratio %.3f; (c) pseudomode max TD %.2e",
               qsd, ratio, oc.coarse.max_deviation(), oc.fine.max_deviation(), oc.ratio, pd));
}

void criterion6() {
    std::vector<RunConfig> runs = figure_preset(FigurePreset::Fig1);
    for (auto f : {FigurePreset::Fig3, FigurePreset::Fig4, FigurePreset::Fig5})
        for (const auto& r : figure_preset(f))
            if (r.method == RunMethod::Exact) runs.push_back(r);

    double rhs_trace = 0.0, herm = 0.0, min_eig = 1.0, im_f5 = 0.0, fbar_sym = 0.0, rho_sym = 0.0, rho11 = 0.0;
    for (const auto& c : runs) {
        const Run run = exact_run(c);
        rhs_trace = std::max(rhs_trace, run.r.max_rhs_trace);
        const auto& a = c.initial_state.amplitudes.c;
        const bool c2_eq_c3 = a[1] == a[2];
        for (const auto& s : run.r.samples) {
            const SanityReport q = sanity_monitor(s.rho);
            herm = std::max(herm, q.herm_defect);
            min_eig = std::min(min_eig, q.min_eig);
            im_f5 = std::max(im_f5, std::abs(s.coeffs.big_f[4].imag()));
            fbar_sym = std::max({fbar_sym, std::abs(s.coeffs.fbar[0] - s.coeffs.fbar[1]),
                                 std::abs(s.coeffs.fbar[2] - s.coeffs.fbar[3])});
            if (c2_eq_c3)
                for (int j = 0; j < 4; ++j) rho_sym = std::max(rho_sym, std::abs(s.rho.rho(j, 1) - s.rho.rho(j, 2)));
        }
        rho11 = std::max(rho11, rho11_closed_form_check(run.r, c.params, MasterEquationMethod::Exact, c.integrator));
    }
    const double sym_tol = 10.0 * IntegratorConfig{}.abs_tol;
    const bool pass = rhs_trace <= 1e-12 && herm <= 1e-10 && min_eig >= -1e-6 && im_f5 <= 1e-9 &&
                      fbar_sym <= sym_tol && rho_sym <= sym_tol && rho11 <= 1e-6;
    report(6, pass,
           fmt("%zu runs: rhs trace %.1e, herm defect %.1e, min eig %.1e, |Im F5| %.1e, fbar asymmetry %.1e, "
               "rho_j2-rho_j3 %.1e, rho11 closed form %.1e",
               runs.size(), rhs_trace, herm, min_eig, im_f5, fbar_sym, rho_sym, rho11));
}

void criterion7() {
    bool pass = true;
    std::string detail;
    for (RunConfig c : figure_preset(FigurePreset::Fig1)) {
        c.params.gamma = 50.0;
        const double d = max_distance(exact_run(c).r, exact_run(c, MasterEquationMethod::MarkovLindblad).r);
        pass = pass && d <= 0.02;
        detail += fmt("%s %.4f; ", c.initial_state.label.c_str(), d);
    }
    report(7, pass, "gamma=50 max TD exact vs Lindblad (<= 0.02): " + detail);
}

void criterion8(const fs::path& work) {
    const std::string bin = SIMULATE_BIN;
    auto invoke = [&](const std::string& args, const fs::path& out) {
        const std::string cmd = bin + " " + args + " --out " + out.string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool pass = true;
    int compared = 0;
    struct Case {
        std::string args_a, args_b;
    };
    std::vector<Case> cases;
    for (const char* p : {"fig1", "fig2", "fig3", "fig4", "fig5"})
        cases.push_back({std::string("--preset ") + p, std::string("--preset ") + p});
    cases.push_back({"--preset fig2 --method qsd --traj 2000 --seed 7 --t-final 15 --threads 1",
                     "--preset fig2 --method qsd --traj 2000 --seed 7 --t-final 15 --threads 4"});
    cases.push_back({"--preset fig1 --method pseudomode", "--preset fig1 --method pseudomode"});
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const fs::path a = work / ("a" + std::to_string(k)), b = work / ("b" + std::to_string(k));
        fs::remove_all(a);
        fs::remove_all(b);
        if (!invoke(cases[k].args_a, a) || !invoke(cases[k].args_b, b)) {
            pass = false;
            continue;
        }
        for (const auto& e : fs::directory_iterator(a)) {
            if (e.path().extension() != ".csv") continue;
            ++compared;
            pass = pass && fs::exists(b / e.path().filename()) && slurp(e.path()) == slurp(b / e.path().filename());
        }
    }
    report(8, pass && compared > 0, fmt("%d CSV pairs from repeated CLI invocations compared byte for byte", compared));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path work = fs::temp_directory_path() / "qubitbath_acceptance";
    fs::create_directories(work);

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8(work);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 8 criteria failed (%.1f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
