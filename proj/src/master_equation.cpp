#include "qubitbath/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qubitbath/hermitian_eigen.hpp"

namespace qubitbath {

std::string_view to_string(MasterEquationMethod m) {
    switch (m) {
        case MasterEquationMethod::Exact: return "exact";
        case MasterEquationMethod::ApproxNoFirstOrderNoise: return "approx";
        case MasterEquationMethod::MarkovLindblad: return "lindblad";
    }
    return "?";
}

std::string_view to_string(IntegratorConfig::Scheme s) {
    return s == IntegratorConfig::Scheme::RungeKutta4 ? "rk4" : "dopri5";
}

StateVector<AugmentedState::size> AugmentedState::pack() const {
    StateVector<size> v;
    std::copy(rho.rho.data().begin(), rho.rho.data().end(), v.begin());
    const auto c = coeffs.pack();
    std::copy(c.begin(), c.end(), v.begin() + 16);
    return v;
}

AugmentedState AugmentedState::unpack(const StateVector<size>& v, double t) {
    AugmentedState s;
    std::copy(v.begin(), v.begin() + 16, s.rho.rho.data().begin());
    s.coeffs = CoefficientState::unpack(std::span<const cd, CoefficientState::size>(v.data() + 16, CoefficientState::size));
    s.t = t;
    return s;
}

namespace {

struct Operators {
    ComplexMatrix4 sm_a, sm_b, sz_a_sm_b, sm_a_sz_b;  // the four O0 operator shapes
    ComplexMatrix4 sp_a_sp_b;                          // |11><00|
    ComplexMatrix4 h, l, l_dag;

    explicit Operators(const SystemParams& p) {
        sm_a = pauli_embedded(Qubit::A, PauliKind::Minus);
        sm_b = pauli_embedded(Qubit::B, PauliKind::Minus);
        const auto sz_a = pauli_embedded(Qubit::A, PauliKind::Z);
        const auto sz_b = pauli_embedded(Qubit::B, PauliKind::Z);
        sz_a_sm_b = sz_a * sm_b;
        sm_a_sz_b = sm_a * sz_b;
        sp_a_sp_b = pauli_embedded(Qubit::A, PauliKind::Plus) * pauli_embedded(Qubit::B, PauliKind::Plus);
        h = build_hamiltonian(p);
        l = build_lowering(p);
        l_dag = l.adjoint();
    }
};

ComplexMatrix4 m_pt_obar_dag(const DensityMatrix& rho, const CoefficientState& c, const Operators& ops) {
    const auto& fb = c.fbar;
    const ComplexMatrix4 obar0_dag = std::conj(fb[0]) * ops.sm_a.adjoint() + std::conj(fb[1]) * ops.sm_b.adjoint() +
                                     std::conj(fb[2]) * ops.sz_a_sm_b.adjoint() +
                                     std::conj(fb[3]) * ops.sm_a_sz_b.adjoint();
    ComplexMatrix4 m = rho.rho * obar0_dag;
    const auto& F = c.big_f;
    if (F[0] != cd{} || F[1] != cd{} || F[2] != cd{} || F[3] != cd{}) {
        const ComplexMatrix4 first_order = F[0] * ops.sm_a + F[1] * ops.sm_b + F[2] * ops.sz_a_sm_b + F[3] * ops.sm_a_sz_b;
        m -= 2.0 * I * (first_order * rho.rho * ops.sp_a_sp_b);
    }
    return m;
}

ComplexMatrix4 rho_rhs(const DensityMatrix& rho, const CoefficientState& c, const Operators& ops) {
    const ComplexMatrix4 m = m_pt_obar_dag(rho, c, ops);
    ComplexMatrix4 d = -I * commutator(ops.h, rho.rho);
    d += commutator(ops.l, m);
    d += commutator(m.adjoint(), ops.l_dag);
    return d;
}

AugmentedDerivative master_rhs(const AugmentedState& s, const SystemParams& p, MasterEquationMethod method,
                               const Operators& ops, const CoefficientState& markov) {
    AugmentedDerivative d;
    switch (method) {
        case MasterEquationMethod::Exact:
            d.drho = rho_rhs(s.rho, s.coeffs, ops);
            d.dcoeffs = coefficient_rhs_exact(s.coeffs, p);
            break;
        case MasterEquationMethod::ApproxNoFirstOrderNoise:
            d.drho = rho_rhs(s.rho, s.coeffs, ops);
            d.dcoeffs = coefficient_rhs_approx(s.coeffs, p);
            break;
        case MasterEquationMethod::MarkovLindblad:
            d.drho = rho_rhs(s.rho, markov, ops);
            break;
    }
    return d;
}

}  // namespace

ComplexMatrix4 m_pt_obar_dag(const DensityMatrix& rho, const CoefficientState& coeffs, const SystemParams& p) {
    return m_pt_obar_dag(rho, coeffs, Operators(p));
}

AugmentedDerivative master_rhs(const AugmentedState& state, const SystemParams& p, MasterEquationMethod method) {
    return master_rhs(state, p, method, Operators(p), markov_asymptote(p));
}

std::vector<double> uniform_grid(double t_final, double dt) {
    if (!(t_final >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("uniform_grid needs t_final >= 0 and dt > 0");
    const auto n = static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-9)));
    std::vector<double> g;
    g.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) g.push_back(dt * static_cast<double>(k));
    g.push_back(t_final);
    return g;
}

EvolutionResult evolve(const DensityMatrix& rho0, const SystemParams& p, MasterEquationMethod method,
                       double t_final, std::span<const double> out_grid, const IntegratorConfig& cfg) {
    validate(p);
    if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");
    for (double t : out_grid)
        if (t < 0.0 || t > t_final) throw std::invalid_argument("output grid must lie in [0, t_final]");

    const Operators ops(p);
    const CoefficientState markov = markov_asymptote(p);
    constexpr std::size_t n = AugmentedState::size;

    EvolutionResult res;
    res.samples.reserve(out_grid.size());
    res.min_eigenvalue = std::numeric_limits<double>::infinity();

    AugmentedState init;
    init.rho = rho0;
    if (method == MasterEquationMethod::MarkovLindblad) init.coeffs = markov;

    auto rhs = [&](double t, const StateVector<n>& y) {
        const AugmentedState s = AugmentedState::unpack(y, t);
        const AugmentedDerivative d = master_rhs(s, p, method, ops, markov);
        res.max_rhs_trace = std::max(res.max_rhs_trace, std::abs(d.drho.trace()));
        res.max_rhs_herm_defect = std::max(res.max_rhs_herm_defect, hermiticity_defect(d.drho));
        AugmentedState out;
        out.rho.rho = d.drho;
        out.coeffs = d.dcoeffs;
        return out.pack();
    };
    auto project = [&](StateVector<n>& y) {
        // rho <- (rho + rho^dagger) / 2
        for (std::size_t i = 0; i < 4; ++i) {
            y[5 * i] = y[5 * i].real();
            for (std::size_t j = i + 1; j < 4; ++j) {
                const cd a = y[4 * i + j];
                const cd b = std::conj(y[4 * j + i]);
                res.max_step_herm_drift = std::max(res.max_step_herm_drift, std::abs(a - b));
                const cd mean = 0.5 * (a + b);
                y[4 * i + j] = mean;
                y[4 * j + i] = std::conj(mean);
            }
        }
    };
    auto emit = [&](double t, const StateVector<n>& y) {
        const AugmentedState s = AugmentedState::unpack(y, t);
        const double min_eig = hermitian_eigenvalues(s.rho.rho).front();
        res.min_eigenvalue = std::min(res.min_eigenvalue, min_eig);
        if (min_eig < -1e-6) ++res.positivity_warnings;
        res.samples.push_back({t, s.rho, s.coeffs});
    };

    StateVector<n> y0 = init.pack();
    project(y0);
    res.max_step_herm_drift = 0.0;
    const double max_step = cfg.max_step > 0.0 ? cfg.max_step : 0.1 / p.gamma;
    if (cfg.scheme == IntegratorConfig::Scheme::RungeKutta4) {
        res.stats = integrate_rk4<n>(rhs, y0, 0.0, out_grid, max_step, emit, project);
    } else {
        AdaptiveOptions opt;
        opt.abs_tol = cfg.abs_tol;
        opt.rel_tol = cfg.rel_tol;
        opt.max_step = max_step;
        res.stats = integrate_dopri5<n>(rhs, y0, 0.0, out_grid, opt, emit, project);
    }
    if (res.samples.empty()) res.min_eigenvalue = 0.0;
    return res;
}

double rho11_closed_form_check(const EvolutionResult& run, const SystemParams& p, MasterEquationMethod method,
                               const IntegratorConfig& cfg) {
    if (!p.symmetric()) throw std::invalid_argument("rho11 closed form needs omega_a == omega_b and kappa_a == kappa_b");
    if (run.samples.empty()) return 0.0;
    const double kappa = p.kappa_a;
    const double rho11_0 = run.samples.front().rho.rho(0, 0).real();

    // Co-integrate the coefficients with Q(t) = int_0^t Re(fbar1 + fbar3).
    constexpr std::size_t n = CoefficientState::size + 1;
    const CoefficientState markov = markov_asymptote(p);
    auto rhs = [&](double, const StateVector<n>& y) {
        const auto c = CoefficientState::unpack(std::span<const cd, CoefficientState::size>(y.data(), CoefficientState::size));
        CoefficientState d;
        CoefficientState used = c;
        switch (method) {
            case MasterEquationMethod::Exact: d = coefficient_rhs_exact(c, p); break;
            case MasterEquationMethod::ApproxNoFirstOrderNoise: d = coefficient_rhs_approx(c, p); break;
            case MasterEquationMethod::MarkovLindblad: used = markov; break;
        }
        StateVector<n> out{};
        const auto dp = d.pack();
        std::copy(dp.begin(), dp.end(), out.begin());
        out[n - 1] = (used.fbar[0] + used.fbar[2]).real();
        return out;
    };
    std::vector<double> times;
    for (const auto& s : run.samples) times.push_back(s.t);
    const double t0 = times.front();
    double worst = 0.0;
    std::size_t idx = 0;
    auto emit = [&](double, const StateVector<n>& y) {
        const double q = y[n - 1].real();
        const double predicted = rho11_0 * std::exp(-4.0 * kappa * q);
        worst = std::max(worst, std::abs(run.samples[idx].rho.rho(0, 0).real() - predicted));
        ++idx;
    };
    StateVector<n> y0{};
    if (t0 != 0.0) throw std::invalid_argument("run must start at t = 0");
    AdaptiveOptions opt;
    opt.abs_tol = std::min(cfg.abs_tol, 1e-10);
    opt.rel_tol = std::min(cfg.rel_tol, 1e-10);
    opt.max_step = cfg.max_step > 0.0 ? cfg.max_step : 0.1 / p.gamma;
    integrate_dopri5<n>(rhs, y0, 0.0, times, opt, emit, [](StateVector<n>&) {});
    return worst;
}

}  // namespace qubitbath
