#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qubitbath/errors.hpp"
#include "qubitbath/master_equation.hpp"
#include "qubitbath/observables.hpp"

using namespace qubitbath;

namespace {

SystemParams fig1() {
    SystemParams p;
    p.omega_a = p.omega_b = 0.5;
    p.j_xy = 0.7;
    p.j_z = 0.3;
    p.kappa_a = p.kappa_b = 1.0;
    p.gamma = 1.0;
    return p;
}

DensityMatrix pure(std::array<cd, 4> c) {
    PureState4 s;
    s.c = c;
    return density_from_pure(s.normalized());
}

const double r2 = 1.0 / std::sqrt(2.0);

DensityMatrix random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    ComplexMatrix4 acc;
    for (int r = 0; r < 3; ++r) {
        PureState4 s;
        for (auto& c : s.c) c = {n(rng), n(rng)};
        acc += density_from_pure(s).rho;
    }
    return {acc * cd{1.0 / acc.trace().real()}};
}

CoefficientState random_coeffs(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    auto v = CoefficientState{}.pack();
    for (auto& x : v) x = {n(rng), n(rng)};
    return CoefficientState::unpack(v);
}

EvolutionResult run(const DensityMatrix& rho0, const SystemParams& p, MasterEquationMethod m, double t_final,
                    double dt, const IntegratorConfig& cfg = {}) {
    const auto grid = uniform_grid(t_final, dt);
    return evolve(rho0, p, m, t_final, grid, cfg);
}

double max_distance(const EvolutionResult& a, const EvolutionResult& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.samples.size(); ++k)
        m = std::max(m, trace_distance(a.samples[k].rho, b.samples[k].rho));
    return m;
}

ComplexMatrix4 op(Qubit q, PauliKind k) { return pauli_embedded(q, k); }

}  // namespace

TEST_CASE("m_pt_obar_dag examples") {
    std::mt19937_64 rng(51);
    const SystemParams p = fig1();
    const DensityMatrix rho = random_state(rng);
    CHECK(max_abs_diff(m_pt_obar_dag(rho, CoefficientState{}, p), ComplexMatrix4::zero()) == 0.0);

    // rho |11> = 0: only the fbar term survives
    PureState4 s;
    s.c = {0.0, cd{0.3, 0.1}, -0.5, 0.8};
    const DensityMatrix no11 = density_from_pure(s.normalized());
    CoefficientState c = random_coeffs(rng);
    CoefficientState fbar_only = c;
    for (auto& f : fbar_only.big_f) f = 0.0;
    CHECK(max_abs_diff(m_pt_obar_dag(no11, c, p), m_pt_obar_dag(no11, fbar_only, p)) <= 1e-15);

    // rho = |11><11| with F1 = 1: -2i |01><00|
    CoefficientState f1;
    f1.big_f[0] = 1.0;
    ComplexMatrix4 expect;
    expect(2, 3) = cd{0.0, -2.0};
    CHECK(max_abs_diff(m_pt_obar_dag(pure({1.0, 0.0, 0.0, 0.0}), f1, p), expect) <= 1e-15);
}

TEST_CASE("m_pt_obar_dag against the generic operator products") {
    std::mt19937_64 rng(53);
    const SystemParams p = fig1();
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_state(rng);
        const CoefficientState c = random_coeffs(rng);
        const auto spa = op(Qubit::A, PauliKind::Plus), spb = op(Qubit::B, PauliKind::Plus);
        const auto sma = op(Qubit::A, PauliKind::Minus), smb = op(Qubit::B, PauliKind::Minus);
        const auto sza = op(Qubit::A, PauliKind::Z), szb = op(Qubit::B, PauliKind::Z);
        const ComplexMatrix4 first = rho.rho * (spa * std::conj(c.fbar[0]) + spb * std::conj(c.fbar[1]) +
                                                sza * spb * std::conj(c.fbar[2]) + spa * szb * std::conj(c.fbar[3]));
        const ComplexMatrix4 second = (sma * c.big_f[0] + smb * c.big_f[1] + sza * smb * c.big_f[2] +
                                       sma * szb * c.big_f[3]) *
                                      rho.rho * (spa * spb) * cd{0.0, -2.0};
        CHECK(max_abs_diff(m_pt_obar_dag(rho, c, p), first + second) <= 1e-13);
    }
}

TEST_CASE("rhs preserves trace and hermiticity") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 200; ++trial) {
        SystemParams p = fig1();
        p.omega_b = 0.2 + trial * 0.01;
        p.kappa_b = 0.5 + trial * 0.01;
        AugmentedState s{random_state(rng), random_coeffs(rng), 0.0};
        for (auto m : {MasterEquationMethod::Exact, MasterEquationMethod::ApproxNoFirstOrderNoise,
                       MasterEquationMethod::MarkovLindblad}) {
            const AugmentedDerivative d = master_rhs(s, p, m);
            CHECK(std::abs(d.drho.trace()) <= 1e-12);
            CHECK(hermiticity_defect(d.drho) <= 1e-12);
        }
    }
}

TEST_CASE("closed-system and ground-state limits") {
    std::mt19937_64 rng(59);
    SystemParams p = fig1();
    p.kappa_a = p.kappa_b = 0.0;
    const AugmentedState s{random_state(rng), random_coeffs(rng), 0.0};
    const ComplexMatrix4 h = build_hamiltonian(p);
    const ComplexMatrix4 unitary = commutator(h, s.rho.rho) * cd{0.0, -1.0};
    for (auto m : {MasterEquationMethod::Exact, MasterEquationMethod::MarkovLindblad})
        CHECK(max_abs_diff(master_rhs(s, p, m).drho, unitary) <= 1e-14);

    const AugmentedState ground{pure({0.0, 0.0, 0.0, 1.0}), random_coeffs(rng), 0.0};
    for (auto m : {MasterEquationMethod::Exact, MasterEquationMethod::ApproxNoFirstOrderNoise,
                   MasterEquationMethod::MarkovLindblad})
        CHECK(max_abs_diff(master_rhs(ground, fig1(), m).drho, ComplexMatrix4::zero()) <= 1e-15);
}

TEST_CASE("Markov rhs is the Lindblad form") {
    std::mt19937_64 rng(61);
    SystemParams p = fig1();
    p.kappa_b = 0.6;
    const AugmentedState s{random_state(rng), CoefficientState{}, 0.0};
    const ComplexMatrix4 h = build_hamiltonian(p), l = build_lowering(p);
    const ComplexMatrix4& rho = s.rho.rho;
    const ComplexMatrix4 expect = commutator(h, rho) * cd{0.0, -1.0} +
                                  (commutator(l, rho * l.adjoint()) + commutator(l * rho, l.adjoint())) * cd{0.5};
    const AugmentedDerivative d = master_rhs(s, p, MasterEquationMethod::MarkovLindblad);
    CHECK(max_abs_diff(d.drho, expect) <= 1e-14);
    for (const auto& x : d.dcoeffs.pack()) CHECK(x == cd{});
}

TEST_CASE("evolve with t_final = 0") {
    const DensityMatrix rho0 = pure({0.5, 0.5, 0.5, 0.5});
    const std::vector<double> grid{0.0};
    const EvolutionResult r = evolve(rho0, fig1(), MasterEquationMethod::Exact, 0.0, grid);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].rho.rho == rho0.rho);
}

TEST_CASE("evolve rejects bad grids") {
    const std::vector<double> grid{0.0, 2.0};
    CHECK_THROWS_AS(evolve(pure({1.0, 0.0, 0.0, 0.0}), fig1(), MasterEquationMethod::Exact, 1.0, grid),
                    std::invalid_argument);
    SystemParams bad = fig1();
    bad.gamma = -1.0;
    CHECK_THROWS_AS(run(pure({1.0, 0.0, 0.0, 0.0}), bad, MasterEquationMethod::Exact, 1.0, 0.1), ValidationError);
}

TEST_CASE("unitary evolution conserves purity") {
    SystemParams p = fig1();
    p.kappa_a = p.kappa_b = 0.0;
    const EvolutionResult r = run(pure({0.5, cd{0.0, 0.5}, 0.5, -0.5}), p, MasterEquationMethod::Exact, 10.0, 0.1);
    for (const auto& s : r.samples) CHECK(std::abs(purity(s.rho) - 1.0) <= 1e-6);
}

TEST_CASE("Bell state loses and regains purity") {
    const EvolutionResult r = run(pure({r2, 0.0, 0.0, r2}), fig1(), MasterEquationMethod::Exact, 15.0, 0.0375);
    double min_purity = 1.0;
    for (const auto& s : r.samples) min_purity = std::min(min_purity, purity(s.rho));
    CHECK(min_purity < 0.999);
    CHECK(purity(r.samples.back().rho) >= 0.99);
}

TEST_CASE("state10 steady state") {
    const EvolutionResult r = run(pure({0.0, 1.0, 0.0, 0.0}), fig1(), MasterEquationMethod::Exact, 40.0, 0.1);
    const ComplexMatrix4& rho = r.samples.back().rho.rho;
    MESSAGE("rho22 " << rho(1, 1).real() << " rho33 " << rho(2, 2).real() << " rho23 " << rho(1, 2)
                     << " purity " << purity(r.samples.back().rho) << " C " << concurrence(r.samples.back().rho));
    CHECK(std::abs(rho(1, 1) - rho(2, 2)) <= 1e-3);
    CHECK(std::abs(rho(1, 2)) >= 0.05);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool block = (i == 1 || i == 2) && (j == 1 || j == 2);
            if (!block && !(i == 3 && j == 3)) CHECK(std::abs(rho(i, j)) <= 1e-3);
        }
    CHECK(purity(r.samples.back().rho) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("rho11 closed form") {
    const SystemParams p = fig1();
    IntegratorConfig cfg;
    const EvolutionResult r11 = run(pure({1.0, 0.0, 0.0, 0.0}), p, MasterEquationMethod::Exact, 15.0, 0.05, cfg);
    const double dev = rho11_closed_form_check(r11, p, MasterEquationMethod::Exact, cfg);
    MESSAGE("rho11 deviation " << dev);
    CHECK(dev <= 1e-6);

    const EvolutionResult r10 = run(pure({0.0, 1.0, 0.0, 0.0}), p, MasterEquationMethod::Exact, 5.0, 0.05);
    CHECK(rho11_closed_form_check(r10, p, MasterEquationMethod::Exact) == 0.0);

    SystemParams closed = p;
    closed.kappa_a = closed.kappa_b = 0.0;
    const EvolutionResult rc = run(pure({0.5, 0.5, 0.5, 0.5}), closed, MasterEquationMethod::Exact, 5.0, 0.05);
    CHECK(rho11_closed_form_check(rc, closed, MasterEquationMethod::Exact) <= 1e-12);

    SystemParams asym = p;
    asym.kappa_b = 0.5;
    CHECK_THROWS_AS(rho11_closed_form_check(r11, asym, MasterEquationMethod::Exact), std::invalid_argument);
}

TEST_CASE("symmetric parameters keep rho symmetric under A <-> B") {
    const EvolutionResult r = run(pure({0.5, 0.5, 0.5, 0.5}), fig1(), MasterEquationMethod::Exact, 15.0, 0.1);
    for (const auto& s : r.samples)
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(s.rho.rho(j, 1) - s.rho.rho(j, 2)) <= 1e-8);
            CHECK(std::abs(s.coeffs.fbar[0] - s.coeffs.fbar[1]) <= 1e-8);
            CHECK(std::abs(s.coeffs.fbar[2] - s.coeffs.fbar[3]) <= 1e-8);
        }
}

TEST_CASE("no |11> amplitude: exact and approx coincide") {
    SystemParams p = fig1();
    p.gamma = 0.1;
    p.kappa_a = p.kappa_b = 2.0;
    const double r3 = 1.0 / std::sqrt(3.0);
    const DensityMatrix rho0 = pure({0.0, r3, r3, r3});
    IntegratorConfig cfg;
    const auto exact = run(rho0, p, MasterEquationMethod::Exact, 200.0, 0.5, cfg);
    const auto approx = run(rho0, p, MasterEquationMethod::ApproxNoFirstOrderNoise, 200.0, 0.5, cfg);
    const double d = max_distance(exact, approx);
    MESSAGE("no11 max distance " << d);
    CHECK(d <= 5.0 * cfg.rel_tol);
}

TEST_CASE("exact and approx meet in the steady state") {
    SystemParams p = fig1();
    p.gamma = 0.1;
    p.kappa_a = p.kappa_b = 2.0;
    const DensityMatrix rho0 = pure({0.5, 0.5, 0.5, 0.5});
    const auto exact = run(rho0, p, MasterEquationMethod::Exact, 200.0, 0.5);
    const auto approx = run(rho0, p, MasterEquationMethod::ApproxNoFirstOrderNoise, 200.0, 0.5);
    const double final_d = trace_distance(exact.samples.back().rho, approx.samples.back().rho);
    CHECK(final_d <= 1e-2);
    CHECK(max_distance(exact, approx) > 5.0 * final_d);
}

TEST_CASE("emitted states pass the sanity thresholds") {
    const double r3 = 1.0 / std::sqrt(3.0);
    for (const auto& psi : {std::array<cd, 4>{0.5, 0.5, 0.5, 0.5}, std::array<cd, 4>{1.0, 0.0, 0.0, 0.0},
                            std::array<cd, 4>{0.0, r3, r3, r3}})
        for (double gamma : {0.1, 1.0, 10.0}) {
            SystemParams p = fig1();
            p.gamma = gamma;
            const auto r = run(pure(psi), p, MasterEquationMethod::Exact, 30.0, 0.1);
            CHECK(r.max_rhs_trace <= 1e-12);
            CHECK(r.max_rhs_herm_defect <= 1e-12);
            CHECK(r.max_step_herm_drift <= 1e-12);
            CHECK(r.min_eigenvalue >= -1e-6);
            CHECK(r.positivity_warnings == 0);
            for (const auto& s : r.samples) {
                const SanityReport q = sanity_monitor(s.rho);
                CHECK(std::abs(q.trace - 1.0) <= 1e-8);
                CHECK(q.herm_defect <= 1e-10);
                CHECK(std::abs(s.coeffs.big_f[4].imag()) <= 1e-9);
            }
        }
}

TEST_CASE("fixed-step RK4 agrees with the adaptive pair") {
    IntegratorConfig rk;
    rk.scheme = IntegratorConfig::Scheme::RungeKutta4;
    rk.max_step = 0.01;
    const DensityMatrix rho0 = pure({0.5, 0.5, 0.5, 0.5});
    const auto a = run(rho0, fig1(), MasterEquationMethod::Exact, 10.0, 0.1);
    const auto b = run(rho0, fig1(), MasterEquationMethod::Exact, 10.0, 0.1, rk);
    CHECK(max_distance(a, b) <= 1e-6);
}

TEST_CASE("Markov limit") {
    // The exact coefficients start from zero and need ~1/gamma to reach the
    // Markov values; the resulting offset decays like 1/gamma.
    const DensityMatrix rho0 = pure({0.0, 1.0, 0.0, 0.0});
    double previous = 1.0;
    for (double gamma : {10.0, 50.0, 200.0}) {
        SystemParams p = fig1();
        p.gamma = gamma;
        const auto exact = run(rho0, p, MasterEquationMethod::Exact, 15.0, 0.0375);
        const auto markov = run(rho0, p, MasterEquationMethod::MarkovLindblad, 15.0, 0.0375);
        const double d = max_distance(exact, markov);
        MESSAGE("gamma " << gamma << " max distance " << d);
        CHECK(d < previous);
        previous = d;
    }
    CHECK(previous <= 0.01);
}

TEST_CASE("deterministic output") {
    const DensityMatrix rho0 = pure({0.5, 0.5, 0.5, 0.5});
    const auto a = run(rho0, fig1(), MasterEquationMethod::Exact, 5.0, 0.1);
    const auto b = run(rho0, fig1(), MasterEquationMethod::Exact, 5.0, 0.1);
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].rho.rho == b.samples[k].rho.rho);
}

TEST_CASE("integrator failure modes") {
    // y' = y^2 from y(0) = 1 blows up at t = 1
    auto rhs = [](double, const StateVector<1>& y) { return StateVector<1>{y[0] * y[0]}; };
    const std::vector<double> out{2.0};
    auto emit = [](double, const StateVector<1>&) {};
    auto keep = [](StateVector<1>&) {};
    CHECK_THROWS_AS(integrate_dopri5<1>(rhs, StateVector<1>{1.0}, 0.0, out, AdaptiveOptions{}, emit, keep),
                    StepFailure);

    auto nan_rhs = [](double t, const StateVector<1>&) {
        return StateVector<1>{t > 0.5 ? cd{std::nan("")} : cd{1.0}};
    };
    CHECK_THROWS_AS(integrate_rk4<1>(nan_rhs, StateVector<1>{0.0}, 0.0, out, 0.1, emit, keep), NanDetected);

    AdaptiveOptions few;
    few.max_steps = 3;
    auto osc = [](double, const StateVector<1>& y) { return StateVector<1>{cd{0.0, 50.0} * y[0]}; };
    CHECK_THROWS_AS(integrate_dopri5<1>(osc, StateVector<1>{1.0}, 0.0, out, few, emit, keep), StepFailure);
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(1.0, 0.3);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[3] == doctest::Approx(0.9));
    CHECK(uniform_grid(0.0, 0.1).size() == 1);
    CHECK(uniform_grid(15.0, 15.0 / 400).size() == 401);
}
