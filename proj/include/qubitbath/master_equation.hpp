#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qubitbath/algebra.hpp"
#include "qubitbath/coefficients.hpp"
#include "qubitbath/integrator.hpp"

namespace qubitbath {

enum class MasterEquationMethod {
    Exact,                    // zeroth- and first-order noise terms
    ApproxNoFirstOrderNoise,  // first-order noise function set to zero
    MarkovLindblad,           // coefficients frozen at the gamma -> infinity fixed point
};

std::string_view to_string(MasterEquationMethod m);

struct IntegratorConfig {
    enum class Scheme { RungeKutta4, DormandPrince45 };

    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    double max_step = 0.0;  // <= 0 selects 0.1 / gamma
    Scheme scheme = Scheme::DormandPrince45;
};

std::string_view to_string(IntegratorConfig::Scheme s);

struct AugmentedState {
    DensityMatrix rho;
    CoefficientState coeffs;
    double t = 0.0;

    static constexpr std::size_t size = 16 + CoefficientState::size;
    StateVector<size> pack() const;
    static AugmentedState unpack(const StateVector<size>& v, double t);
};

struct AugmentedDerivative {
    ComplexMatrix4 drho;
    CoefficientState dcoeffs;
};

/// Ensemble average M[P_t Obar^dagger] in closed form:
///   rho (fb1* s+A + fb2* s+B + fb3* szA s+B + fb4* s+A szB)
///   - 2i (F1 s-A + F2 s-B + F3 szA s-B + F4 s-A szB) rho s+A s+B
ComplexMatrix4 m_pt_obar_dag(const DensityMatrix& rho, const CoefficientState& coeffs, const SystemParams& p);

/// drho/dt = -i[H, rho] + [L, M] + [M^dagger, L^dagger] with M = m_pt_obar_dag,
/// plus the coefficient derivative for the chosen method.
AugmentedDerivative master_rhs(const AugmentedState& state, const SystemParams& p, MasterEquationMethod method);

struct EvolutionSample {
    double t = 0.0;
    DensityMatrix rho;
    CoefficientState coeffs;
};

struct EvolutionResult {
    std::vector<EvolutionSample> samples;
    IntegrationStats stats;
    double max_rhs_trace = 0.0;        // max |tr(drho/dt)| over all RHS evaluations
    double max_rhs_herm_defect = 0.0;  // max |drho/dt - (drho/dt)^dagger|
    double max_step_herm_drift = 0.0;  // largest asymmetry removed by re-symmetrization
    double min_eigenvalue = 0.0;       // smallest eigenvalue over emitted states
    int positivity_warnings = 0;       // emitted states with min eigenvalue < -1e-6
};

/// Co-integrates rho and the coefficient functions, emitting a sample at every out_grid time.
/// Throws StepFailure or NanDetected.
EvolutionResult evolve(const DensityMatrix& rho0, const SystemParams& p, MasterEquationMethod method,
                       double t_final, std::span<const double> out_grid, const IntegratorConfig& cfg = {});

/// {0, dt, 2 dt, ..., t_final}; the final point is t_final exactly.
std::vector<double> uniform_grid(double t_final, double dt);

/// Max over the run of |rho11(t) - rho11(0) exp(-4 kappa int_0^t Re(fbar1 + fbar3))|.
/// Symmetric parameters only (throws std::invalid_argument otherwise).
double rho11_closed_form_check(const EvolutionResult& run, const SystemParams& p, MasterEquationMethod method,
                               const IntegratorConfig& cfg = {});

}  // namespace qubitbath
