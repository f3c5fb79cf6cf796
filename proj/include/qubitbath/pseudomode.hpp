#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qubitbath/algebra.hpp"
#include "qubitbath/master_equation.hpp"

namespace qubitbath {

/// Markovian embedding of the Lorentzian bath: the two qubits plus one damped
/// bosonic mode at zero frequency, truncated at two quanta (exact here, since the
/// total excitation number is conserved and the qubits hold at most two).
struct PseudomodeOptions {
    std::optional<double> coupling;  // overrides g = sqrt(gamma/2)
    int initial_mode_quanta = 0;     // mode starts in this Fock state
};

inline constexpr int pseudomode_max_quanta = 2;

/// Lindblad evolution of system (x) mode with H = H_sys + g (b^dagger L + b L^dagger) and
/// decay 2 gamma D[b]; returns the reduced system state on t_grid.
/// Throws ValidationError when the initial excitations do not fit the truncation.
std::vector<DensityMatrix> pseudomode_reference(const SystemParams& p, const DensityMatrix& rho0,
                                                std::span<const double> t_grid, const IntegratorConfig& cfg = {},
                                                const PseudomodeOptions& opt = {});

}  // namespace qubitbath
