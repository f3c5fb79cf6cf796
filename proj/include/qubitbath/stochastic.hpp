#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qubitbath/algebra.hpp"
#include "qubitbath/coefficients.hpp"

namespace qubitbath {

/// Samples of z*_t on the grid t_k = k dt.
struct NoisePath {
    double dt = 0.0;
    std::vector<cd> z_star;

    /// z*(t) by linear interpolation between grid samples.
    cd at(double t) const;
};

/// Generator for one (seed, stream) pair. Independent of thread count and order.
std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t stream);

/// Exact stationary discretization of the complex OU process with
/// M[z_t z_s*] = (gamma/2) exp(-gamma |t - s|) and M[z_t z_s] = 0.
NoisePath sample_ou_path(double gamma, double dt, std::size_t n_steps, std::mt19937_64& rng);
NoisePath sample_ou_path(double gamma, double dt, double t_final, std::uint64_t seed);

/// fbar1..fbar4 of the full coefficient system tabulated on a half-step grid
/// (entry i belongs to t = i dt / 2), as needed by RK4 stages.
struct CoefficientTable {
    double dt = 0.0;
    std::vector<CoefficientState> half_steps;

    const CoefficientState& at_half_index(std::size_t i) const { return half_steps.at(i); }
};

CoefficientTable tabulate_coefficients(const SystemParams& p, double dt, std::size_t n_steps);

struct TrajectoryState {
    PureState4 c;
    cd fhat5_accum{};  // A(t) = int_0^t fbar5(t, s1) z*_{s1} ds1, so fhat5 = i A
};

/// Derivative of the trajectory state at one instant. Symmetric parameters only.
TrajectoryState trajectory_rhs(const TrajectoryState& s, cd z_star, const CoefficientState& c, const SystemParams& p);

/// One RK4 step from grid point n to n+1 (step = noise.dt).
/// Throws std::invalid_argument for asymmetric parameters.
TrajectoryState trajectory_step(const TrajectoryState& s, const NoisePath& noise, const CoefficientTable& coeffs,
                                const SystemParams& p, std::size_t n);

struct EnsembleConfig {
    std::size_t n_traj = 2000;
    std::uint64_t seed = 20140901;
    double dt = 0.01;
    unsigned threads = 0;  // 0 selects hardware concurrency
};

struct EnsembleResult {
    std::vector<double> t;
    std::vector<DensityMatrix> rho;
    std::vector<double> trace_drift;  // |tr(rho) - 1|
};

/// Average of |psi_t><psi_t| over linear (unnormalized) trajectories.
/// Every t_grid point must be an integer multiple of cfg.dt.
EnsembleResult ensemble_average(const SystemParams& p, const PureState4& psi0, const EnsembleConfig& cfg,
                                std::span<const double> t_grid);

}  // namespace qubitbath
