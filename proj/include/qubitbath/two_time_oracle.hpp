#pragma once

#include <array>
#include <vector>

#include "qubitbath/algebra.hpp"
#include "qubitbath/coefficients.hpp"

namespace qubitbath {

/// Two-time functions on a uniform past-time grid, frozen at one time t.
struct TwoTimeGrid {
    double t = 0.0;
    std::vector<double> s_nodes;                // s_k = k h, k = 0..m with s_m = t
    std::vector<std::array<cd, 4>> f;           // f_j(t, s_k)
    std::vector<cd> fbar5_two_time;             // fbar5(t, s_k)
};

struct TwoTimeOracleReport {
    double t_final = 0.0;
    std::size_t n_s = 0;
    CoefficientState oracle;     // quadrature reconstruction at t_final
    CoefficientState reference;  // closed ODE system at t_final
    double fbar_deviation = 0.0;           // max over grid times, j = 1..4
    double ftilde5_deviation = 0.0;        // max over grid times
    double big_f_deviation = 0.0;          // max over checkpoints, F1..F5
    double factorization_deviation = 0.0;  // per-characteristic fbar5 vs exponential factorization
    TwoTimeGrid grid;                      // final-time snapshot

    double max_deviation() const;
};

/// Brute-force reconstruction of the coefficient functions from their two-time
/// definitions, marched along characteristics with a Heun (trapezoidal)
/// predictor-corrector and reduced by composite-trapezoid quadrature.
///
/// Requires n_s >= 100 and t_final * max_rate <= 20; throws std::invalid_argument otherwise.
TwoTimeOracleReport two_time_oracle(const SystemParams& p, double t_final, std::size_t n_s);

struct OracleConvergence {
    TwoTimeOracleReport coarse;  // n_s
    TwoTimeOracleReport fine;    // 2 n_s
    double ratio = 0.0;          // fine.max_deviation() / coarse.max_deviation()
    bool diverging = false;      // deviation failed to shrink at least like O(1/n_s)
};

OracleConvergence two_time_convergence(const SystemParams& p, double t_final, std::size_t n_s);

/// Largest characteristic rate used in the oracle's desk-scale precondition.
double oracle_max_rate(const SystemParams& p);

}  // namespace qubitbath
