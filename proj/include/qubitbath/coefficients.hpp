#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qubitbath/algebra.hpp"
#include "qubitbath/integrator.hpp"

namespace qubitbath {

/// Bath-memory functions that drive the master equation.
///
/// fbar[j]  = int_0^t alpha(t,s) f_j(t,s) ds                     (j = 1..4)
/// ftilde5  = int_0^t alpha(t,s) fbar5(t,s) ds
/// big_f[j] = int int alpha(s1,s2) f_j(t,s2) conj(fbar5(t,s1))   (j = 1..4)
/// big_f[4] = F5, the same double integral with f_j -> fbar5; real-valued.
///
/// All components vanish at t = 0.
struct CoefficientState {
    std::array<cd, 4> fbar{};
    cd ftilde5{};
    std::array<cd, 5> big_f{};

    static constexpr std::size_t size = 10;
    StateVector<size> pack() const;
    static CoefficientState unpack(std::span<const cd, size> v);
};

/// Ornstein-Uhlenbeck kernel (gamma/2) exp(-gamma |t - s|).
double correlation_alpha(double t, double s, double gamma);

/// Time derivative of every component under the full closed system
/// (zeroth- and first-order noise contributions).
CoefficientState coefficient_rhs_exact(const CoefficientState& c, const SystemParams& p);

/// Time derivative with the first-order noise function dropped: ftilde5 and all
/// F components have zero derivative and do not feed back into fbar.
CoefficientState coefficient_rhs_approx(const CoefficientState& c, const SystemParams& p);

/// Leading large-gamma fixed point: fbar1 = kappa_a/2, fbar2 = kappa_b/2, rest 0.
CoefficientState markov_asymptote(const SystemParams& p);

/// Growth rate of fbar5(t, s1) in t: -gamma + 2i(wA + wB) + 2 kA fbar1 + 2 kB fbar2.
cd fbar5_growth_rate(const CoefficientState& c, const SystemParams& p);

/// fbar5(t, t) = -i (kA fbar3 + kB fbar4).
cd fbar5_diagonal(const CoefficientState& c, const SystemParams& p);

struct CoefficientSample {
    double t = 0.0;
    CoefficientState state;
};

/// Integrates the coefficient system alone from zero initial data.
std::vector<CoefficientSample> integrate_coefficients(const SystemParams& p, bool exact,
                                                      std::span<const double> out_times,
                                                      const AdaptiveOptions& opt);

/// CSV diagnostic: t then Re/Im of fbar1..4, ftilde5, F1..F5.
void write_coefficient_csv(std::ostream& os, std::span<const CoefficientSample> samples);

}  // namespace qubitbath
