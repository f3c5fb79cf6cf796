#include "qubitbath/coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace qubitbath {

StateVector<CoefficientState::size> CoefficientState::pack() const {
    StateVector<size> v;
    for (std::size_t j = 0; j < 4; ++j) v[j] = fbar[j];
    v[4] = ftilde5;
    for (std::size_t j = 0; j < 5; ++j) v[5 + j] = big_f[j];
    return v;
}

CoefficientState CoefficientState::unpack(std::span<const cd, size> v) {
    CoefficientState c;
    for (std::size_t j = 0; j < 4; ++j) c.fbar[j] = v[j];
    c.ftilde5 = v[4];
    for (std::size_t j = 0; j < 5; ++j) c.big_f[j] = v[5 + j];
    return c;
}

double correlation_alpha(double t, double s, double gamma) { return 0.5 * gamma * std::exp(-gamma * std::abs(t - s)); }

cd fbar5_growth_rate(const CoefficientState& c, const SystemParams& p) {
    return -p.gamma + 2.0 * I * (p.omega_a + p.omega_b) + 2.0 * p.kappa_a * c.fbar[0] + 2.0 * p.kappa_b * c.fbar[1];
}

cd fbar5_diagonal(const CoefficientState& c, const SystemParams& p) {
    return -I * (p.kappa_a * c.fbar[2] + p.kappa_b * c.fbar[3]);
}

namespace {

// fbar1..fbar4 derivative; `ft5` is the ftilde5 value fed back (zero in the approximate system).
std::array<cd, 4> fbar_rhs(const CoefficientState& c, const SystemParams& p, cd ft5) {
    const double g = p.gamma, ka = p.kappa_a, kb = p.kappa_b;
    const cd b1 = c.fbar[0], b2 = c.fbar[1], b3 = c.fbar[2], b4 = c.fbar[3];
    const cd jxy = -I * p.j_xy;
    const cd zz = 2.0 * I * p.j_z + ka * b4 + kb * b3;  // shared (2iJz + kA fbar4 + kB fbar3)
    return {
        0.5 * g * ka + (-g + 2.0 * I * p.omega_a + ka * b1) * b1 + (jxy + kb * b4) * b3 + zz * b4 - I * kb * ft5,
        0.5 * g * kb + (-g + 2.0 * I * p.omega_b + kb * b2) * b2 + (jxy + ka * b3) * b4 + zz * b3 - I * ka * ft5,
        (-g + 2.0 * I * p.omega_b + ka * b4 + kb * b2) * b3 + (jxy - ka * b2 + ka * b3) * b1 + zz * b2 - I * ka * ft5,
        (-g + 2.0 * I * p.omega_a + ka * b1 + kb * b3) * b4 + (jxy - kb * b1 + kb * b4) * b2 + zz * b1 - I * kb * ft5,
    };
}

}  // namespace

CoefficientState coefficient_rhs_exact(const CoefficientState& c, const SystemParams& p) {
    const double g = p.gamma, ka = p.kappa_a, kb = p.kappa_b;
    const cd b1 = c.fbar[0], b2 = c.fbar[1], b3 = c.fbar[2], b4 = c.fbar[3];
    const cd ft5 = c.ftilde5;
    const auto& F = c.big_f;

    CoefficientState d;
    d.fbar = fbar_rhs(c, p, ft5);
    d.ftilde5 = -I * (0.5 * g) * (ka * b3 + kb * b4) + (fbar5_growth_rate(c, p) - g) * ft5;

    // conj(fbar5(t,t)) = i (kA conj(fbar3) + kB conj(fbar4))
    const cd src = ka * std::conj(b3) + kb * std::conj(b4);
    // growth of conj(fbar5(t,s1)) without the -2i(wA+wB) part, which is folded per row below
    const cd damp = -g + 2.0 * ka * std::conj(b1) + 2.0 * kb * std::conj(b2);
    const cd jxy = -I * p.j_xy;
    const cd zz = 2.0 * I * p.j_z + ka * b4 + kb * b3;
    const cd row14 = ka * b1 + kb * b3 + damp;  // f1/f4 self-coupling + conj growth
    const cd row23 = ka * b4 + kb * b2 + damp;

    d.big_f[0] = I * b1 * src + ka * std::conj(ft5) + (row14 - 2.0 * I * p.omega_b) * F[0] +
                 (jxy - kb * b1 + kb * b4) * F[2] + zz * F[3] - I * kb * F[4];
    d.big_f[1] = I * b2 * src + kb * std::conj(ft5) + (row23 - 2.0 * I * p.omega_a) * F[1] +
                 (jxy - ka * b2 + ka * b3) * F[3] + zz * F[2] - I * ka * F[4];
    d.big_f[2] = I * b3 * src + (row23 - 2.0 * I * p.omega_a) * F[2] + (jxy - ka * b2 + ka * b3) * F[0] +
                 zz * F[1] - I * ka * F[4];
    d.big_f[3] = I * b4 * src + (row14 - 2.0 * I * p.omega_b) * F[3] + (jxy - kb * b1 + kb * b4) * F[1] +
                 zz * F[0] - I * kb * F[4];
    d.big_f[4] = 2.0 * (I * ft5 * src).real() +
                 (-2.0 * g + 4.0 * ka * b1.real() + 4.0 * kb * b2.real()) * F[4];
    return d;
}

CoefficientState coefficient_rhs_approx(const CoefficientState& c, const SystemParams& p) {
    CoefficientState d;
    d.fbar = fbar_rhs(c, p, cd{});
    return d;
}

CoefficientState markov_asymptote(const SystemParams& p) {
    CoefficientState c;
    c.fbar[0] = 0.5 * p.kappa_a;
    c.fbar[1] = 0.5 * p.kappa_b;
    return c;
}

std::vector<CoefficientSample> integrate_coefficients(const SystemParams& p, bool exact,
                                                      std::span<const double> out_times,
                                                      const AdaptiveOptions& opt) {
    constexpr std::size_t n = CoefficientState::size;
    std::vector<CoefficientSample> out;
    out.reserve(out_times.size());
    auto rhs = [&](double, const StateVector<n>& y) {
        const auto c = CoefficientState::unpack(y);
        return (exact ? coefficient_rhs_exact(c, p) : coefficient_rhs_approx(c, p)).pack();
    };
    integrate_dopri5<n>(rhs, CoefficientState{}.pack(), 0.0, out_times, opt,
                        [&](double t, const StateVector<n>& y) { out.push_back({t, CoefficientState::unpack(y)}); },
                        [](StateVector<n>&) {});
    return out;
}

void write_coefficient_csv(std::ostream& os, std::span<const CoefficientSample> samples) {
    static const char* names[] = {"fbar1", "fbar2", "fbar3", "fbar4", "ftilde5", "F1", "F2", "F3", "F4", "F5"};
    os << "t";
    for (const char* n : names) os << ",re_" << n << ",im_" << n;
    os << '\n';
    char buf[64];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        os << buf;
        for (const auto& v : s.state.pack()) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace qubitbath
