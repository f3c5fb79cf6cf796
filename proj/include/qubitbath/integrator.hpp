#pragma once

// Explicit Runge-Kutta integrators over fixed-size complex state vectors.
//
// integrate_dopri5: Dormand-Prince 5(4) embedded pair with the standard
// step-size controller and the 4th-order continuous extension for output
// between steps. integrate_rk4: classical fixed-step RK4 landing exactly on
// every output time.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "qubitbath/errors.hpp"

namespace qubitbath {

template <std::size_t N>
using StateVector = std::array<std::complex<double>, N>;

struct AdaptiveOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

namespace detail {

template <std::size_t N>
bool all_finite(const StateVector<N>& y) {
    for (const auto& x : y)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

template <std::size_t N>
double scaled_rms(const StateVector<N>& e, const StateVector<N>& y0, const StateVector<N>& y1, double atol,
                  double rtol) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double sk = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
        const double r = std::abs(e[k]) / sk;
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(N));
}

inline void check_out_times(std::span<const double> out, double t0) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!std::isfinite(out[k]) || out[k] < t0) throw std::invalid_argument("output times must be finite and >= t0");
        if (k > 0 && out[k] < out[k - 1]) throw std::invalid_argument("output times must be non-decreasing");
    }
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 through the last entry of out_times.
///
/// emit(t, y) is called once per output time, in order. project(y) may modify
/// the state after each accepted step (e.g. re-symmetrization); if it changes
/// y the first stage is re-evaluated. Throws NanDetected or StepFailure.
template <std::size_t N, class Rhs, class Emit, class Project>
IntegrationStats integrate_dopri5(Rhs&& rhs, StateVector<N> y, double t0, std::span<const double> out_times,
                                  const AdaptiveOptions& opt, Emit&& emit, Project&& project) {
    using V = StateVector<N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    detail::check_out_times(out_times, t0);
    IntegrationStats stats;
    std::size_t next = 0;
    while (next < out_times.size() && out_times[next] == t0) emit(out_times[next++], y);
    if (next == out_times.size()) return stats;
    if (!detail::all_finite(y)) throw NanDetected("non-finite initial state");

    const double t_end = out_times.back();
    double t = t0;
    V k1 = rhs(t, y);
    ++stats.rhs_evals;

    auto norm = [&](const V& v) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double r = std::abs(v[k]) / (opt.abs_tol + opt.rel_tol * std::abs(y[k]));
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(N));
    };

    // initial step (Hairer & Wanner, hinit)
    double h;
    {
        const double dy = norm(y), df = norm(k1);
        double h0 = (dy < 1e-10 || df < 1e-10 || !std::isfinite(dy) || !std::isfinite(df)) ? 1e-6 : 0.01 * dy / df;
        h0 = std::min({h0, opt.max_step, t_end - t});
        V y1;
        for (std::size_t k = 0; k < N; ++k) y1[k] = y[k] + h0 * k1[k];
        V f1 = rhs(t + h0, y1);
        ++stats.rhs_evals;
        V diff;
        for (std::size_t k = 0; k < N; ++k) diff[k] = f1[k] - k1[k];
        const double d2 = norm(diff) / h0;
        const double m = std::max(df, d2);
        const double h1 = (m <= 1e-15 || !std::isfinite(m)) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, opt.max_step});
    }

    bool last_rejected = false;
    V k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    while (t < t_end) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw StepFailure("step budget exhausted at t=" + std::to_string(t));
        if (!(h >= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))))
            throw StepFailure("step size underflow at t=" + std::to_string(t));
        h = std::min(h, opt.max_step);
        bool hits_end = false;
        if (t + h >= t_end || t + 1.0001 * h >= t_end) {
            h = t_end - t;
            hits_end = true;
        }

        for (std::size_t k = 0; k < N; ++k) ytmp[k] = y[k] + h * (a21 * k1[k]);
        k2 = rhs(t + c2 * h, ytmp);
        for (std::size_t k = 0; k < N; ++k) ytmp[k] = y[k] + h * (a31 * k1[k] + a32 * k2[k]);
        k3 = rhs(t + c3 * h, ytmp);
        for (std::size_t k = 0; k < N; ++k) ytmp[k] = y[k] + h * (a41 * k1[k] + a42 * k2[k] + a43 * k3[k]);
        k4 = rhs(t + c4 * h, ytmp);
        for (std::size_t k = 0; k < N; ++k)
            ytmp[k] = y[k] + h * (a51 * k1[k] + a52 * k2[k] + a53 * k3[k] + a54 * k4[k]);
        k5 = rhs(t + c5 * h, ytmp);
        for (std::size_t k = 0; k < N; ++k)
            ytmp[k] = y[k] + h * (a61 * k1[k] + a62 * k2[k] + a63 * k3[k] + a64 * k4[k] + a65 * k5[k]);
        k6 = rhs(t + h, ytmp);
        for (std::size_t k = 0; k < N; ++k)
            ynew[k] = y[k] + h * (a71 * k1[k] + a73 * k3[k] + a74 * k4[k] + a75 * k5[k] + a76 * k6[k]);
        k7 = rhs(t + h, ynew);
        stats.rhs_evals += 6;
        for (std::size_t k = 0; k < N; ++k)
            err[k] = h * (e1 * k1[k] + e3 * k3[k] + e4 * k4[k] + e5 * k5[k] + e6 * k6[k] + e7 * k7[k]);

        const double en = detail::scaled_rms(err, y, ynew, opt.abs_tol, opt.rel_tol);
        if (!std::isfinite(en) || en > 1.0) {
            ++stats.rejected;
            if (!detail::all_finite(ynew) && h <= 1e-12) throw NanDetected("non-finite state at t=" + std::to_string(t));
            const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.1;
            h *= fac;
            last_rejected = true;
            continue;
        }
        if (!detail::all_finite(ynew)) throw NanDetected("non-finite state at t=" + std::to_string(t + h));

        const double t_new = hits_end ? t_end : t + h;
        // dense output for outputs inside (t, t_new]
        while (next < out_times.size() && out_times[next] <= t_new) {
            const double to = out_times[next];
            if (to == t_new) {
                V yo = ynew;
                project(yo);
                emit(to, yo);
            } else {
                const double th = (to - t) / h;
                const double th1 = 1.0 - th;
                V yo;
                for (std::size_t k = 0; k < N; ++k) {
                    const auto ydiff = ynew[k] - y[k];
                    const auto bspl = h * k1[k] - ydiff;
                    const auto r4 = ydiff - h * k7[k] - bspl;
                    const auto r5 = h * (d1 * k1[k] + d3 * k3[k] + d4 * k4[k] + d5 * k5[k] + d6 * k6[k] + d7 * k7[k]);
                    yo[k] = y[k] + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
                }
                project(yo);
                emit(to, yo);
            }
            ++next;
        }

        ++stats.accepted;
        const V before = ynew;
        project(ynew);
        y = ynew;
        t = t_new;
        if (before != ynew) {
            k1 = rhs(t, y);
            ++stats.rhs_evals;
        } else {
            k1 = k7;
        }

        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
        h *= fac;
        last_rejected = false;
    }
    return stats;
}

template <std::size_t N, class Rhs>
StateVector<N> rk4_step(Rhs&& rhs, double t, const StateVector<N>& y, double h) {
    StateVector<N> tmp;
    const auto k1 = rhs(t, y);
    for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
    const auto k2 = rhs(t + 0.5 * h, tmp);
    for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
    const auto k3 = rhs(t + 0.5 * h, tmp);
    for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + h * k3[k];
    const auto k4 = rhs(t + h, tmp);
    StateVector<N> out;
    for (std::size_t k = 0; k < N; ++k) out[k] = y[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    return out;
}

/// Fixed-step RK4. Each output interval is split into ceil(len / max_step) equal steps.
template <std::size_t N, class Rhs, class Emit, class Project>
IntegrationStats integrate_rk4(Rhs&& rhs, StateVector<N> y, double t0, std::span<const double> out_times,
                               double max_step, Emit&& emit, Project&& project) {
    if (!(max_step > 0.0)) throw std::invalid_argument("rk4 step must be > 0");
    detail::check_out_times(out_times, t0);
    IntegrationStats stats;
    double t = t0;
    for (double to : out_times) {
        const double len = to - t;
        if (len > 0.0) {
            const auto n = static_cast<long>(std::ceil(len / max_step - 1e-12));
            const double h = len / static_cast<double>(n);
            for (long s = 0; s < n; ++s) {
                const double ts = (s + 1 == n) ? to : t + h;
                y = rk4_step<N>(rhs, t, y, h);
                stats.rhs_evals += 4;
                ++stats.accepted;
                if (!detail::all_finite(y)) throw NanDetected("non-finite state at t=" + std::to_string(ts));
                project(y);
                t = ts;
            }
        }
        emit(to, y);
    }
    return stats;
}

}  // namespace qubitbath
