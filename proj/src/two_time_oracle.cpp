#include "qubitbath/two_time_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qubitbath {

double TwoTimeOracleReport::max_deviation() const {
    return std::max({fbar_deviation, ftilde5_deviation, big_f_deviation});
}

double oracle_max_rate(const SystemParams& p) {
    return std::max({p.gamma, 2.0 * std::abs(p.omega_a), 2.0 * std::abs(p.omega_b), std::abs(p.j_xy),
                     2.0 * std::abs(p.j_z), p.kappa_a * p.kappa_a, p.kappa_b * p.kappa_b});
}

namespace {

using Quad = std::array<cd, 4>;

// d f_j(t,s) / dt along one characteristic.
Quad characteristic_rhs(const Quad& f, cd f5b, const CoefficientState& c, const SystemParams& p) {
    const double ka = p.kappa_a, kb = p.kappa_b;
    const cd b1 = c.fbar[0], b2 = c.fbar[1], b3 = c.fbar[2], b4 = c.fbar[3];
    const cd jxy = -I * p.j_xy;
    const cd zz = 2.0 * I * p.j_z + ka * b4 + kb * b3;
    const cd r14 = 2.0 * I * p.omega_a + ka * b1 + kb * b3;
    const cd r23 = 2.0 * I * p.omega_b + ka * b4 + kb * b2;
    const cd x13 = jxy - kb * b1 + kb * b4;
    const cd x24 = jxy - ka * b2 + ka * b3;
    return {
        r14 * f[0] + x13 * f[2] + zz * f[3] - I * kb * f5b,
        r23 * f[1] + x24 * f[3] + zz * f[2] - I * ka * f5b,
        r23 * f[2] + x24 * f[0] + zz * f[1] - I * ka * f5b,
        r14 * f[3] + x13 * f[1] + zz * f[0] - I * kb * f5b,
    };
}

class Marcher {
public:
    Marcher(const SystemParams& p, double h, std::size_t n) : p_(p), h_(h) {
        f_.reserve(n + 1);
        f5b_.reserve(n + 1);
        f5b_birth_.reserve(n + 1);
        f_.push_back(newborn());
        f5b_.push_back(cd{});  // fbar3 = fbar4 = 0 at t = 0
        f5b_birth_.push_back(cd{});
    }

    std::size_t m() const { return f_.size() - 1; }
    double t() const { return h_ * static_cast<double>(m()); }

    // fbar1..4 and ftilde5 at the current time from the current node values.
    CoefficientState reduce() const { return reduce(f_, f5b_, m()); }

    void step() {
        const std::size_t m0 = m();
        const CoefficientState c0 = reduce();
        const cd g0 = fbar5_growth_rate(c0, p_);

        std::vector<Quad> fp(m0 + 2);
        std::vector<cd> f5p(m0 + 2);
        std::vector<Quad> d0(m0 + 1);
        std::vector<cd> d50(m0 + 1);
        for (std::size_t k = 0; k <= m0; ++k) {
            d0[k] = characteristic_rhs(f_[k], f5b_[k], c0, p_);
            d50[k] = g0 * f5b_[k];
            for (std::size_t j = 0; j < 4; ++j) fp[k][j] = f_[k][j] + h_ * d0[k][j];
            f5p[k] = f5b_[k] + h_ * d50[k];
        }
        fp[m0 + 1] = newborn();
        CoefficientState cp = reduce(fp, f5p, m0 + 1);  // new node's f3 = f4 = 0, so fbar3/4 ignore f5p[m0+1]
        f5p[m0 + 1] = fbar5_diagonal(cp, p_);
        cp = reduce(fp, f5p, m0 + 1);
        const cd gp = fbar5_growth_rate(cp, p_);

        for (std::size_t k = 0; k <= m0; ++k) {
            const Quad d1 = characteristic_rhs(fp[k], f5p[k], cp, p_);
            for (std::size_t j = 0; j < 4; ++j) f_[k][j] += 0.5 * h_ * (d0[k][j] + d1[j]);
            f5b_[k] += 0.5 * h_ * (d50[k] + gp * f5p[k]);
        }
        f_.push_back(newborn());
        f5b_.push_back(cd{});
        const CoefficientState c1 = reduce();
        f5b_.back() = fbar5_diagonal(c1, p_);
        f5b_birth_.push_back(f5b_.back());
    }

    // F1..F5 by double trapezoid quadrature at the current time.
    std::array<cd, 5> big_f() const {
        const std::size_t n = m();
        std::array<cd, 5> out{};
        if (n == 0) return out;
        std::vector<std::array<cd, 5>> inner(n + 1);  // sum_k2 w alpha(s1,s2) g(s2)
        for (std::size_t k1 = 0; k1 <= n; ++k1) {
            std::array<cd, 5> acc{};
            for (std::size_t k2 = 0; k2 <= n; ++k2) {
                const double w = weight(k2, n) * correlation_alpha(s(k1), s(k2), p_.gamma);
                for (std::size_t j = 0; j < 4; ++j) acc[j] += w * f_[k2][j];
                acc[4] += w * f5b_[k2];
            }
            inner[k1] = acc;
        }
        for (std::size_t k1 = 0; k1 <= n; ++k1) {
            const cd outer = weight(k1, n) * std::conj(f5b_[k1]);
            for (std::size_t j = 0; j < 5; ++j) out[j] += outer * inner[k1][j];
        }
        return out;
    }

    TwoTimeGrid snapshot() const {
        TwoTimeGrid g;
        g.t = t();
        for (std::size_t k = 0; k <= m(); ++k) g.s_nodes.push_back(s(k));
        g.f = f_;
        g.fbar5_two_time = f5b_;
        return g;
    }

    const std::vector<cd>& births() const { return f5b_birth_; }
    const std::vector<cd>& fbar5_nodes() const { return f5b_; }

private:
    Quad newborn() const { return {p_.kappa_a, p_.kappa_b, 0.0, 0.0}; }
    double s(std::size_t k) const { return h_ * static_cast<double>(k); }
    double weight(std::size_t k, std::size_t n) const { return (k == 0 || k == n) ? 0.5 * h_ : h_; }

    CoefficientState reduce(const std::vector<Quad>& f, const std::vector<cd>& f5b, std::size_t n) const {
        CoefficientState c;
        if (n == 0) return c;
        const double t = s(n);
        for (std::size_t k = 0; k <= n; ++k) {
            const double w = weight(k, n) * correlation_alpha(t, s(k), p_.gamma);
            for (std::size_t j = 0; j < 4; ++j) c.fbar[j] += w * f[k][j];
            c.ftilde5 += w * f5b[k];
        }
        return c;
    }

    SystemParams p_;
    double h_;
    std::vector<Quad> f_;
    std::vector<cd> f5b_;
    std::vector<cd> f5b_birth_;
};

}  // namespace

TwoTimeOracleReport two_time_oracle(const SystemParams& p, double t_final, std::size_t n_s) {
    validate(p);
    if (n_s < 100) throw std::invalid_argument("two_time_oracle needs n_s >= 100");
    if (!(t_final >= 0.0) || t_final * oracle_max_rate(p) > 20.0)
        throw std::invalid_argument("two_time_oracle: t_final outside desk scale (t_final * max_rate <= 20)");

    TwoTimeOracleReport rep;
    rep.t_final = t_final;
    rep.n_s = n_s;
    if (t_final == 0.0) {
        rep.grid.t = 0.0;
        rep.grid.s_nodes = {0.0};
        rep.grid.f = {{p.kappa_a, p.kappa_b, 0.0, 0.0}};
        rep.grid.fbar5_two_time = {cd{}};
        return rep;
    }

    const double h = t_final / static_cast<double>(n_s);
    std::vector<double> times(n_s + 1);
    for (std::size_t k = 0; k <= n_s; ++k) times[k] = h * static_cast<double>(k);
    times.back() = t_final;
    AdaptiveOptions tight;
    tight.abs_tol = 1e-13;
    tight.rel_tol = 1e-12;
    const auto ref = integrate_coefficients(p, true, times, tight);

    const std::size_t checkpoint_every = std::max<std::size_t>(1, n_s / 8);
    Marcher march(p, h, n_s);
    std::vector<cd> growth{fbar5_growth_rate(march.reduce(), p)};
    for (std::size_t m = 1; m <= n_s; ++m) {
        march.step();
        const CoefficientState c = march.reduce();
        growth.push_back(fbar5_growth_rate(c, p));
        const CoefficientState& r = ref[m].state;
        for (std::size_t j = 0; j < 4; ++j)
            rep.fbar_deviation = std::max(rep.fbar_deviation, std::abs(c.fbar[j] - r.fbar[j]));
        rep.ftilde5_deviation = std::max(rep.ftilde5_deviation, std::abs(c.ftilde5 - r.ftilde5));
        if (m % checkpoint_every == 0 || m == n_s) {
            const auto F = march.big_f();
            for (std::size_t j = 0; j < 5; ++j)
                rep.big_f_deviation = std::max(rep.big_f_deviation, std::abs(F[j] - r.big_f[j]));
            if (m == n_s) {
                rep.oracle = c;
                rep.oracle.big_f = F;
            }
        }
    }
    rep.reference = ref.back().state;

    // fbar5(t, s_k) = fbar5(s_k, s_k) exp(int_{s_k}^t growth): cumulative trapezoid of the growth rate.
    std::vector<cd> cum(n_s + 1);
    for (std::size_t m = 1; m <= n_s; ++m) cum[m] = cum[m - 1] + 0.5 * h * (growth[m - 1] + growth[m]);
    const auto& births = march.births();
    const auto& nodes = march.fbar5_nodes();
    for (std::size_t k = 0; k <= n_s; ++k) {
        const cd factorized = births[k] * std::exp(cum[n_s] - cum[k]);
        rep.factorization_deviation = std::max(rep.factorization_deviation, std::abs(factorized - nodes[k]));
    }
    rep.grid = march.snapshot();
    return rep;
}

OracleConvergence two_time_convergence(const SystemParams& p, double t_final, std::size_t n_s) {
    OracleConvergence c;
    c.coarse = two_time_oracle(p, t_final, n_s);
    c.fine = two_time_oracle(p, t_final, 2 * n_s);
    const double a = c.coarse.max_deviation();
    const double b = c.fine.max_deviation();
    c.ratio = a > 0.0 ? b / a : 0.0;
    // first order would give 0.5; allow a little slack before calling it divergence
    c.diverging = b > 1e-12 && c.ratio > 0.6;
    return c;
}

}  // namespace qubitbath
