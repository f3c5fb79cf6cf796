#include "qubitbath/hermitian_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace qubitbath {

namespace {

double off_diagonal_norm(const ComplexMatrix4& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

double frobenius(const ComplexMatrix4& a) {
    double s = 0.0;
    for (const auto& x : a.data()) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace

HermitianEigen4 hermitian_eigen(const ComplexMatrix4& input) {
    ComplexMatrix4 a = 0.5 * (input + input.adjoint());
    ComplexMatrix4 v = ComplexMatrix4::identity();

    const double scale = frobenius(a);
    if (scale > 0.0) {
        for (int sweep = 0; sweep < 64; ++sweep) {
            if (off_diagonal_norm(a) <= 1e-17 * scale) break;
            for (std::size_t p = 0; p < 3; ++p) {
                for (std::size_t q = p + 1; q < 4; ++q) {
                    const double apq_abs = std::abs(a(p, q));
                    if (apq_abs <= 1e-300) continue;
                    const cd phase = a(p, q) / apq_abs;  // a_pq = |a_pq| e^{i phi}
                    const double app = a(p, p).real();
                    const double aqq = a(q, q).real();
                    // real symmetric rotation on the phase-rotated pair
                    const double theta = (aqq - app) / (2.0 * apq_abs);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    // U = diag(1, e^{-i phi}) on (p, q) followed by [[c, s], [-s, c]]:
                    // U_pp = c, U_pq = s, U_qp = -s e^{-i phi}, U_qq = c e^{-i phi}
                    const cd upp = c;
                    const cd upq = s;
                    const cd uqp = -s * std::conj(phase);
                    const cd uqq = c * std::conj(phase);
                    // a <- a U (columns)
                    for (std::size_t k = 0; k < 4; ++k) {
                        const cd akp = a(k, p);
                        const cd akq = a(k, q);
                        a(k, p) = akp * upp + akq * uqp;
                        a(k, q) = akp * upq + akq * uqq;
                    }
                    // a <- U^dagger a (rows)
                    for (std::size_t k = 0; k < 4; ++k) {
                        const cd apk = a(p, k);
                        const cd aqk = a(q, k);
                        a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                        a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    a(p, p) = a(p, p).real();
                    a(q, q) = a(q, q).real();
                    for (std::size_t k = 0; k < 4; ++k) {
                        const cd vkp = v(k, p);
                        const cd vkq = v(k, q);
                        v(k, p) = vkp * upp + vkq * uqp;
                        v(k, q) = vkp * upq + vkq * uqq;
                    }
                }
            }
        }
    }

    std::array<std::size_t, 4> order{};
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    HermitianEigen4 out;
    for (std::size_t k = 0; k < 4; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < 4; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::array<double, 4> hermitian_eigenvalues(const ComplexMatrix4& a) { return hermitian_eigen(a).values; }

std::array<double, 4> singular_values(const ComplexMatrix4& input) {
    // One-sided Jacobi: rotate column pairs until all columns are orthogonal.
    ComplexMatrix4 a = input;
    auto col_dot = [&](std::size_t p, std::size_t q) {
        cd s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += std::conj(a(k, p)) * a(k, q);
        return s;
    };
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t q = p + 1; q < 4; ++q) {
                const double alpha = col_dot(p, p).real();
                const double beta = col_dot(q, q).real();
                const cd g = col_dot(p, q);
                const double g_abs = std::abs(g);
                if (g_abs <= 1e-300 || g_abs <= 1e-16 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cd phase = g / g_abs;
                const double theta = (beta - alpha) / (2.0 * g_abs);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cd uqp = -s * std::conj(phase);
                const cd uqq = c * std::conj(phase);
                for (std::size_t k = 0; k < 4; ++k) {
                    const cd akp = a(k, p);
                    const cd akq = a(k, q);
                    a(k, p) = akp * c + akq * uqp;
                    a(k, q) = akp * s + akq * uqq;
                }
            }
        }
        if (!rotated) break;
    }
    std::array<double, 4> sv{};
    for (std::size_t k = 0; k < 4; ++k) {
        double n = 0.0;
        for (std::size_t r = 0; r < 4; ++r) n += std::norm(a(r, k));
        sv[k] = std::sqrt(n);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

}  // namespace qubitbath
