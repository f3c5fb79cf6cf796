#include "qubitbath/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qubitbath/errors.hpp"

namespace qubitbath {

ComplexMatrix4 ComplexMatrix4::identity() { return diagonal({1.0, 1.0, 1.0, 1.0}); }

ComplexMatrix4 ComplexMatrix4::diagonal(const std::array<cd, 4>& d) {
    ComplexMatrix4 r;
    for (std::size_t k = 0; k < dim; ++k) r(k, k) = d[k];
    return r;
}

ComplexMatrix4 ComplexMatrix4::adjoint() const {
    ComplexMatrix4 r;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

ComplexMatrix4 ComplexMatrix4::conjugate() const {
    ComplexMatrix4 r;
    for (std::size_t k = 0; k < m_.size(); ++k) r.m_[k] = std::conj(m_[k]);
    return r;
}

cd ComplexMatrix4::trace() const { return m_[0] + m_[5] + m_[10] + m_[15]; }

ComplexMatrix4& ComplexMatrix4::operator+=(const ComplexMatrix4& o) {
    for (std::size_t k = 0; k < m_.size(); ++k) m_[k] += o.m_[k];
    return *this;
}

ComplexMatrix4& ComplexMatrix4::operator-=(const ComplexMatrix4& o) {
    for (std::size_t k = 0; k < m_.size(); ++k) m_[k] -= o.m_[k];
    return *this;
}

ComplexMatrix4& ComplexMatrix4::operator*=(cd s) {
    for (auto& x : m_) x *= s;
    return *this;
}

ComplexMatrix4 operator*(const ComplexMatrix4& a, const ComplexMatrix4& b) {
    ComplexMatrix4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            const cd aik = a(i, k);
            if (aik == cd{}) continue;
            for (std::size_t j = 0; j < 4; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

ComplexMatrix4 commutator(const ComplexMatrix4& a, const ComplexMatrix4& b) { return a * b - b * a; }

double max_abs_diff(const ComplexMatrix4& a, const ComplexMatrix4& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < 16; ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

double hermiticity_defect(const ComplexMatrix4& m) { return max_abs_diff(m, m.adjoint()); }

ComplexMatrix4 kron(const ComplexMatrix2& a, const ComplexMatrix2& b) {
    ComplexMatrix4 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return r;
}

void validate(const SystemParams& p) {
    const double fields[] = {p.omega_a, p.omega_b, p.j_xy, p.j_z, p.kappa_a, p.kappa_b, p.gamma};
    for (double f : fields)
        if (!std::isfinite(f)) throw ValidationError("system parameters must be finite");
    if (!(p.gamma > 0.0)) throw ValidationError("gamma must be > 0, got " + std::to_string(p.gamma));
    if (p.kappa_a < 0.0 || p.kappa_b < 0.0) throw ValidationError("kappa_a and kappa_b must be >= 0");
}

ComplexMatrix2 pauli2(PauliKind kind) {
    // basis order {|1>, |0>}; sigma_z|1> = |1>
    ComplexMatrix2 s;
    switch (kind) {
        case PauliKind::Plus: s(0, 1) = 1.0; break;
        case PauliKind::Minus: s(1, 0) = 1.0; break;
        case PauliKind::Z:
            s(0, 0) = 1.0;
            s(1, 1) = -1.0;
            break;
    }
    return s;
}

ComplexMatrix2 identity2() {
    ComplexMatrix2 s;
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    return s;
}

ComplexMatrix4 pauli_embedded(Qubit q, PauliKind kind) {
    // Index map: |11>=0, |10>=1, |01>=2, |00>=3.
    ComplexMatrix4 r;
    if (q == Qubit::A) {
        switch (kind) {
            case PauliKind::Minus:  // |1x> -> |0x>
                r(2, 0) = 1.0;
                r(3, 1) = 1.0;
                break;
            case PauliKind::Plus:
                r(0, 2) = 1.0;
                r(1, 3) = 1.0;
                break;
            case PauliKind::Z: r = ComplexMatrix4::diagonal({1.0, 1.0, -1.0, -1.0}); break;
        }
    } else {
        switch (kind) {
            case PauliKind::Minus:  // |x1> -> |x0>
                r(1, 0) = 1.0;
                r(3, 2) = 1.0;
                break;
            case PauliKind::Plus:
                r(0, 1) = 1.0;
                r(2, 3) = 1.0;
                break;
            case PauliKind::Z: r = ComplexMatrix4::diagonal({1.0, -1.0, 1.0, -1.0}); break;
        }
    }
    return r;
}

ComplexMatrix4 build_hamiltonian(const SystemParams& p) {
    ComplexMatrix4 h = ComplexMatrix4::diagonal({
        p.omega_a + p.omega_b + p.j_z,
        p.omega_a - p.omega_b - p.j_z,
        -p.omega_a + p.omega_b - p.j_z,
        -p.omega_a - p.omega_b + p.j_z,
    });
    h(1, 2) = p.j_xy;
    h(2, 1) = p.j_xy;
    return h;
}

ComplexMatrix4 build_lowering(const SystemParams& p) {
    return p.kappa_a * pauli_embedded(Qubit::A, PauliKind::Minus) +
           p.kappa_b * pauli_embedded(Qubit::B, PauliKind::Minus);
}

double PureState4::norm_squared() const {
    double n = 0.0;
    for (const auto& x : c) n += std::norm(x);
    return n;
}

PureState4 PureState4::normalized() const {
    const double n = std::sqrt(norm_squared());
    PureState4 r = *this;
    for (auto& x : r.c) x /= n;
    return r;
}

DensityMatrix density_from_pure(const PureState4& s) {
    DensityMatrix d;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k) d.rho(j, k) = s.c[j] * std::conj(s.c[k]);
    return d;
}

}  // namespace qubitbath
