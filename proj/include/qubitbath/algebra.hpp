#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace qubitbath {

using cd = std::complex<double>;
inline constexpr cd I{0.0, 1.0};

/// Dense 2x2 complex matrix, used for single-qubit factors.
struct ComplexMatrix2 {
    std::array<cd, 4> m{};

    cd& operator()(std::size_t r, std::size_t c) { return m[2 * r + c]; }
    const cd& operator()(std::size_t r, std::size_t c) const { return m[2 * r + c]; }
};

/// Dense 4x4 complex matrix on the two-qubit space.
///
/// Row/column index k labels the basis state {|11>, |10>, |01>, |00>}[k] with
/// qubit A as the left tensor factor.
class ComplexMatrix4 {
public:
    static constexpr std::size_t dim = 4;

    ComplexMatrix4() = default;

    static ComplexMatrix4 zero() { return {}; }
    static ComplexMatrix4 identity();
    static ComplexMatrix4 diagonal(const std::array<cd, 4>& d);

    cd& operator()(std::size_t r, std::size_t c) { return m_[dim * r + c]; }
    const cd& operator()(std::size_t r, std::size_t c) const { return m_[dim * r + c]; }

    const std::array<cd, 16>& data() const { return m_; }
    std::array<cd, 16>& data() { return m_; }

    ComplexMatrix4 adjoint() const;
    ComplexMatrix4 conjugate() const;
    cd trace() const;

    ComplexMatrix4& operator+=(const ComplexMatrix4& o);
    ComplexMatrix4& operator-=(const ComplexMatrix4& o);
    ComplexMatrix4& operator*=(cd s);

    friend ComplexMatrix4 operator+(ComplexMatrix4 a, const ComplexMatrix4& b) { return a += b; }
    friend ComplexMatrix4 operator-(ComplexMatrix4 a, const ComplexMatrix4& b) { return a -= b; }
    friend ComplexMatrix4 operator*(ComplexMatrix4 a, cd s) { return a *= s; }
    friend ComplexMatrix4 operator*(cd s, ComplexMatrix4 a) { return a *= s; }
    friend ComplexMatrix4 operator*(const ComplexMatrix4& a, const ComplexMatrix4& b);

    friend bool operator==(const ComplexMatrix4&, const ComplexMatrix4&) = default;

private:
    std::array<cd, 16> m_{};
};

ComplexMatrix4 commutator(const ComplexMatrix4& a, const ComplexMatrix4& b);

/// Largest entrywise modulus of a - b.
double max_abs_diff(const ComplexMatrix4& a, const ComplexMatrix4& b);

/// Largest entrywise modulus of m - m^dagger.
double hermiticity_defect(const ComplexMatrix4& m);

/// Kronecker product a (x) b with a acting on qubit A.
ComplexMatrix4 kron(const ComplexMatrix2& a, const ComplexMatrix2& b);

struct SystemParams {
    double omega_a = 0.0;
    double omega_b = 0.0;
    double j_xy = 0.0;
    double j_z = 0.0;
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double gamma = 1.0;  // inverse bath memory time

    /// True when omega_a == omega_b and kappa_a == kappa_b.
    bool symmetric() const { return omega_a == omega_b && kappa_a == kappa_b; }
};

/// Throws ValidationError unless gamma > 0, kappas >= 0 and every field is finite.
void validate(const SystemParams& p);

enum class Qubit { A, B };
enum class PauliKind { Plus, Minus, Z };

/// sigma_kind on the named qubit, identity on the other. Built from explicit tables.
ComplexMatrix4 pauli_embedded(Qubit q, PauliKind kind);

/// Single-qubit sigma_kind in the {|1>, |0>} basis.
ComplexMatrix2 pauli2(PauliKind kind);
ComplexMatrix2 identity2();

/// H = wA szA + wB szB + Jxy (s+A s-B + s-A s+B) + Jz szA szB.
ComplexMatrix4 build_hamiltonian(const SystemParams& p);

/// L = kappa_a s-A + kappa_b s-B.
ComplexMatrix4 build_lowering(const SystemParams& p);

/// Unnormalized amplitudes (c1..c4) on {|11>, |10>, |01>, |00>}.
struct PureState4 {
    std::array<cd, 4> c{};

    double norm_squared() const;
    PureState4 normalized() const;
};

struct DensityMatrix {
    ComplexMatrix4 rho;
};

/// |psi><psi| without normalization.
DensityMatrix density_from_pure(const PureState4& s);

}  // namespace qubitbath
