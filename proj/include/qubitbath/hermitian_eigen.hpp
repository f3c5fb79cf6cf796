#pragma once

#include <array>

#include "qubitbath/algebra.hpp"

namespace qubitbath {

/// Eigen-decomposition of a 4x4 Hermitian matrix: a = V diag(values) V^dagger.
/// Values are ascending; column k of `vectors` belongs to values[k].
struct HermitianEigen4 {
    std::array<double, 4> values{};
    ComplexMatrix4 vectors;
};

/// Cyclic complex Jacobi sweeps. Only the Hermitian part (a + a^dagger)/2 is used.
HermitianEigen4 hermitian_eigen(const ComplexMatrix4& a);

/// Eigenvalues only, ascending.
std::array<double, 4> hermitian_eigenvalues(const ComplexMatrix4& a);

/// Singular values, descending (one-sided Jacobi).
std::array<double, 4> singular_values(const ComplexMatrix4& a);

}  // namespace qubitbath
