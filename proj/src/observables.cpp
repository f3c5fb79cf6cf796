#include "qubitbath/observables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qubitbath/hermitian_eigen.hpp"

namespace qubitbath {

double purity(const DensityMatrix& rho) {
    // tr(rho^2) = sum_jk rho_jk rho_kj
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k) s += (rho.rho(j, k) * rho.rho(k, j)).real();
    return s;
}

double concurrence(const DensityMatrix& state) {
    const ComplexMatrix4 rho = 0.5 * (state.rho + state.rho.adjoint());
    const ComplexMatrix2 sy = [] {
        ComplexMatrix2 m;
        m(0, 1) = -I;
        m(1, 0) = I;
        return m;
    }();
    const ComplexMatrix4 flip = kron(sy, sy);
    // Eigenvalues below the solver's roundoff floor are zero; their square roots
    // would otherwise leak ~1e-8 into the spectrum for rank-deficient states.
    const HermitianEigen4 e = hermitian_eigen(rho);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    ComplexMatrix4 sqrt_rho;
    for (std::size_t k = 0; k < 4; ++k) {
        const double s = e.values[k] > floor ? std::sqrt(e.values[k]) : 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) sqrt_rho(i, j) += s * e.vectors(i, k) * std::conj(e.vectors(j, k));
    }
    // sqrt(rho) rho~ sqrt(rho) = A A^dagger with A = sqrt(rho) S sqrt(rho)*, so the l_k are
    // the singular values of A; taking them directly avoids squaring the roundoff.
    const auto lambda = singular_values(sqrt_rho * flip * sqrt_rho.conjugate());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const auto ev = hermitian_eigenvalues(a.rho - b.rho);
    double s = 0.0;
    for (double x : ev) s += std::abs(x);
    return 0.5 * s;
}

SanityReport sanity_monitor(const DensityMatrix& rho) {
    SanityReport r;
    r.trace = rho.rho.trace().real();
    r.min_eig = hermitian_eigenvalues(rho.rho).front();
    r.herm_defect = hermiticity_defect(rho.rho);
    return r;
}

ObservableRecord observe(double t, const DensityMatrix& rho) {
    const SanityReport s = sanity_monitor(rho);
    return {t, purity(rho), concurrence(rho), s.trace, s.min_eig, s.herm_defect};
}

}  // namespace qubitbath
