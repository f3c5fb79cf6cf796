#pragma once

#include "qubitbath/algebra.hpp"

namespace qubitbath {

/// tr(rho^2).
double purity(const DensityMatrix& rho);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), where l_k are the descending
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy). Complex
/// conjugation is taken in the computational basis {|11>, |10>, |01>, |00>}.
double concurrence(const DensityMatrix& rho);

/// (1/2) sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct SanityReport {
    double trace = 0.0;        // Re tr(rho)
    double min_eig = 0.0;      // smallest eigenvalue of (rho + rho^dagger)/2
    double herm_defect = 0.0;  // max |rho - rho^dagger|
};

SanityReport sanity_monitor(const DensityMatrix& rho);

struct ObservableRecord {
    double t = 0.0;
    double purity = 0.0;
    double concurrence = 0.0;
    double trace = 0.0;
    double min_eig = 0.0;
    double herm_defect = 0.0;
};

ObservableRecord observe(double t, const DensityMatrix& rho);

}  // namespace qubitbath
