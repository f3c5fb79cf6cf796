#include "qubitbath/pseudomode.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "qubitbath/errors.hpp"
#include "qubitbath/integrator.hpp"

namespace qubitbath {

namespace {

constexpr int kModes = pseudomode_max_quanta + 1;
constexpr int kDim = 4 * kModes;
using Mat = Eigen::Matrix<cd, kDim, kDim>;

// system index i, mode quanta n -> kModes * i + n
Mat embed_system(const ComplexMatrix4& a) {
    Mat m = Mat::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int n = 0; n < kModes; ++n) m(kModes * i + n, kModes * j + n) = a(i, j);
    return m;
}

Mat mode_annihilation() {
    Mat m = Mat::Zero();
    for (int i = 0; i < 4; ++i)
        for (int n = 1; n < kModes; ++n) m(kModes * i + n - 1, kModes * i + n) = std::sqrt(static_cast<double>(n));
    return m;
}

int excitations(int basis_index) {
    // |11>, |10>, |01>, |00>
    static constexpr int n[] = {2, 1, 1, 0};
    return n[basis_index];
}

}  // namespace

std::vector<DensityMatrix> pseudomode_reference(const SystemParams& p, const DensityMatrix& rho0,
                                                std::span<const double> t_grid, const IntegratorConfig& cfg,
                                                const PseudomodeOptions& opt) {
    validate(p);
    if (opt.initial_mode_quanta < 0) throw ValidationError("initial mode quanta must be >= 0");
    int max_sys = 0;
    for (int i = 0; i < 4; ++i)
        if (std::abs(rho0.rho(i, i)) > 0.0) max_sys = std::max(max_sys, excitations(i));
    if (max_sys + opt.initial_mode_quanta > pseudomode_max_quanta)
        throw ValidationError("initial excitations (" + std::to_string(max_sys + opt.initial_mode_quanta) +
                              ") exceed the pseudomode truncation of " + std::to_string(pseudomode_max_quanta));

    const double g = opt.coupling.value_or(std::sqrt(0.5 * p.gamma));
    const double decay = 2.0 * p.gamma;
    const Mat b = mode_annihilation();
    const Mat bd = b.adjoint();
    const Mat l = embed_system(build_lowering(p));
    const Mat h = embed_system(build_hamiltonian(p)) + g * (bd * l + b * l.adjoint());
    const Mat bdb = bd * b;

    Mat r0 = Mat::Zero();
    const int q = opt.initial_mode_quanta;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r0(kModes * i + q, kModes * j + q) = rho0.rho(i, j);

    constexpr std::size_t n = kDim * kDim;
    auto to_mat = [](const StateVector<n>& y) { return Eigen::Map<const Mat>(y.data()); };
    auto rhs = [&](double, const StateVector<n>& y) {
        const Mat r = to_mat(y);
        const Mat hr = h * r;
        const Mat d = -I * (hr - hr.adjoint()) + decay * (b * r * bd - 0.5 * (bdb * r + r * bdb));
        StateVector<n> out;
        Eigen::Map<Mat>(out.data()) = d;
        return out;
    };

    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    auto emit = [&](double, const StateVector<n>& y) {
        const Mat r = to_mat(y);
        DensityMatrix red;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cd s{};
                for (int m = 0; m < kModes; ++m) s += r(kModes * i + m, kModes * j + m);
                red.rho(i, j) = s;
            }
        out.push_back({0.5 * (red.rho + red.rho.adjoint())});
    };

    StateVector<n> y0;
    Eigen::Map<Mat>(y0.data()) = r0;
    const double max_step = cfg.max_step > 0.0 ? cfg.max_step : 0.1 / p.gamma;
    if (cfg.scheme == IntegratorConfig::Scheme::RungeKutta4) {
        integrate_rk4<n>(rhs, y0, 0.0, t_grid, max_step, emit, [](StateVector<n>&) {});
    } else {
        AdaptiveOptions ao;
        ao.abs_tol = cfg.abs_tol;
        ao.rel_tol = cfg.rel_tol;
        ao.max_step = max_step;
        integrate_dopri5<n>(rhs, y0, 0.0, t_grid, ao, emit, [](StateVector<n>&) {});
    }
    return out;
}

}  // namespace qubitbath
