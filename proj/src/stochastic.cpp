#include "qubitbath/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qubitbath/integrator.hpp"

namespace qubitbath {

cd NoisePath::at(double t) const {
    const double x = t / dt;
    const auto k = static_cast<std::size_t>(std::floor(x));
    if (k + 1 >= z_star.size()) return z_star.back();
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * z_star[k] + w * z_star[k + 1];
}

std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

NoisePath sample_ou_path(double gamma, double dt, std::size_t n_steps, std::mt19937_64& rng) {
    if (!(gamma > 0.0) || !(dt > 0.0)) throw std::invalid_argument("sample_ou_path needs gamma > 0 and dt > 0");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));  // circular: E|xi|^2 = 1
    auto xi = [&] {
        const double re = normal(rng);
        const double im = normal(rng);
        return cd{re, im};
    };
    const double decay = std::exp(-gamma * dt);
    const double kick = std::sqrt(0.5 * gamma * (1.0 - decay * decay));
    NoisePath path;
    path.dt = dt;
    path.z_star.resize(n_steps + 1);
    cd z = std::sqrt(0.5 * gamma) * xi();
    path.z_star[0] = std::conj(z);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        z = z * decay + kick * xi();
        path.z_star[k] = std::conj(z);
    }
    return path;
}

NoisePath sample_ou_path(double gamma, double dt, double t_final, std::uint64_t seed) {
    auto rng = keyed_rng(seed, 0);
    const auto n = static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-9)));
    return sample_ou_path(gamma, dt, n, rng);
}

CoefficientTable tabulate_coefficients(const SystemParams& p, double dt, std::size_t n_steps) {
    CoefficientTable tab;
    tab.dt = dt;
    tab.half_steps.reserve(2 * n_steps + 1);
    constexpr std::size_t n = CoefficientState::size;
    auto rhs = [&](double, const StateVector<n>& y) { return coefficient_rhs_exact(CoefficientState::unpack(y), p).pack(); };
    StateVector<n> y{};
    tab.half_steps.push_back(CoefficientState{});
    const double h = 0.5 * dt;
    for (std::size_t i = 0; i < 2 * n_steps; ++i) {
        y = rk4_step<n>(rhs, h * static_cast<double>(i), y, h);
        tab.half_steps.push_back(CoefficientState::unpack(y));
    }
    return tab;
}

namespace {

void require_symmetric(const SystemParams& p) {
    if (!p.symmetric())
        throw std::invalid_argument("trajectory equations hold only for omega_a == omega_b and kappa_a == kappa_b");
}

}  // namespace

TrajectoryState trajectory_rhs(const TrajectoryState& s, cd z_star, const CoefficientState& c, const SystemParams& p) {
    const double w = p.omega_a, k = p.kappa_a, jz = p.j_z, jxy = p.j_xy;
    const cd c1 = s.c.c[0], c2 = s.c.c[1], c3 = s.c.c[2], c4 = s.c.c[3];
    const cd fhat5 = I * s.fhat5_accum;
    const cd b1 = c.fbar[0], b3 = c.fbar[2];
    const cd plus = b1 + b3;
    const cd minus = b1 - b3;
    const cd drive = k * z_star * c1 - 2.0 * k * fhat5 * c1;

    TrajectoryState d;
    d.c.c[0] = -I * (2.0 * w + jz) * c1 - 2.0 * k * plus * c1;
    d.c.c[1] = drive + I * jz * c2 - k * minus * c2 - I * jxy * c3 - k * minus * c3;
    d.c.c[2] = drive + I * jz * c3 - k * minus * c2 - I * jxy * c2 - k * minus * c3;
    d.c.c[3] = k * z_star * (c2 + c3) - I * (jz - 2.0 * w) * c4;
    d.fhat5_accum = fbar5_growth_rate(c, p) * s.fhat5_accum + fbar5_diagonal(c, p) * z_star;
    return d;
}

TrajectoryState trajectory_step(const TrajectoryState& s, const NoisePath& noise, const CoefficientTable& coeffs,
                                const SystemParams& p, std::size_t n) {
    require_symmetric(p);
    if (n + 1 >= noise.z_star.size() || 2 * n + 2 >= coeffs.half_steps.size())
        throw std::out_of_range("trajectory_step beyond noise or coefficient grid");
    const double h = noise.dt;
    const cd z0 = noise.z_star[n];
    const cd z1 = noise.z_star[n + 1];
    const cd zm = 0.5 * (z0 + z1);
    const auto& c0 = coeffs.half_steps[2 * n];
    const auto& cm = coeffs.half_steps[2 * n + 1];
    const auto& c1 = coeffs.half_steps[2 * n + 2];

    auto axpy = [](const TrajectoryState& a, double f, const TrajectoryState& d) {
        TrajectoryState r;
        for (std::size_t j = 0; j < 4; ++j) r.c.c[j] = a.c.c[j] + f * d.c.c[j];
        r.fhat5_accum = a.fhat5_accum + f * d.fhat5_accum;
        return r;
    };
    const TrajectoryState k1 = trajectory_rhs(s, z0, c0, p);
    const TrajectoryState k2 = trajectory_rhs(axpy(s, 0.5 * h, k1), zm, cm, p);
    const TrajectoryState k3 = trajectory_rhs(axpy(s, 0.5 * h, k2), zm, cm, p);
    const TrajectoryState k4 = trajectory_rhs(axpy(s, h, k3), z1, c1, p);
    TrajectoryState out;
    for (std::size_t j = 0; j < 4; ++j)
        out.c.c[j] = s.c.c[j] + (h / 6.0) * (k1.c.c[j] + 2.0 * k2.c.c[j] + 2.0 * k3.c.c[j] + k4.c.c[j]);
    out.fhat5_accum =
        s.fhat5_accum + (h / 6.0) * (k1.fhat5_accum + 2.0 * k2.fhat5_accum + 2.0 * k3.fhat5_accum + k4.fhat5_accum);
    return out;
}

EnsembleResult ensemble_average(const SystemParams& p, const PureState4& psi0, const EnsembleConfig& cfg,
                                std::span<const double> t_grid) {
    validate(p);
    require_symmetric(p);
    if (cfg.n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("ensemble dt must be > 0");

    std::vector<std::size_t> out_steps;
    for (double t : t_grid) {
        const double x = t / cfg.dt;
        const double r = std::round(x);
        if (t < 0.0 || std::abs(x - r) > 1e-6 * std::max(1.0, x))
            throw std::invalid_argument("ensemble output times must be multiples of dt");
        out_steps.push_back(static_cast<std::size_t>(r));
    }
    if (!std::is_sorted(out_steps.begin(), out_steps.end()))
        throw std::invalid_argument("ensemble output times must be sorted");
    const std::size_t n_steps = out_steps.empty() ? 0 : out_steps.back();
    const CoefficientTable table = tabulate_coefficients(p, cfg.dt, n_steps);

    // Fixed chunking keeps the summation order independent of the thread count.
    constexpr std::size_t chunk = 64;
    const std::size_t n_chunks = (cfg.n_traj + chunk - 1) / chunk;
    std::vector<std::vector<ComplexMatrix4>> partial(n_chunks, std::vector<ComplexMatrix4>(out_steps.size()));

    auto run_chunk = [&](std::size_t ci) {
        auto& acc = partial[ci];
        const std::size_t first = ci * chunk;
        const std::size_t last = std::min(cfg.n_traj, first + chunk);
        for (std::size_t traj = first; traj < last; ++traj) {
            auto rng = keyed_rng(cfg.seed, traj);
            const NoisePath noise = sample_ou_path(p.gamma, cfg.dt, n_steps, rng);
            TrajectoryState s;
            s.c = psi0;
            std::size_t o = 0;
            for (std::size_t n = 0; n <= n_steps; ++n) {
                while (o < out_steps.size() && out_steps[o] == n) acc[o++] += density_from_pure(s.c).rho;
                if (n < n_steps) s = trajectory_step(s, noise, table, p, n);
            }
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
    if (threads <= 1) {
        for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t ci = next++; ci < n_chunks; ci = next++) run_chunk(ci);
            });
    }

    EnsembleResult res;
    const double inv = 1.0 / static_cast<double>(cfg.n_traj);
    for (std::size_t o = 0; o < out_steps.size(); ++o) {
        ComplexMatrix4 sum;
        for (std::size_t ci = 0; ci < n_chunks; ++ci) sum += partial[ci][o];
        sum *= inv;
        res.t.push_back(t_grid[o]);
        res.rho.push_back({sum});
        res.trace_drift.push_back(std::abs(sum.trace().real() - 1.0));
    }
    return res;
}

}  // namespace qubitbath
