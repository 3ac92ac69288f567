// propagate.hpp — Time evolution of vectorized operators under a time-independent generator

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/operator.hpp"

namespace poissonbath {

/// Anything that maps a Liouville vector to its time derivative.
template <typename G>
concept LinearGenerator = requires(const G& g, const LiouvilleVector& v) {
    { g.hilbert_dim() } -> std::convertible_to<std::size_t>;
    { g.apply(v) } -> std::convertible_to<LiouvilleVector>;
};

template <typename G>
concept DenseGenerator = LinearGenerator<G> && requires(const G& g) {
    { g.matrix() } -> std::convertible_to<Eigen::MatrixXcd>;
};

enum class PropagationMethod {
    automatic, // RK45, or expm stepping when the generator is stiff or stepping stalls
    rk45,
    expm,
};

struct PropagationOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t max_steps_per_interval = 20000;
    PropagationMethod method = PropagationMethod::automatic;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::map<std::string, std::vector<double>> observables;

    std::size_t size() const noexcept { return times.size(); }

    /// Records Re Tr[A rho(t)] under `name`.
    void add_observable(const std::string& name, const Operator& a) {
        std::vector<double> series;
        series.reserve(states.size());
        for (const auto& s : states) series.push_back(expectation(a, s).real());
        observables[name] = std::move(series);
    }
};

namespace detail {

inline void check_time_grid(const std::vector<double>& times) {
    if (times.empty()) {
        throw InvalidArgument("time grid is empty");
    }
    if (!(times.front() >= 0.0)) {
        throw InvalidArgument("time grid must start at t >= 0");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] >= times[i - 1]) || !std::isfinite(times[i])) {
            throw InvalidArgument("time grid must be ascending and finite");
        }
    }
}

inline double induced_one_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Grid with t = 0 prepended when needed. Returns whether it was prepended.
inline bool grid_from_zero(const std::vector<double>& times, std::vector<double>& grid) {
    grid = times;
    if (times.front() > 0.0) {
        grid.insert(grid.begin(), 0.0);
        return true;
    }
    return false;
}

template <DenseGenerator G>
std::vector<LiouvilleVector> evolve_expm(const G& gen, const LiouvilleVector& v0, const std::vector<double>& times) {
    std::vector<double> grid;
    const bool prepended = grid_from_zero(times, grid);
    std::vector<LiouvilleVector> out;
    out.reserve(grid.size());
    std::map<double, Eigen::MatrixXcd> cache;
    LiouvilleVector v = v0;
    out.push_back(v);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid[i] - grid[i - 1];
        if (dt > 0.0) {
            auto it = cache.find(dt);
            if (it == cache.end()) {
                it = cache.emplace(dt, matrix_exponential(Operator(gen.matrix() * dt))).first;
            }
            v = it->second * v;
        }
        out.push_back(v);
    }
    if (prepended) out.erase(out.begin());
    return out;
}

template <LinearGenerator G>
std::vector<LiouvilleVector> evolve_rk45(const G& gen, const LiouvilleVector& v0, const std::vector<double>& times,
                                         const PropagationOptions& opt) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<Complex>;

    std::vector<double> grid;
    const bool prepended = grid_from_zero(times, grid);
    std::vector<LiouvilleVector> out;
    out.reserve(grid.size());

    double min_interval = grid.back() > 0.0 ? grid.back() : 1.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] > grid[i - 1]) min_interval = std::min(min_interval, grid[i] - grid[i - 1]);
    }

    State x(v0.data(), v0.data() + v0.size());
    auto rhs = [&gen](const State& s, State& ds, double) {
        Eigen::Map<const LiouvilleVector> sv(s.data(), static_cast<Eigen::Index>(s.size()));
        const LiouvilleVector d = gen.apply(LiouvilleVector(sv));
        std::copy(d.data(), d.data() + d.size(), ds.begin());
    };
    auto observer = [&out](const State& s, double) {
        out.emplace_back(Eigen::Map<const LiouvilleVector>(s.data(), static_cast<Eigen::Index>(s.size())));
    };

    if (grid.back() == 0.0) {
        for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(v0);
    } else {
        auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
        try {
            odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), 0.1 * min_interval, observer,
                                    odeint::max_step_checker(static_cast<int>(opt.max_steps_per_interval)));
        } catch (const odeint::odeint_error& e) {
            throw StepSizeUnderflow(std::string("adaptive integrator stalled: ") + e.what());
        }
    }
    if (prepended) out.erase(out.begin());
    return out;
}

} // namespace detail

/// Vectors exp(gen t) v0 at each requested time (evolution starts at t = 0).
template <LinearGenerator G>
std::vector<LiouvilleVector> evolve(const G& gen, const LiouvilleVector& v0, const std::vector<double>& times,
                                    const PropagationOptions& opt = {}) {
    detail::check_time_grid(times);
    const auto n = static_cast<Eigen::Index>(gen.hilbert_dim() * gen.hilbert_dim());
    if (v0.size() != n) {
        throw DimensionMismatch("initial vector does not match generator");
    }
    if constexpr (DenseGenerator<G>) {
        if (opt.method == PropagationMethod::expm) {
            return detail::evolve_expm(gen, v0, times);
        }
        if (opt.method == PropagationMethod::automatic) {
            // Explicit steps are limited to ~3/||gen||; compare against one n^3 exponential.
            const double span = times.back();
            const double est_steps = detail::induced_one_norm(gen.matrix()) * span / 3.0;
            const double rk_cost = est_steps * 6.0 * static_cast<double>(n) * static_cast<double>(n);
            const double expm_cost = 30.0 * std::pow(static_cast<double>(n), 3.0);
            if (rk_cost > expm_cost) {
                return detail::evolve_expm(gen, v0, times);
            }
            try {
                return detail::evolve_rk45(gen, v0, times, opt);
            } catch (const StepSizeUnderflow&) {
                return detail::evolve_expm(gen, v0, times);
            }
        }
        return detail::evolve_rk45(gen, v0, times, opt);
    } else {
        if (opt.method == PropagationMethod::expm) {
            throw InvalidArgument("expm propagation needs a dense generator");
        }
        return detail::evolve_rk45(gen, v0, times, opt);
    }
}

/// Tolerances applied to every propagated state.
inline constexpr StateTolerance kTrajectoryTolerance{1e-9, 1e-8, 1e-7};

template <LinearGenerator G>
Trajectory propagate(const G& gen, const DensityMatrix& rho0, const std::vector<double>& times,
                     const PropagationOptions& opt = {}) {
    if (rho0.dim() != gen.hilbert_dim()) {
        throw DimensionMismatch("initial state does not match generator");
    }
    auto vs = evolve(gen, rho0.vectorized(), times, opt);
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        try {
            traj.states.emplace_back(unvectorize(vs[i]), kTrajectoryTolerance);
        } catch (const Error& e) {
            throw ToleranceNotMet("state at t = " + std::to_string(times[i]) + " left the state manifold: " + e.what());
        }
    }
    return traj;
}

} // namespace poissonbath
