// composite.hpp — Exact system (x) telegraph-bath dynamics and convergence to the Poisson master equation
//
// Ordering of the composite space is system (x) bath; the bath is the 4-dim two-qubit space of
// telegraph_bath.hpp and H_int = lambda (L (x) s1+ s2- + L^dag (x) s1- s2+).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/operator.hpp"
#include "poissonbath/poisson_generator.hpp"
#include "poissonbath/propagate.hpp"
#include "poissonbath/telegraph_bath.hpp"

namespace poissonbath {

inline constexpr std::size_t kBathDim = 4;
inline constexpr std::size_t kMaxCompositeDim = 128;
// Above this composite dimension the generator is applied matrix-free.
inline constexpr std::size_t kDenseCompositeDim = 32;

struct CompositeSetup {
    Operator h_s;
    Operator l;
    bath::BathParams bath;
    DensityMatrix rho_s0;

    std::size_t system_dim() const noexcept { return static_cast<std::size_t>(h_s.rows()); }
    std::size_t composite_dim() const noexcept { return system_dim() * kBathDim; }

    void validate() const {
        detail::require_square(h_s, "H_S");
        detail::require_same_dim(h_s, l, "H_S vs L");
        if (rho_s0.dim() != system_dim()) throw DimensionMismatch("initial system state does not match H_S");
        if (!is_hermitian(h_s)) throw NonHermitianInput("H_S is not Hermitian");
        bath.validate();
    }
};

inline Operator composite_hamiltonian(const CompositeSetup& s) {
    s.validate();
    const Operator is = identity(s.system_dim());
    const Operator ib = identity(kBathDim);
    return kron(s.h_s, ib) + kron(is, bath::hamiltonian(s.bath)) +
           kron(s.l, bath::coupling(s.bath, bath::Sign::minus)) +
           kron(Operator(s.l.adjoint()), bath::coupling(s.bath, bath::Sign::plus));
}

inline std::vector<Jump> composite_jumps(const CompositeSetup& s) {
    const Operator is = identity(s.system_dim());
    std::vector<Jump> jumps;
    for (const auto& j : bath::dissipative_jumps(s.bath)) jumps.push_back({j.rate, kron(is, j.op)});
    return jumps;
}

inline SuperOperator composite_liouvillian(const CompositeSetup& s) {
    return gksl_liouvillian(composite_hamiltonian(s), composite_jumps(s));
}

inline GkslGenerator composite_generator(const CompositeSetup& s) {
    return GkslGenerator(composite_hamiltonian(s), composite_jumps(s));
}

/// rho_S(0) (x) rho_B^eq
inline DensityMatrix composite_initial_state(const CompositeSetup& s) {
    s.validate();
    return DensityMatrix(kron(s.rho_s0.op(), bath::bath_gibbs(s.bath).op()));
}

inline Operator partial_trace_bath(const Operator& rho_sb, std::size_t bath_dim = kBathDim) {
    detail::require_square(rho_sb, "composite operator");
    const auto db = static_cast<Eigen::Index>(bath_dim);
    if (bath_dim == 0 || rho_sb.rows() % db != 0) throw DimensionMismatch("composite dimension not divisible by bath dimension");
    const Eigen::Index ds = rho_sb.rows() / db;
    Operator out = Operator::Zero(ds, ds);
    for (Eigen::Index i = 0; i < ds; ++i) {
        for (Eigen::Index j = 0; j < ds; ++j) {
            Complex acc = 0.0;
            for (Eigen::Index b = 0; b < db; ++b) acc += rho_sb(i * db + b, j * db + b);
            out(i, j) = acc;
        }
    }
    return out;
}

inline Operator partial_trace_system(const Operator& rho_sb, std::size_t bath_dim = kBathDim) {
    detail::require_square(rho_sb, "composite operator");
    const auto db = static_cast<Eigen::Index>(bath_dim);
    if (bath_dim == 0 || rho_sb.rows() % db != 0) throw DimensionMismatch("composite dimension not divisible by bath dimension");
    const Eigen::Index ds = rho_sb.rows() / db;
    Operator out = Operator::Zero(db, db);
    for (Eigen::Index i = 0; i < ds; ++i) out += rho_sb.block(i * db, i * db, db, db);
    return out;
}

inline void check_composite_cost(const CompositeSetup& s) {
    if (s.composite_dim() > kMaxCompositeDim) {
        throw CostGuardExceeded("composite dimension " + std::to_string(s.composite_dim()) + " exceeds " +
                                std::to_string(kMaxCompositeDim) + "; use the symmetric representation");
    }
}

namespace detail {

/// Runs f(generator) with a dense generator for small spaces and a matrix-free one otherwise.
template <typename F>
decltype(auto) with_composite_generator(const CompositeSetup& s, F&& f) {
    check_composite_cost(s);
    if (s.composite_dim() <= kDenseCompositeDim) return f(composite_liouvillian(s));
    return f(composite_generator(s));
}

} // namespace detail

/// Tr_B rho_SB(t) on the requested grid (starting from rho_S(0) (x) rho_B^eq at t = 0).
inline Trajectory reduced_trajectory(const CompositeSetup& s, const std::vector<double>& times,
                                     const PropagationOptions& opt = {}) {
    s.validate();
    const LiouvilleVector v0 = composite_initial_state(s).vectorized();
    const auto vs = detail::with_composite_generator(s, [&](const auto& gen) { return evolve(gen, v0, times, opt); });
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Operator full = unvectorize(vs[i]);
        if (std::abs(full.trace() - 1.0) > 1e-8) {
            throw ToleranceNotMet("composite trace drifted at t = " + std::to_string(times[i]));
        }
        try {
            traj.states.emplace_back(partial_trace_bath(full), kTrajectoryTolerance);
        } catch (const Error& e) {
            throw ToleranceNotMet("reduced state at t = " + std::to_string(times[i]) + " invalid: " + e.what());
        }
    }
    return traj;
}

// ----------------------------------------------------------------------------
// Convergence toward the Poisson master equation
// ----------------------------------------------------------------------------

struct ConvergenceSetup {
    Operator h_s;
    Operator l;
    DensityMatrix rho_s0;
    double omega1 = 3.0;
    double omega2 = 2.0;
    double gamma_plus1 = 0.0;
    double gamma_plus2 = 1.0;
    double mu = 0.5;
    std::vector<double> gamma_minus; // ascending ladder, Gamma_1^- = Gamma_2^-
    std::vector<double> times;
    std::vector<std::pair<std::string, Operator>> observables;
};

struct ConvergenceRow {
    double gamma_minus = 0.0;
    double lambda = 0.0;
    std::string observable;
    double max_dev = 0.0;
    double final_dev = 0.0;
    double markov_ratio = 0.0; // max(G1+, G2+) / G1-
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    Trajectory poisson;                 // Poisson master-equation reference
    std::vector<Trajectory> composite;  // one per ladder rung
};

/// Bath parameters of one rung: Gamma_i^- = gamma_minus, lambda = mu * gamma_minus.
inline bath::BathParams ladder_bath(const ConvergenceSetup& c, double gamma_minus) {
    bath::BathParams b;
    b.omega1 = c.omega1;
    b.omega2 = c.omega2;
    b.gamma_plus1 = c.gamma_plus1;
    b.gamma_plus2 = c.gamma_plus2;
    b.gamma_minus1 = gamma_minus;
    b.gamma_minus2 = gamma_minus;
    b.lambda = c.mu * gamma_minus;
    return b;
}

inline PoissonMEParams poisson_params(const ConvergenceSetup& c) {
    return PoissonMEParams{c.h_s, c.l, c.mu, c.gamma_plus1, c.gamma_plus2};
}

inline ConvergenceResult convergence_study(const ConvergenceSetup& c, const PropagationOptions& opt = {}) {
    if (c.gamma_minus.empty()) throw InvalidArgument("convergence_study: empty Gamma^- ladder");
    if (!std::is_sorted(c.gamma_minus.begin(), c.gamma_minus.end())) {
        throw InvalidArgument("convergence_study: Gamma^- ladder must be ascending");
    }
    ConvergenceResult res;
    res.poisson = propagate(PoissonGenerator(poisson_params(c)), c.rho_s0, c.times, opt);
    for (const auto& [name, op] : c.observables) res.poisson.add_observable(name, op);

    for (const double gm : c.gamma_minus) {
        const CompositeSetup s{c.h_s, c.l, ladder_bath(c, gm), c.rho_s0};
        Trajectory traj = reduced_trajectory(s, c.times, opt);
        for (const auto& [name, op] : c.observables) {
            traj.add_observable(name, op);
            const auto& a = traj.observables.at(name);
            const auto& b = res.poisson.observables.at(name);
            ConvergenceRow row;
            row.gamma_minus = gm;
            row.lambda = s.bath.lambda;
            row.observable = name;
            for (std::size_t i = 0; i < a.size(); ++i) row.max_dev = std::max(row.max_dev, std::abs(a[i] - b[i]));
            row.final_dev = std::abs(a.back() - b.back());
            row.markov_ratio = std::max(c.gamma_plus1, c.gamma_plus2) / gm;
            res.rows.push_back(std::move(row));
        }
        res.composite.push_back(std::move(traj));
    }
    return res;
}

} // namespace poissonbath
