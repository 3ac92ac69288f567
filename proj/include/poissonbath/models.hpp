// models.hpp — Single-qubit and collective N-spin (Dicke) system models
//
// Basis conventions: index 0 is the all-ground state in every representation. In the full
// representation spin 0 is the most significant bit (1 = excited); in the symmetric
// representation the index counts excitations, |D_{N,k}> = index k.

#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/operator.hpp"
#include "poissonbath/quadrature.hpp"

namespace poissonbath {

enum class Representation { full, symmetric };

inline constexpr std::size_t kMaxFullSpins = 12;
inline constexpr std::size_t kMaxSymmetricSpins = 64;

inline std::string to_string(Representation r) { return r == Representation::full ? "full" : "symmetric"; }

struct CollectiveModel {
    std::size_t n = 1;
    double omega = 1.0;
    Representation representation = Representation::symmetric;
    Operator h; // (omega/2) sum_i sigma_z^i
    Operator l; // sum_i sigma_-^i

    std::size_t dim() const noexcept { return static_cast<std::size_t>(h.rows()); }
    Operator jx() const { return l + l.adjoint(); }
    Operator ground_projector() const {
        Operator p = Operator::Zero(h.rows(), h.cols());
        p(0, 0) = 1.0;
        return p;
    }
};

namespace detail {

inline void check_spin_count(std::size_t n, Representation rep) {
    const std::size_t cap = rep == Representation::full ? kMaxFullSpins : kMaxSymmetricSpins;
    if (n < 1 || n > cap) {
        throw SizeGuardExceeded("collective model with N = " + std::to_string(n) + " outside [1, " +
                                std::to_string(cap) + "] for the " + to_string(rep) + " representation");
    }
}

inline double binomial(std::size_t n, std::size_t k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

} // namespace detail

/// Collective model H_S = (omega/2) sum sigma_z, L = sum sigma_-.
inline CollectiveModel collective_model(std::size_t n, double omega, Representation rep = Representation::symmetric) {
    detail::check_spin_count(n, rep);
    if (!std::isfinite(omega)) throw InvalidArgument("omega must be finite");
    CollectiveModel m;
    m.n = n;
    m.omega = omega;
    m.representation = rep;
    if (rep == Representation::symmetric) {
        const auto d = static_cast<Eigen::Index>(n + 1);
        const double j = 0.5 * static_cast<double>(n);
        m.h = Operator::Zero(d, d);
        m.l = Operator::Zero(d, d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const double mz = static_cast<double>(k) - j;
            m.h(k, k) = omega * mz;
            if (k > 0) m.l(k - 1, k) = std::sqrt(j * (j + 1.0) - mz * (mz - 1.0));
        }
    } else {
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
        m.h = Operator::Zero(d, d);
        m.l = Operator::Zero(d, d);
        for (Eigen::Index b = 0; b < d; ++b) {
            const auto bits = static_cast<std::uint64_t>(b);
            m.h(b, b) = omega * (static_cast<double>(std::popcount(bits)) - 0.5 * static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint64_t mask = std::uint64_t{1} << (n - 1 - i);
                if (bits & mask) m.l(static_cast<Eigen::Index>(bits & ~mask), b) = 1.0;
            }
        }
    }
    return m;
}

inline CollectiveModel single_qubit(double omega) { return collective_model(1, omega, Representation::symmetric); }

/// |D_{N,k}>: normalized, permutation-symmetric state with k excitations.
inline Eigen::VectorXcd dicke_state(std::size_t n, std::size_t k, Representation rep = Representation::symmetric) {
    detail::check_spin_count(n, rep);
    if (k > n) throw InvalidArgument("Dicke excitation count exceeds N");
    if (rep == Representation::symmetric) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n + 1));
        v(static_cast<Eigen::Index>(k)) = 1.0;
        return v;
    }
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    const double amp = 1.0 / std::sqrt(detail::binomial(n, k));
    for (Eigen::Index b = 0; b < d; ++b) {
        if (static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(b))) == k) v(b) = amp;
    }
    return v;
}

inline Eigen::VectorXcd dicke_state(const CollectiveModel& m, std::size_t k) { return dicke_state(m.n, k, m.representation); }

/// Isometry whose columns are |D_{N,0}> ... |D_{N,N}> in the full representation.
inline Operator symmetric_embedding(std::size_t n) {
    detail::check_spin_count(n, Representation::full);
    Operator v(static_cast<Eigen::Index>(std::size_t{1} << n), static_cast<Eigen::Index>(n + 1));
    for (std::size_t k = 0; k <= n; ++k) v.col(static_cast<Eigen::Index>(k)) = dicke_state(n, k, Representation::full);
    return v;
}

inline DensityMatrix ground_state(const CollectiveModel& m) { return DensityMatrix::pure(dicke_state(m, 0)); }

/// (|0> + |D_{N,1}>)/sqrt(2)
inline DensityMatrix ground_plus_dicke_state(const CollectiveModel& m) {
    return DensityMatrix::pure(dicke_state(m, 0) + dicke_state(m, 1));
}

/// exp(-beta H)/Tr exp(-beta H), shifted by the lowest eigenvalue for stability.
inline DensityMatrix gibbs_state(const Operator& h, double beta) {
    if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
    const HermitianEig eig = hermitian_eig(h);
    const double shift = beta >= 0.0 ? eig.eigenvalues.minCoeff() : eig.eigenvalues.maxCoeff();
    Operator rho = operator_function(eig, [&](double x) { return std::exp(-beta * (x - shift)); });
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

/// Ground-state probability of the full 2^N-dimensional Gibbs state, from the binomial shell weights.
inline double full_space_gibbs_ground_probability(std::size_t n, double omega, double beta) {
    double z = 0.0;
    for (std::size_t k = 0; k <= n; ++k) z += detail::binomial(n, k) * std::exp(-beta * omega * static_cast<double>(k));
    return 1.0 / z;
}

/// Ground-state probability of the Boltzmann distribution restricted to the symmetric sector.
inline double symmetric_sector_ground_probability(std::size_t n, double omega, double beta) {
    double z = 0.0;
    for (std::size_t k = 0; k <= n; ++k) z += std::exp(-beta * omega * static_cast<double>(k));
    return 1.0 / z;
}

/// Transition rate |D_{N,1}> -> |0> under Poisson noise: 2 G2+ mu^2 N / (1 + 4 mu^2 N).
inline double effective_decay_rate(std::size_t n, double mu, double gamma_plus2) {
    if (n < 1) throw InvalidArgument("N must be >= 1");
    if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
    const double x = mu * mu * static_cast<double>(n);
    return 2.0 * gamma_plus2 * x / (1.0 + 4.0 * x);
}

/// Same rate as G2+ \int p(a) sin^2(a sqrt(N)) da, evaluated by quadrature.
inline double effective_decay_rate_quadrature(std::size_t n, double mu, double gamma_plus2,
                                              const quadrature::Options& opt = {}) {
    if (n < 1) throw InvalidArgument("N must be >= 1");
    const double r = std::sqrt(static_cast<double>(n));
    return gamma_plus2 * quadrature::exponential_average(
                             [r](double a) {
                                 const double s = std::sin(a * r);
                                 return s * s;
                             },
                             mu, opt);
}

/// Gaussian-noise rate 2 G2+ mu^2 N.
inline double gaussian_decay_rate(std::size_t n, double mu, double gamma_plus2) {
    return 2.0 * gamma_plus2 * mu * mu * static_cast<double>(n);
}

} // namespace poissonbath
