// telegraph_bath.hpp — Dissipative two-qubit bath: generator, Gibbs state and n-point correlators
//
// The bath couples to the system through B^+ = lambda s1^- s2^+ and B^- = lambda s1^+ s2^-.
// A correlator index carries (l, k): l = + multiplies from the left, l = - from the right,
// k selects B^k. Bath space ordering is qubit 1 (x) qubit 2.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/operator.hpp"

namespace poissonbath::bath {

enum class Sign : int { plus = 1, minus = -1 };

inline int value(Sign s) { return static_cast<int>(s); }
inline Sign operator*(Sign a, Sign b) { return value(a) * value(b) > 0 ? Sign::plus : Sign::minus; }
inline Sign operator-(Sign a) { return a == Sign::plus ? Sign::minus : Sign::plus; }
inline char symbol(Sign s) { return s == Sign::plus ? '+' : '-'; }

struct BathParams {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double gamma_plus1 = 0.0;
    double gamma_minus1 = 1.0;
    double gamma_plus2 = 0.0;
    double gamma_minus2 = 1.0;
    double lambda = 0.0;
    double beta = std::nan(""); // set only in detailed-balance mode

    /// Rates obeying Gamma_i^- / Gamma_i^+ = exp(beta omega_i).
    static BathParams detailed_balance(double omega1, double omega2, double gamma_minus1, double gamma_minus2,
                                       double beta, double lambda) {
        BathParams p;
        p.omega1 = omega1;
        p.omega2 = omega2;
        p.gamma_minus1 = gamma_minus1;
        p.gamma_minus2 = gamma_minus2;
        p.gamma_plus1 = gamma_minus1 * std::exp(-beta * omega1);
        p.gamma_plus2 = gamma_minus2 * std::exp(-beta * omega2);
        p.lambda = lambda;
        p.beta = beta;
        p.validate();
        return p;
    }

    double gamma1() const { return gamma_plus1 + gamma_minus1; }
    double gamma2() const { return gamma_plus2 + gamma_minus2; }
    double delta_omega() const { return omega1 - omega2; }
    double mu() const { return lambda / gamma_minus1; }
    double correlation_time() const { return 1.0 / gamma_minus1; }

    void validate() const {
        for (double r : {gamma_plus1, gamma_minus1, gamma_plus2, gamma_minus2}) {
            if (!(r >= 0.0) || !std::isfinite(r)) throw NegativeRate("bath rates must be finite and >= 0");
        }
        if (!(gamma1() > 0.0) || !(gamma2() > 0.0)) {
            throw InvalidArgument("bath requires gamma_i = Gamma_i^+ + Gamma_i^- > 0");
        }
        if (!std::isfinite(mu())) throw InvalidArgument("mu = lambda / Gamma_1^- is not finite");
        if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(lambda)) {
            throw InvalidArgument("bath frequencies and coupling must be finite");
        }
    }
};

struct CorrelatorIndex {
    Sign l = Sign::plus; // + : left multiplication, - : right multiplication
    Sign k = Sign::plus; // selects B^k
};

struct CorrelatorSpec {
    std::vector<CorrelatorIndex> indices;
    std::vector<double> times; // t_1 >= t_2 >= ... >= t_n >= 0

    void validate() const {
        if (indices.size() != times.size()) throw DimensionMismatch("correlator indices and times differ in length");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(times[i] >= 0.0)) throw InvalidArgument("correlator times must be >= 0");
            if (i > 0 && times[i] > times[i - 1]) throw InvalidArgument("correlator times must be descending");
        }
    }
};

// ----------------------------------------------------------------------------
// Operators on the 4-dimensional bath space
// ----------------------------------------------------------------------------

inline Operator sigma_plus(int qubit) { return ops::embed(ops::sigma_plus(), static_cast<std::size_t>(qubit - 1), 2); }
inline Operator sigma_minus(int qubit) { return ops::embed(ops::sigma_minus(), static_cast<std::size_t>(qubit - 1), 2); }
inline Operator sigma_z(int qubit) { return ops::embed(ops::sigma_z(), static_cast<std::size_t>(qubit - 1), 2); }

inline Operator hamiltonian(const BathParams& p) { return 0.5 * p.omega1 * sigma_z(1) + 0.5 * p.omega2 * sigma_z(2); }

/// B^k as a bath operator (without the left/right label).
inline Operator coupling(const BathParams& p, Sign k) {
    return k == Sign::plus ? Operator(p.lambda * sigma_minus(1) * sigma_plus(2))
                           : Operator(p.lambda * sigma_plus(1) * sigma_minus(2));
}

inline SuperOperator coupling_superop(const BathParams& p, CorrelatorIndex idx) {
    const Operator b = coupling(p, idx.k);
    return idx.l == Sign::plus ? left(b) : right(b);
}

/// |g1,e2><g1,e2| for Sign::plus, |e1,g2><e1,g2| for Sign::minus.
inline Operator excited_pair_state(Sign s) {
    Operator r = Operator::Zero(4, 4);
    const Eigen::Index idx = s == Sign::plus ? 1 : 2;
    r(idx, idx) = 1.0;
    return r;
}

inline std::vector<Jump> dissipative_jumps(const BathParams& p) {
    return {{p.gamma_plus1, sigma_plus(1)},
            {p.gamma_minus1, sigma_minus(1)},
            {p.gamma_plus2, sigma_plus(2)},
            {p.gamma_minus2, sigma_minus(2)}};
}

inline SuperOperator bath_liouvillian(const BathParams& p) {
    p.validate();
    return gksl_liouvillian(hamiltonian(p), dissipative_jumps(p));
}

inline Operator single_qubit_gibbs(double gamma_plus, double gamma_minus) {
    return (gamma_minus * ops::projector_g() + gamma_plus * ops::projector_e()) / (gamma_plus + gamma_minus);
}

inline DensityMatrix bath_gibbs(const BathParams& p) {
    p.validate();
    return DensityMatrix(kron(single_qubit_gibbs(p.gamma_plus1, p.gamma_minus1),
                              single_qubit_gibbs(p.gamma_plus2, p.gamma_minus2)));
}

/// Q = 1 - rho_eq Tr
inline SuperOperator complement_projector(const BathParams& p) {
    const LiouvilleVector eq = bath_gibbs(p).vectorized();
    return SuperOperator(Eigen::MatrixXcd::Identity(16, 16) - eq * trace_row(4));
}

// ----------------------------------------------------------------------------
// Closed forms
// ----------------------------------------------------------------------------

namespace detail {

// Each bath qubit sits in rho_eq + c sigma_z before B^k acts; the product is proportional to
// s1^{-k} (x) s2^{k} with a per-qubit factor depending on whether that qubit sees a raising or
// lowering operator and on the side it is applied from.
inline double qubit_factor(double gamma_plus, double gamma_minus, Sign op, Sign side, double c) {
    const double g = gamma_plus + gamma_minus;
    return value(op) * value(side) < 0 ? gamma_plus / g + c : gamma_minus / g - c;
}

// sigma_z coefficient of exp(L_j s)(|e><e| or |g><g|) relative to rho_eq.
inline double relaxation_offset(double gamma_plus, double gamma_minus, bool excited, double s) {
    const double g = gamma_plus + gamma_minus;
    return (excited ? gamma_minus : -gamma_plus) / g * std::exp(-g * s);
}

inline double pair_factor(const BathParams& p, CorrelatorIndex second, double c1, double c2) {
    return qubit_factor(p.gamma_plus1, p.gamma_minus1, -second.k, second.l, c1) *
           qubit_factor(p.gamma_plus2, p.gamma_minus2, second.k, second.l, c2);
}

inline Complex envelope(const BathParams& p, Sign k2, double t) {
    const double phase = value(k2) * p.delta_omega() * t;
    return std::exp(-0.5 * (p.gamma1() + p.gamma2()) * t) * Complex(std::cos(phase), std::sin(phase));
}

} // namespace detail

/// Tr[B^{k1}_{l1} exp(L_B t) B^{k2}_{l2} rho_eq]
inline Complex two_point_analytic(const BathParams& p, CorrelatorIndex first, CorrelatorIndex second, double t) {
    if (first.k == second.k) return 0.0;
    return p.lambda * p.lambda * detail::pair_factor(p, second, 0.0, 0.0) * detail::envelope(p, second.k, t);
}

/// Tr[B^{k1}_{l1} exp(L_B t) B^{k2}_{l2} exp(L_B s) Q rho_B^{init}]
inline Complex correlationlike_analytic(const BathParams& p, CorrelatorIndex first, CorrelatorIndex second, Sign init,
                                        double t, double s) {
    if (first.k == second.k) return 0.0;
    // rho_B^+ = |g1 e2>, rho_B^- = |e1 g2>
    const bool q1_excited = init == Sign::minus;
    const double c1 = detail::relaxation_offset(p.gamma_plus1, p.gamma_minus1, q1_excited, s);
    const double c2 = detail::relaxation_offset(p.gamma_plus2, p.gamma_minus2, !q1_excited, s);
    const double bracket = detail::pair_factor(p, second, c1, c2) - detail::pair_factor(p, second, 0.0, 0.0);
    return p.lambda * p.lambda * bracket * detail::envelope(p, second.k, t);
}

/// Product form of the 2n-point correlator; odd n vanish.
inline Complex npoint_analytic(const BathParams& p, const CorrelatorSpec& spec) {
    spec.validate();
    const auto n = spec.indices.size();
    if (n == 0) return 1.0;
    if (n % 2 == 1) return 0.0;
    const auto& idx = spec.indices;
    const auto& t = spec.times;
    Complex value = 1.0;
    for (std::size_t j = 0; j + 2 < n; j += 2) {
        const Sign init = idx[j + 2].l * idx[j + 2].k;
        value *= correlationlike_analytic(p, idx[j], idx[j + 1], init, t[j] - t[j + 1], t[j + 1] - t[j + 2]);
    }
    return value * two_point_analytic(p, idx[n - 2], idx[n - 1], t[n - 2] - t[n - 1]);
}

inline constexpr std::size_t kMaxNumericCorrelatorOrder = 6;

/// Literal evaluation of Tr[B_1 e^{L(t1-t2)} Q B_2 ... e^{L(t_{n-1}-t_n)} Q B_n rho_eq].
inline Complex npoint_numeric(const BathParams& p, const CorrelatorSpec& spec) {
    spec.validate();
    const auto n = spec.indices.size();
    if (n > kMaxNumericCorrelatorOrder) {
        throw CostGuardExceeded("npoint_numeric supports n <= 6, got " + std::to_string(n));
    }
    if (n == 0) return 1.0;
    const SuperOperator gen = bath_liouvillian(p);
    const SuperOperator q = complement_projector(p);
    LiouvilleVector v = bath_gibbs(p).vectorized();
    for (std::size_t j = n; j-- > 0;) {
        v = coupling_superop(p, spec.indices[j]).apply(v);
        if (j > 0) {
            v = q.apply(v);
            v = matrix_exponential(Operator(gen.matrix() * (spec.times[j - 1] - spec.times[j]))) * v;
        }
    }
    return trace_row(4) * v;
}

// ----------------------------------------------------------------------------
// White-noise diagnostics
// ----------------------------------------------------------------------------

struct WhiteNoiseArea {
    double area = 0.0;            // closed form of \int_0^\infty |chi_2(t)| dt
    double area_quadrature = 0.0; // adaptive quadrature of the same integral
    double target = 0.0;          // mu^2 Gamma_1^+, the white-noise limit
    double correlation_time = 0.0;
    double noise_rate1 = 0.0;
    double noise_rate2 = 0.0;

    double relative_error() const { return std::abs(area - target) / target; }
};

/// Area under |Tr[B^-_l e^{L_B t} B^+_+ rho_eq]|, whose white-noise limit carries weight mu^2 Gamma_1^+.
inline WhiteNoiseArea whitenoise_area(const BathParams& p) {
    p.validate();
    const CorrelatorIndex first{Sign::plus, Sign::minus};
    const CorrelatorIndex second{Sign::plus, Sign::plus};
    const double rate = 0.5 * (p.gamma1() + p.gamma2());
    const double amplitude = std::abs(two_point_analytic(p, first, second, 0.0));

    WhiteNoiseArea out;
    out.area = amplitude / rate;
    const double horizon = 40.0 / (p.gamma1() + p.gamma2());
    auto integrand = [&](double t) { return std::abs(two_point_analytic(p, first, second, t)); };
    const double body =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, horizon, 15, 1e-10);
    const double tail = amplitude * std::exp(-rate * horizon) / rate;
    out.area_quadrature = body + tail;
    out.target = p.mu() * p.mu() * p.gamma_plus1;
    out.correlation_time = p.correlation_time();
    out.noise_rate1 = p.gamma_plus1;
    out.noise_rate2 = p.gamma_plus2;
    return out;
}

} // namespace poissonbath::bath
