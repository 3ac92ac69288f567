// poisson_generator.hpp — Master equation for a system driven by Poisson white noise
//
//   d rho/dt = -i[H, rho] + \int da p(a) { G2+ (D[L_a] + D[M_a]) + G1+ (D[L_a^dag] + D[N_a]) }
//
// with p(a) = exp(-a/mu)/mu and the multiple-jump operators
//   L_a      = -i g_a(L L^dag) L          g_a(x) = sin(a sqrt(x)) / sqrt(x),  g_a(0) = a
//   L_a^dag  = -i g_a(L^dag L) L^dag
//   M_a      = cos(a sqrt(L^dag L)) - 1
//   N_a      = cos(a sqrt(L L^dag)) - 1
//
// The a-average is taken exactly in the eigenbasis of J^dag J (J = L for emission, J = L^dag for
// absorption), where every matrix element reduces to a Laplace transform of sin/cos products.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/operator.hpp"
#include "poissonbath/quadrature.hpp"

namespace poissonbath {

struct PoissonMEParams {
    Operator h;               // system Hamiltonian
    Operator l;               // coupling operator (not necessarily Hermitian)
    double mu = 1.0;          // effective coupling lambda / Gamma_1^-
    double gamma_plus1 = 0.0; // absorption noise rate
    double gamma_plus2 = 0.0; // emission noise rate

    void validate() const {
        detail::require_square(h, "H_S");
        detail::require_same_dim(h, l, "H_S vs L");
        if (!is_hermitian(h)) throw NonHermitianInput("H_S is not Hermitian");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive and finite");
        if (!(gamma_plus1 >= 0.0) || !(gamma_plus2 >= 0.0)) throw NegativeRate("noise rates must be >= 0");
    }
};

/// Probability density of the dimensionless noise strength.
inline double noise_strength_density(double a, double mu) { return a < 0.0 ? 0.0 : std::exp(-a / mu) / mu; }

// ----------------------------------------------------------------------------
// Jump operators at fixed noise strength
// ----------------------------------------------------------------------------

struct JumpFamily {
    double a = 0.0;
    Operator la;
    Operator la_dagger;
    Operator ma;
    Operator na;
};

namespace detail {

// Eigenvalues of J^dag J below this fraction of the largest count as zero.
inline constexpr double kZeroEigenvalueFraction = 1e-12;

inline double zero_threshold(const HermitianEig& eig) {
    return kZeroEigenvalueFraction * std::max(0.0, eig.eigenvalues.maxCoeff());
}

inline double sinc_sqrt(double x, double a, double threshold) {
    if (x <= threshold) return a;
    const double r = std::sqrt(x);
    return std::sin(a * r) / r;
}

// cos(a sqrt(x)) - 1 without cancellation at small a sqrt(x)
inline double cos_sqrt_m1(double x, double a) {
    const double h = std::sin(0.5 * a * std::sqrt(std::max(x, 0.0)));
    return -2.0 * h * h;
}

} // namespace detail

inline JumpFamily jump_family(const Operator& l, double a) {
    detail::require_square(l, "coupling operator");
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("noise strength a must be >= 0");
    const HermitianEig ldl = hermitian_eig(Operator(l.adjoint() * l));
    const HermitianEig lld = hermitian_eig(Operator(l * l.adjoint()));
    const double t1 = detail::zero_threshold(ldl);
    const double t2 = detail::zero_threshold(lld);

    JumpFamily f;
    f.a = a;
    f.la = Complex{0.0, -1.0} * operator_function(lld, [&](double x) { return detail::sinc_sqrt(x, a, t2); }) * l;
    f.la_dagger =
        Complex{0.0, -1.0} * operator_function(ldl, [&](double x) { return detail::sinc_sqrt(x, a, t1); }) * l.adjoint();
    f.ma = operator_function(ldl, [&](double x) { return detail::cos_sqrt_m1(x, a); });
    f.na = operator_function(lld, [&](double x) { return detail::cos_sqrt_m1(x, a); });
    return f;
}

// ----------------------------------------------------------------------------
// Averaged dissipators
// ----------------------------------------------------------------------------

enum class NoiseChannel {
    emission,   // D[L_a] + D[M_a], weighted by Gamma_2^+
    absorption, // D[L_a^dag] + D[N_a], weighted by Gamma_1^+
};

/// \int da p(a) (D[-i J g_a(J^dag J)] + D[cos(a sqrt(J^dag J)) - 1]) in the eigenbasis of J^dag J.
class AveragedJumpBlock {
public:
    AveragedJumpBlock(const Operator& jump, double mu) : dim_(static_cast<std::size_t>(jump.rows())) {
        detail::require_square(jump, "jump operator");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive and finite");
        const HermitianEig eig = hermitian_eig(Operator(jump.adjoint() * jump));
        const auto n = eig.eigenvalues.size();
        basis_ = eig.eigenvectors;
        image_ = jump * basis_;
        Eigen::VectorXd root(n);
        for (Eigen::Index k = 0; k < n; ++k) root(k) = std::sqrt(std::max(eig.eigenvalues(k), 0.0));
        sinc_mean_.resize(n, n);
        cos_mean_.resize(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index m = 0; m < n; ++m) {
                sinc_mean_(k, m) = quadrature::mean_sinc_sinc(mu, root(k), root(m));
                cos_mean_(k, m) = quadrature::mean_cosm1_cosm1(mu, root(k), root(m));
            }
        }
        // \int p (L_a^dag L_a + M_a^dag M_a) da, diagonal in the eigenbasis
        Eigen::VectorXd loss(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            loss(k) = sinc_mean_(k, k) * root(k) * root(k) + cos_mean_(k, k);
        }
        loss_ = basis_ * loss.cast<Complex>().asDiagonal() * basis_.adjoint();
    }

    std::size_t hilbert_dim() const noexcept { return dim_; }

    Operator apply(const Operator& rho) const {
        const Operator inner = basis_.adjoint() * rho * basis_;
        const Operator jumped = image_ * inner.cwiseProduct(sinc_mean_.cast<Complex>()) * image_.adjoint();
        const Operator dephased = basis_ * inner.cwiseProduct(cos_mean_.cast<Complex>()) * basis_.adjoint();
        return jumped + dephased - 0.5 * (loss_ * rho + rho * loss_);
    }

    SuperOperator superoperator() const {
        const auto d = static_cast<Eigen::Index>(dim_);
        Eigen::MatrixXcd m(d * d, d * d);
        Operator unit = Operator::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) {
                unit(i, j) = 1.0;
                const Operator out = apply(unit);
                m.col(j * d + i) = Eigen::Map<const LiouvilleVector>(out.data(), out.size());
                unit(i, j) = 0.0;
            }
        }
        return SuperOperator(std::move(m));
    }

private:
    std::size_t dim_;
    Operator basis_;            // eigenvectors of J^dag J
    Operator image_;            // J * basis_
    Eigen::MatrixXd sinc_mean_; // \int p g_a(x_k) g_a(x_m)
    Eigen::MatrixXd cos_mean_;  // \int p (cos(a r_k) - 1)(cos(a r_m) - 1)
    Operator loss_;
};

inline Operator channel_jump(const Operator& l, NoiseChannel which) {
    return which == NoiseChannel::emission ? l : Operator(l.adjoint());
}

inline SuperOperator averaged_dissipator(const Operator& l, double mu, NoiseChannel which) {
    return AveragedJumpBlock(channel_jump(l, which), mu).superoperator();
}

/// Independent route: quadrature over a of the dissipators of jump_family(L, a).
inline SuperOperator averaged_dissipator_quadrature(const Operator& l, double mu, NoiseChannel which,
                                                    const quadrature::Options& opt = {}) {
    auto integrand = [&](double a) -> Eigen::MatrixXcd {
        const JumpFamily f = jump_family(l, a);
        if (which == NoiseChannel::emission) return (dissipator(f.la) + dissipator(f.ma)).matrix();
        return (dissipator(f.la_dagger) + dissipator(f.na)).matrix();
    };
    return SuperOperator(quadrature::exponential_average(integrand, mu, opt));
}

// ----------------------------------------------------------------------------
// Generators
// ----------------------------------------------------------------------------

/// Matrix-free Poisson-noise generator; O(d^3) per application.
class PoissonGenerator {
public:
    explicit PoissonGenerator(const PoissonMEParams& p)
        : params_(validated(p)),
          emission_(channel_jump(params_.l, NoiseChannel::emission), params_.mu),
          absorption_(channel_jump(params_.l, NoiseChannel::absorption), params_.mu) {}

    std::size_t hilbert_dim() const noexcept { return static_cast<std::size_t>(params_.h.rows()); }
    const PoissonMEParams& params() const noexcept { return params_; }

    Operator apply(const Operator& rho) const {
        Operator out = Complex{0.0, -1.0} * (params_.h * rho - rho * params_.h);
        if (params_.gamma_plus2 > 0.0) out += params_.gamma_plus2 * emission_.apply(rho);
        if (params_.gamma_plus1 > 0.0) out += params_.gamma_plus1 * absorption_.apply(rho);
        return out;
    }

    LiouvilleVector apply(const LiouvilleVector& v) const { return vectorize(apply(unvectorize(v))); }

    SuperOperator superoperator() const {
        SuperOperator gen = commutator_generator(params_.h);
        if (params_.gamma_plus2 > 0.0) gen += params_.gamma_plus2 * emission_.superoperator();
        if (params_.gamma_plus1 > 0.0) gen += params_.gamma_plus1 * absorption_.superoperator();
        return gen;
    }

private:
    static const PoissonMEParams& validated(const PoissonMEParams& p) {
        p.validate();
        return p;
    }

    PoissonMEParams params_;
    AveragedJumpBlock emission_;
    AveragedJumpBlock absorption_;
};

inline SuperOperator poisson_liouvillian(const PoissonMEParams& p) { return PoissonGenerator(p).superoperator(); }

/// Weak, frequent noise limit: -i[H, .] + 2 mu^2 G2+ D[L] + 2 mu^2 G1+ D[L^dag]
inline SuperOperator gaussian_liouvillian(const PoissonMEParams& p) {
    p.validate();
    const double m2 = 2.0 * p.mu * p.mu;
    return gksl_liouvillian(p.h, {{m2 * p.gamma_plus2, p.l}, {m2 * p.gamma_plus1, Operator(p.l.adjoint())}});
}

/// Hermitian coupling X: -i[H, .] + G \int p(a) (sin(aX) . sin(aX) + cos(aX) . cos(aX) - .) da, by quadrature.
inline SuperOperator hermitian_coupling_liouvillian(const Operator& h, const Operator& x, double mu,
                                                    double gamma_sum, const quadrature::Options& opt = {}) {
    detail::require_same_dim(h, x, "H_S vs X");
    if (!is_hermitian(h)) throw NonHermitianInput("H_S is not Hermitian");
    if (!(gamma_sum >= 0.0)) throw NegativeRate("gamma_sum must be >= 0");
    const HermitianEig eig = hermitian_eig(x); // throws NonHermitianInput
    const auto d = static_cast<Eigen::Index>(x.rows());
    const Eigen::MatrixXcd unit = Eigen::MatrixXcd::Identity(d * d, d * d);
    auto integrand = [&](double a) -> Eigen::MatrixXcd {
        const Operator s = operator_function(eig, [a](double v) { return std::sin(a * v); });
        const Operator c = operator_function(eig, [a](double v) { return std::cos(a * v); });
        return (sandwich(s, s) + sandwich(c, c)).matrix() - unit;
    };
    const SuperOperator noise(quadrature::exponential_average(integrand, mu, opt));
    return commutator_generator(h) + gamma_sum * noise;
}

} // namespace poissonbath
