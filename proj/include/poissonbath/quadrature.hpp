// quadrature.hpp — Averages over the exponential noise-strength distribution p(a) = exp(-a/mu)/mu
//
// Two routes are provided:
//   * closed-form Laplace transforms of products of sin/cos, used by the generators
//   * a composite Gauss-Legendre rule on the truncated half-line, used as an independent check

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>

#include <boost/math/quadrature/gauss.hpp>

#include "poissonbath/errors.hpp"

namespace poissonbath::quadrature {

// ----------------------------------------------------------------------------
// Closed forms. All integrals are  \int_0^\infty da p(a) (...)  with p(a) = exp(-a/mu)/mu.
// ----------------------------------------------------------------------------

/// \int p(a) cos(k a) da
inline double mean_cos(double mu, double k) { return 1.0 / (1.0 + mu * mu * k * k); }

/// \int p(a) sin(alpha a) sin(beta a) da
inline double mean_sin_sin(double mu, double alpha, double beta) {
    const double dm = 1.0 + mu * mu * (alpha - beta) * (alpha - beta);
    const double dp = 1.0 + mu * mu * (alpha + beta) * (alpha + beta);
    return 2.0 * mu * mu * alpha * beta / (dm * dp);
}

/// \int p(a) [sin(alpha a)/alpha] [sin(beta a)/beta] da, finite at alpha = 0 or beta = 0.
inline double mean_sinc_sinc(double mu, double alpha, double beta) {
    const double dm = 1.0 + mu * mu * (alpha - beta) * (alpha - beta);
    const double dp = 1.0 + mu * mu * (alpha + beta) * (alpha + beta);
    return 2.0 * mu * mu / (dm * dp);
}

/// \int p(a) cos(alpha a) cos(beta a) da
inline double mean_cos_cos(double mu, double alpha, double beta) {
    return 0.5 * (mean_cos(mu, alpha - beta) + mean_cos(mu, alpha + beta));
}

/// \int p(a) (cos(alpha a) - 1)(cos(beta a) - 1) da
inline double mean_cosm1_cosm1(double mu, double alpha, double beta) {
    const double m2 = mu * mu;
    auto one_minus = [](double x) { return x / (1.0 + x); };
    const double a = one_minus(m2 * alpha * alpha);
    const double b = one_minus(m2 * beta * beta);
    const double dm = one_minus(m2 * (alpha - beta) * (alpha - beta));
    const double dp = one_minus(m2 * (alpha + beta) * (alpha + beta));
    // mean_cos_cos - (1 - a) - (1 - b) + 1 with mean_cos = 1 - x/(1+x)
    return a + b - 0.5 * (dm + dp);
}

// ----------------------------------------------------------------------------
// Composite Gauss-Legendre over the exponential weight
// ----------------------------------------------------------------------------

struct Options {
    double rel_tol = 1e-11;
    double abs_tol = 1e-15;
    double cutoff = 40.0;            // integrate x = a/mu over [0, cutoff]; weight beyond is e^-cutoff
    std::size_t initial_panels = 8;
    std::size_t max_panels = 16384;
};

template <typename T>
double magnitude(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::abs(v);
    } else if constexpr (requires { v.norm(); }) {
        return v.norm();
    } else {
        return std::abs(v);
    }
}

namespace detail {

template <typename F>
auto composite_rule(F& f, double mu, double cutoff, std::size_t panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const double h = cutoff / static_cast<double>(panels);
    using R = std::decay_t<decltype(f(0.0))>;
    R acc = f(0.0) * 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * h;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double off = 0.5 * h * x[i];
            const double wi = 0.5 * h * w[i];
            acc += (wi * std::exp(-(mid + off))) * f(mu * (mid + off));
            if (x[i] != 0.0) {
                acc += (wi * std::exp(-(mid - off))) * f(mu * (mid - off));
            }
        }
    }
    return acc;
}

} // namespace detail

/// \int_0^\infty da exp(-a/mu)/mu f(a), with f scalar- or Eigen-valued.
/// Panels are doubled until successive estimates agree; the neglected tail is bounded by
/// exp(-cutoff) * sup|f| and is below double precision for bounded integrands.
template <typename F>
auto exponential_average(F&& f, double mu, const Options& opt = {}) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw InvalidArgument("exponential_average: mu must be positive and finite");
    }
    std::size_t panels = opt.initial_panels;
    auto prev = detail::composite_rule(f, mu, opt.cutoff, panels);
    while (panels < opt.max_panels) {
        panels *= 2;
        auto next = detail::composite_rule(f, mu, opt.cutoff, panels);
        const double change = magnitude(decltype(next)(next - prev));
        if (change <= opt.rel_tol * magnitude(next) + opt.abs_tol) {
            return next;
        }
        prev = std::move(next);
    }
    throw QuadratureNotConverged("exponential_average did not stabilize with " +
                                 std::to_string(opt.max_panels) + " panels at mu = " + std::to_string(mu));
}

} // namespace poissonbath::quadrature
