// acceptance.cpp — Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "poissonbath.hpp"
#include "poissonbath/experiment.hpp"

using namespace poissonbath;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double spectral_norm(const Eigen::MatrixXcd& m) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0); }

// ----------------------------------------------------------------------------
// 1. Effective decay rate: closed form vs quadrature vs generator matrix element
// ----------------------------------------------------------------------------

Verdict effective_decay_rate_triangle() {
    double worst = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto m = collective_model(n, 1.0);
        const Eigen::VectorXcd d1 = dicke_state(m, 1);
        const Operator excited = d1 * d1.adjoint();
        for (double mu : {0.1, 0.5, 1.0, 2.0}) {
            const double closed = 2.0 * mu * mu * static_cast<double>(n) / (1.0 + 4.0 * mu * mu * static_cast<double>(n));
            const double quad = effective_decay_rate_quadrature(n, mu, 1.0);
            const double elem = PoissonGenerator({m.h, m.l, mu, 0.0, 1.0}).apply(excited)(0, 0).real();
            worst = std::max({worst, std::abs(closed - quad) / closed, std::abs(closed - elem) / closed,
                              std::abs(quad - elem) / closed});
        }
    }
    return {worst < 1e-8, "max pairwise relative deviation " + experiment::format_double(worst) + " (tol 1e-8)"};
}

// ----------------------------------------------------------------------------
// 2. Decay-rate sweep written by the experiment front end
// ----------------------------------------------------------------------------

std::map<std::string, std::vector<double>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> names;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) names.push_back(cell);
    std::map<std::string, std::vector<double>> cols;
    while (std::getline(in, line)) {
        std::stringstream rs(line);
        std::size_t i = 0;
        for (std::string cell; std::getline(rs, cell, ','); ++i) cols[names.at(i)].push_back(std::stod(cell));
    }
    return cols;
}

Verdict decay_rate_sweep() {
    const auto dir = std::filesystem::temp_directory_path() / "poissonbath_acceptance_decay_rate";
    std::filesystem::remove_all(dir);
    const auto cfg = experiment::json::parse(
        R"({"experiment": "decay_rate", "decay_rate": {"N": 4, "x_min": 1e-3, "x_max": 1e3, "points": 61}})");
    const auto [summary, code] = experiment::run_experiment(experiment::Kind::decay_rate, cfg, dir);
    if (code != 0) return {false, "experiment exited with " + std::to_string(code)};
    const auto cols = read_csv(dir / "decay_rate.csv");
    const auto& x = cols.at("x");
    const auto& g = cols.at("gamma_eff");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double law = 2.0 * x[i] / (1.0 + 4.0 * x[i]);
        worst = std::max(worst, std::abs(g[i] - law) / law);
    }
    const double small = std::abs(g.front() / (2.0 * x.front()) - 1.0);
    const double large = std::abs(g.back() / 0.5 - 1.0);
    const bool ok = x.size() == 61 && std::abs(x.front() - 1e-3) < 1e-15 && std::abs(x.back() - 1e3) < 1e-9 &&
                    worst < 1e-8 && small < 0.01 && large < 0.01;
    return {ok, "pointwise rel err " + experiment::format_double(worst) + " (tol 1e-8); asymptote 2x off by " +
                    experiment::format_double(small) + ", 1/2 off by " + experiment::format_double(large) + " (tol 1e-2)"};
}

// ----------------------------------------------------------------------------
// 3. Gaussian limit at fixed mu^2 Gamma^+
// ----------------------------------------------------------------------------

Verdict gaussian_limit() {
    std::vector<double> dist;
    for (double mu : {0.2, 0.1, 0.05}) {
        const double gp = 0.25 / (mu * mu);
        const PoissonMEParams p{0.5 * ops::sigma_z(), ops::sigma_minus(), mu, gp, gp};
        dist.push_back(spectral_norm(poisson_liouvillian(p).matrix() - gaussian_liouvillian(p).matrix()));
    }
    const double r1 = dist[0] / dist[1], r2 = dist[1] / dist[2];
    const bool ok = dist[1] < dist[0] && dist[2] < dist[1] && std::abs(r1 - 4.0) <= 0.6 && std::abs(r2 - 4.0) <= 0.6;
    return {ok, "distances " + experiment::format_double(dist[0]) + ", " + experiment::format_double(dist[1]) + ", " +
                    experiment::format_double(dist[2]) + "; ratios " + experiment::format_double(r1) + ", " +
                    experiment::format_double(r2) + " (target 4 +- 15%)"};
}

// ----------------------------------------------------------------------------
// 4. Bath correlators vs a literal Liouville-space evaluation
// ----------------------------------------------------------------------------

// Independent construction of the two-qubit telegraph bath from 4x4 matrices.
class BathOracle {
public:
    explicit BathOracle(const bath::BathParams& p) : p_(p) {
        const Eigen::Matrix2cd sm = (Eigen::Matrix2cd() << 0, 1, 0, 0).finished();
        const Eigen::Matrix2cd i2 = Eigen::Matrix2cd::Identity();
        const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << -1, 0, 0, 1).finished();
        auto on1 = [&](const Eigen::Matrix2cd& a) { return kron2(a, i2); };
        auto on2 = [&](const Eigen::Matrix2cd& a) { return kron2(i2, a); };
        h_ = 0.5 * p.omega1 * on1(sz) + 0.5 * p.omega2 * on2(sz);
        jumps_ = {{p.gamma_plus1, on1(sm.adjoint())},
                  {p.gamma_minus1, on1(sm)},
                  {p.gamma_plus2, on2(sm.adjoint())},
                  {p.gamma_minus2, on2(sm)}};
        b_plus_ = p.lambda * on1(sm) * on2(sm.adjoint());
        b_minus_ = p.lambda * on1(sm.adjoint()) * on2(sm);
        auto qubit = [](double gp, double gm) {
            return Eigen::Vector2cd(gm / (gp + gm), gp / (gp + gm)).asDiagonal().toDenseMatrix();
        };
        eq_ = kron2(qubit(p.gamma_plus1, p.gamma_minus1), qubit(p.gamma_plus2, p.gamma_minus2));
        gen_.resize(16, 16);
        for (int j = 0; j < 16; ++j) {
            Eigen::Matrix4cd e = Eigen::Matrix4cd::Zero();
            e(j % 4, j / 4) = 1.0;
            const Eigen::Matrix4cd out = apply_generator(e);
            gen_.col(j) = Eigen::Map<const Eigen::VectorXcd>(out.data(), 16);
        }
    }

    const Eigen::Matrix4cd& eq() const { return eq_; }

    Eigen::Matrix4cd apply_generator(const Eigen::Matrix4cd& x) const {
        Eigen::Matrix4cd out = Complex(0.0, -1.0) * (h_ * x - x * h_);
        for (const auto& [r, a] : jumps_) {
            const Eigen::Matrix4cd ad = a.adjoint();
            out += r * (a * x * ad - 0.5 * (ad * a * x + x * ad * a));
        }
        return out;
    }

    Eigen::Matrix4cd evolve(const Eigen::Matrix4cd& x, double t) const {
        const Eigen::MatrixXcd u = (gen_ * t).exp();
        const Eigen::VectorXcd v = u * Eigen::Map<const Eigen::VectorXcd>(x.data(), 16);
        return Eigen::Map<const Eigen::Matrix4cd>(v.data());
    }

    Eigen::Matrix4cd insert(const Eigen::Matrix4cd& x, bath::CorrelatorIndex idx) const {
        const Eigen::Matrix4cd& b = idx.k == bath::Sign::plus ? b_plus_ : b_minus_;
        return idx.l == bath::Sign::plus ? Eigen::Matrix4cd(b * x) : Eigen::Matrix4cd(x * b);
    }

    Eigen::Matrix4cd q(const Eigen::Matrix4cd& x) const { return x - eq_ * x.trace(); }

    /// Tr[B_1 e^{L(t1-t2)} Q B_2 ... Q B_n rho_eq]
    Complex npoint(const std::vector<bath::CorrelatorIndex>& idx, const std::vector<double>& t) const {
        Eigen::Matrix4cd x = insert(eq_, idx.back());
        for (std::size_t j = idx.size() - 1; j-- > 0;) x = insert(evolve(q(x), t[j] - t[j + 1]), idx[j]);
        return x.trace();
    }

    /// Tr[B_1 e^{L t} B_2 e^{L s} Q rho_B^init]
    Complex correlation_like(bath::CorrelatorIndex a, bath::CorrelatorIndex b, bath::Sign init, double t, double s) const {
        Eigen::Matrix4cd r = Eigen::Matrix4cd::Zero();
        const int k = init == bath::Sign::plus ? 1 : 2;
        r(k, k) = 1.0;
        return insert(evolve(insert(evolve(q(r), s), b), t), a).trace();
    }

private:
    static Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return out;
    }

    bath::BathParams p_;
    Eigen::Matrix4cd h_;
    std::vector<std::pair<double, Eigen::Matrix4cd>> jumps_;
    Eigen::Matrix4cd b_plus_, b_minus_, eq_;
    Eigen::MatrixXcd gen_;
};

std::vector<bath::CorrelatorIndex> all_indices() {
    std::vector<bath::CorrelatorIndex> out;
    for (auto l : {bath::Sign::plus, bath::Sign::minus})
        for (auto k : {bath::Sign::plus, bath::Sign::minus}) out.push_back({l, k});
    return out;
}

Verdict bath_correlators() {
    const bath::BathParams detailed = bath::BathParams::detailed_balance(3.0, 2.0, 10.0, 8.0, 0.5, 5.0);
    bath::BathParams absorbing;
    absorbing.omega1 = 3.0;
    absorbing.omega2 = 2.0;
    absorbing.gamma_plus1 = 0.0;
    absorbing.gamma_minus1 = 5.0;
    absorbing.gamma_plus2 = 1.0;
    absorbing.gamma_minus2 = 7.0;
    absorbing.lambda = 2.0;

    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.06 * i);
    const auto idx = all_indices();
    double worst = 0.0, worst_odd = 0.0;
    std::size_t count = 0;
    for (const auto& p : {detailed, absorbing}) {
        const BathOracle o(p);
        for (const auto& a : idx)
            for (const auto& b : idx) {
                for (double t : grid) {
                    worst = std::max(worst, std::abs(bath::two_point_analytic(p, a, b, t) - o.npoint({a, b}, {t, 0.0})));
                    ++count;
                    for (double s : grid)
                        for (auto init : {bath::Sign::plus, bath::Sign::minus}) {
                            const Complex ana = bath::correlationlike_analytic(p, a, b, init, t, s);
                            worst = std::max(worst, std::abs(ana - o.correlation_like(a, b, init, t, s)));
                            ++count;
                        }
                }
                for (const auto& c : idx)
                    for (const auto& d : idx)
                        for (double d1 : grid)
                            for (double d2 : grid) {
                                const std::vector<double> ts{d1 + d2 + 0.3, d2 + 0.3, 0.3, 0.0};
                                const Complex ana = bath::npoint_analytic(p, {{a, b, c, d}, ts});
                                worst = std::max(worst, std::abs(ana - o.npoint({a, b, c, d}, ts)));
                                ++count;
                            }
                for (double t : grid) {
                    worst_odd = std::max(worst_odd, std::abs(o.npoint({a}, {t})));
                    worst_odd = std::max(worst_odd, std::abs(o.npoint({a, b, a}, {t + 0.2, 0.1 + t / 2, 0.0})));
                    worst_odd = std::max(worst_odd, std::abs(bath::npoint_analytic(p, {{a, b, a}, {t + 0.2, 0.1, 0.0}})));
                }
            }
    }
    return {worst < 1e-9 && worst_odd < 1e-12,
            std::to_string(count) + " values, max |analytic - oracle| " + experiment::format_double(worst) +
                " (tol 1e-9); max odd-point " + experiment::format_double(worst_odd) + " (tol 1e-12)"};
}

// ----------------------------------------------------------------------------
// 5. White-noise limit of the correlator area
// ----------------------------------------------------------------------------

Verdict white_noise_limit() {
    std::vector<double> errs;
    double quad_gap = 0.0;
    for (double gm : {1e2, 1e3, 1e4}) {
        bath::BathParams p;
        p.omega1 = 3.0;
        p.omega2 = 2.0;
        p.gamma_plus1 = p.gamma_plus2 = 1.0;
        p.gamma_minus1 = p.gamma_minus2 = gm;
        p.lambda = 0.5 * gm;
        const auto a = bath::whitenoise_area(p);
        errs.push_back(a.relative_error());
        quad_gap = std::max(quad_gap, std::abs(a.area - a.area_quadrature) / a.area);
    }
    const bool ok = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 1e-3 && quad_gap < 1e-8;
    return {ok, "relative errors " + experiment::format_double(errs[0]) + ", " + experiment::format_double(errs[1]) + ", " +
                    experiment::format_double(errs[2]) + " (last < 1e-3); closed form vs quadrature " +
                    experiment::format_double(quad_gap)};
}

// ----------------------------------------------------------------------------
// 6. Composite dynamics converge to the Poisson master equation
// ----------------------------------------------------------------------------

Verdict composite_convergence() {
    const auto m = collective_model(5, 1.0, Representation::symmetric);
    std::vector<double> times;
    for (int i = 0; i <= 100; ++i) times.push_back(0.1 * i);
    const ConvergenceSetup c{m.h, m.l, ground_plus_dicke_state(m), 3.0, 2.0, 0.0, 1.0, 0.7, {10.0, 30.0, 100.0}, times,
                             {{"p0", m.ground_projector()}, {"jx", m.jx()}}};
    const auto res = convergence_study(c);
    std::map<std::string, std::vector<double>> devs;
    for (const auto& r : res.rows) devs[r.observable].push_back(r.max_dev);
    bool ok = true;
    std::string detail;
    for (const auto& [name, d] : devs) {
        ok = ok && d.size() == 3 && d[1] < d[0] && d[2] < d[1] && d[2] < 0.05;
        detail += name + " " + experiment::format_double(d[0]) + " > " + experiment::format_double(d[1]) + " > " +
                  experiment::format_double(d[2]) + "; ";
    }
    return {ok, detail + "last rung < 0.05"};
}

// ----------------------------------------------------------------------------
// 7. Steady states
// ----------------------------------------------------------------------------

Verdict steady_states() {
    const double beta = 1.5, omega = 1.0, r = std::exp(-beta * omega);
    const DensityMatrix q = steady_state(poisson_liouvillian({0.5 * omega * ops::sigma_z(), ops::sigma_minus(), 0.8, r, 1.0}));
    const double err_a = std::max(std::abs(q(0, 0).real() - 1.0 / (1.0 + r)), std::abs(q(1, 1).real() - r / (1.0 + r)));

    const auto m = collective_model(6, omega);
    const DensityMatrix s = steady_state(poisson_liouvillian({m.h, m.l, 2.0, r, 1.0}));
    double err_b = 0.0;
    for (Eigen::Index k = 0; k < 6; ++k) err_b = std::max(err_b, std::abs(s(k + 1, k + 1).real() / s(k, k).real() - r));

    const auto bp = bath::BathParams::detailed_balance(3.0, 2.0, 10.0, 8.0, beta, 5.0);
    const double err_c = std::max(bath::bath_liouvillian(bp).apply(bath::bath_gibbs(bp).op()).cwiseAbs().maxCoeff(),
                                  BathOracle(bp).apply_generator(BathOracle(bp).eq()).cwiseAbs().maxCoeff());
    const bool ok = err_a < 1e-8 && err_b < 1e-8 && err_c < 1e-12;
    return {ok, "qubit Gibbs " + experiment::format_double(err_a) + ", Dicke ladder " + experiment::format_double(err_b) +
                    " (tol 1e-8); bath equilibrium residual " + experiment::format_double(err_c) + " (tol 1e-12)"};
}

// ----------------------------------------------------------------------------
// 8. Multi-time correlators: quantum regression vs exact composite
// ----------------------------------------------------------------------------

Verdict multitime_regression_check() {
    const Operator h = 0.5 * ops::sigma_z();
    const DensityMatrix rho0 = DensityMatrix::pure(Eigen::Vector2cd(1.0, 1.0));
    const PoissonMEParams p{h, ops::sigma_minus(), 0.5, 0.5, 1.0};
    std::vector<double> devs;
    for (double gm : {10.0, 30.0, 100.0}) {
        bath::BathParams b;
        b.omega1 = 3.0;
        b.omega2 = 2.0;
        b.gamma_plus1 = 0.5;
        b.gamma_plus2 = 1.0;
        b.gamma_minus1 = b.gamma_minus2 = gm;
        b.lambda = 0.5 * gm;
        const CompositeSetup s{h, ops::sigma_minus(), b, rho0};
        double dev = 0.0;
        for (double t2 : {0.0, 0.5, 1.0, 1.5, 2.0})
            for (double d : {0.25, 0.5, 1.0, 1.5, 2.0}) {
                const MultiTimeSpec spec{ops::sigma_x(), {t2 + d, t2}};
                dev = std::max(dev, std::abs(multitime_exact(s, spec) - multitime_regression(p, rho0, spec)));
            }
        devs.push_back(dev);
    }
    PropagationOptions opt;
    opt.method = PropagationMethod::expm;
    const Eigen::MatrixXcd gen = poisson_liouvillian(p).matrix();
    const Operator a = ops::sigma_x() + 0.4 * ops::sigma_y();
    double collapse = 0.0;
    for (double t : {0.0, 0.7, 2.5}) {
        const Eigen::VectorXcd v = (gen * t).exp() * rho0.vectorized();
        const Complex direct = (a * unvectorize(v)).trace();
        collapse = std::max(collapse, std::abs(multitime_regression(p, rho0, {a, {t}}, opt) - direct));
    }
    const bool ok = devs[1] < devs[0] && devs[2] < devs[1] && collapse < 1e-12;
    return {ok, "max deviation " + experiment::format_double(devs[0]) + " > " + experiment::format_double(devs[1]) + " > " +
                    experiment::format_double(devs[2]) + "; n=1 vs propagation " + experiment::format_double(collapse) +
                    " (tol 1e-12)"};
}

// ----------------------------------------------------------------------------
// 9. Hermitian coupling special case
// ----------------------------------------------------------------------------

Verdict hermitian_special_case() {
    std::mt19937_64 gen(4242);
    std::normal_distribution<double> normal;
    auto random_hermitian = [&] {
        Operator m(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i) m(i / 3, i % 3) = Complex(normal(gen), normal(gen));
        return Operator(0.5 * (m + m.adjoint()));
    };
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Operator h = random_hermitian(), x = random_hermitian();
        const double mu = 0.3 + 0.4 * trial, g1 = 0.2 + 0.1 * trial, g2 = 1.0;
        const SuperOperator a = hermitian_coupling_liouvillian(h, x, mu, g1 + g2);
        const SuperOperator b = poisson_liouvillian({h, x, mu, g1, g2});
        worst = std::max(worst, spectral_norm(a.matrix() - b.matrix()));
    }
    return {worst < 1e-9, "max superoperator-norm distance " + experiment::format_double(worst) + " (tol 1e-9)"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"effective decay rate: closed form, quadrature, generator element", effective_decay_rate_triangle},
        {"decay-rate sweep follows 2x/(1+4x) with both asymptotes", decay_rate_sweep},
        {"Gaussian limit at fixed mu^2 Gamma^+ converges as mu^2", gaussian_limit},
        {"bath correlators match the Liouville-space evaluation", bath_correlators},
        {"white-noise limit of the correlator area", white_noise_limit},
        {"composite dynamics converge to the Poisson master equation", composite_convergence},
        {"steady states: Gibbs, Dicke ladder, bath equilibrium", steady_states},
        {"multi-time correlators: regression approaches exact", multitime_regression_check},
        {"Hermitian coupling equals the Poisson generator with L = X", hermitian_special_case},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failures;
        std::printf("%s [%zu] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
