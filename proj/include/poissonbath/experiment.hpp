// experiment.hpp — Config-driven experiments: parse, validate, run and write CSV tables plus a JSON summary
//
// Each experiment kind has a plan type built by a strict parser and a runner returning in-memory
// tables. Nothing in the pipeline draws random numbers, so a fixed config gives identical files.

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "poissonbath/composite.hpp"
#include "poissonbath/experiment_config.hpp"
#include "poissonbath/experiment_io.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/models.hpp"
#include "poissonbath/multitime.hpp"
#include "poissonbath/poisson_generator.hpp"
#include "poissonbath/propagate.hpp"
#include "poissonbath/telegraph_bath.hpp"

namespace poissonbath::experiment {

namespace fs = std::filesystem;

struct RunOutput {
    json results = json::object();
    json derived = json::object();
    std::vector<std::pair<std::string, CsvTable>> tables;
    int exit_code = ok;
};

namespace detail {

inline std::string number_tag(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline PropagationOptions parse_solver(const json* j) {
    PropagationOptions opt;
    if (!j) return opt;
    const Fields f(*j, "solver", {"rtol", "atol", "method"});
    if (f.has("rtol")) opt.rtol = f.positive("rtol");
    if (f.has("atol")) opt.atol = f.positive("atol");
    const std::string m = f.choice("method", {"automatic", "rk45", "expm"}, "automatic");
    opt.method = m == "rk45" ? PropagationMethod::rk45 : m == "expm" ? PropagationMethod::expm : PropagationMethod::automatic;
    return opt;
}

inline const json* optional_block(const json& cfg, const char* key) { return cfg.contains(key) ? &cfg.at(key) : nullptr; }

inline json poisson_derived(const ModelSpec& m, const PoissonSpec& p) {
    json d{{"mu", p.mu},
           {"gamma_plus1", p.gamma_plus1},
           {"gamma_plus2", p.gamma_plus2},
           {"mu2N", p.mu * p.mu * static_cast<double>(m.n)},
           {"effective_decay_rate", effective_decay_rate(m.n, p.mu, p.gamma_plus2)},
           {"gaussian_decay_rate", gaussian_decay_rate(m.n, p.mu, p.gamma_plus2)}};
    if (p.beta) {
        d["beta"] = *p.beta;
        d["gibbs_ground_full_space"] = full_space_gibbs_ground_probability(m.n, m.omega, *p.beta);
        d["gibbs_ground_symmetric_sector"] = symmetric_sector_ground_probability(m.n, m.omega, *p.beta);
    }
    return d;
}

inline json bath_derived(const bath::BathParams& b) {
    return json{{"omega1", b.omega1},
                {"omega2", b.omega2},
                {"gamma_plus1", b.gamma_plus1},
                {"gamma_minus1", b.gamma_minus1},
                {"gamma_plus2", b.gamma_plus2},
                {"gamma_minus2", b.gamma_minus2},
                {"gamma_1", b.gamma1()},
                {"gamma_2", b.gamma2()},
                {"lambda", b.lambda},
                {"mu", b.mu()},
                {"markov_ratio_1", b.gamma_plus1 / b.gamma_minus1},
                {"markov_ratio_2", b.gamma_plus2 / b.gamma_minus2},
                {"correlation_time", b.correlation_time()}};
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

inline void check_kind(const json& cfg, Kind kind) {
    if (cfg.contains("experiment")) {
        if (!cfg.at("experiment").is_string()) throw ValidationError("experiment must be a string");
        if (parse_kind(cfg.at("experiment").get<std::string>()) != kind) {
            throw ValidationError("config is for experiment '" + cfg.at("experiment").get<std::string>() +
                                  "' but was run as '" + to_string(kind) + "'");
        }
    }
}

/// Shared model / Poisson part of the spin-model experiments.
struct SpinSetup {
    ModelSpec spec;
    CollectiveModel model;
    PoissonSpec poisson;

    PoissonMEParams params() const { return {model.h, model.l, poisson.mu, poisson.gamma_plus1, poisson.gamma_plus2}; }
};

inline SpinSetup parse_spin_setup(const Fields& f) {
    SpinSetup s;
    s.spec = parse_model(f);
    s.model = s.spec.build();
    s.poisson = parse_poisson(f.raw("poisson"), s.spec.omega);
    s.params().validate();
    return s;
}

} // namespace detail

// ----------------------------------------------------------------------------
// simulate
// ----------------------------------------------------------------------------

struct SimulatePlan {
    detail::SpinSetup setup;
    std::string engine;
    std::optional<LadderBathSpec> bath;
    std::vector<double> times;
    std::string initial_state;
    std::vector<std::string> observables;
    PropagationOptions solver;
};

inline SimulatePlan parse_simulate(const json& cfg) {
    const Fields f(cfg, "config",
                   {"experiment", "output", "model", "N", "omega", "representation", "poisson", "bath", "times",
                    "initial_state", "observables", "engine", "solver"});
    SimulatePlan p;
    p.setup = detail::parse_spin_setup(f);
    p.engine = f.choice("engine", {"poisson", "gaussian", "composite"}, "poisson");
    if (p.engine == "composite") {
        p.bath = parse_ladder_bath(f.raw("bath"), false);
        check_mu_consistency(*p.bath, p.setup.poisson.mu);
        const CompositeSetup cs{p.setup.model.h, p.setup.model.l,
                                ladder_bath_params(*p.bath, p.setup.poisson, p.bath->gamma_minus.front()),
                                ground_state(p.setup.model)};
        cs.validate();
        check_composite_cost(cs);
    } else if (f.has("bath")) {
        throw ValidationError("bath block is only used by engine 'composite'");
    }
    p.times = parse_times(detail::optional_block(cfg, "times"));
    p.initial_state = f.choice("initial_state", state_names(), "ground");
    p.observables = parse_observables(f, p.setup.model);
    p.solver = detail::parse_solver(detail::optional_block(cfg, "solver"));
    return p;
}

inline RunOutput run_simulate(const SimulatePlan& p) {
    const auto& m = p.setup.model;
    const DensityMatrix rho0 = named_state(m, p.initial_state);
    RunOutput out;
    out.derived = detail::poisson_derived(p.setup.spec, p.setup.poisson);
    Trajectory traj;
    if (p.engine == "poisson") {
        traj = propagate(PoissonGenerator(p.setup.params()), rho0, p.times, p.solver);
    } else if (p.engine == "gaussian") {
        traj = propagate(gaussian_liouvillian(p.setup.params()), rho0, p.times, p.solver);
    } else {
        const auto b = ladder_bath_params(*p.bath, p.setup.poisson, p.bath->gamma_minus.front());
        out.derived["bath"] = detail::bath_derived(b);
        traj = reduced_trajectory(CompositeSetup{m.h, m.l, b, rho0}, p.times, p.solver);
    }
    std::vector<std::string> header{"t"};
    for (const auto& o : p.observables) {
        traj.add_observable(o, named_operator(m, o));
        header.push_back(o);
    }
    CsvTable table(header);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        for (const auto& o : p.observables) row.push_back(traj.observables.at(o)[i]);
        table.add_row(row);
    }
    for (const auto& o : p.observables) {
        out.results[o] = {{"initial", traj.observables.at(o).front()}, {"final", traj.observables.at(o).back()}};
    }
    out.results["engine"] = p.engine;
    out.results["dimension"] = m.dim();
    out.tables.emplace_back("trajectory.csv", std::move(table));
    return out;
}

// ----------------------------------------------------------------------------
// steady
// ----------------------------------------------------------------------------

inline constexpr std::size_t kMaxSteadyDim = 32;

struct SteadyPlan {
    detail::SpinSetup setup;
    std::string engine;
};

inline SteadyPlan parse_steady(const json& cfg) {
    const Fields f(cfg, "config",
                   {"experiment", "output", "model", "N", "omega", "representation", "poisson", "engine"});
    SteadyPlan p;
    p.setup = detail::parse_spin_setup(f);
    p.engine = f.choice("engine", {"poisson", "gaussian"}, "poisson");
    if (p.setup.model.dim() > kMaxSteadyDim) {
        throw CostGuardExceeded("steady state supports Hilbert dimension <= " + std::to_string(kMaxSteadyDim));
    }
    return p;
}

inline RunOutput run_steady(const SteadyPlan& p) {
    const auto& m = p.setup.model;
    const SuperOperator gen =
        p.engine == "poisson" ? poisson_liouvillian(p.setup.params()) : gaussian_liouvillian(p.setup.params());
    const DensityMatrix rho = steady_state(gen);
    const double gp1 = p.setup.poisson.gamma_plus1, gp2 = p.setup.poisson.gamma_plus2;

    std::vector<double> pops;
    for (std::size_t k = 0; k <= m.n; ++k) {
        const Eigen::VectorXcd d = dicke_state(m, k);
        pops.push_back(d.dot(rho.op() * d).real());
    }
    RunOutput out;
    out.derived = detail::poisson_derived(p.setup.spec, p.setup.poisson);
    CsvTable table({"excitations", "population", "ladder_reference"});
    const bool has_ratio = gp2 > 0.0;
    const double r = has_ratio ? gp1 / gp2 : 0.0;
    double z = 0.0;
    for (std::size_t k = 0; k <= m.n; ++k) z += std::pow(r, static_cast<double>(k));
    double ladder_err = 0.0;
    for (std::size_t k = 0; k <= m.n; ++k) {
        table.add_row({static_cast<double>(k), pops[k], has_ratio ? std::pow(r, static_cast<double>(k)) / z : std::nan("")});
        if (k > 0 && has_ratio && pops[k - 1] > 0.0) ladder_err = std::max(ladder_err, std::abs(pops[k] / pops[k - 1] - r));
    }
    double symmetric_weight = 0.0;
    for (double x : pops) symmetric_weight += x;
    out.results = {{"engine", p.engine},
                   {"ground_population", pops[0]},
                   {"symmetric_sector_weight", symmetric_weight},
                   {"ladder_ratio", has_ratio ? json(r) : json(nullptr)},
                   {"max_ladder_ratio_error", ladder_err},
                   {"purity", (rho.op() * rho.op()).trace().real()}};
    out.tables.emplace_back("steady.csv", std::move(table));
    return out;
}

// ----------------------------------------------------------------------------
// corr
// ----------------------------------------------------------------------------

struct CorrPlan {
    bath::BathParams bath;
    std::string type;
    std::vector<bath::CorrelatorIndex> indices;
    bath::Sign init = bath::Sign::plus;
    std::vector<double> times;
    std::vector<double> s_values;
    std::vector<std::vector<double>> points;
};

inline bath::Sign parse_sign(char c, const std::string& where) {
    if (c == '+') return bath::Sign::plus;
    if (c == '-') return bath::Sign::minus;
    throw ValidationError(where + ": expected '+' or '-'");
}

inline CorrPlan parse_corr(const json& cfg) {
    const Fields f(cfg, "config", {"experiment", "output", "bath", "correlator", "times"});
    CorrPlan p;
    p.bath = parse_full_bath(f.raw("bath"));
    p.bath.validate();
    const Fields c(f.raw("correlator"), "correlator", {"type", "indices", "init", "s", "points"});
    p.type = c.choice("type", {"two_point", "correlation_like", "npoint"});
    for (const auto& s : c.strings("indices")) {
        if (s.size() != 2) throw ValidationError("correlator.indices entries are two signs 'lk', e.g. \"+-\"");
        p.indices.push_back({parse_sign(s[0], "correlator.indices"), parse_sign(s[1], "correlator.indices")});
    }
    if (p.type == "npoint") {
        if (p.indices.empty() || p.indices.size() > bath::kMaxNumericCorrelatorOrder) {
            throw CostGuardExceeded("npoint correlators support 1.." + std::to_string(bath::kMaxNumericCorrelatorOrder) +
                                    " insertions");
        }
        if (f.has("times") || c.has("s") || c.has("init")) {
            throw ValidationError("npoint correlators take correlator.points only");
        }
        const json& pts = c.raw("points");
        if (!pts.is_array() || pts.empty()) throw ValidationError("correlator.points must be a non-empty array");
        for (const auto& row : pts) {
            auto ts = number_row(row, "correlator.points");
            if (ts.size() != p.indices.size()) throw ValidationError("correlator.points rows need one time per index");
            bath::CorrelatorSpec{p.indices, ts}.validate();
            p.points.push_back(std::move(ts));
        }
        return p;
    }
    if (p.indices.size() != 2) throw ValidationError("two_point and correlation_like need exactly two indices");
    if (c.has("points")) throw ValidationError("correlator.points is only used by type 'npoint'");
    p.times = parse_times(detail::optional_block(cfg, "times"));
    if (p.type == "correlation_like") {
        const std::string init = c.choice("init", {"+", "-"});
        p.init = parse_sign(init[0], "correlator.init");
        p.s_values = c.has("s") ? c.numbers("s") : std::vector<double>{0.0};
        if (p.s_values.empty()) throw ValidationError("correlator.s must not be empty");
        for (double s : p.s_values)
            if (s < 0.0) throw ValidationError("correlator.s values must be >= 0");
    } else if (c.has("init") || c.has("s")) {
        throw ValidationError("init and s are only used by type 'correlation_like'");
    }
    return p;
}

/// Literal evaluation of Tr[B_1 e^{L t} B_2 e^{L s} Q rho_B^init].
inline Complex correlationlike_numeric(const bath::BathParams& b, bath::CorrelatorIndex first,
                                       bath::CorrelatorIndex second, bath::Sign init, double t, double s) {
    const SuperOperator gen = bath::bath_liouvillian(b);
    LiouvilleVector v = bath::complement_projector(b).apply(vectorize(bath::excited_pair_state(init)));
    v = matrix_exponential(Operator(gen.matrix() * s)) * v;
    v = bath::coupling_superop(b, second).apply(v);
    v = matrix_exponential(Operator(gen.matrix() * t)) * v;
    v = bath::coupling_superop(b, first).apply(v);
    return trace_row(4) * v;
}

inline RunOutput run_corr(const CorrPlan& p) {
    RunOutput out;
    out.derived["bath"] = detail::bath_derived(p.bath);
    double max_err = 0.0;
    auto cells = [&max_err](Complex num, Complex ana) {
        const double err = std::abs(num - ana);
        max_err = std::max(max_err, err);
        return std::vector<double>{num.real(), num.imag(), ana.real(), ana.imag(), err};
    };
    const std::vector<std::string> tail{"re", "im", "analytic_re", "analytic_im", "abs_err"};
    if (p.type == "two_point") {
        std::vector<std::string> header{"t"};
        header.insert(header.end(), tail.begin(), tail.end());
        CsvTable table(header);
        for (double t : p.times) {
            const Complex num = bath::npoint_numeric(p.bath, {p.indices, {t, 0.0}});
            std::vector<double> row{t};
            const auto c = cells(num, bath::two_point_analytic(p.bath, p.indices[0], p.indices[1], t));
            row.insert(row.end(), c.begin(), c.end());
            table.add_row(row);
        }
        out.tables.emplace_back("correlator.csv", std::move(table));
    } else if (p.type == "correlation_like") {
        std::vector<std::string> header{"t", "s"};
        header.insert(header.end(), tail.begin(), tail.end());
        CsvTable table(header);
        for (double s : p.s_values)
            for (double t : p.times) {
                const Complex num = correlationlike_numeric(p.bath, p.indices[0], p.indices[1], p.init, t, s);
                const Complex ana = bath::correlationlike_analytic(p.bath, p.indices[0], p.indices[1], p.init, t, s);
                std::vector<double> row{t, s};
                const auto c = cells(num, ana);
                row.insert(row.end(), c.begin(), c.end());
                table.add_row(row);
            }
        out.tables.emplace_back("correlator.csv", std::move(table));
    } else {
        std::vector<std::string> header;
        for (std::size_t i = 0; i < p.indices.size(); ++i) header.push_back("t" + std::to_string(i + 1));
        header.insert(header.end(), tail.begin(), tail.end());
        CsvTable table(header);
        for (const auto& ts : p.points) {
            const bath::CorrelatorSpec spec{p.indices, ts};
            std::vector<double> row = ts;
            const auto c = cells(bath::npoint_numeric(p.bath, spec), bath::npoint_analytic(p.bath, spec));
            row.insert(row.end(), c.begin(), c.end());
            table.add_row(row);
        }
        out.tables.emplace_back("correlator.csv", std::move(table));
    }
    const auto wn = bath::whitenoise_area(p.bath);
    out.results = {{"type", p.type},
                   {"max_abs_err", max_err},
                   {"whitenoise", {{"area", wn.area},
                                   {"area_quadrature", wn.area_quadrature},
                                   {"target", wn.target},
                                   {"relative_error", wn.relative_error()}}}};
    return out;
}

// ----------------------------------------------------------------------------
// decay_rate
// ----------------------------------------------------------------------------

struct DecayRatePlan {
    std::size_t n = 1;
    double x_min = 1e-3;
    double x_max = 1e3;
    std::size_t points = 61;
    bool log_spacing = true;
    double gamma_plus2 = 1.0;
    bool numerical = true;
};

inline DecayRatePlan parse_decay_rate(const json& cfg) {
    const Fields f(cfg, "config", {"experiment", "output", "decay_rate"});
    const Fields d(f.raw("decay_rate"), "decay_rate",
                   {"N", "x_min", "x_max", "points", "spacing", "gamma_plus2", "numerical_columns"});
    DecayRatePlan p;
    p.n = d.count("N", 1, kMaxSymmetricSpins, 1);
    p.x_min = d.positive("x_min");
    p.x_max = d.positive("x_max");
    if (!(p.x_max > p.x_min)) throw ValidationError("decay_rate.x_max must exceed x_min");
    p.points = d.count("points", 2, 100000);
    p.log_spacing = d.choice("spacing", {"log", "linear"}, "log") == "log";
    p.gamma_plus2 = d.has("gamma_plus2") ? d.positive("gamma_plus2") : 1.0;
    if (d.has("numerical_columns")) {
        if (!d.raw("numerical_columns").is_boolean()) throw ValidationError("decay_rate.numerical_columns must be a boolean");
        p.numerical = d.raw("numerical_columns").get<bool>();
    }
    return p;
}

inline std::vector<double> decay_rate_grid(const DecayRatePlan& p) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < p.points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(p.points - 1);
        xs.push_back(p.log_spacing ? std::exp(std::log(p.x_min) + f * (std::log(p.x_max) - std::log(p.x_min)))
                                   : p.x_min + f * (p.x_max - p.x_min));
    }
    xs.front() = p.x_min;
    xs.back() = p.x_max;
    return xs;
}

inline RunOutput run_decay_rate(const DecayRatePlan& p) {
    const auto m = collective_model(p.n, 1.0);
    const Eigen::VectorXcd d1 = dicke_state(m, 1);
    const Operator excited = d1 * d1.adjoint();
    std::vector<std::string> header{"x", "mu", "gamma_eff", "reference", "gaussian"};
    if (p.numerical) {
        header.push_back("quadrature");
        header.push_back("generator");
    }
    CsvTable table(header);
    double ref_err = 0.0, num_err = 0.0;
    const auto xs = decay_rate_grid(p);
    std::vector<double> ratios;
    for (double x : xs) {
        const double mu = std::sqrt(x / static_cast<double>(p.n));
        const double g = effective_decay_rate(p.n, mu, p.gamma_plus2);
        const double ref = p.gamma_plus2 * 2.0 * x / (1.0 + 4.0 * x);
        ref_err = std::max(ref_err, std::abs(g - ref) / ref);
        std::vector<double> row{x, mu, g, ref, gaussian_decay_rate(p.n, mu, p.gamma_plus2)};
        if (p.numerical) {
            const double q = effective_decay_rate_quadrature(p.n, mu, p.gamma_plus2);
            const double e = PoissonGenerator({m.h, m.l, mu, 0.0, p.gamma_plus2}).apply(excited)(0, 0).real();
            num_err = std::max({num_err, std::abs(q - g) / g, std::abs(e - g) / g});
            row.push_back(q);
            row.push_back(e);
        }
        table.add_row(row);
        ratios.push_back(g / p.gamma_plus2);
    }
    RunOutput out;
    out.derived = {{"N", p.n}, {"gamma_plus2", p.gamma_plus2}};
    out.results = {{"max_rel_err_reference", ref_err},
                   {"small_x_ratio_to_2x", ratios.front() / (2.0 * xs.front())},
                   {"large_x_ratio_to_half", ratios.back() / 0.5}};
    if (p.numerical) out.results["max_rel_err_numerical"] = num_err;
    out.tables.emplace_back("decay_rate.csv", std::move(table));
    return out;
}

// ----------------------------------------------------------------------------
// converge
// ----------------------------------------------------------------------------

struct ConvergePlan {
    detail::SpinSetup setup;
    LadderBathSpec bath;
    std::vector<double> times;
    std::string initial_state;
    std::vector<std::string> observables;
    PropagationOptions solver;
};

inline ConvergePlan parse_converge(const json& cfg) {
    const Fields f(cfg, "config",
                   {"experiment", "output", "model", "N", "omega", "representation", "poisson", "bath", "times",
                    "initial_state", "observables", "solver"});
    ConvergePlan p;
    p.setup = detail::parse_spin_setup(f);
    p.bath = parse_ladder_bath(f.raw("bath"), true);
    check_mu_consistency(p.bath, p.setup.poisson.mu);
    const CompositeSetup cs{p.setup.model.h, p.setup.model.l,
                            ladder_bath_params(p.bath, p.setup.poisson, p.bath.gamma_minus.front()),
                            ground_state(p.setup.model)};
    cs.validate();
    check_composite_cost(cs);
    p.times = parse_times(detail::optional_block(cfg, "times"));
    p.initial_state = f.choice("initial_state", state_names(), "ground_plus_dicke");
    p.observables = parse_observables(f, p.setup.model);
    p.solver = detail::parse_solver(detail::optional_block(cfg, "solver"));
    return p;
}

inline RunOutput run_converge(const ConvergePlan& p) {
    const auto& m = p.setup.model;
    ConvergenceSetup c{m.h,
                       m.l,
                       named_state(m, p.initial_state),
                       p.bath.omega1,
                       p.bath.omega2,
                       p.setup.poisson.gamma_plus1,
                       p.setup.poisson.gamma_plus2,
                       p.setup.poisson.mu,
                       p.bath.gamma_minus,
                       p.times,
                       {}};
    for (const auto& o : p.observables) c.observables.emplace_back(o, named_operator(m, o));
    const ConvergenceResult res = convergence_study(c, p.solver);

    RunOutput out;
    out.derived = detail::poisson_derived(p.setup.spec, p.setup.poisson);
    out.derived["ladder"] = json::array();
    for (double gm : p.bath.gamma_minus) {
        out.derived["ladder"].push_back(detail::bath_derived(ladder_bath_params(p.bath, p.setup.poisson, gm)));
    }

    CsvTable rows({"gamma_minus", "lambda", "observable", "max_dev", "final_dev", "markov_ratio"});
    std::map<std::string, std::vector<double>> devs;
    for (const auto& r : res.rows) {
        rows.add_row({format_double(r.gamma_minus), format_double(r.lambda), r.observable, format_double(r.max_dev),
                      format_double(r.final_dev), format_double(r.markov_ratio)});
        devs[r.observable].push_back(r.max_dev);
    }
    std::vector<std::string> header{"t"};
    for (const auto& o : p.observables) header.push_back("poisson_" + o);
    for (double gm : p.bath.gamma_minus)
        for (const auto& o : p.observables) header.push_back(o + "_gm" + detail::number_tag(gm));
    CsvTable traj(header);
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        std::vector<double> row{p.times[i]};
        for (const auto& o : p.observables) row.push_back(res.poisson.observables.at(o)[i]);
        for (const auto& t : res.composite)
            for (const auto& o : p.observables) row.push_back(t.observables.at(o)[i]);
        traj.add_row(row);
    }
    for (const auto& [o, d] : devs) out.results[o] = {{"max_dev", d}, {"strictly_decreasing", detail::strictly_decreasing(d)}};
    out.tables.emplace_back("converge.csv", std::move(rows));
    out.tables.emplace_back("converge_trajectories.csv", std::move(traj));
    return out;
}

// ----------------------------------------------------------------------------
// multitime
// ----------------------------------------------------------------------------

struct MultitimePlan {
    detail::SpinSetup setup;
    LadderBathSpec bath;
    std::string initial_state;
    std::string op;
    std::vector<std::vector<double>> points;
    PropagationOptions solver;
};

inline MultitimePlan parse_multitime(const json& cfg) {
    const Fields f(cfg, "config",
                   {"experiment", "output", "model", "N", "omega", "representation", "poisson", "bath", "initial_state",
                    "operator", "grid", "solver"});
    MultitimePlan p;
    p.setup = detail::parse_spin_setup(f);
    p.bath = parse_ladder_bath(f.raw("bath"), true);
    check_mu_consistency(p.bath, p.setup.poisson.mu);
    const CompositeSetup cs{p.setup.model.h, p.setup.model.l,
                            ladder_bath_params(p.bath, p.setup.poisson, p.bath.gamma_minus.front()),
                            ground_state(p.setup.model)};
    cs.validate();
    check_composite_cost(cs);
    p.initial_state = f.choice("initial_state", state_names(), "ground_plus_dicke");
    p.op = f.text("operator", "jx");
    (void)named_operator(p.setup.model, p.op);

    const Fields g(f.raw("grid"), "grid", {"t2", "delta", "points"});
    if (g.has("points")) {
        if (g.has("t2") || g.has("delta")) throw ValidationError("grid: give either points or t2/delta");
        const json& pts = g.raw("points");
        if (!pts.is_array() || pts.empty()) throw ValidationError("grid.points must be a non-empty array");
        for (const auto& row : pts) {
            p.points.push_back(number_row(row, "grid.points"));
        }
    } else {
        const auto t2 = g.numbers("t2"), delta = g.numbers("delta");
        if (t2.empty() || delta.empty()) throw ValidationError("grid.t2 and grid.delta must not be empty");
        for (double a : t2)
            for (double d : delta) p.points.push_back({a + d, a});
    }
    for (const auto& ts : p.points) {
        if (ts.size() != p.points.front().size()) throw ValidationError("grid.points rows must have equal length");
        MultiTimeSpec{named_operator(p.setup.model, p.op), ts}.validate();
    }
    p.solver = detail::parse_solver(detail::optional_block(cfg, "solver"));
    return p;
}

inline RunOutput run_multitime(const MultitimePlan& p) {
    const auto& m = p.setup.model;
    const Operator a = named_operator(m, p.op);
    const DensityMatrix rho0 = named_state(m, p.initial_state);
    const std::size_t n = p.points.front().size();

    std::vector<std::string> header;
    for (std::size_t i = 0; i < n; ++i) header.push_back("t" + std::to_string(i + 1));
    header.push_back("regression_re");
    header.push_back("regression_im");
    for (double gm : p.bath.gamma_minus) {
        const std::string tag = "_gm" + detail::number_tag(gm);
        header.push_back("exact_re" + tag);
        header.push_back("exact_im" + tag);
        header.push_back("abs_dev" + tag);
    }
    CsvTable table(header);
    std::vector<double> max_dev(p.bath.gamma_minus.size(), 0.0);
    const PoissonMEParams params = p.setup.params();
    for (const auto& ts : p.points) {
        const MultiTimeSpec spec{a, ts};
        const Complex reg = multitime_regression(params, rho0, spec, p.solver);
        std::vector<double> row = ts;
        row.push_back(reg.real());
        row.push_back(reg.imag());
        for (std::size_t r = 0; r < p.bath.gamma_minus.size(); ++r) {
            const CompositeSetup s{m.h, m.l, ladder_bath_params(p.bath, p.setup.poisson, p.bath.gamma_minus[r]), rho0};
            const Complex ex = multitime_exact(s, spec, p.solver);
            const double dev = std::abs(ex - reg);
            max_dev[r] = std::max(max_dev[r], dev);
            row.push_back(ex.real());
            row.push_back(ex.imag());
            row.push_back(dev);
        }
        table.add_row(row);
    }
    RunOutput out;
    out.derived = detail::poisson_derived(p.setup.spec, p.setup.poisson);
    out.derived["ladder"] = json::array();
    for (double gm : p.bath.gamma_minus) {
        out.derived["ladder"].push_back(detail::bath_derived(ladder_bath_params(p.bath, p.setup.poisson, gm)));
    }
    out.results = {{"operator", p.op},
                   {"insertions", n},
                   {"max_dev", max_dev},
                   {"strictly_decreasing", detail::strictly_decreasing(max_dev)}};
    out.tables.emplace_back("multitime.csv", std::move(table));
    return out;
}

// ----------------------------------------------------------------------------
// Dispatch, output and sweep
// ----------------------------------------------------------------------------

using Plan = std::variant<SimulatePlan, SteadyPlan, CorrPlan, DecayRatePlan, ConvergePlan, MultitimePlan>;

inline Plan parse_plan(Kind kind, const json& cfg) {
    detail::check_kind(cfg, kind);
    switch (kind) {
        case Kind::simulate: return parse_simulate(cfg);
        case Kind::steady: return parse_steady(cfg);
        case Kind::corr: return parse_corr(cfg);
        case Kind::decay_rate: return parse_decay_rate(cfg);
        case Kind::converge: return parse_converge(cfg);
        case Kind::multitime: return parse_multitime(cfg);
        case Kind::sweep: break;
    }
    throw ValidationError("sweep configs cannot be nested");
}

inline RunOutput run_plan(const Plan& plan) {
    return std::visit(
        [](const auto& p) -> RunOutput {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SimulatePlan>) return run_simulate(p);
            else if constexpr (std::is_same_v<T, SteadyPlan>) return run_steady(p);
            else if constexpr (std::is_same_v<T, CorrPlan>) return run_corr(p);
            else if constexpr (std::is_same_v<T, DecayRatePlan>) return run_decay_rate(p);
            else if constexpr (std::is_same_v<T, ConvergePlan>) return run_converge(p);
            else return run_multitime(p);
        },
        plan);
}

/// Writes every table and summary.json into `out_dir`; returns the summary.
inline json write_outputs(const fs::path& out_dir, Kind kind, const json& echo, const RunOutput& r) {
    json summary{{"experiment", to_string(kind)},
                 {"config", echo},
                 {"derived", r.derived},
                 {"results", r.results},
                 {"outputs", json::array()}};
    for (const auto& [name, table] : r.tables) {
        write_atomic(out_dir / name, table.str());
        summary["outputs"].push_back({{"file", name}, {"columns", table.header()}, {"rows", table.rows()}});
    }
    write_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

struct SweepRun {
    std::string name;
    Kind kind = Kind::simulate;
    json config;
};

struct SweepPlan {
    std::size_t workers = 1;
    std::vector<SweepRun> runs;
};

inline bool valid_run_name(const std::string& s) {
    return !s.empty() && s != "." && s != ".." && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

/// Parses a sweep; file references are resolved against `base_dir` and inlined.
inline SweepPlan parse_sweep(const json& cfg, const fs::path& base_dir) {
    detail::check_kind(cfg, Kind::sweep);
    const Fields f(cfg, "config", {"experiment", "output", "workers", "runs"});
    SweepPlan p;
    p.workers = f.count("workers", 1, 64, 1);
    const json& runs = f.raw("runs");
    if (!runs.is_array() || runs.empty()) throw ValidationError("runs must be a non-empty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string where = "runs[" + std::to_string(i) + "]";
        const Fields r(runs[i], where, {"name", "config", "path"});
        SweepRun run;
        run.name = r.text("name");
        if (!valid_run_name(run.name)) throw ValidationError(where + ".name must use [A-Za-z0-9_.-] only");
        if (!names.insert(run.name).second) throw ValidationError("duplicate run name '" + run.name + "'");
        if (r.has("config") == r.has("path")) throw ValidationError(where + ": give exactly one of config or path");
        run.config = r.has("config") ? r.raw("config") : load_config(base_dir / r.text("path"));
        if (!run.config.is_object() || !run.config.contains("experiment")) {
            throw ValidationError(where + ": run configs must name their experiment");
        }
        if (!run.config.at("experiment").is_string()) throw ValidationError(where + ": experiment must be a string");
        run.kind = parse_kind(run.config.at("experiment").get<std::string>());
        if (run.kind == Kind::sweep) throw ValidationError(where + ": sweep configs cannot be nested");
        try {
            (void)parse_plan(run.kind, run.config);
        } catch (const ValidationError& e) {
            throw ValidationError(where + " (" + run.name + "): " + e.what());
        }
        p.runs.push_back(std::move(run));
    }
    return p;
}

inline json sweep_echo(const SweepPlan& p, const json& cfg) {
    json echo = cfg;
    echo["experiment"] = "sweep";
    echo["runs"] = json::array();
    for (const auto& r : p.runs) echo["runs"].push_back({{"name", r.name}, {"config", r.config}});
    return echo;
}

/// Runs every configuration of the sweep on a worker pool; each run writes into out_dir/<name>.
inline RunOutput run_sweep(const SweepPlan& p, const fs::path& out_dir) {
    std::vector<json> status(p.runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < p.runs.size(); i = next++) {
            const auto& run = p.runs[i];
            json st{{"name", run.name}, {"experiment", to_string(run.kind)}, {"output", run.name}};
            try {
                json echo = run.config;
                const RunOutput r = run_plan(parse_plan(run.kind, run.config));
                write_outputs(out_dir / run.name, run.kind, echo, r);
                st["exit_code"] = static_cast<int>(ok);
            } catch (const std::exception& e) {
                st["exit_code"] = exit_code_for(e);
                st["error"] = error_record(e);
            }
            status[i] = std::move(st);
        }
    };
    const std::size_t n_threads = std::min(p.workers, p.runs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    RunOutput out;
    out.results["runs"] = status;
    for (const auto& s : status) out.exit_code = std::max(out.exit_code, s.at("exit_code").get<int>());
    out.results["failed"] = std::count_if(status.begin(), status.end(), [](const json& s) { return s.at("exit_code") != 0; });
    out.derived["workers"] = n_threads;
    return out;
}

/// Output directory: explicit override, else the config's "output" entry, else "results/<kind>".
inline fs::path output_dir(const json& cfg, Kind kind, const std::optional<fs::path>& override_dir) {
    if (override_dir) return *override_dir;
    if (cfg.is_object() && cfg.contains("output")) {
        if (!cfg.at("output").is_string() || cfg.at("output").get<std::string>().empty()) {
            throw ValidationError("output must be a non-empty string");
        }
        return cfg.at("output").get<std::string>();
    }
    return fs::path("results") / to_string(kind);
}

/// Parses and checks a configuration without running it.
inline void validate_config(Kind kind, const json& cfg, const fs::path& base_dir = ".") {
    if (kind == Kind::sweep) {
        (void)parse_sweep(cfg, base_dir);
    } else {
        (void)parse_plan(kind, cfg);
    }
    (void)output_dir(cfg, kind, std::nullopt);
}

/// Full pipeline; returns the written summary and the exit code.
inline std::pair<json, int> run_experiment(Kind kind, const json& cfg, const fs::path& out_dir,
                                           const fs::path& base_dir = ".") {
    if (kind == Kind::sweep) {
        const SweepPlan plan = parse_sweep(cfg, base_dir);
        const RunOutput r = run_sweep(plan, out_dir);
        return {write_outputs(out_dir, kind, sweep_echo(plan, cfg), r), r.exit_code};
    }
    const Plan plan = parse_plan(kind, cfg);
    json echo = cfg;
    echo["experiment"] = to_string(kind);
    const RunOutput r = run_plan(plan);
    return {write_outputs(out_dir, kind, echo, r), r.exit_code};
}

} // namespace poissonbath::experiment
