// experiment_config.hpp — Strict JSON configuration schema for the experiment front end
//
// Every object is checked against an explicit key list; unknown keys, wrong types and
// out-of-range values raise ValidationError. Unreadable files and malformed JSON raise
// ConfigParseError. Units: frequencies and rates in units of Gamma_2^+ (1 by default), times in 1/Gamma_2^+.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "poissonbath/models.hpp"
#include "poissonbath/telegraph_bath.hpp"

namespace poissonbath::experiment {

using json = nlohmann::json;

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { simulate, steady, corr, decay_rate, converge, multitime, sweep };

inline const std::map<std::string, Kind>& kind_names() {
    static const std::map<std::string, Kind> names{
        {"simulate", Kind::simulate}, {"steady", Kind::steady},       {"corr", Kind::corr},
        {"decay_rate", Kind::decay_rate}, {"converge", Kind::converge}, {"multitime", Kind::multitime},
        {"sweep", Kind::sweep},
    };
    return names;
}

inline std::string to_string(Kind k) {
    for (const auto& [name, kind] : kind_names())
        if (kind == k) return name;
    return "unknown";
}

inline Kind parse_kind(const std::string& name) {
    const auto it = kind_names().find(name);
    if (it == kind_names().end()) throw ValidationError("unknown experiment kind '" + name + "'");
    return it->second;
}

inline json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

// ----------------------------------------------------------------------------
// Strict field access
// ----------------------------------------------------------------------------

class Fields {
public:
    Fields(const json& j, std::string where, std::initializer_list<const char*> allowed) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ValidationError(where_ + " must be a JSON object");
        for (const auto& [key, _] : j_.items()) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
                throw ValidationError("unknown key '" + key + "' in " + where_);
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const {
        if (!has(key)) throw ValidationError("missing required key '" + std::string(key) + "' in " + where_);
        return j_.at(key);
    }
    std::string path(const char* key) const { return where_ + "." + key; }

    double number(const char* key) const {
        const json& v = raw(key);
        if (!v.is_number()) throw ValidationError(path(key) + " must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError(path(key) + " must be finite");
        return x;
    }
    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    double positive(const char* key) const {
        const double x = number(key);
        if (!(x > 0.0)) throw ValidationError(path(key) + " must be > 0");
        return x;
    }
    double non_negative(const char* key) const {
        const double x = number(key);
        if (!(x >= 0.0)) throw ValidationError(path(key) + " must be >= 0");
        return x;
    }
    double non_negative(const char* key, double fallback) const { return has(key) ? non_negative(key) : fallback; }

    std::size_t count(const char* key, std::size_t lo, std::size_t hi) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ValidationError(path(key) + " must be an integer");
        const auto x = v.get<long long>();
        if (x < static_cast<long long>(lo) || x > static_cast<long long>(hi)) {
            throw ValidationError(path(key) + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return static_cast<std::size_t>(x);
    }
    std::size_t count(const char* key, std::size_t lo, std::size_t hi, std::size_t fallback) const {
        return has(key) ? count(key, lo, hi) : fallback;
    }

    std::string text(const char* key) const {
        const json& v = raw(key);
        if (!v.is_string()) throw ValidationError(path(key) + " must be a string");
        return v.get<std::string>();
    }
    std::string text(const char* key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

    std::string choice(const char* key, std::initializer_list<const char*> options, const char* fallback = nullptr) const {
        if (!has(key) && fallback) return fallback;
        const std::string s = text(key);
        if (std::none_of(options.begin(), options.end(), [&](const char* o) { return s == o; })) {
            std::string list;
            for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
            throw ValidationError(path(key) + " must be one of {" + list + "}, got '" + s + "'");
        }
        return s;
    }

    std::vector<double> numbers(const char* key) const {
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(path(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
                throw ValidationError(path(key) + " must contain finite numbers only");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const char* key) const {
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(path(key) + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& x : v) {
            if (!x.is_string()) throw ValidationError(path(key) + " must contain strings only");
            out.push_back(x.get<std::string>());
        }
        return out;
    }

private:
    const json& j_;
    std::string where_;
};

// ----------------------------------------------------------------------------
// Blocks
// ----------------------------------------------------------------------------

struct ModelSpec {
    std::size_t n = 1;
    double omega = 1.0;
    Representation representation = Representation::symmetric;

    CollectiveModel build() const { return collective_model(n, omega, representation); }
};

/// Top-level keys: "model": "collective" | "qubit", "N", "omega", "representation".
inline ModelSpec parse_model(const Fields& f) {
    ModelSpec m;
    const std::string kind = f.choice("model", {"collective", "qubit"});
    m.omega = f.number("omega", 1.0);
    const std::string rep = f.choice("representation", {"symmetric", "full"}, "symmetric");
    m.representation = rep == "full" ? Representation::full : Representation::symmetric;
    if (kind == "qubit") {
        m.n = f.count("N", 1, 1, 1);
    } else {
        m.n = f.count("N", 1, m.representation == Representation::full ? kMaxFullSpins : kMaxSymmetricSpins);
    }
    return m;
}

struct PoissonSpec {
    double mu = 0.5;
    double gamma_plus1 = 0.0;
    double gamma_plus2 = 1.0;
    std::optional<double> beta; // detailed-balance mode: Gamma_1^+ = Gamma_2^+ exp(-beta omega)
};

/// "poisson": {"mu", "gamma_plus2", and one of "gamma_plus1" | "beta"}
inline PoissonSpec parse_poisson(const json& j, double omega) {
    const Fields f(j, "poisson", {"mu", "gamma_plus1", "gamma_plus2", "beta"});
    PoissonSpec p;
    p.mu = f.positive("mu");
    p.gamma_plus2 = f.non_negative("gamma_plus2", 1.0);
    if (f.has("beta") && f.has("gamma_plus1")) {
        throw ValidationError("poisson: give either gamma_plus1 or beta (detailed balance), not both");
    }
    if (f.has("beta")) {
        p.beta = f.number("beta");
        p.gamma_plus1 = p.gamma_plus2 * std::exp(-*p.beta * omega);
    } else {
        p.gamma_plus1 = f.non_negative("gamma_plus1", 0.0);
    }
    return p;
}

/// Times: {"t_max", "points"} (uniform grid from 0) or {"values": [...]}; default 10 / 201.
inline std::vector<double> parse_times(const json* j) {
    if (!j) {
        std::vector<double> ts(201);
        for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = 10.0 * static_cast<double>(i) / 200.0;
        return ts;
    }
    const Fields f(*j, "times", {"t_max", "points", "values"});
    std::vector<double> ts;
    if (f.has("values")) {
        if (f.has("t_max") || f.has("points")) throw ValidationError("times: give either values or t_max/points");
        ts = f.numbers("values");
    } else {
        const double t_max = f.positive("t_max");
        const std::size_t n = f.count("points", 2, 100000);
        for (std::size_t i = 0; i < n; ++i) ts.push_back(t_max * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    if (ts.empty()) throw ValidationError("times: the time grid is empty");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.0) throw ValidationError("times: values must be >= 0");
        if (i > 0 && ts[i] < ts[i - 1]) throw ValidationError("times: values must be ascending");
    }
    return ts;
}

/// Composite-bath block used with a Poisson block: {"omega1", "omega2", "gamma_minus", "lambda"?}.
/// gamma_minus is a number (both qubits) or, when `ladder` is set, an ascending list.
struct LadderBathSpec {
    double omega1 = 3.0;
    double omega2 = 2.0;
    std::vector<double> gamma_minus;
    std::optional<double> lambda;
};

inline LadderBathSpec parse_ladder_bath(const json& j, bool ladder) {
    const Fields f(j, "bath", {"omega1", "omega2", "gamma_minus", "lambda"});
    LadderBathSpec b;
    b.omega1 = f.number("omega1");
    b.omega2 = f.number("omega2");
    if (f.raw("gamma_minus").is_array()) {
        if (!ladder) throw ValidationError("bath.gamma_minus must be a single number for this experiment");
        b.gamma_minus = f.numbers("gamma_minus");
        if (b.gamma_minus.empty()) throw ValidationError("bath.gamma_minus ladder is empty");
        for (std::size_t i = 0; i < b.gamma_minus.size(); ++i) {
            if (!(b.gamma_minus[i] > 0.0)) throw ValidationError("bath.gamma_minus entries must be > 0");
            if (i > 0 && !(b.gamma_minus[i] > b.gamma_minus[i - 1])) {
                throw ValidationError("bath.gamma_minus ladder must be strictly ascending");
            }
        }
    } else {
        b.gamma_minus = {f.positive("gamma_minus")};
    }
    if (f.has("lambda")) {
        if (b.gamma_minus.size() != 1) throw ValidationError("bath.lambda cannot be combined with a gamma_minus ladder");
        b.lambda = f.number("lambda");
    }
    return b;
}

/// Checks lambda = mu * Gamma_1^- when both are given.
inline void check_mu_consistency(const LadderBathSpec& b, double mu) {
    if (b.lambda) {
        const double expected = mu * b.gamma_minus.front();
        if (std::abs(*b.lambda - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
            throw ValidationError("bath.lambda = " + std::to_string(*b.lambda) + " inconsistent with mu * gamma_minus = " +
                                  std::to_string(expected));
        }
    }
}

inline bath::BathParams ladder_bath_params(const LadderBathSpec& b, const PoissonSpec& p, double gamma_minus) {
    bath::BathParams out;
    out.omega1 = b.omega1;
    out.omega2 = b.omega2;
    out.gamma_plus1 = p.gamma_plus1;
    out.gamma_plus2 = p.gamma_plus2;
    out.gamma_minus1 = out.gamma_minus2 = gamma_minus;
    out.lambda = p.mu * gamma_minus;
    return out;
}

/// Stand-alone bath block for correlator experiments:
/// {"omega1", "omega2", "gamma_minus1", "gamma_minus2", ("gamma_plus1", "gamma_plus2") | "beta", "lambda" | "mu"}
inline bath::BathParams parse_full_bath(const json& j) {
    const Fields f(j, "bath",
                   {"omega1", "omega2", "gamma_minus1", "gamma_minus2", "gamma_plus1", "gamma_plus2", "beta", "lambda", "mu"});
    const double w1 = f.number("omega1"), w2 = f.number("omega2");
    const double gm1 = f.positive("gamma_minus1"), gm2 = f.positive("gamma_minus2");
    if (f.has("lambda") == f.has("mu")) throw ValidationError("bath: give exactly one of lambda or mu");
    const double lambda = f.has("lambda") ? f.number("lambda") : f.number("mu") * gm1;
    if (f.has("beta")) {
        if (f.has("gamma_plus1") || f.has("gamma_plus2")) {
            throw ValidationError("bath: detailed-balance mode (beta) derives gamma_plus1/2; do not give them");
        }
        return bath::BathParams::detailed_balance(w1, w2, gm1, gm2, f.number("beta"), lambda);
    }
    bath::BathParams p;
    p.omega1 = w1;
    p.omega2 = w2;
    p.gamma_minus1 = gm1;
    p.gamma_minus2 = gm2;
    p.gamma_plus1 = f.non_negative("gamma_plus1");
    p.gamma_plus2 = f.non_negative("gamma_plus2");
    p.lambda = lambda;
    return p;
}

// ----------------------------------------------------------------------------
// Named operators and states on a collective model
// ----------------------------------------------------------------------------

inline Operator named_operator(const CollectiveModel& m, const std::string& name) {
    const Operator l = m.l, ld = m.l.adjoint();
    if (name == "p0") return m.ground_projector();
    if (name == "jx") return l + ld;
    if (name == "jy") return Complex{0.0, 1.0} * (l - ld);
    if (name == "jz") return ld * l - l * ld;
    if (name == "excitations") return 0.5 * (Operator(ld * l - l * ld) + static_cast<double>(m.n) * identity(m.dim()));
    throw ValidationError("unknown operator '" + name + "' (expected p0, jx, jy, jz, excitations)");
}

inline const std::initializer_list<const char*>& state_names() {
    static const std::initializer_list<const char*> names{"ground", "dicke1", "ground_plus_dicke"};
    return names;
}

inline DensityMatrix named_state(const CollectiveModel& m, const std::string& name) {
    if (name == "ground") return ground_state(m);
    if (name == "dicke1") return DensityMatrix::pure(dicke_state(m, 1));
    if (name == "ground_plus_dicke") return ground_plus_dicke_state(m);
    throw ValidationError("unknown initial_state '" + name + "'");
}

inline std::vector<double> number_row(const json& row, const std::string& where) {
    if (!row.is_array()) throw ValidationError(where + " rows must be arrays of numbers");
    std::vector<double> out;
    for (const auto& x : row) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) throw ValidationError(where + " must contain finite numbers only");
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::vector<std::string> parse_observables(const Fields& f, const CollectiveModel& m) {
    std::vector<std::string> obs = f.has("observables") ? f.strings("observables") : std::vector<std::string>{"p0", "jx"};
    if (obs.empty()) throw ValidationError("observables must not be empty");
    for (const auto& o : obs) (void)named_operator(m, o);
    return obs;
}

} // namespace poissonbath::experiment
