// multitime.hpp — Multi-time correlation functions <A(t1) A(t2) ... A(tn)> with t1 >= ... >= tn >= 0
//
//   Tr[ A e^{L(t1-t2)} A e^{L(t2-t3)} ... A e^{L tn} rho0 ]
//
// evaluated either on the exact system (x) bath space or with the Poisson master-equation generator
// standing in for L (quantum regression).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "poissonbath/composite.hpp"
#include "poissonbath/errors.hpp"
#include "poissonbath/operator.hpp"
#include "poissonbath/poisson_generator.hpp"
#include "poissonbath/propagate.hpp"

namespace poissonbath {

inline constexpr std::size_t kMaxInsertions = 4;

struct MultiTimeSpec {
    Operator a;
    std::vector<double> times; // t1 >= t2 >= ... >= tn >= 0

    void validate() const {
        detail::require_square(a, "A_S");
        if (times.empty() || times.size() > kMaxInsertions) {
            throw CostGuardExceeded("multi-time correlator needs 1.." + std::to_string(kMaxInsertions) + " times");
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i]) || times[i] < 0.0) throw InvalidArgument("insertion times must be >= 0");
            if (i > 0 && times[i] > times[i - 1]) throw InvalidArgument("insertion times must be descending");
        }
    }
};

enum class InsertionSide { left, right };

/// Tr[ X_1 e^{gen(t1-t2)} X_2 ... X_n e^{gen tn} v0 ] where X_i multiplies by `a` from `sides[i]`.
template <LinearGenerator G>
Complex insertion_chain(const G& gen, const LiouvilleVector& v0, const Operator& a, const std::vector<double>& times,
                        const std::vector<InsertionSide>& sides, const PropagationOptions& opt = {}) {
    if (sides.size() != times.size()) throw DimensionMismatch("one insertion side per time required");
    if (static_cast<std::size_t>(a.rows()) != gen.hilbert_dim()) throw DimensionMismatch("insertion vs generator");
    Operator rho = unvectorize(v0);
    double now = 0.0;
    for (std::size_t i = times.size(); i-- > 0;) {
        const double dt = times[i] - now;
        if (dt > 0.0) rho = unvectorize(evolve(gen, vectorize(rho), {dt}, opt).back());
        now = times[i];
        rho = sides[i] == InsertionSide::left ? Operator(a * rho) : Operator(rho * a);
    }
    return rho.trace();
}

/// Exact correlator of A_S (x) I on the composite space.
inline Complex multitime_exact(const CompositeSetup& s, const MultiTimeSpec& spec, const PropagationOptions& opt = {}) {
    spec.validate();
    s.validate();
    detail::require_same_dim(s.h_s, spec.a, "A_S vs H_S");
    const Operator a = kron(spec.a, identity(kBathDim));
    const LiouvilleVector v0 = composite_initial_state(s).vectorized();
    const std::vector<InsertionSide> sides(spec.times.size(), InsertionSide::left);
    return detail::with_composite_generator(
        s, [&](const auto& gen) { return insertion_chain(gen, v0, a, spec.times, sides, opt); });
}

/// Same correlator with the Poisson master-equation generator.
inline Complex multitime_regression(const PoissonMEParams& p, const DensityMatrix& rho0, const MultiTimeSpec& spec,
                                    const PropagationOptions& opt = {}) {
    spec.validate();
    detail::require_same_dim(p.h, spec.a, "A_S vs H_S");
    if (rho0.dim() != static_cast<std::size_t>(p.h.rows())) throw DimensionMismatch("rho0 vs H_S");
    const std::vector<InsertionSide> sides(spec.times.size(), InsertionSide::left);
    return insertion_chain(poisson_liouvillian(p), rho0.vectorized(), spec.a, spec.times, sides, opt);
}

} // namespace poissonbath
