// test_telegraph_bath.cpp — Two-qubit telegraph bath: generator, Gibbs state, correlators

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace poissonbath;
using namespace poissonbath::bath;
using testutil::max_abs;

namespace {

BathParams balanced() { return BathParams::detailed_balance(3.0, 2.0, 4.0, 5.0, 1.5, 2.0); }

BathParams no_absorption() {
    BathParams p;
    p.omega1 = 3.0;
    p.omega2 = 2.0;
    p.gamma_minus1 = 4.0;
    p.gamma_minus2 = 5.0;
    p.lambda = 2.0;
    return p;
}

// Gamma_1^+ = 0 only; correlators survive through qubit 2's excited population.
BathParams cold_first_qubit() {
    BathParams p = no_absorption();
    p.gamma_plus2 = 1.0;
    return p;
}

Operator propagate_op(const BathParams& p, const Operator& x, double t) {
    return unvectorize(matrix_exponential(SuperOperator(bath_liouvillian(p).matrix() * t)).apply(vectorize(x)));
}

std::vector<CorrelatorIndex> all_indices() {
    std::vector<CorrelatorIndex> out;
    for (Sign l : {Sign::plus, Sign::minus})
        for (Sign k : {Sign::plus, Sign::minus}) out.push_back({l, k});
    return out;
}

} // namespace

TEST(BathParamsType, DetailedBalanceAndDerivedQuantities) {
    const BathParams p = balanced();
    EXPECT_NEAR(p.gamma_minus1 / p.gamma_plus1, std::exp(1.5 * 3.0), 1e-12 * std::exp(4.5));
    EXPECT_NEAR(p.gamma_minus2 / p.gamma_plus2, std::exp(1.5 * 2.0), 1e-12 * std::exp(3.0));
    EXPECT_DOUBLE_EQ(p.mu(), 0.5);
    EXPECT_DOUBLE_EQ(p.correlation_time(), 0.25);
    BathParams bad = p;
    bad.gamma_plus1 = -1.0;
    EXPECT_THROW(bad.validate(), NegativeRate);
    bad = p;
    bad.gamma_plus1 = bad.gamma_minus1 = 0.0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(BathLiouvillian, NoAbsorptionRelaxesToGround) {
    const DensityMatrix ss = steady_state(bath_liouvillian(no_absorption()));
    Operator gg = Operator::Zero(4, 4);
    gg(0, 0) = 1.0;
    EXPECT_LT(max_abs(ss.op() - gg), 1e-10);
}

TEST(BathLiouvillian, SteadyStateIsGibbs) {
    const BathParams p = balanced();
    const SuperOperator gen = bath_liouvillian(p);
    EXPECT_LT(max_abs(steady_state(gen).op() - bath_gibbs(p).op()), 1e-10);
    EXPECT_LT(gen.apply(bath_gibbs(p).vectorized()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BathLiouvillian, SigmaPlusOscillatesAndDecays) {
    const BathParams p = balanced();
    for (double t : {0.1, 1.0}) {
        const Complex f = std::exp(Complex(-0.5 * p.gamma1() * t, -p.omega1 * t));
        const Operator x = kron(ops::sigma_plus(), single_qubit_gibbs(p.gamma_plus2, p.gamma_minus2));
        EXPECT_LT(max_abs(propagate_op(p, x, t) - f * x), 1e-10);
    }
}

TEST(BathLiouvillian, SingleQubitRelations) {
    // e^{L_B t} acting on single-qubit operators of qubit 1 (tensored with qubit 2's Gibbs state)
    const BathParams p = balanced();
    const Operator eq2 = single_qubit_gibbs(p.gamma_plus2, p.gamma_minus2);
    const double g = p.gamma1();
    const Operator eq1 = single_qubit_gibbs(p.gamma_plus1, p.gamma_minus1);
    for (double t : {0.1, 0.5, 2.0}) {
        const double e = std::exp(-g * t);
        const Complex osc = std::exp(Complex(-0.5 * g * t, p.omega1 * t));
        auto on1 = [&](const Operator& x) { return propagate_op(p, kron(x, eq2), t); };
        EXPECT_LT(max_abs(on1(ops::sigma_minus()) - osc * kron(ops::sigma_minus(), eq2)), 1e-10);
        EXPECT_LT(max_abs(on1(ops::sigma_plus()) - std::conj(osc) * kron(ops::sigma_plus(), eq2)), 1e-10);
        EXPECT_LT(max_abs(on1(ops::sigma_z()) - e * kron(ops::sigma_z(), eq2)), 1e-10);
        const Operator ee_t = eq1 + e * (ops::projector_e() - eq1);
        const Operator gg_t = eq1 + e * (ops::projector_g() - eq1);
        EXPECT_LT(max_abs(on1(ops::projector_e()) - kron(ee_t, eq2)), 1e-10);
        EXPECT_LT(max_abs(on1(ops::projector_g()) - kron(gg_t, eq2)), 1e-10);
    }
}

TEST(BathGibbs, Limits) {
    BathParams p = no_absorption();
    Operator gg = Operator::Zero(4, 4);
    gg(0, 0) = 1.0;
    EXPECT_LT(max_abs(bath_gibbs(p).op() - gg), 1e-15);
    p.gamma_plus1 = p.gamma_minus1;
    p.gamma_plus2 = p.gamma_minus2;
    EXPECT_LT(max_abs(bath_gibbs(p).op() - identity(4) / 4.0), 1e-15);
    const BathParams b = balanced();
    const Operator pe1 = kron(ops::projector_e(), identity(2));
    EXPECT_NEAR(expectation(pe1, bath_gibbs(b)).real(), 1.0 / (1.0 + std::exp(4.5)), 1e-15);
}

TEST(Correlators, InteractionHasZeroEquilibriumMean) {
    const BathParams p = balanced();
    for (const auto& idx : all_indices()) {
        EXPECT_LT(std::abs(npoint_numeric(p, {{idx}, {0.7}})), 1e-15);
    }
}

TEST(Correlators, TwoPointExamples) {
    const BathParams p = balanced();
    const CorrelatorIndex minus_plus{Sign::plus, Sign::minus}, plus_plus{Sign::plus, Sign::plus};
    EXPECT_EQ(two_point_analytic(p, plus_plus, plus_plus, 0.3), Complex(0.0));
    const double expected = p.lambda * p.lambda * p.gamma_plus1 * p.gamma_minus2 / (p.gamma1() * p.gamma2());
    EXPECT_NEAR(std::abs(two_point_analytic(p, minus_plus, plus_plus, 0.0) - expected), 0.0, 1e-15);
}

TEST(Correlators, TwoPointMatchesOracle) {
    for (const BathParams& p : {balanced(), cold_first_qubit()}) {
        for (const auto& a : all_indices())
            for (const auto& b : all_indices())
                for (int i = 0; i < 10; ++i) {
                    const double t = 5.0 / p.gamma1() * i / 9.0;
                    const Complex num = npoint_numeric(p, {{a, b}, {t, 0.0}});
                    EXPECT_LT(std::abs(two_point_analytic(p, a, b, t) - num), 1e-10);
                    // two-point correlators are time-translation invariant
                    EXPECT_LT(std::abs(npoint_numeric(p, {{a, b}, {t + 0.4, 0.4}}) - num), 1e-10);
                    EXPECT_LT(std::abs(npoint_analytic(p, {{a, b}, {t, 0.0}}) - num), 1e-10);
                }
    }
}

TEST(Correlators, CorrelationLikeExamples) {
    const BathParams p = balanced();
    const CorrelatorIndex first{Sign::plus, Sign::minus}, second{Sign::plus, Sign::plus};
    const double t = 0.2;
    const Complex env = bath::detail::envelope(p, Sign::plus, t);
    const double g1 = p.gamma1(), g2 = p.gamma2();
    const Complex s0 = correlationlike_analytic(p, first, second, Sign::minus, t, 0.0);
    const Complex expected = p.lambda * p.lambda / (g1 * g2) * (g1 * g2 - p.gamma_plus1 * p.gamma_minus2) * env;
    EXPECT_LT(std::abs(s0 - expected), 1e-14);
    EXPECT_LT(std::abs(correlationlike_analytic(p, first, second, Sign::minus, t, 60.0)), 1e-14);
    EXPECT_EQ(correlationlike_analytic(p, second, second, Sign::minus, t, 0.1), Complex(0.0));
}

TEST(Correlators, CorrelationLikeMatchesOracle) {
    for (const BathParams& p : {balanced(), cold_first_qubit()}) {
        const SuperOperator gen = bath_liouvillian(p);
        const SuperOperator q = complement_projector(p);
        for (Sign init : {Sign::plus, Sign::minus}) {
            for (const auto& a : all_indices())
                for (const auto& b : all_indices())
                    for (double t : {0.0, 0.13, 0.6})
                        for (double s : {0.0, 0.2, 1.1}) {
                            LiouvilleVector v = vectorize(excited_pair_state(init));
                            v = q.apply(v);
                            v = matrix_exponential(SuperOperator(gen.matrix() * s)).apply(v);
                            v = coupling_superop(p, b).apply(v);
                            v = matrix_exponential(SuperOperator(gen.matrix() * t)).apply(v);
                            v = coupling_superop(p, a).apply(v);
                            const Complex num = (trace_row(4) * v)(0);
                            EXPECT_LT(std::abs(correlationlike_analytic(p, a, b, init, t, s) - num), 1e-10);
                        }
        }
    }
}

TEST(Correlators, FourPointAllPatternsMatchOracle) {
    const std::vector<double> times{1.3, 0.9, 0.35, 0.1};
    for (const BathParams& p : {balanced(), cold_first_qubit()}) {
        const auto idx = all_indices();
        int nonzero = 0;
        for (const auto& a : idx)
            for (const auto& b : idx)
                for (const auto& c : idx)
                    for (const auto& d : idx) {
                        const CorrelatorSpec spec{{a, b, c, d}, times};
                        const Complex num = npoint_numeric(p, spec);
                        const Complex ana = npoint_analytic(p, spec);
                        EXPECT_LT(std::abs(ana - num), 1e-9);
                        if (a.k == b.k || c.k == d.k) {
                            EXPECT_EQ(ana, Complex(0.0));
                        }
                        if (std::abs(num) > 1e-6) ++nonzero;
                    }
        EXPECT_GT(nonzero, 0);
    }
}

TEST(Correlators, LConstraintViolationsFadeAlongLadder) {
    // weight of l-violating 4-point patterns relative to allowed ones, at times scaled with 1/Gamma^-
    std::vector<double> ratios;
    for (double gm : {10.0, 100.0, 1000.0}) {
        BathParams p;
        p.omega1 = 3.0;
        p.omega2 = 2.0;
        p.gamma_plus1 = p.gamma_plus2 = 1.0;
        p.gamma_minus1 = p.gamma_minus2 = gm;
        p.lambda = 0.5 * gm;
        const std::vector<double> times{3.0 / gm, 2.0 / gm, 1.0 / gm, 0.0};
        double violating = 0.0, allowed = 0.0;
        for (const auto& a : all_indices())
            for (const auto& b : all_indices())
                for (const auto& c : all_indices())
                    for (const auto& d : all_indices()) {
                        if (a.k != -b.k || c.k != -d.k) continue;
                        const bool l_ok = value(c.l) * value(c.k) == -value(b.l) * value(b.k);
                        (l_ok ? allowed : violating) += std::abs(npoint_numeric(p, {{a, b, c, d}, times}));
                    }
        ratios.push_back(violating / allowed);
    }
    EXPECT_LT(ratios[1], ratios[0] / 5.0);
    EXPECT_LT(ratios[2], ratios[1] / 5.0);
}

TEST(Correlators, OddOrdersVanish) {
    const BathParams p = balanced();
    for (const auto& a : all_indices())
        for (const auto& b : all_indices())
            for (const auto& c : all_indices()) {
                const CorrelatorSpec spec{{a, b, c}, {0.9, 0.4, 0.1}};
                EXPECT_LT(std::abs(npoint_numeric(p, spec)), 1e-12);
                EXPECT_EQ(npoint_analytic(p, spec), Complex(0.0));
            }
}

TEST(Correlators, SpecValidationAndCostGuard) {
    const BathParams p = balanced();
    const CorrelatorIndex i{};
    EXPECT_THROW(npoint_numeric(p, {{i, i}, {0.1, 0.5}}), InvalidArgument);
    EXPECT_THROW(npoint_numeric(p, {{i, i}, {0.1}}), DimensionMismatch);
    EXPECT_THROW(npoint_numeric(p, {std::vector<CorrelatorIndex>(8, i), std::vector<double>(8, 0.0)}), CostGuardExceeded);
}

TEST(WhiteNoise, AreaApproachesWhiteNoiseWeight) {
    auto params = [](double gm) {
        BathParams p;
        p.omega1 = 3.0;
        p.omega2 = 2.0;
        p.gamma_plus1 = 1.0;
        p.gamma_plus2 = 1.0;
        p.gamma_minus1 = p.gamma_minus2 = gm;
        p.lambda = 0.5 * gm;
        return p;
    };
    const auto a100 = whitenoise_area(params(100.0));
    EXPECT_NEAR(a100.target, 0.25, 1e-15);
    EXPECT_LT(a100.relative_error(), 0.03);
    EXPECT_NEAR(a100.area, a100.area_quadrature, 1e-10 * a100.area);
    const auto a200 = whitenoise_area(params(200.0));
    EXPECT_DOUBLE_EQ(a200.correlation_time, 0.5 * a100.correlation_time);
    const auto a1e4 = whitenoise_area(params(1e4));
    EXPECT_LT(a1e4.relative_error(), 5e-4);
    EXPECT_NEAR(a1e4.area, a1e4.area_quadrature, 1e-10 * a1e4.area);
}

TEST(WhiteNoise, ScaledCorrelatorConverges) {
    // chi_2(x / Gamma^-) / Gamma^- at fixed mu approaches a Gamma^--independent profile
    const CorrelatorIndex first{Sign::plus, Sign::minus}, second{Sign::plus, Sign::plus};
    auto scaled = [&](double gm, double x) {
        BathParams p;
        p.omega1 = 3.0;
        p.omega2 = 2.0;
        p.gamma_plus1 = p.gamma_plus2 = 1.0;
        p.gamma_minus1 = p.gamma_minus2 = gm;
        p.lambda = 0.5 * gm;
        return two_point_analytic(p, first, second, x / gm) / gm;
    };
    for (double x : {0.0, 0.5, 2.0}) {
        const double d1 = std::abs(scaled(1e2, x) - scaled(1e3, x));
        const double d2 = std::abs(scaled(1e3, x) - scaled(1e4, x));
        EXPECT_LT(d2, d1);
    }
}
