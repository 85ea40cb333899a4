#include <gtest/gtest.h>

#include <random>

#include "curvekit/bootstrap.hpp"
#include "curvekit/pricing.hpp"
#include "curvekit/scenario.hpp"
#include "oracles.hpp"

namespace curvekit {
namespace {

class FunctionCurve final : public YieldCurve {
public:
    explicit FunctionCurve(std::function<double(double)> f) : f_(std::move(f)) {}
    double yield_at(double t) const override { return f_(t); }

private:
    std::function<double(double)> f_;
};

Bond coupon_bond(const std::string& id, double coupon, int years, double price = 100.0) {
    Bond b{id, {}, 100.0, static_cast<double>(years), price};
    for (int k = 1; k <= years; ++k) b.cashflows.push_back({static_cast<double>(k), coupon});
    return b;
}

/// Random bond with irregular coupon dates, priced off `curve`.
Bond random_bond(std::mt19937_64& rng, const YieldCurve& curve, int index) {
    std::uniform_real_distribution<double> mat(0.1, 20.0), cpn(0.0, 6.0), stub(0.05, 1.0);
    Bond b;
    b.id = "R" + std::to_string(index);
    b.maturity = mat(rng);
    const double c = cpn(rng);
    if (c > 0.5) {
        std::vector<Cashflow> flows;
        for (double t = b.maturity; t > 0.0; t -= stub(rng)) flows.push_back({t, c});
        std::reverse(flows.begin(), flows.end());
        b.cashflows = flows;
    }
    b.market_price = present_value(curve, b);
    return b;
}

TEST(DiscountTest, Examples) {
    EXPECT_EQ(discount_factor(FlatCurve(0.0), 5.0), 1.0);
    EXPECT_NEAR(discount_factor(FlatCurve(0.03), 2.0), 0.941764533584248711, 1e-15);
    EXPECT_THROW(discount_factor(FlatCurve(0.03), -1.0), DomainError);
    EXPECT_THROW(discount_factor(FlatCurve(0.03), 0.0), DomainError);
    EXPECT_TRUE(std::isfinite(discount_factor(FlatCurve(0.03), 1e-9)));
}

TEST(DiscountTest, ExactlyExpOfMinusTY) {
    const LinearYieldCurve curve({0.5, 2.0, 10.0}, {0.01, 0.025, 0.031});
    for (double t : {0.001, 0.5, 1.3, 7.0, 25.0})
        EXPECT_EQ(discount_factor(curve, t), std::exp(-t * curve.yield_at(t)));
}

TEST(PresentValueTest, Examples) {
    EXPECT_EQ(present_value(FlatCurve(0.0), Bond{"Z", {}, 100.0, 1.0, 100.0}), 100.0);
    const Bond two_coupons{"C", {{1.0, 3.0}, {2.0, 3.0}}, 100.0, 2.0, 100.0};
    EXPECT_NEAR(present_value(FlatCurve(0.02), two_coupons), 101.901908252609556, 1e-10);
}

TEST(PresentValueTest, MatchesLonghandFormulaOnRandomBonds) {
    std::mt19937_64 rng(3);
    const auto y = [](double t) { return 0.02 + 0.01 * (1.0 - std::exp(-t / 3.0)); };
    const FunctionCurve curve(y);
    for (int i = 0; i < 50; ++i) {
        const Bond b = random_bond(rng, curve, i);
        EXPECT_NEAR(present_value(curve, b), oracle::bond_pv(b, y), 1e-11 * b.market_price);
    }
}

TEST(PresentValueTest, StrictlyDecreasingUnderParallelShift) {
    const Bond b = coupon_bond("C", 4.0, 7);
    auto base = std::make_shared<LinearYieldCurve>(std::vector<double>{1.0, 5.0, 10.0}, std::vector<double>{0.01, 0.02, 0.03});
    double previous = present_value(*base, b);
    for (double shift = 0.001; shift < 0.05; shift += 0.001) {
        const double pv = present_value(ShiftedCurve(base, shift), b);
        EXPECT_LT(pv, previous);
        previous = pv;
    }
}

TEST(YieldToMaturityTest, Examples) {
    EXPECT_NEAR(yield_to_maturity(Bond{"Z", {}, 100.0, 2.0, 100.0}), 0.0, 1e-14);
    EXPECT_NEAR(yield_to_maturity(Bond{"Z", {}, 100.0, 2.0, 100.0 * std::exp(-0.05)}), 0.025, 1e-13);
    Bond c = coupon_bond("C", 3.5, 9);
    c.market_price = present_value(FlatCurve(0.03), c);
    EXPECT_NEAR(yield_to_maturity(c), 0.03, 1e-9);
}

TEST(YieldToMaturityTest, OutsideBracketIsNoSolution) {
    EXPECT_THROW(yield_to_maturity(Bond{"Z", {}, 100.0, 2.0, 150.0}), NoSolutionError);
    EXPECT_THROW(yield_to_maturity(Bond{"Z", {}, 100.0, 2.0, 1e-3}), NoSolutionError);
}

TEST(YieldToMaturityTest, RoundTripOnRandomBonds) {
    std::mt19937_64 rng(17);
    const FunctionCurve curve([](double t) { return 0.035 - 0.015 * std::exp(-t / 2.0); });
    for (int i = 0; i < 200; ++i) {
        const Bond b = random_bond(rng, curve, i);
        const double ytm = yield_to_maturity(b);
        EXPECT_LE(std::abs(present_value(FlatCurve(ytm), b) - b.market_price) / b.market_price, 1e-8);
    }
}

TEST(DurationTest, ZeroCouponEqualsMaturity) {
    EXPECT_NEAR(macaulay_duration(Bond{"Z", {}, 100.0, 7.0, 80.0}), 7.0, 1e-12);
}

TEST(DurationTest, CouponBondExampleAndBound) {
    Bond b{"C", {{1.0, 3.0}, {2.0, 3.0}}, 100.0, 2.0, 0.0};
    b.market_price = 3.0 * std::exp(-0.02) + 103.0 * std::exp(-0.04);
    EXPECT_NEAR(macaulay_duration(b), 1.971142875826911, 1e-9);

    std::mt19937_64 rng(8);
    const FlatCurve curve(0.03);
    for (int i = 0; i < 50; ++i) {
        const Bond r = random_bond(rng, curve, i);
        const double d = macaulay_duration(r);
        EXPECT_GT(d, 0.0);
        if (r.cashflows.size() > 1 || (r.cashflows.size() == 1 && r.cashflows[0].time < r.maturity))
            EXPECT_LT(d, r.maturity);
        else
            EXPECT_NEAR(d, r.maturity, 1e-12);
    }
}

TEST(DurationTest, PropagatesYtmFailure) {
    EXPECT_THROW(macaulay_duration(Bond{"Z", {}, 100.0, 2.0, 150.0}), NoSolutionError);
}

TEST(ForwardRateTest, FlatAndLinear) {
    EXPECT_NEAR(forward_rate(FlatCurve(0.027), 3.0, 1e-4), 0.027, 1e-15);
    const FunctionCurve linear([](double t) { return 0.01 + 0.002 * t; });
    for (double t : {0.5, 2.0, 9.0}) EXPECT_NEAR(forward_rate(linear, t, 1e-3), 0.01 + 0.004 * t, 1e-12);
    EXPECT_THROW(forward_rate(linear, 0.5, 0.5), DomainError);
    EXPECT_THROW(forward_rate(linear, 0.5, 0.0), DomainError);
}

MarketSnapshot snapshot_of(std::vector<Bond> bonds) {
    return MarketSnapshot{"d", std::move(bonds), BenchmarkCurve{{1.0, 10.0}, {0.02, 0.02}}};
}

TEST(BootstrapTest, ZeroCouponsOffFlatRecoverRate) {
    std::vector<Bond> bonds;
    for (double t : {0.25, 0.5, 1.0, 3.0, 7.0, 12.0})
        bonds.push_back({"Z" + std::to_string(t), {}, 100.0, t, 100.0 * std::exp(-0.02 * t)});
    const auto curve = bootstrap(snapshot_of(bonds));
    ASSERT_EQ(curve.knot_times().size(), 6u);
    for (double y : curve.knot_yields()) EXPECT_NEAR(y, 0.02, 1e-9);
    EXPECT_TRUE(curve.diagnostics().empty());
}

TEST(BootstrapTest, KnotsAreInterpolatedExactly) {
    ScenarioSpec spec;
    spec.regime = Regime::Rising;
    spec.seed = 2;
    const auto curve = bootstrap(generate_scenario(spec));
    for (std::size_t i = 0; i < curve.knot_times().size(); ++i)
        EXPECT_EQ(curve.yield_at(curve.knot_times()[i]), curve.knot_yields()[i]);
}

TEST(BootstrapTest, NoiseFreeSyntheticSnapshotRepricesEveryBond) {
    for (auto regime : {Regime::Flat, Regime::Rising, Regime::Falling}) {
        ScenarioSpec spec;
        spec.regime = regime;
        spec.seed = 21;
        const auto s = generate_scenario(spec);
        const auto curve = bootstrap(s);
        EXPECT_TRUE(curve.diagnostics().empty());
        for (const auto& bond : s.bonds)
            EXPECT_LE(std::abs(present_value(curve, bond) - bond.market_price) / bond.market_price, 1e-8) << bond.id;
    }
}

TEST(BootstrapTest, EqualMaturityKeepsFirstByIdAndReportsTheRest) {
    Bond a = coupon_bond("A", 2.0, 3);
    Bond b = coupon_bond("B", 5.0, 3);
    Bond z{"Z", {}, 100.0, 1.0, 100.0 * std::exp(-0.02)};
    a.market_price = present_value(FlatCurve(0.02), a);
    b.market_price = present_value(FlatCurve(0.021), b);
    const auto curve = bootstrap(snapshot_of({b, z, a}));
    ASSERT_EQ(curve.knot_times().size(), 2u);
    EXPECT_NEAR(curve.knot_yields()[1], 0.02, 1e-9); // from A
    ASSERT_EQ(curve.diagnostics().size(), 1u);
    EXPECT_EQ(curve.diagnostics()[0].bond_id, "B");
}

TEST(BootstrapTest, UnsolvableBondIsSkippedWithDiagnostic) {
    Bond z1{"Z1", {}, 100.0, 1.0, 100.0 * std::exp(-0.02)};
    Bond bad{"BAD", {}, 100.0, 2.0, 130.0};
    Bond z3{"Z3", {}, 100.0, 3.0, 100.0 * std::exp(-0.06)};
    const auto curve = bootstrap(snapshot_of({z1, bad, z3}));
    EXPECT_EQ(curve.knot_times(), (std::vector<double>{1.0, 3.0}));
    ASSERT_EQ(curve.diagnostics().size(), 1u);
    EXPECT_EQ(curve.diagnostics()[0].bond_id, "BAD");
}

} // namespace
} // namespace curvekit
