#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"
#include "curvekit/tenor_grid.hpp"

namespace curvekit {

enum class Regime { Flat, Rising, Falling };

inline std::string regime_name(Regime r) {
    switch (r) {
    case Regime::Flat: return "flat";
    case Regime::Rising: return "rising";
    case Regime::Falling: return "falling";
    }
    return "?";
}

inline Regime parse_regime(const std::string& name) {
    if (name == "flat") return Regime::Flat;
    if (name == "rising") return Regime::Rising;
    if (name == "falling") return Regime::Falling;
    throw ValidationError("unknown regime '" + name + "' (expected flat, rising or falling)");
}

/// Recipe for a synthetic market day. Face value is fixed at 100 and coupons are annual.
struct ScenarioSpec {
    Regime regime = Regime::Flat;
    int n_bonds = 60;
    double min_maturity = 0.05;
    double max_maturity = 15.0;
    double min_coupon = 0.0;
    double max_coupon = 0.05;
    double spread_over_benchmark = 0.005;
    double price_noise_sd = 0.0; // keep below 0.05
    std::uint64_t seed = 0;
    double benchmark_level = 0.03;
    std::string date = "synthetic";
};

inline void validate(const ScenarioSpec& spec) {
    if (spec.n_bonds < 2) throw ValidationError("scenario: n_bonds must be >= 2");
    if (!(spec.min_maturity > 0.0) || !(spec.min_maturity < spec.max_maturity))
        throw ValidationError("scenario: maturity range needs 0 < min < max");
    if (!(spec.min_coupon >= 0.0) || !(spec.min_coupon <= spec.max_coupon))
        throw ValidationError("scenario: coupon range needs 0 <= min <= max");
    if (!(spec.price_noise_sd >= 0.0)) throw ValidationError("scenario: price_noise_sd must be >= 0");
}

/// Benchmark rate shape: flat c, rising c(1 - e^{-t/4}/2), falling c(1 + e^{-t/4}/2).
inline double regime_rate(Regime regime, double level, double t) {
    switch (regime) {
    case Regime::Flat: return level;
    case Regime::Rising: return level * (1.0 - 0.5 * std::exp(-t / 4.0));
    case Regime::Falling: return level * (1.0 + 0.5 * std::exp(-t / 4.0));
    }
    return level;
}

inline BenchmarkCurve regime_benchmark(Regime regime, double level) {
    BenchmarkCurve curve;
    curve.tenors = TenorGrid::standard().tenors;
    for (double t : curve.tenors) curve.rates.push_back(regime_rate(regime, level, t));
    return curve;
}

/// The curve synthetic prices are generated from: benchmark plus a constant spread.
inline CurvePtr generating_curve(const BenchmarkCurve& benchmark, double spread) {
    return std::make_shared<ShiftedCurve>(benchmark.as_curve(), spread);
}

namespace detail {

inline std::string bond_id(int index, int count) {
    const int width = count >= 1000 ? 4 : 3;
    char buf[16];
    std::snprintf(buf, sizeof buf, "B%0*d", width, index);
    return buf;
}

/// Instrument terms without a price; maturities skewed to the short end (T = min + range * u^2).
inline std::vector<Bond> draw_instruments(const ScenarioSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Bond> bonds(static_cast<std::size_t>(spec.n_bonds));
    for (auto& bond : bonds) {
        const double u = unit(rng);
        bond.maturity = spec.min_maturity + (spec.max_maturity - spec.min_maturity) * u * u;
        const double coupon_rate = spec.min_coupon + (spec.max_coupon - spec.min_coupon) * unit(rng);
        bond.face_value = 100.0;
        if (coupon_rate > 0.0) {
            for (double t = bond.maturity; t > 1e-9; t -= 1.0) bond.cashflows.push_back({t, coupon_rate * bond.face_value});
            std::reverse(bond.cashflows.begin(), bond.cashflows.end());
        }
    }
    std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) { return a.maturity < b.maturity; });
    for (std::size_t i = 0; i < bonds.size(); ++i) bonds[i].id = bond_id(static_cast<int>(i) + 1, spec.n_bonds);
    return bonds;
}

inline void price_bonds(std::vector<Bond>& bonds, const YieldCurve& curve, double noise_sd, std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    for (auto& bond : bonds) {
        bond.market_price = present_value(curve, bond);
        if (noise_sd > 0.0) bond.market_price *= 1.0 + noise(rng);
    }
}

} // namespace detail

/// Deterministic synthetic snapshot: bonds priced off benchmark + spread, then
/// multiplied by (1 + eps), eps ~ N(0, price_noise_sd).
inline MarketSnapshot generate_scenario(const ScenarioSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    MarketSnapshot snapshot;
    snapshot.date = spec.date;
    snapshot.benchmark = regime_benchmark(spec.regime, spec.benchmark_level);
    snapshot.bonds = detail::draw_instruments(spec, rng);
    const auto curve = generating_curve(snapshot.benchmark, spec.spread_over_benchmark);
    detail::price_bonds(snapshot.bonds, *curve, spec.price_noise_sd, rng);
    validate(snapshot);
    return snapshot;
}

/// `days` consecutive snapshots of one bond universe. The benchmark level follows a
/// Gaussian random walk with daily step sd `level_drift_sd`; prices get fresh noise daily.
inline std::vector<MarketSnapshot> generate_sequence(const ScenarioSpec& spec, int days, double level_drift_sd = 0.0003) {
    validate(spec);
    if (days < 1) throw ValidationError("scenario sequence: days must be >= 1");
    std::mt19937_64 rng(spec.seed);
    const auto instruments = detail::draw_instruments(spec, rng);
    std::normal_distribution<double> drift(0.0, level_drift_sd > 0.0 ? level_drift_sd : 1.0);

    std::vector<MarketSnapshot> out;
    double level = spec.benchmark_level;
    for (int d = 0; d < days; ++d) {
        if (d > 0 && level_drift_sd > 0.0) level += drift(rng);
        MarketSnapshot snapshot;
        char label[32];
        std::snprintf(label, sizeof label, "day-%03d", d + 1);
        snapshot.date = label;
        snapshot.benchmark = regime_benchmark(spec.regime, level);
        snapshot.bonds = instruments;
        const auto curve = generating_curve(snapshot.benchmark, spec.spread_over_benchmark);
        detail::price_bonds(snapshot.bonds, *curve, spec.price_noise_sd, rng);
        validate(snapshot);
        out.push_back(std::move(snapshot));
    }
    return out;
}

} // namespace curvekit
