#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"

namespace curvekit {

/// Bracket searched by every flat-rate inversion.
inline constexpr double kMinSolveRate = -0.10;
inline constexpr double kMaxSolveRate = 1.00;

inline double discount_factor(const YieldCurve& curve, double t) {
    if (!(t > 0.0)) throw DomainError("discount_factor: t must be > 0, got " + std::to_string(t));
    return curve.discount_at(t);
}

/// Sum of coupons discounted individually plus (final coupon + face) at maturity.
inline double present_value(const YieldCurve& curve, const Bond& bond) {
    double pv = 0.0;
    for (const auto& cf : payment_schedule(bond)) pv += cf.amount * curve.discount_at(cf.time);
    return pv;
}

namespace detail {

/// PV and dPV/dr of a bond on a flat continuously-compounded curve.
inline std::pair<double, double> flat_pv_and_slope(const Bond& bond, double rate) {
    double pv = 0.0, slope = 0.0;
    for (const auto& cf : payment_schedule(bond)) {
        double d = cf.amount * std::exp(-cf.time * rate);
        pv += d;
        slope -= cf.time * d;
    }
    return {pv, slope};
}

/// Newton iteration safeguarded by bisection on a decreasing function with a
/// sign change in [lo, hi]. Returns the root.
template <class F>
double solve_decreasing(F&& value_and_slope, double lo, double hi, double guess) {
    std::uintmax_t max_iter = 200;
    return boost::math::tools::newton_raphson_iterate(
        [&](double x) { return value_and_slope(x); }, guess, lo, hi, std::numeric_limits<double>::digits - 4,
        max_iter);
}

} // namespace detail

/// Flat continuously-compounded rate that reprices the bond to its market price.
inline double yield_to_maturity(const Bond& bond) {
    const double price = bond.market_price;
    const double pv_low = detail::flat_pv_and_slope(bond, kMaxSolveRate).first;
    const double pv_high = detail::flat_pv_and_slope(bond, kMinSolveRate).first;
    if (!(price >= pv_low && price <= pv_high)) {
        throw NoSolutionError("yield_to_maturity: bond '" + bond.id + "' price " + std::to_string(price) +
                              " outside solvable range [" + std::to_string(pv_low) + ", " +
                              std::to_string(pv_high) + "]");
    }
    double total = 0.0;
    for (const auto& cf : payment_schedule(bond)) total += cf.amount;
    double guess = std::log(total / price) / bond.maturity;
    guess = std::clamp(guess, kMinSolveRate, kMaxSolveRate);

    double rate = detail::solve_decreasing(
        [&](double r) {
            auto [pv, slope] = detail::flat_pv_and_slope(bond, r);
            return std::make_pair(pv - price, slope);
        },
        kMinSolveRate, kMaxSolveRate, guess);

    double residual = detail::flat_pv_and_slope(bond, rate).first - price;
    if (!(std::abs(residual) <= 1e-10 * price))
        throw NoSolutionError("yield_to_maturity: bond '" + bond.id + "' did not converge");
    return rate;
}

/// PV-weighted mean payment time at the bond's own YTM (continuous compounding).
inline double macaulay_duration(const Bond& bond) {
    const double ytm = yield_to_maturity(bond);
    double weighted = 0.0, total = 0.0;
    for (const auto& cf : payment_schedule(bond)) {
        double pv = cf.amount * std::exp(-cf.time * ytm);
        weighted += cf.time * pv;
        total += pv;
    }
    return weighted / total;
}

/// Instantaneous forward y(t) + t y'(t) with a central difference of step h.
inline double forward_rate(const YieldCurve& curve, double t, double h) {
    if (!(h > 0.0) || !(t - h > 0.0))
        throw DomainError("forward_rate: require t > h > 0");
    double slope = (curve.yield_at(t + h) - curve.yield_at(t - h)) / (2.0 * h);
    return curve.yield_at(t) + t * slope;
}

/// Price-error weights 1 / (M (D_j p_j)^2), so that the weighted squared price error
/// approximates the mean squared yield error.
inline std::vector<double> duration_weights(const MarketSnapshot& snapshot) {
    const double m = static_cast<double>(snapshot.bonds.size());
    std::vector<double> weights;
    weights.reserve(snapshot.bonds.size());
    for (const auto& bond : snapshot.bonds) {
        const double dp = macaulay_duration(bond) * bond.market_price;
        weights.push_back(1.0 / (m * dp * dp));
    }
    return weights;
}

} // namespace curvekit
