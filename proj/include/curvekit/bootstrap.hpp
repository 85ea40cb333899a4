#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"

namespace curvekit {

struct BootstrapDiagnostic {
    std::string bond_id;
    std::string message;
};

/// Knots at bond maturities, linear in yield, flat outside the knot range.
class BootstrapCurve final : public LinearYieldCurve {
public:
    BootstrapCurve(std::vector<double> times, std::vector<double> yields, std::vector<BootstrapDiagnostic> diagnostics)
        : LinearYieldCurve(std::move(times), std::move(yields)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<double>& knot_times() const noexcept { return times(); }
    const std::vector<double>& knot_yields() const noexcept { return yields(); }
    /// Bonds that were skipped, with the reason.
    const std::vector<BootstrapDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<BootstrapDiagnostic> diagnostics_;
};

namespace detail {

/// Yield at t on the curve formed by `times/yields` plus a trial knot (t_new, y_new)
/// appended at the end, and the sensitivity dy(t)/dy_new.
inline std::pair<double, double> extended_yield(const std::vector<double>& times, const std::vector<double>& yields,
                                                double t_new, double y_new, double t) {
    if (times.empty()) return {y_new, 1.0};
    const double t_last = times.back();
    if (t <= t_last) return {interp_linear_flat(times, yields, t), 0.0};
    if (t >= t_new) return {y_new, 1.0};
    const double w = (t - t_last) / (t_new - t_last);
    return {yields.back() + w * (y_new - yields.back()), w};
}

} // namespace detail

/// Sequential exact-fit curve from the shortest maturity upward. Each knot is solved
/// with itself included in the interpolation, so later knots leave earlier bonds
/// exactly repriced.
inline BootstrapCurve bootstrap(const MarketSnapshot& snapshot) {
    std::vector<const Bond*> order;
    order.reserve(snapshot.bonds.size());
    for (const auto& bond : snapshot.bonds) order.push_back(&bond);
    std::sort(order.begin(), order.end(), [](const Bond* a, const Bond* b) {
        if (a->maturity != b->maturity) return a->maturity < b->maturity;
        return a->id < b->id;
    });

    std::vector<double> times, yields;
    std::vector<BootstrapDiagnostic> diagnostics;

    for (const Bond* bond : order) {
        if (!times.empty() && bond->maturity <= times.back()) {
            diagnostics.push_back({bond->id, "maturity already has a knot; bond skipped"});
            continue;
        }
        const auto schedule = payment_schedule(*bond);
        const double price = bond->market_price;
        auto value_and_slope = [&](double y_new) {
            double pv = 0.0, slope = 0.0;
            for (const auto& cf : schedule) {
                auto [y, dy] = detail::extended_yield(times, yields, bond->maturity, y_new, cf.time);
                double d = cf.amount * std::exp(-cf.time * y);
                pv += d;
                slope -= cf.time * d * dy;
            }
            return std::make_pair(pv - price, slope);
        };
        const double f_lo = value_and_slope(kMinSolveRate).first;
        const double f_hi = value_and_slope(kMaxSolveRate).first;
        if (!(f_lo >= 0.0 && f_hi <= 0.0)) {
            diagnostics.push_back({bond->id, "no knot yield in [-0.10, 1.00] reprices the bond; bond skipped"});
            continue;
        }
        double guess = yields.empty() ? 0.0 : yields.back();
        double y = detail::solve_decreasing(value_and_slope, kMinSolveRate, kMaxSolveRate, guess);
        if (!(std::abs(value_and_slope(y).first) <= 1e-10 * price)) {
            diagnostics.push_back({bond->id, "knot solve did not reach 1e-10 relative price tolerance; bond skipped"});
            continue;
        }
        times.push_back(bond->maturity);
        yields.push_back(y);
    }
    if (times.empty()) throw FitError("bootstrap: no bond could be bootstrapped");
    return BootstrapCurve(std::move(times), std::move(yields), std::move(diagnostics));
}

} // namespace curvekit
