#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"
#include "curvekit/tenor_grid.hpp"

namespace curvekit {

/// sqrt(mean_j (y(T_j) - YTM_j)^2)
inline double rmse_ytm(const YieldCurve& curve, const MarketSnapshot& snapshot) {
    double sum = 0.0;
    for (const auto& bond : snapshot.bonds) {
        const double e = curve.yield_at(bond.maturity) - yield_to_maturity(bond);
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(snapshot.bonds.size()));
}

inline double rmse_curve(const YieldCurve& a, const YieldCurve& b, std::span<const double> tenors) {
    double sum = 0.0;
    for (double t : tenors) {
        const double e = a.yield_at(t) - b.yield_at(t);
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(tenors.size()));
}

inline double rmse_curve(const YieldCurve& a, const YieldCurve& b, const TenorGrid& grid = TenorGrid::standard()) {
    return rmse_curve(a, b, std::span<const double>(grid.tenors));
}

/// Maximum absolute yield gap, taken over the grid points.
inline double mad_curve(const YieldCurve& a, const YieldCurve& b, std::span<const double> tenors) {
    double worst = 0.0;
    for (double t : tenors) worst = std::max(worst, std::abs(a.yield_at(t) - b.yield_at(t)));
    return worst;
}

inline double mad_curve(const YieldCurve& a, const YieldCurve& b, const TenorGrid& grid = TenorGrid::standard()) {
    return mad_curve(a, b, std::span<const double>(grid.tenors));
}

/// Fraction of values strictly below the threshold; 0 for an empty series.
inline double hit_rate(std::span<const double> values, double threshold) {
    if (values.empty()) return 0.0;
    const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v < threshold; });
    return static_cast<double>(hits) / static_cast<double>(values.size());
}

} // namespace curvekit
