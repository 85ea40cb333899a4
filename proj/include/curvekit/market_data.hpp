#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/error.hpp"

namespace curvekit {

struct Cashflow {
    double time;   // years from valuation date
    double amount; // currency units

    friend bool operator==(const Cashflow&, const Cashflow&) = default;
};

/// One bond on one day. `cashflows` holds coupons only; the redemption is implied
/// by `face_value` at `maturity`.
struct Bond {
    std::string id;
    std::vector<Cashflow> cashflows;
    double face_value = 100.0;
    double maturity = 0.0;
    double market_price = 0.0;

    friend bool operator==(const Bond&, const Bond&) = default;
};

/// Risk-free reference curve sampled at tenors; linear in rate, flat outside.
struct BenchmarkCurve {
    std::vector<double> tenors;
    std::vector<double> rates;

    double rate_at(double t) const { return detail::interp_linear_flat(tenors, rates, t); }

    CurvePtr as_curve() const { return std::make_shared<LinearYieldCurve>(tenors, rates); }

    friend bool operator==(const BenchmarkCurve&, const BenchmarkCurve&) = default;
};

struct MarketSnapshot {
    std::string date;
    std::vector<Bond> bonds;
    BenchmarkCurve benchmark;

    friend bool operator==(const MarketSnapshot&, const MarketSnapshot&) = default;
};

/// All payments of a bond with the redemption folded into the final date.
inline std::vector<Cashflow> payment_schedule(const Bond& bond) {
    std::vector<Cashflow> out;
    out.reserve(bond.cashflows.size() + 1);
    for (const auto& cf : bond.cashflows) {
        if (cf.time < bond.maturity) out.push_back(cf);
    }
    double final_amount = bond.face_value;
    if (!bond.cashflows.empty() && bond.cashflows.back().time == bond.maturity)
        final_amount += bond.cashflows.back().amount;
    out.push_back({bond.maturity, final_amount});
    return out;
}

inline void validate(const Bond& bond) {
    auto fail = [&](const std::string& field, const std::string& why) {
        throw ValidationError("bond '" + bond.id + "': " + field + " " + why);
    };
    if (bond.id.empty()) throw ValidationError("bond with empty id");
    if (!(bond.maturity > 0.0) || !std::isfinite(bond.maturity)) fail("maturity", "must be > 0");
    if (!(bond.market_price > 0.0) || !std::isfinite(bond.market_price)) fail("market_price", "must be > 0");
    if (!(bond.face_value > 0.0) || !std::isfinite(bond.face_value)) fail("face_value", "must be > 0");
    for (std::size_t i = 0; i < bond.cashflows.size(); ++i) {
        const auto& cf = bond.cashflows[i];
        if (!(cf.time > 0.0) || !std::isfinite(cf.time)) fail("cashflows", "time must be > 0");
        if (!(cf.amount > 0.0) || !std::isfinite(cf.amount)) fail("cashflows", "amount must be > 0");
        if (i > 0 && !(cf.time > bond.cashflows[i - 1].time)) fail("cashflows", "times must be strictly increasing");
    }
    if (!bond.cashflows.empty() && bond.cashflows.back().time != bond.maturity)
        fail("maturity", "must equal the last cashflow time");
}

inline void validate(const BenchmarkCurve& curve) {
    if (curve.tenors.size() != curve.rates.size())
        throw ValidationError("benchmark: tenors and rates must have equal length");
    if (curve.tenors.size() < 2) throw ValidationError("benchmark: at least 2 tenors required");
    for (std::size_t i = 0; i < curve.tenors.size(); ++i) {
        if (!(curve.tenors[i] > 0.0)) throw ValidationError("benchmark: tenors must be > 0");
        if (i > 0 && !(curve.tenors[i] > curve.tenors[i - 1]))
            throw ValidationError("benchmark: tenors must be strictly increasing");
        if (!std::isfinite(curve.rates[i])) throw ValidationError("benchmark: rates must be finite");
    }
}

inline void validate(const MarketSnapshot& snapshot) {
    if (snapshot.bonds.empty()) throw ValidationError("snapshot: bonds non-empty");
    std::set<std::string> ids;
    for (const auto& bond : snapshot.bonds) {
        validate(bond);
        if (!ids.insert(bond.id).second)
            throw ValidationError("bond '" + bond.id + "': id duplicated in snapshot");
    }
    validate(snapshot.benchmark);
}

/// Copy of `snapshot` without the bonds whose ids are listed.
inline MarketSnapshot without_bonds(const MarketSnapshot& snapshot, const std::set<std::string>& ids) {
    MarketSnapshot out{snapshot.date, {}, snapshot.benchmark};
    for (const auto& bond : snapshot.bonds)
        if (!ids.contains(bond.id)) out.bonds.push_back(bond);
    return out;
}

} // namespace curvekit
