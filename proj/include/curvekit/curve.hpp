#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvekit/error.hpp"

namespace curvekit {

/// Continuously-compounded spot yield curve, evaluable for any t > 0.
class YieldCurve {
public:
    virtual ~YieldCurve() = default;

    /// Spot yield y(t) in decimal per annum.
    virtual double yield_at(double t) const = 0;

    /// Discount factor e^(-t y(t)).
    double discount_at(double t) const { return std::exp(-t * yield_at(t)); }
};

using CurvePtr = std::shared_ptr<const YieldCurve>;

class FlatCurve final : public YieldCurve {
public:
    explicit FlatCurve(double rate) : rate_(rate) {}

    double yield_at(double) const override { return rate_; }
    double rate() const noexcept { return rate_; }

private:
    double rate_;
};

/// y(t) = base(t) + spread.
class ShiftedCurve final : public YieldCurve {
public:
    ShiftedCurve(CurvePtr base, double spread) : base_(std::move(base)), spread_(spread) {}

    double yield_at(double t) const override { return base_->yield_at(t) + spread_; }

private:
    CurvePtr base_;
    double spread_;
};

namespace detail {

/// Linear interpolation through (xs, ys), constant beyond both ends.
/// xs must be strictly increasing and non-empty.
inline double interp_linear_flat(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto hi = std::upper_bound(xs.begin(), xs.end(), x);
    auto i = static_cast<std::size_t>(std::distance(xs.begin(), hi));
    double x0 = xs[i - 1], x1 = xs[i];
    double w = (x - x0) / (x1 - x0);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

} // namespace detail

/// Yield curve linear in yield between knots with flat extrapolation.
class LinearYieldCurve : public YieldCurve {
public:
    LinearYieldCurve(std::vector<double> times, std::vector<double> yields)
        : times_(std::move(times)), yields_(std::move(yields)) {
        if (times_.empty() || times_.size() != yields_.size())
            throw ValidationError("LinearYieldCurve: times and yields must be non-empty and equal length");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!(times_[i] > 0.0)) throw ValidationError("LinearYieldCurve: knot times must be > 0");
            if (i > 0 && !(times_[i] > times_[i - 1]))
                throw ValidationError("LinearYieldCurve: knot times must be strictly increasing");
        }
    }

    double yield_at(double t) const override { return detail::interp_linear_flat(times_, yields_, t); }

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& yields() const noexcept { return yields_; }

private:
    std::vector<double> times_;
    std::vector<double> yields_;
};

} // namespace curvekit
