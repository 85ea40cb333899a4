#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "curvekit/error.hpp"

namespace curvekit {

/// Ordered maturity grid (years) on which curves are compared and regularized.
struct TenorGrid {
    std::vector<double> tenors;

    /// 1D, 1W, 2W, 1M, 2M, 3M, 6M, 9M, 12M, 15M, 18M, 21M, 2Y..10Y, 12Y, 15Y, 20Y, 25Y, 30Y.
    static TenorGrid standard() {
        constexpr double day = 1.0 / 365.0;
        constexpr double month = 1.0 / 12.0;
        return TenorGrid{{1 * day,     7 * day,     14 * day,    1 * month,   2 * month, 3 * month, 6 * month,
                          9 * month,   12 * month,  15 * month,  18 * month,  21 * month, 2.0, 3.0,
                          4.0,         5.0,         6.0,         7.0,         8.0,       9.0, 10.0,
                          12.0,        15.0,        20.0,        25.0,        30.0}};
    }

    /// 0.1Y-spaced samples on (0, horizon] for plotting.
    static TenorGrid dense(double horizon = 30.0, double step = 0.1) {
        TenorGrid grid;
        for (int i = 1; i * step <= horizon + 1e-9; ++i) grid.tenors.push_back(i * step);
        return grid;
    }

    std::size_t size() const noexcept { return tenors.size(); }

    void validate() const {
        if (tenors.size() < 2) throw ValidationError("tenor grid: at least 2 points required");
        for (std::size_t i = 0; i < tenors.size(); ++i) {
            if (!(tenors[i] > 0.0)) throw ValidationError("tenor grid: tenors must be > 0");
            if (i > 0 && !(tenors[i] > tenors[i - 1]))
                throw ValidationError("tenor grid: tenors must be strictly increasing");
        }
    }
};

/// Maturity buckets used by the stability and leave-one-out reports.
enum class Bucket { Full, Short, Medium, Long };

inline constexpr std::array<Bucket, 4> kAllBuckets{Bucket::Full, Bucket::Short, Bucket::Medium, Bucket::Long};

inline std::string_view bucket_name(Bucket b) {
    switch (b) {
    case Bucket::Full: return "Full";
    case Bucket::Short: return "<2Y";
    case Bucket::Medium: return "2Y-10Y";
    case Bucket::Long: return ">10Y";
    }
    return "?";
}

inline Bucket parse_bucket(std::string_view name) {
    for (Bucket b : kAllBuckets)
        if (bucket_name(b) == name) return b;
    if (name == "full") return Bucket::Full;
    if (name == "short") return Bucket::Short;
    if (name == "medium") return Bucket::Medium;
    if (name == "long") return Bucket::Long;
    throw ValidationError("unknown maturity bucket '" + std::string(name) + "'");
}

/// <2Y strictly below 2, 2Y-10Y inclusive at both ends, >10Y strictly above 10.
inline bool in_bucket(Bucket b, double maturity) {
    switch (b) {
    case Bucket::Full: return true;
    case Bucket::Short: return maturity < 2.0;
    case Bucket::Medium: return maturity >= 2.0 && maturity <= 10.0;
    case Bucket::Long: return maturity > 10.0;
    }
    return false;
}

inline std::vector<double> bucket_tenors(const TenorGrid& grid, Bucket b) {
    std::vector<double> out;
    for (double t : grid.tenors)
        if (in_bucket(b, t)) out.push_back(t);
    return out;
}

} // namespace curvekit
