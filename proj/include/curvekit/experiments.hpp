#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "curvekit/estimator.hpp"
#include "curvekit/metrics.hpp"
#include "curvekit/tenor_grid.hpp"

namespace curvekit {

// ---------------------------------------------------------------- perturbation

struct PerturbRow {
    double bump = 0.0;
    double rmse_curve = 0.0;
    double mad = 0.0;
    std::optional<std::string> failure;
};

/// Refits with one bond's price scaled by (1 + bump) and compares to the unperturbed fit.
inline std::vector<PerturbRow> perturb_price_experiment(const MarketSnapshot& snapshot, const Estimator& estimator,
                                                        const std::string& bond_id, const std::vector<double>& bumps,
                                                        const TenorGrid& grid = TenorGrid::standard()) {
    const auto it = std::find_if(snapshot.bonds.begin(), snapshot.bonds.end(), [&](const Bond& b) { return b.id == bond_id; });
    if (it == snapshot.bonds.end()) throw ValidationError("perturb: bond '" + bond_id + "' not in snapshot");
    const auto index = static_cast<std::size_t>(std::distance(snapshot.bonds.begin(), it));

    const CurvePtr base = estimator.fit(snapshot);
    std::vector<PerturbRow> rows;
    for (double bump : bumps) {
        PerturbRow row;
        row.bump = bump;
        try {
            MarketSnapshot bumped = snapshot;
            bumped.bonds[index].market_price *= 1.0 + bump;
            const CurvePtr curve = estimator.fit(bumped);
            row.rmse_curve = rmse_curve(*base, *curve, grid);
            row.mad = mad_curve(*base, *curve, grid);
        } catch (const Error& e) {
            row.failure = e.what();
            row.rmse_curve = row.mad = std::nan("");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------- bond drops

/// Bond ids removed in each Monte Carlo replication for one drop count.
using DropSets = std::vector<std::vector<std::string>>;

/// Uniform draws without replacement, a function of (snapshot ids, count, n_mc, seed) only,
/// so every estimator sees the same drops.
inline DropSets draw_drop_sets(const MarketSnapshot& snapshot, int count, int n_mc, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(count)};
    std::mt19937_64 rng(seq);
    DropSets sets;
    for (int r = 0; r < n_mc; ++r) {
        std::vector<std::size_t> idx(snapshot.bonds.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<std::string> ids;
        for (int k = 0; k < count; ++k) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), idx.size() - 1);
            std::swap(idx[static_cast<std::size_t>(k)], idx[pick(rng)]);
            ids.push_back(snapshot.bonds[idx[static_cast<std::size_t>(k)]].id);
        }
        std::sort(ids.begin(), ids.end());
        sets.push_back(std::move(ids));
    }
    return sets;
}

struct DropRow {
    int drop_count = 0;
    double mean_rmse_curve = 0.0;
    double mean_mad = 0.0;
    int replications = 0; // successful
    int failures = 0;
    DropSets drop_sets;
    std::vector<double> rmse_per_replication; // NaN where the fit failed
    std::vector<double> mad_per_replication;
};

inline std::vector<DropRow> drop_bonds_experiment(const MarketSnapshot& snapshot, const Estimator& estimator,
                                                  const std::vector<int>& drop_counts, int n_mc, std::uint64_t seed,
                                                  const TenorGrid& grid = TenorGrid::standard()) {
    for (int c : drop_counts)
        if (c < 0 || static_cast<std::size_t>(c) >= snapshot.bonds.size())
            throw ValidationError("drop: every drop count must be in [0, number of bonds)");
    if (n_mc < 1) throw ValidationError("drop: n_mc must be >= 1");

    const CurvePtr base = estimator.fit(snapshot);
    std::vector<DropRow> rows;
    for (int count : drop_counts) {
        DropRow row;
        row.drop_count = count;
        row.drop_sets = draw_drop_sets(snapshot, count, n_mc, seed);
        double sum_rmse = 0.0, sum_mad = 0.0;
        for (const auto& ids : row.drop_sets) {
            try {
                const CurvePtr curve = estimator.fit(without_bonds(snapshot, {ids.begin(), ids.end()}));
                const double r = rmse_curve(*base, *curve, grid), m = mad_curve(*base, *curve, grid);
                row.rmse_per_replication.push_back(r);
                row.mad_per_replication.push_back(m);
                sum_rmse += r;
                sum_mad += m;
                ++row.replications;
            } catch (const Error&) {
                row.rmse_per_replication.push_back(std::nan(""));
                row.mad_per_replication.push_back(std::nan(""));
                ++row.failures;
            }
        }
        row.mean_rmse_curve = row.replications > 0 ? sum_rmse / row.replications : std::nan("");
        row.mean_mad = row.replications > 0 ? sum_mad / row.replications : std::nan("");
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------- day-over-day stability

struct TenorObservation {
    std::string date;
    double tenor = 0.0;
    double estimate = 0.0;
    double benchmark = 0.0;
};

struct StabilityResult {
    std::vector<std::string> dates;          // day of each pair's later curve
    std::vector<std::string> previous_dates; // day it is compared against
    std::map<Bucket, std::vector<double>> rmse; // per bucket, one value per pair
    std::map<Bucket, double> hit_rate;
    std::vector<TenorObservation> fixed_tenor_series;
    std::vector<std::string> failed_dates;
    std::vector<CurvePtr> curves; // fitted curve per successfully fitted day, in order
};

inline constexpr std::array<double, 3> kStabilityTenors{0.5, 2.0, 10.0};

/// Fits every day independently and compares each curve to the previous successful day,
/// per maturity bucket of the grid. Hit rate counts pairs with RMSE strictly below threshold.
inline StabilityResult stability_experiment(const std::vector<MarketSnapshot>& snapshots, const Estimator& estimator,
                                            const TenorGrid& grid = TenorGrid::standard(),
                                            const std::vector<Bucket>& buckets = {kAllBuckets.begin(), kAllBuckets.end()},
                                            double threshold = 0.0010) {
    if (snapshots.size() < 2) throw ValidationError("stability: at least 2 snapshots required");
    StabilityResult out;
    CurvePtr previous;
    std::string previous_date;
    for (const auto& snapshot : snapshots) {
        CurvePtr curve;
        try {
            curve = estimator.fit(snapshot);
            for (double t : kStabilityTenors) curve->yield_at(t);
        } catch (const Error&) {
            out.failed_dates.push_back(snapshot.date);
            continue;
        }
        out.curves.push_back(curve);
        for (double t : kStabilityTenors)
            out.fixed_tenor_series.push_back({snapshot.date, t, curve->yield_at(t), snapshot.benchmark.rate_at(t)});
        if (previous) {
            out.dates.push_back(snapshot.date);
            out.previous_dates.push_back(previous_date);
            for (Bucket b : buckets) {
                const auto tenors = bucket_tenors(grid, b);
                out.rmse[b].push_back(rmse_curve(*curve, *previous, tenors));
            }
        }
        previous = curve;
        previous_date = snapshot.date;
    }
    for (Bucket b : buckets) out.hit_rate[b] = hit_rate(out.rmse[b], threshold);
    return out;
}

// ---------------------------------------------------------------- leave one out

struct LooRecord {
    Bucket bucket = Bucket::Full; // pool the held-out bond was drawn from
    int replication = 0;
    std::string held_out_id;
    double maturity = 0.0;
    double squared_error = 0.0; // NaN when the fit failed
};

struct LooBucketResult {
    double rmse_ytm = 0.0;
    int replications = 0;
    int failures = 0;
};

struct LooResult {
    std::map<Bucket, LooBucketResult> per_bucket;
    std::vector<LooRecord> records;
};

/// For each requested bucket, n_mc times: hold out a uniformly chosen bond of that bucket
/// (any bond for Full), fit on the rest, record (y(T) - YTM)^2 of the held-out bond.
inline LooResult loo_experiment(const MarketSnapshot& snapshot, const Estimator& estimator, int n_mc,
                                const std::vector<Bucket>& buckets, std::uint64_t seed) {
    if (n_mc < 1) throw ValidationError("loo: n_mc must be >= 1");
    LooResult out;
    for (Bucket bucket : buckets) {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < snapshot.bonds.size(); ++i)
            if (in_bucket(bucket, snapshot.bonds[i].maturity)) pool.push_back(i);
        if (pool.size() < 2)
            throw ValidationError("loo: bucket " + std::string(bucket_name(bucket)) + " needs at least 2 bonds");

        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(bucket)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        LooBucketResult agg;
        double sum = 0.0;
        for (int r = 0; r < n_mc; ++r) {
            const Bond& held = snapshot.bonds[pool[pick(rng)]];
            LooRecord rec{bucket, r, held.id, held.maturity, std::nan("")};
            try {
                const CurvePtr curve = estimator.fit(without_bonds(snapshot, {held.id}));
                const double e = curve->yield_at(held.maturity) - yield_to_maturity(held);
                rec.squared_error = e * e;
                sum += rec.squared_error;
                ++agg.replications;
            } catch (const Error&) {
                ++agg.failures;
            }
            out.records.push_back(rec);
        }
        agg.rmse_ytm = agg.replications > 0 ? std::sqrt(sum / agg.replications) : std::nan("");
        out.per_bucket[bucket] = agg;
    }
    return out;
}

// ---------------------------------------------------------------- NN hyperparameter sweep

struct HyperscanRow {
    double learning_rate = 0.0;
    int epochs = 0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double rmse_ytm = 0.0;
    std::optional<std::string> failure;
};

/// RMSE_ytm of the trained network over LR x epochs x gamma1 x gamma2. Epoch counts share one
/// training run per (LR, gamma1, gamma2), read off at each requested epoch.
inline std::vector<HyperscanRow> hyperscan_experiment(const MarketSnapshot& snapshot, const TrainConfig& base,
                                                      const std::vector<double>& learning_rates,
                                                      const std::vector<int>& epochs,
                                                      const std::vector<double>& gamma1s,
                                                      const std::vector<double>& gamma2s) {
    if (epochs.empty()) throw ValidationError("hyperscan: at least one epoch count required");
    const int max_epochs = *std::max_element(epochs.begin(), epochs.end());
    std::vector<HyperscanRow> rows;
    for (double lr : learning_rates)
        for (double g1 : gamma1s)
            for (double g2 : gamma2s) {
                TrainConfig cfg = base;
                cfg.learning_rate = lr;
                cfg.gamma1 = g1;
                cfg.gamma2 = g2;
                cfg.epochs = max_epochs;
                std::map<int, NnParams> at_epoch;
                std::optional<std::string> failure;
                try {
                    train(snapshot, cfg, [&](int epoch, const NnParams& p) {
                        if (std::find(epochs.begin(), epochs.end(), epoch + 1) != epochs.end()) at_epoch[epoch + 1] = p;
                    });
                } catch (const Error& e) {
                    failure = e.what();
                }
                for (int n : epochs) {
                    HyperscanRow row{lr, n, g1, g2, std::nan(""), failure};
                    if (auto it = at_epoch.find(n); it != at_epoch.end()) {
                        row.rmse_ytm = rmse_ytm(NnCurve(it->second), snapshot);
                        row.failure.reset();
                    }
                    rows.push_back(row);
                }
            }
    return rows;
}

} // namespace curvekit
