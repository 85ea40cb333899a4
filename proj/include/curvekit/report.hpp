#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "curvekit/experiments.hpp"
#include "curvekit/io.hpp"
#include "curvekit/serialize.hpp"

namespace curvekit {

/// One estimator's metrics for one experiment cell. Rates are decimals.
struct EvaluationReport {
    std::string estimator;
    std::string experiment;                                          // e.g. "perturb bump=0.03"
    std::map<std::string, double> metrics;                           // rmse_ytm, rmse_curve, mad, hit_rate, ...
    std::map<std::string, std::map<std::string, double>> per_bucket; // bucket -> metric -> value
    std::uint64_t seed = 0;
    int failures = 0;
    ordered_json provenance = ordered_json::object();
};

namespace detail {

inline ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

inline std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : "nan"; }

} // namespace detail

inline ordered_json to_json(const EvaluationReport& r) {
    ordered_json j;
    j["estimator"] = r.estimator;
    j["experiment"] = r.experiment;
    j["metrics"] = ordered_json::object();
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = detail::number_or_null(v);
    if (!r.per_bucket.empty()) {
        j["per_bucket"] = ordered_json::object();
        for (const auto& [bucket, m] : r.per_bucket)
            for (const auto& [k, v] : m) j["per_bucket"][bucket][k] = detail::number_or_null(v);
    }
    j["failures"] = r.failures;
    j["seed"] = r.seed;
    j["provenance"] = r.provenance;
    return j;
}

/// Flat CSV, one metric per row: experiment,estimator,bucket,metric,value,seed.
/// Un-bucketed metrics are reported under bucket "Full".
inline std::string reports_to_csv(const std::vector<EvaluationReport>& reports) {
    std::string out = "experiment,estimator,bucket,metric,value,seed\n";
    auto row = [&](const EvaluationReport& r, const std::string& bucket, const std::string& metric, double value) {
        out += r.experiment + "," + r.estimator + "," + bucket + "," + metric + "," + detail::csv_number(value) + "," +
               std::to_string(r.seed) + "\n";
    };
    for (const auto& r : reports) {
        for (const auto& [k, v] : r.metrics) row(r, "Full", k, v);
        for (const auto& [bucket, m] : r.per_bucket)
            for (const auto& [k, v] : m) row(r, bucket, k, v);
        row(r, "Full", "failures", r.failures);
    }
    return out;
}

inline ordered_json reports_to_json(const std::vector<EvaluationReport>& reports, const ordered_json& details = {}) {
    ordered_json j;
    j["reports"] = ordered_json::array();
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    if (!details.is_null()) j["details"] = details;
    return j;
}

// ---------------------------------------------------------------- experiment -> report

inline std::vector<EvaluationReport> perturb_reports(const std::vector<PerturbRow>& rows, const std::string& estimator,
                                                     const std::string& bond_id, const ordered_json& config_echo) {
    std::vector<EvaluationReport> out;
    for (const auto& row : rows) {
        EvaluationReport r;
        r.estimator = estimator;
        r.experiment = "perturb bump=" + format_double(row.bump);
        r.metrics["rmse_curve"] = row.rmse_curve;
        r.metrics["mad"] = row.mad;
        r.failures = row.failure ? 1 : 0;
        r.provenance = {{"bond_id", bond_id}, {"bump", row.bump}, {"config", config_echo}};
        if (row.failure) r.provenance["failure"] = *row.failure;
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<EvaluationReport> drop_reports(const std::vector<DropRow>& rows, const std::string& estimator,
                                                  int n_mc, std::uint64_t seed, const ordered_json& config_echo) {
    std::vector<EvaluationReport> out;
    for (const auto& row : rows) {
        EvaluationReport r;
        r.estimator = estimator;
        r.experiment = "drop count=" + std::to_string(row.drop_count);
        r.metrics["rmse_curve"] = row.mean_rmse_curve;
        r.metrics["mad"] = row.mean_mad;
        r.seed = seed;
        r.failures = row.failures;
        r.provenance = {{"drop_count", row.drop_count}, {"n_mc", n_mc}, {"drop_sets", row.drop_sets}, {"config", config_echo}};
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<EvaluationReport> stability_reports(const StabilityResult& res, const std::string& estimator,
                                                       double threshold, const ordered_json& config_echo) {
    std::vector<EvaluationReport> out;
    EvaluationReport summary;
    summary.estimator = estimator;
    summary.experiment = "stability";
    summary.failures = static_cast<int>(res.failed_dates.size());
    for (const auto& [bucket, rate] : res.hit_rate) {
        const auto& series = res.rmse.at(bucket);
        double mean = 0.0;
        for (double v : series) mean += v;
        summary.per_bucket[std::string(bucket_name(bucket))]["hit_rate"] = rate;
        summary.per_bucket[std::string(bucket_name(bucket))]["mean_rmse_curve"] =
            series.empty() ? std::nan("") : mean / static_cast<double>(series.size());
    }
    summary.provenance = {{"threshold", threshold}, {"pairs", res.dates.size()}, {"failed_dates", res.failed_dates},
                          {"config", config_echo}};
    out.push_back(std::move(summary));

    for (std::size_t i = 0; i < res.dates.size(); ++i) {
        EvaluationReport day;
        day.estimator = estimator;
        day.experiment = "stability date=" + res.dates[i];
        for (const auto& [bucket, series] : res.rmse)
            day.per_bucket[std::string(bucket_name(bucket))]["rmse_curve"] = series[i];
        day.provenance = {{"previous_date", res.previous_dates[i]}};
        out.push_back(std::move(day));
    }
    return out;
}

inline ordered_json stability_series_json(const StabilityResult& res) {
    ordered_json arr = ordered_json::array();
    for (const auto& obs : res.fixed_tenor_series)
        arr.push_back({{"date", obs.date}, {"tenor", obs.tenor}, {"estimate", obs.estimate}, {"benchmark", obs.benchmark}});
    return arr;
}

inline EvaluationReport loo_report(const LooResult& res, const std::string& estimator, int n_mc, std::uint64_t seed,
                                   const ordered_json& config_echo) {
    EvaluationReport r;
    r.estimator = estimator;
    r.experiment = "loo";
    r.seed = seed;
    for (const auto& [bucket, agg] : res.per_bucket) {
        r.per_bucket[std::string(bucket_name(bucket))]["rmse_ytm"] = agg.rmse_ytm;
        r.failures += agg.failures;
    }
    ordered_json records = ordered_json::array();
    for (const auto& rec : res.records)
        records.push_back({{"bucket", bucket_name(rec.bucket)},
                           {"replication", rec.replication},
                           {"held_out", rec.held_out_id},
                           {"maturity", rec.maturity},
                           {"squared_error", detail::number_or_null(rec.squared_error)}});
    r.provenance = {{"n_mc", n_mc}, {"records", records}, {"config", config_echo}};
    return r;
}

inline std::vector<EvaluationReport> hyperscan_reports(const std::vector<HyperscanRow>& rows, std::uint64_t seed) {
    std::vector<EvaluationReport> out;
    for (const auto& row : rows) {
        EvaluationReport r;
        r.estimator = "nn";
        r.experiment = "hyperscan lr=" + format_double(row.learning_rate) + " epochs=" + std::to_string(row.epochs) +
                       " gamma1=" + format_double(row.gamma1) + " gamma2=" + format_double(row.gamma2);
        r.metrics["rmse_ytm"] = row.rmse_ytm;
        r.seed = seed;
        r.failures = row.failure ? 1 : 0;
        r.provenance = {{"learning_rate", row.learning_rate}, {"epochs", row.epochs}, {"gamma1", row.gamma1},
                        {"gamma2", row.gamma2}};
        if (row.failure) r.provenance["failure"] = *row.failure;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace curvekit
