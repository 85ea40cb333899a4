#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curvekit/curvekit.hpp"

namespace curvekit::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kArgumentError = 2, kIoError = 3, kComputeError = 4 };

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, T (*convert)(const std::string&)) {
    std::vector<T> out;
    if (text.empty()) return out;
    for (const auto& item : curvekit::detail::split(text, ',')) {
        if (item.empty()) continue;
        out.push_back(convert(item));
    }
    return out;
}

inline double to_double(const std::string& s) {
    return curvekit::detail::parse_double(s, "list item");
}
inline int to_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("'" + s + "' is not an integer");
    }
}
inline std::string to_string(const std::string& s) { return s; }

/// Flag values that may override a config file; unset optionals leave the file/defaults alone.
struct FitFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> lr, gamma1, gamma2, init_scale;
    std::optional<int> epochs, hidden;
    std::optional<std::string> schedule;
    std::optional<double> lambda, kernel_a, kernel_b;
    std::optional<int> nss_starts, nss_iterations;

    /// `nn_scalars` = false leaves --lr/--epochs/--gamma1/--gamma2 free for sweep lists.
    void add_to(CLI::App& app, bool nn_scalars = true) {
        app.add_option("--config", config_path, "JSON fit config (flags override it)");
        app.add_option("--seed", seed, "Seed for every random choice");
        if (nn_scalars) {
            app.add_option("--lr", lr, "NN learning rate (default 1e-8)");
            app.add_option("--epochs", epochs, "NN epochs (default 1000)");
            app.add_option("--gamma1", gamma1, "NN smoothness weight (default 1e3)");
            app.add_option("--gamma2", gamma2, "NN trend weight (default 1e4)");
        }
        app.add_option("--hidden", hidden, "NN hidden units (default 3)");
        app.add_option("--init-scale", init_scale, "NN initialization scale (default 0.1)");
        app.add_option("--schedule", schedule, "NN penalty schedule: per_bond | per_epoch");
        app.add_option("--lambda", lambda, "KR smoothness penalty (default 1e-2)");
        app.add_option("--kernel-a", kernel_a, "KR first-derivative weight (default 1)");
        app.add_option("--kernel-b", kernel_b, "KR second-derivative weight (default 1)");
        app.add_option("--nss-starts", nss_starts, "NSS multi-start count (default 8)");
        app.add_option("--nss-iterations", nss_iterations, "NSS simplex iterations per start (default 4000)");
    }

    FitConfig resolve() const {
        FitConfig cfg;
        if (!config_path.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_text_file(config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError("config '" + config_path + "': " + e.what());
            }
            merge_config(cfg, j);
        }
        if (seed) cfg.nn.seed = cfg.nss.seed = *seed;
        if (lr) cfg.nn.learning_rate = *lr;
        if (epochs) cfg.nn.epochs = *epochs;
        if (gamma1) cfg.nn.gamma1 = *gamma1;
        if (gamma2) cfg.nn.gamma2 = *gamma2;
        if (hidden) cfg.nn.hidden = *hidden;
        if (init_scale) cfg.nn.init_scale = *init_scale;
        if (schedule) cfg.nn.schedule = parse_schedule(*schedule);
        if (lambda) cfg.kr.lambda = *lambda;
        if (kernel_a) cfg.kr.kernel.a = *kernel_a;
        if (kernel_b) cfg.kr.kernel.b = *kernel_b;
        if (nss_starts) cfg.nss.starts = *nss_starts;
        if (nss_iterations) cfg.nss.max_iterations = *nss_iterations;
        return cfg;
    }
};

struct ScenarioFlags {
    std::string regime = "flat";
    ScenarioSpec spec;

    void add_to(CLI::App& app, bool with_seed) {
        app.add_option("--regime", regime, "flat | rising | falling");
        app.add_option("--bonds", spec.n_bonds, "Number of bonds");
        app.add_option("--min-maturity", spec.min_maturity, "Shortest maturity (years)");
        app.add_option("--max-maturity", spec.max_maturity, "Longest maturity (years)");
        app.add_option("--min-coupon", spec.min_coupon, "Lowest annual coupon rate");
        app.add_option("--max-coupon", spec.max_coupon, "Highest annual coupon rate");
        app.add_option("--spread", spec.spread_over_benchmark, "Spread over the benchmark (decimal)");
        app.add_option("--noise", spec.price_noise_sd, "Multiplicative price noise sd");
        app.add_option("--level", spec.benchmark_level, "Benchmark level (decimal)");
        app.add_option("--date", spec.date, "Date label");
        if (with_seed) app.add_option("--seed", spec.seed, "Generator seed");
    }

    ScenarioSpec resolve() const {
        ScenarioSpec s = spec;
        s.regime = parse_regime(regime);
        return s;
    }
};

inline void write_report(const std::filesystem::path& path, const std::string& format,
                         const std::vector<EvaluationReport>& reports, const ordered_json& details) {
    const bool csv = format.empty() ? path.extension() == ".csv" : parse_format(format) == FileFormat::Csv;
    if (csv)
        write_text_file(path, reports_to_csv(reports));
    else
        write_text_file(path, reports_to_json(reports, details).dump(2) + "\n");
}

inline std::vector<FitConfig> estimator_configs(const FitConfig& base, const std::string& list) {
    std::vector<FitConfig> out;
    for (const auto& name : parse_list<std::string>(list, &to_string)) {
        FitConfig cfg = base;
        cfg.estimator = parse_estimator(name);
        validate(cfg);
        out.push_back(cfg);
    }
    if (out.empty()) throw ValidationError("--estimators must name at least one estimator");
    return out;
}

inline std::string percent(double x, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << 100.0 * x;
    return ss.str();
}

inline std::string bps(double x) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << 1e4 * x;
    return ss.str();
}

inline std::string curve_samples_csv(const YieldCurve& curve, const BenchmarkCurve& benchmark, const TenorGrid& grid) {
    std::string out = "grid,tenor,yield,benchmark_yield\n";
    auto emit = [&](const char* name, const TenorGrid& g) {
        for (double t : g.tenors)
            out += std::string(name) + "," + format_double(t) + "," + format_double(curve.yield_at(t)) + "," +
                   format_double(benchmark.rate_at(t)) + "\n";
    };
    emit("tenor", grid);
    emit("dense", TenorGrid::dense());
    return out;
}

inline std::filesystem::path sibling(const std::filesystem::path& snapshot, const std::string& suffix) {
    auto out = snapshot;
    out.replace_extension();
    out += suffix;
    return out;
}

} // namespace detail

/// Entry point shared by the executable and the tests. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"curvekit: yield-curve estimation for sparse bond markets"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic market snapshot");
    detail::ScenarioFlags gen_flags;
    gen_flags.add_to(*gen, true);
    std::string gen_out, gen_format;
    gen->add_option("-o,--output", gen_out, "Snapshot path")->required();
    gen->add_option("--format", gen_format, "json | csv (default from extension)");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one estimator to a snapshot");
    std::string fit_snapshot, fit_estimator = "nn", fit_model, fit_curve_path, fit_format;
    detail::FitFlags fit_flags;
    fit->add_option("snapshot", fit_snapshot, "Snapshot file")->required();
    fit->add_option("--estimator", fit_estimator, "bootstrap | nss | kr | nn");
    fit->add_option("--model", fit_model, "Model JSON output (default <snapshot>.<estimator>.model.json)");
    fit->add_option("--curve", fit_curve_path, "Curve sample CSV output (default <snapshot>.<estimator>.curve.csv)");
    fit->add_option("--format", fit_format, "Snapshot format json | csv (default from extension)");
    fit_flags.add_to(*fit);

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run an evaluation protocol");
    exp->require_subcommand(1);
    std::string exp_estimators = "nss,kr,nn", exp_output, exp_format, exp_snapshot_format;
    detail::FitFlags exp_flags;
    auto common = [&](CLI::App* sub, bool needs_snapshot, std::string& snapshot, bool nn_scalars = true) {
        if (needs_snapshot) sub->add_option("snapshot", snapshot, "Snapshot file")->required();
        sub->add_option("--estimators", exp_estimators, "Comma-separated estimators (default nss,kr,nn)");
        sub->add_option("-o,--output", exp_output, "Report path")->required();
        sub->add_option("--format", exp_format, "Report format json | csv (default from extension)");
        sub->add_option("--snapshot-format", exp_snapshot_format, "Snapshot format json | csv");
        exp_flags.add_to(*sub, nn_scalars);
    };
    std::string snapshot_path;
    auto* perturb = exp->add_subcommand("perturb", "Single-bond price perturbation");
    std::string perturb_bond, perturb_bumps = "0.03,0.05,0.10";
    common(perturb, true, snapshot_path);
    perturb->add_option("--bond", perturb_bond, "Bond id to perturb (default: longest maturity)");
    perturb->add_option("--bumps", perturb_bumps, "Comma-separated relative bumps");

    auto* drop = exp->add_subcommand("drop", "Random bond removal, Monte Carlo averaged");
    std::string drop_counts = "1,5,10";
    int n_mc = 10;
    common(drop, true, snapshot_path);
    drop->add_option("--counts", drop_counts, "Comma-separated drop counts");
    drop->add_option("--mc", n_mc, "Monte Carlo replications");

    auto* stab = exp->add_subcommand("stability", "Day-over-day curve stability and hit rate");
    std::vector<std::string> stab_files;
    int stab_days = 30;
    double stab_drift = 0.0003, stab_threshold = 0.0010;
    detail::ScenarioFlags stab_flags;
    std::string stab_series;
    common(stab, false, snapshot_path);
    stab->add_option("snapshots", stab_files, "Date-ordered snapshot files (omit to generate)");
    stab->add_option("--days", stab_days, "Synthetic days when no files are given");
    stab->add_option("--drift", stab_drift, "Daily sd of the synthetic benchmark level");
    stab->add_option("--threshold", stab_threshold, "Hit-rate threshold (decimal, default 10 bps)");
    stab->add_option("--series", stab_series, "CSV path for the 6M/2Y/10Y series");
    stab_flags.add_to(*stab, false);

    auto* loo = exp->add_subcommand("loo", "Leave-one-out RMSE_ytm by maturity bucket");
    std::string loo_buckets = "Full,<2Y,2Y-10Y,>10Y";
    common(loo, true, snapshot_path);
    loo->add_option("--mc", n_mc, "Monte Carlo replications per bucket");
    loo->add_option("--buckets", loo_buckets, "Comma-separated buckets (Full, <2Y, 2Y-10Y, >10Y)");

    auto* hyper = exp->add_subcommand("hyperscan", "NN learning rate / epochs / gamma sweep");
    std::string hs_lr = "1e-7,1e-8,1e-9", hs_epochs = "200,500,1000", hs_g1, hs_g2;
    common(hyper, true, snapshot_path, false);
    hyper->add_option("--lr", hs_lr, "Comma-separated learning rates");
    hyper->add_option("--epochs", hs_epochs, "Comma-separated epoch counts");
    hyper->add_option("--gamma1", hs_g1, "Comma-separated gamma1 values (default: config gamma1)");
    hyper->add_option("--gamma2", hs_g2, "Comma-separated gamma2 values (default: config gamma2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    }

    auto load = [&](const std::string& path, const std::string& format) {
        return format.empty() ? load_snapshot(path) : load_snapshot(path, parse_format(format));
    };

    try {
        if (gen->parsed()) {
            const ScenarioSpec spec = gen_flags.resolve();
            const MarketSnapshot snapshot = generate_scenario(spec);
            if (gen_format.empty())
                save_snapshot(snapshot, gen_out);
            else
                save_snapshot(snapshot, gen_out, parse_format(gen_format));
            out << "wrote " << snapshot.bonds.size() << " bonds to " << gen_out << "\n";
            out << "benchmark " << regime_name(spec.regime) << ": " << detail::percent(snapshot.benchmark.rates.front(), 3)
                << "% at " << format_double(snapshot.benchmark.tenors.front()) << "Y .. "
                << detail::percent(snapshot.benchmark.rates.back(), 3) << "% at "
                << format_double(snapshot.benchmark.tenors.back()) << "Y\n";
            return kOk;
        }

        if (fit->parsed()) {
            FitConfig cfg = fit_flags.resolve();
            if (fit->count("--estimator") > 0 || fit_flags.config_path.empty()) cfg.estimator = parse_estimator(fit_estimator);
            validate(cfg);
            const MarketSnapshot snapshot = load(fit_snapshot, fit_format);
            const CurvePtr curve = fit_curve(snapshot, cfg);
            const std::string name = estimator_name(cfg.estimator);
            const auto model_path = fit_model.empty() ? detail::sibling(fit_snapshot, "." + name + ".model.json")
                                                      : std::filesystem::path(fit_model);
            const auto curve_path = fit_curve_path.empty() ? detail::sibling(fit_snapshot, "." + name + ".curve.csv")
                                                           : std::filesystem::path(fit_curve_path);
            ordered_json model = model_to_json(*curve, cfg);
            write_text_file(model_path, model.dump(2) + "\n");
            write_text_file(curve_path, detail::curve_samples_csv(*curve, snapshot.benchmark, cfg.grid));
            const double rmse = rmse_ytm(*curve, snapshot);
            out << "estimator " << name << ": RMSE_ytm = " << format_double(rmse) << " (" << detail::bps(rmse)
                << " bps) over " << snapshot.bonds.size() << " bonds\n";
            if (const auto* bs = dynamic_cast<const BootstrapCurve*>(curve.get()))
                for (const auto& d : bs->diagnostics()) out << "  skipped " << d.bond_id << ": " << d.message << "\n";
            out << "model: " << model_path.string() << "\ncurve: " << curve_path.string() << "\n";
            return kOk;
        }

        // experiments
        const FitConfig base = exp_flags.resolve();
        const std::uint64_t seed = exp_flags.seed.value_or(0);
        std::vector<EvaluationReport> reports;
        ordered_json details = ordered_json::object();
        int failures = 0;

        if (perturb->parsed()) {
            const MarketSnapshot snapshot = load(snapshot_path, exp_snapshot_format);
            std::string bond = perturb_bond;
            if (bond.empty())
                bond = std::max_element(snapshot.bonds.begin(), snapshot.bonds.end(),
                                        [](const Bond& a, const Bond& b) { return a.maturity < b.maturity; })->id;
            const auto bumps = detail::parse_list<double>(perturb_bumps, &detail::to_double);
            for (const auto& cfg : detail::estimator_configs(base, exp_estimators)) {
                const auto rows = perturb_price_experiment(snapshot, make_estimator(cfg), bond, bumps, cfg.grid);
                for (const auto& row : rows) {
                    failures += row.failure ? 1 : 0;
                    out << estimator_name(cfg.estimator) << " bump " << format_double(row.bump) << ": RMSE_curve "
                        << detail::bps(row.rmse_curve) << " bps, MAD " << detail::bps(row.mad) << " bps\n";
                }
                auto r = perturb_reports(rows, estimator_name(cfg.estimator), bond, to_json(cfg));
                reports.insert(reports.end(), r.begin(), r.end());
            }
        } else if (drop->parsed()) {
            const MarketSnapshot snapshot = load(snapshot_path, exp_snapshot_format);
            const auto counts = detail::parse_list<int>(drop_counts, &detail::to_int);
            for (const auto& cfg : detail::estimator_configs(base, exp_estimators)) {
                const auto rows = drop_bonds_experiment(snapshot, make_estimator(cfg), counts, n_mc, seed, cfg.grid);
                for (const auto& row : rows) {
                    failures += row.failures;
                    out << estimator_name(cfg.estimator) << " drop " << row.drop_count << ": mean RMSE_curve "
                        << detail::bps(row.mean_rmse_curve) << " bps, mean MAD " << detail::bps(row.mean_mad)
                        << " bps (" << row.failures << " failed)\n";
                }
                auto r = drop_reports(rows, estimator_name(cfg.estimator), n_mc, seed, to_json(cfg));
                reports.insert(reports.end(), r.begin(), r.end());
            }
        } else if (stab->parsed()) {
            std::vector<MarketSnapshot> days;
            if (stab_files.empty()) {
                ScenarioSpec spec = stab_flags.resolve();
                spec.seed = seed;
                days = generate_sequence(spec, stab_days, stab_drift);
            } else {
                for (const auto& f : stab_files) days.push_back(load(f, exp_snapshot_format));
            }
            std::string series_csv = "estimator,date,tenor,estimate,benchmark\n";
            for (const auto& cfg : detail::estimator_configs(base, exp_estimators)) {
                const std::string name = estimator_name(cfg.estimator);
                const auto res = stability_experiment(days, make_estimator(cfg), cfg.grid,
                                                      {kAllBuckets.begin(), kAllBuckets.end()}, stab_threshold);
                failures += static_cast<int>(res.failed_dates.size());
                out << name << " hit rate:";
                for (const auto& [bucket, rate] : res.hit_rate) out << " " << bucket_name(bucket) << "=" << format_double(rate);
                out << "\n";
                details[name]["fixed_tenor_series"] = stability_series_json(res);
                for (const auto& obs : res.fixed_tenor_series)
                    series_csv += name + "," + obs.date + "," + format_double(obs.tenor) + "," +
                                  format_double(obs.estimate) + "," + format_double(obs.benchmark) + "\n";
                auto r = stability_reports(res, name, stab_threshold, to_json(cfg));
                reports.insert(reports.end(), r.begin(), r.end());
            }
            if (!stab_series.empty()) write_text_file(stab_series, series_csv);
        } else if (loo->parsed()) {
            const MarketSnapshot snapshot = load(snapshot_path, exp_snapshot_format);
            std::vector<Bucket> buckets;
            for (const auto& b : detail::parse_list<std::string>(loo_buckets, &detail::to_string))
                buckets.push_back(parse_bucket(b));
            out << std::left << std::setw(10) << "model";
            for (Bucket b : buckets) out << std::setw(10) << bucket_name(b);
            out << "  (RMSE_ytm, %)\n";
            for (const auto& cfg : detail::estimator_configs(base, exp_estimators)) {
                const auto res = loo_experiment(snapshot, make_estimator(cfg), n_mc, buckets, seed);
                out << std::setw(10) << estimator_name(cfg.estimator);
                for (Bucket b : buckets) {
                    failures += res.per_bucket.at(b).failures;
                    out << std::setw(10) << detail::percent(res.per_bucket.at(b).rmse_ytm);
                }
                out << "\n";
                reports.push_back(loo_report(res, estimator_name(cfg.estimator), n_mc, seed, to_json(cfg)));
            }
        } else if (hyper->parsed()) {
            const MarketSnapshot snapshot = load(snapshot_path, exp_snapshot_format);
            const auto lrs = detail::parse_list<double>(hs_lr, &detail::to_double);
            const auto epochs = detail::parse_list<int>(hs_epochs, &detail::to_int);
            auto g1 = detail::parse_list<double>(hs_g1, &detail::to_double);
            auto g2 = detail::parse_list<double>(hs_g2, &detail::to_double);
            if (g1.empty()) g1.push_back(base.nn.gamma1);
            if (g2.empty()) g2.push_back(base.nn.gamma2);
            validate(base.nn);
            const auto rows = hyperscan_experiment(snapshot, base.nn, lrs, epochs, g1, g2);
            for (const auto& row : rows) failures += row.failure ? 1 : 0;
            // one LR x epochs table per (gamma1, gamma2) pair
            for (double a : g1)
                for (double b : g2) {
                    out << "RMSE_ytm (%) gamma1=" << format_double(a) << " gamma2=" << format_double(b) << "\n";
                    out << std::left << std::setw(14) << "";
                    for (double lr : lrs) out << std::setw(12) << ("LR=" + format_double(lr));
                    out << "\n";
                    for (int n : epochs) {
                        out << std::setw(14) << ("epochs=" + std::to_string(n));
                        for (double lr : lrs)
                            for (const auto& row : rows)
                                if (row.learning_rate == lr && row.epochs == n && row.gamma1 == a && row.gamma2 == b)
                                    out << std::setw(12) << detail::percent(row.rmse_ytm);
                        out << "\n";
                    }
                }
            reports = hyperscan_reports(rows, base.nn.seed);
        }

        detail::write_report(exp_output, exp_format, reports, details);
        out << "report: " << exp_output << "\n";
        if (failures > 0) {
            err << "error: " << failures << " replication(s) failed; see the report\n";
            return kComputeError;
        }
        return kOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kComputeError;
    }
}

} // namespace curvekit::cli
