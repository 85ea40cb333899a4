#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "curvekit/curve.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/pricing.hpp"
#include "curvekit/tenor_grid.hpp"

namespace curvekit {

/// y(t) = sum_i v_i tanh(w_i t + b_i) + c
struct NnParams {
    std::vector<double> w;
    std::vector<double> b;
    std::vector<double> v;
    double c = 0.0;

    std::size_t hidden() const noexcept { return w.size(); }

    /// Flat layout [w..., b..., v..., c], shared with gradients.
    std::vector<double> to_vector() const {
        std::vector<double> out;
        out.reserve(3 * hidden() + 1);
        out.insert(out.end(), w.begin(), w.end());
        out.insert(out.end(), b.begin(), b.end());
        out.insert(out.end(), v.begin(), v.end());
        out.push_back(c);
        return out;
    }

    static NnParams from_vector(const std::vector<double>& x) {
        if (x.size() < 4 || (x.size() - 1) % 3 != 0) throw ValidationError("NN: flat parameter vector has wrong length");
        const auto h = static_cast<std::ptrdiff_t>((x.size() - 1) / 3);
        NnParams p;
        p.w.assign(x.begin(), x.begin() + h);
        p.b.assign(x.begin() + h, x.begin() + 2 * h);
        p.v.assign(x.begin() + 2 * h, x.begin() + 3 * h);
        p.c = x.back();
        return p;
    }

    friend bool operator==(const NnParams&, const NnParams&) = default;
};

inline void validate(const NnParams& p) {
    if (p.hidden() < 1) throw ValidationError("NN: hidden count must be >= 1");
    if (p.b.size() != p.hidden() || p.v.size() != p.hidden())
        throw ValidationError("NN: w, b, v must have the same length");
    for (double x : p.to_vector())
        if (!std::isfinite(x)) throw ValidationError("NN: parameters must be finite");
}

/// How the smoothness and trend penalties enter the per-bond updates.
enum class RegularizerSchedule {
    PerBond,  // penalties added to every per-bond loss
    PerEpoch, // price-error steps per bond, then one penalty step per epoch
};

struct TrainConfig {
    double learning_rate = 1e-8;
    int epochs = 1000;
    double gamma1 = 1e3;
    double gamma2 = 1e4;
    TenorGrid grid = TenorGrid::standard();
    std::uint64_t seed = 0;
    double init_scale = 0.1;
    int hidden = 3;
    RegularizerSchedule schedule = RegularizerSchedule::PerBond;
};

inline void validate(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("NN config: learning_rate must be > 0");
    if (cfg.epochs < 1) throw ValidationError("NN config: epochs must be >= 1");
    if (!(cfg.gamma1 >= 0.0) || !(cfg.gamma2 >= 0.0)) throw ValidationError("NN config: gamma1, gamma2 must be >= 0");
    if (cfg.hidden < 1) throw ValidationError("NN config: hidden must be >= 1");
    if (!(cfg.init_scale >= 0.0)) throw ValidationError("NN config: init_scale must be >= 0");
    cfg.grid.validate();
}

inline double nn_yield(const NnParams& p, double t) {
    double y = p.c;
    for (std::size_t i = 0; i < p.hidden(); ++i) y += p.v[i] * std::tanh(p.w[i] * t + p.b[i]);
    return y;
}

class NnCurve final : public YieldCurve {
public:
    explicit NnCurve(NnParams params) : params_(std::move(params)) { validate(params_); }

    double yield_at(double t) const override { return nn_yield(params_, t); }
    const NnParams& params() const noexcept { return params_; }

private:
    NnParams params_;
};

namespace detail {

/// grad += scale * dy(t)/dtheta in the flat layout.
inline void add_yield_gradient(const NnParams& p, double t, double scale, std::vector<double>& grad) {
    const std::size_t h = p.hidden();
    for (std::size_t i = 0; i < h; ++i) {
        const double a = std::tanh(p.w[i] * t + p.b[i]);
        const double da = p.v[i] * (1.0 - a * a);
        grad[i] += scale * da * t;
        grad[h + i] += scale * da;
        grad[2 * h + i] += scale * a;
    }
    grad[3 * h] += scale;
}

inline double model_price(const NnParams& p, const std::vector<Cashflow>& schedule) {
    double pv = 0.0;
    for (const auto& cf : schedule) pv += cf.amount * std::exp(-cf.time * nn_yield(p, cf.time));
    return pv;
}

/// grad += scale * d(price)/dtheta
inline void add_price_gradient(const NnParams& p, const std::vector<Cashflow>& schedule, double scale,
                               std::vector<double>& grad) {
    for (const auto& cf : schedule) {
        const double d = cf.amount * std::exp(-cf.time * nn_yield(p, cf.time));
        add_yield_gradient(p, cf.time, -scale * cf.time * d, grad);
    }
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline std::vector<double> grid_yields(const NnParams& p, const std::vector<double>& grid) {
    std::vector<double> y(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) y[i] = nn_yield(p, grid[i]);
    return y;
}

/// Index k >= 1 of the steepest adjacent slope, ties to the lower index.
inline std::size_t steepest_pair(const std::vector<double>& y, const std::vector<double>& grid) {
    std::size_t best = 1;
    double best_slope = -1.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double s = std::abs((y[i] - y[i - 1]) / (grid[i] - grid[i - 1]));
        if (s > best_slope) {
            best_slope = s;
            best = i;
        }
    }
    return best;
}

inline std::vector<double> benchmark_on(const BenchmarkCurve& benchmark, const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = benchmark.rate_at(grid[i]);
    return out;
}

inline double trend_from(const std::vector<double>& y, const std::vector<double>& bench, const std::vector<double>& grid) {
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        sum += std::abs(((y[i] - y[i - 1]) - (bench[i] - bench[i - 1])) / (grid[i] - grid[i - 1]));
    return sum / static_cast<double>(grid.size());
}

} // namespace detail

/// Mean squared price error over the snapshot's bonds.
inline double loss_error(const NnParams& p, const MarketSnapshot& snapshot) {
    double sum = 0.0;
    for (const auto& bond : snapshot.bonds) {
        const double e = bond.market_price - detail::model_price(p, payment_schedule(bond));
        sum += e * e;
    }
    return sum / static_cast<double>(snapshot.bonds.size());
}

/// Largest absolute adjacent slope of the network on the grid.
inline double loss_smooth(const NnParams& p, const TenorGrid& grid) {
    const auto y = detail::grid_yields(p, grid.tenors);
    const std::size_t k = detail::steepest_pair(y, grid.tenors);
    return std::abs((y[k] - y[k - 1]) / (grid.tenors[k] - grid.tenors[k - 1]));
}

/// Mean absolute slope mismatch against the benchmark. The sum over N-1 adjacent
/// pairs is divided by N.
inline double loss_trend(const NnParams& p, const BenchmarkCurve& benchmark, const TenorGrid& grid) {
    return detail::trend_from(detail::grid_yields(p, grid.tenors), detail::benchmark_on(benchmark, grid.tenors),
                              grid.tenors);
}

inline double total_loss(const NnParams& p, const MarketSnapshot& snapshot, const TrainConfig& cfg) {
    return loss_error(p, snapshot) + cfg.gamma1 * loss_smooth(p, cfg.grid) +
           cfg.gamma2 * loss_trend(p, snapshot.benchmark, cfg.grid);
}

/// Backpropagated gradients in the flat layout of NnParams::to_vector().
inline std::vector<double> grad_loss_error(const NnParams& p, const MarketSnapshot& snapshot) {
    std::vector<double> grad(3 * p.hidden() + 1, 0.0);
    const double m = static_cast<double>(snapshot.bonds.size());
    for (const auto& bond : snapshot.bonds) {
        const auto schedule = payment_schedule(bond);
        const double e = bond.market_price - detail::model_price(p, schedule);
        detail::add_price_gradient(p, schedule, -2.0 * e / m, grad);
    }
    return grad;
}

/// Subgradient through the steepest pair only.
inline std::vector<double> grad_loss_smooth(const NnParams& p, const TenorGrid& grid) {
    std::vector<double> grad(3 * p.hidden() + 1, 0.0);
    const auto& t = grid.tenors;
    const auto y = detail::grid_yields(p, t);
    const std::size_t k = detail::steepest_pair(y, t);
    const double dt = t[k] - t[k - 1];
    const double s = detail::sign(y[k] - y[k - 1]) / dt;
    detail::add_yield_gradient(p, t[k], s, grad);
    detail::add_yield_gradient(p, t[k - 1], -s, grad);
    return grad;
}

inline std::vector<double> grad_loss_trend(const NnParams& p, const BenchmarkCurve& benchmark, const TenorGrid& grid) {
    std::vector<double> grad(3 * p.hidden() + 1, 0.0);
    const auto& t = grid.tenors;
    const auto y = detail::grid_yields(p, t);
    const auto bench = detail::benchmark_on(benchmark, t);
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double dt = t[i] - t[i - 1];
        const double s = detail::sign((y[i] - y[i - 1]) - (bench[i] - bench[i - 1])) / (dt * n);
        detail::add_yield_gradient(p, t[i], s, grad);
        detail::add_yield_gradient(p, t[i - 1], -s, grad);
    }
    return grad;
}

inline std::vector<double> grad_total_loss(const NnParams& p, const MarketSnapshot& snapshot, const TrainConfig& cfg) {
    auto grad = grad_loss_error(p, snapshot);
    const auto gs = grad_loss_smooth(p, cfg.grid);
    const auto gt = grad_loss_trend(p, snapshot.benchmark, cfg.grid);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += cfg.gamma1 * gs[i] + cfg.gamma2 * gt[i];
    return grad;
}

/// Random hidden layer, output bias at the snapshot's mean YTM.
inline NnParams init_params(const MarketSnapshot& snapshot, const TrainConfig& cfg) {
    double lo = snapshot.bonds.front().maturity, hi = lo, ytm_sum = 0.0;
    for (const auto& bond : snapshot.bonds) {
        lo = std::min(lo, bond.maturity);
        hi = std::max(hi, bond.maturity);
        ytm_sum += yield_to_maturity(bond);
    }
    const double span = hi - lo > 0.0 ? hi - lo : hi;

    std::mt19937_64 rng(cfg.seed);
    const auto h = static_cast<std::size_t>(cfg.hidden);
    NnParams p;
    p.w.resize(h);
    p.b.resize(h);
    p.v.resize(h);
    if (cfg.init_scale > 0.0) {
        std::normal_distribution<double> w_dist(0.0, cfg.init_scale / span);
        std::normal_distribution<double> unit_dist(0.0, cfg.init_scale);
        for (auto& x : p.w) x = w_dist(rng);
        for (auto& x : p.b) x = unit_dist(rng);
        for (auto& x : p.v) x = unit_dist(rng);
    }
    p.c = ytm_sum / static_cast<double>(snapshot.bonds.size());
    return p;
}

/// Called after each epoch with (epoch index, parameters).
using EpochObserver = std::function<void(int, const NnParams&)>;

/// Per-bond gradient descent on (p_j - p^_j)^2 + gamma1 L_smooth + gamma2 L_trend, bonds
/// visited in ascending maturity (ties by id) every epoch.
inline NnParams train(const MarketSnapshot& snapshot, const TrainConfig& cfg, const EpochObserver& observer = {}) {
    validate(cfg);
    NnParams p = init_params(snapshot, cfg);

    std::vector<const Bond*> order;
    for (const auto& bond : snapshot.bonds) order.push_back(&bond);
    std::stable_sort(order.begin(), order.end(), [](const Bond* a, const Bond* b) {
        return a->maturity != b->maturity ? a->maturity < b->maturity : a->id < b->id;
    });
    std::vector<std::vector<Cashflow>> schedules;
    for (const Bond* bond : order) schedules.push_back(payment_schedule(*bond));

    const auto& grid = cfg.grid.tenors;
    const auto bench = detail::benchmark_on(snapshot.benchmark, grid);
    const std::size_t n = 3 * p.hidden() + 1;
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    std::vector<double> grad(n), theta(n);

    // Adds gamma1 L_smooth + gamma2 L_trend and its gradient; returns the penalty value.
    auto add_penalties = [&](std::vector<double>& g) {
        if (cfg.gamma1 == 0.0 && cfg.gamma2 == 0.0) return 0.0;
        const auto y = detail::grid_yields(p, grid);
        double penalty = 0.0;
        if (cfg.gamma1 != 0.0) {
            const std::size_t k = detail::steepest_pair(y, grid);
            const double dt = grid[k] - grid[k - 1];
            penalty += cfg.gamma1 * std::abs((y[k] - y[k - 1]) / dt);
            const double s = cfg.gamma1 * detail::sign(y[k] - y[k - 1]) / dt;
            detail::add_yield_gradient(p, grid[k], s, g);
            detail::add_yield_gradient(p, grid[k - 1], -s, g);
        }
        if (cfg.gamma2 != 0.0) {
            penalty += cfg.gamma2 * detail::trend_from(y, bench, grid);
            for (std::size_t i = 1; i < grid.size(); ++i) {
                const double dt = grid[i] - grid[i - 1];
                const double s = cfg.gamma2 * inv_n * detail::sign((y[i] - y[i - 1]) - (bench[i] - bench[i - 1])) / dt;
                detail::add_yield_gradient(p, grid[i], s, g);
                detail::add_yield_gradient(p, grid[i - 1], -s, g);
            }
        }
        return penalty;
    };

    auto apply_step = [&](int epoch, int bond_index, double loss) {
        if (!std::isfinite(loss))
            throw DivergenceError("nn train: loss became non-finite at epoch " + std::to_string(epoch) + ", bond " +
                                      std::to_string(bond_index),
                                  epoch, bond_index);
        theta = p.to_vector();
        for (std::size_t i = 0; i < n; ++i) theta[i] -= cfg.learning_rate * grad[i];
        for (double x : theta)
            if (!std::isfinite(x))
                throw DivergenceError("nn train: parameters became non-finite at epoch " + std::to_string(epoch) +
                                          ", bond " + std::to_string(bond_index),
                                      epoch, bond_index);
        p = NnParams::from_vector(theta);
    };

    const bool per_bond = cfg.schedule == RegularizerSchedule::PerBond;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t j = 0; j < order.size(); ++j) {
            std::fill(grad.begin(), grad.end(), 0.0);
            const double e = order[j]->market_price - detail::model_price(p, schedules[j]);
            detail::add_price_gradient(p, schedules[j], -2.0 * e, grad);
            double loss = e * e;
            if (per_bond) loss += add_penalties(grad);
            apply_step(epoch, static_cast<int>(j), loss);
        }
        if (!per_bond) {
            std::fill(grad.begin(), grad.end(), 0.0);
            apply_step(epoch, -1, add_penalties(grad));
        }
        if (observer) observer(epoch, p);
    }
    return p;
}

} // namespace curvekit
