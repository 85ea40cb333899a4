#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace curvekit {

struct NelderMeadOptions {
    int max_iterations = 4000;
    double ftol_abs = 1e-20;  // stop when f_max - f_min <= ftol_abs + ftol_rel * |f_min|
    double ftol_rel = 1e-12;
    double xtol = 1e-12;      // or when every vertex is within xtol of the best, coordinate-wise
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Non-finite objective values are treated as +infinity.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::vector<double> start, const std::vector<double>& steps,
                             const NelderMeadOptions& options = {}) {
    const std::size_t n = start.size();
    auto eval = [&](const std::vector<double>& x) {
        double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    NelderMeadResult result;

    auto point_along = [&](double coef, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second_worst = order[n - 1];

        const double spread = values[worst] - values[best];
        double xspread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[best][k]));
        if (std::isfinite(spread) &&
            (spread <= options.ftol_abs + options.ftol_rel * std::abs(values[best]) || xspread <= options.xtol)) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[order[i]][k];
        for (double& c : centroid) c /= static_cast<double>(n);

        point_along(-1.0, trial, simplex[worst]);
        const double f_reflect = eval(trial);
        if (f_reflect < values[best]) {
            point_along(-2.0, trial2, simplex[worst]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < values[worst];
        point_along(outside ? -0.5 : 0.5, trial2, simplex[worst]);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best_index = static_cast<std::size_t>(std::distance(values.begin(), best_it));
    result.x = simplex[best_index];
    result.value = *best_it;
    result.iterations = iter;
    return result;
}

} // namespace curvekit
