// Fits all four estimators to one synthetic falling-market day and prints the
// curves on the standard tenor grid next to the benchmark.
#include <cstdio>

#include "curvekit/curvekit.hpp"

int main() {
    using namespace curvekit;
    ScenarioSpec spec;
    spec.regime = Regime::Falling;
    spec.price_noise_sd = 0.001;
    spec.seed = 3;
    const MarketSnapshot day = generate_scenario(spec);

    std::vector<std::pair<std::string, CurvePtr>> curves;
    for (auto kind : {EstimatorKind::Bootstrap, EstimatorKind::Nss, EstimatorKind::Kr, EstimatorKind::Nn}) {
        FitConfig cfg;
        cfg.estimator = kind;
        curves.emplace_back(estimator_name(kind), fit_curve(day, cfg));
    }

    std::printf("%8s %9s", "tenor", "bench");
    for (const auto& [name, curve] : curves) std::printf(" %9s", name.c_str());
    std::printf("\n");
    for (double t : TenorGrid::standard().tenors) {
        std::printf("%8.4f %9.4f", t, 100.0 * day.benchmark.rate_at(t));
        for (const auto& [name, curve] : curves) std::printf(" %9.4f", 100.0 * curve->yield_at(t));
        std::printf("\n");
    }
    for (const auto& [name, curve] : curves)
        std::printf("%-10s RMSE_ytm %.4f%%\n", name.c_str(), 100.0 * rmse_ytm(*curve, day));
}
