#pragma once

#include <functional>
#include <string>

#include "curvekit/bootstrap.hpp"
#include "curvekit/kr.hpp"
#include "curvekit/nn.hpp"
#include "curvekit/nss.hpp"

namespace curvekit {

enum class EstimatorKind { Bootstrap, Nss, Kr, Nn };

inline std::string estimator_name(EstimatorKind k) {
    switch (k) {
    case EstimatorKind::Bootstrap: return "bootstrap";
    case EstimatorKind::Nss: return "nss";
    case EstimatorKind::Kr: return "kr";
    case EstimatorKind::Nn: return "nn";
    }
    return "?";
}

inline EstimatorKind parse_estimator(const std::string& name) {
    if (name == "bootstrap") return EstimatorKind::Bootstrap;
    if (name == "nss") return EstimatorKind::Nss;
    if (name == "kr") return EstimatorKind::Kr;
    if (name == "nn") return EstimatorKind::Nn;
    throw ValidationError("unknown estimator '" + name + "' (expected bootstrap, nss, kr or nn)");
}

struct KrConfig {
    double lambda = 1e-2;
    KernelParams kernel{};
};

/// Estimator choice plus every hyperparameter, defaults as selected for the study.
struct FitConfig {
    EstimatorKind estimator = EstimatorKind::Nn;
    NssFitConfig nss{};
    KrConfig kr{};
    TrainConfig nn{};
    TenorGrid grid = TenorGrid::standard();
};

inline void validate(const FitConfig& cfg) {
    cfg.grid.validate();
    switch (cfg.estimator) {
    case EstimatorKind::Bootstrap: break;
    case EstimatorKind::Nss:
        if (cfg.nss.starts < 1 || cfg.nss.max_iterations < 1)
            throw ValidationError("nss config: starts and max_iterations must be >= 1");
        break;
    case EstimatorKind::Kr:
        if (!(cfg.kr.lambda > 0.0)) throw ValidationError("kr config: lambda must be > 0");
        validate(cfg.kr.kernel);
        break;
    case EstimatorKind::Nn: validate(cfg.nn); break;
    }
}

/// A named snapshot -> curve map. Experiments refit through this.
struct Estimator {
    std::string name;
    std::function<CurvePtr(const MarketSnapshot&)> fit;
};

inline CurvePtr fit_curve(const MarketSnapshot& snapshot, const FitConfig& cfg) {
    switch (cfg.estimator) {
    case EstimatorKind::Bootstrap: return std::make_shared<BootstrapCurve>(bootstrap(snapshot));
    case EstimatorKind::Nss: return std::make_shared<NssCurve>(fit_nss(snapshot, cfg.nss));
    case EstimatorKind::Kr: return std::make_shared<KrModel>(fit_kr(snapshot, cfg.kr.lambda, cfg.kr.kernel));
    case EstimatorKind::Nn: return std::make_shared<NnCurve>(train(snapshot, cfg.nn));
    }
    throw ValidationError("unknown estimator");
}

inline Estimator make_estimator(const FitConfig& cfg) {
    validate(cfg);
    return Estimator{estimator_name(cfg.estimator), [cfg](const MarketSnapshot& s) { return fit_curve(s, cfg); }};
}

} // namespace curvekit
