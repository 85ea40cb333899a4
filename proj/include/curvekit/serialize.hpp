#pragma once

#include <string>

#include "json.hpp"

#include "curvekit/estimator.hpp"

namespace curvekit {

using ordered_json = nlohmann::ordered_json;

inline std::string schedule_name(RegularizerSchedule s) {
    return s == RegularizerSchedule::PerBond ? "per_bond" : "per_epoch";
}

inline RegularizerSchedule parse_schedule(const std::string& name) {
    if (name == "per_bond") return RegularizerSchedule::PerBond;
    if (name == "per_epoch") return RegularizerSchedule::PerEpoch;
    throw ValidationError("unknown regularizer schedule '" + name + "' (expected per_bond or per_epoch)");
}

inline ordered_json to_json(const TrainConfig& cfg) {
    ordered_json j;
    j["learning_rate"] = cfg.learning_rate;
    j["epochs"] = cfg.epochs;
    j["gamma1"] = cfg.gamma1;
    j["gamma2"] = cfg.gamma2;
    j["grid"] = cfg.grid.tenors;
    j["seed"] = cfg.seed;
    j["init_scale"] = cfg.init_scale;
    j["hidden"] = cfg.hidden;
    j["schedule"] = schedule_name(cfg.schedule);
    return j;
}

inline ordered_json to_json(const FitConfig& cfg) {
    ordered_json j;
    j["estimator"] = estimator_name(cfg.estimator);
    j["nss"] = {{"starts", cfg.nss.starts}, {"max_iterations", cfg.nss.max_iterations}, {"seed", cfg.nss.seed}};
    j["kr"] = {{"lambda", cfg.kr.lambda}, {"a", cfg.kr.kernel.a}, {"b", cfg.kr.kernel.b}};
    j["nn"] = to_json(cfg.nn);
    j["grid"] = cfg.grid.tenors;
    return j;
}

/// Overlays the keys present in `j` onto `cfg`; absent keys keep their current values.
inline void merge_config(FitConfig& cfg, const nlohmann::json& j) {
    try {
        if (j.contains("estimator")) cfg.estimator = parse_estimator(j.at("estimator").get<std::string>());
        if (j.contains("grid")) cfg.grid.tenors = j.at("grid").get<std::vector<double>>();
        if (j.contains("nss")) {
            const auto& n = j.at("nss");
            if (n.contains("starts")) cfg.nss.starts = n.at("starts").get<int>();
            if (n.contains("max_iterations")) cfg.nss.max_iterations = n.at("max_iterations").get<int>();
            if (n.contains("seed")) cfg.nss.seed = n.at("seed").get<std::uint64_t>();
        }
        if (j.contains("kr")) {
            const auto& k = j.at("kr");
            if (k.contains("lambda")) cfg.kr.lambda = k.at("lambda").get<double>();
            if (k.contains("a")) cfg.kr.kernel.a = k.at("a").get<double>();
            if (k.contains("b")) cfg.kr.kernel.b = k.at("b").get<double>();
        }
        if (j.contains("nn")) {
            const auto& n = j.at("nn");
            if (n.contains("learning_rate")) cfg.nn.learning_rate = n.at("learning_rate").get<double>();
            if (n.contains("epochs")) cfg.nn.epochs = n.at("epochs").get<int>();
            if (n.contains("gamma1")) cfg.nn.gamma1 = n.at("gamma1").get<double>();
            if (n.contains("gamma2")) cfg.nn.gamma2 = n.at("gamma2").get<double>();
            if (n.contains("grid")) cfg.nn.grid.tenors = n.at("grid").get<std::vector<double>>();
            if (n.contains("seed")) cfg.nn.seed = n.at("seed").get<std::uint64_t>();
            if (n.contains("init_scale")) cfg.nn.init_scale = n.at("init_scale").get<double>();
            if (n.contains("hidden")) cfg.nn.hidden = n.at("hidden").get<int>();
            if (n.contains("schedule")) cfg.nn.schedule = parse_schedule(n.at("schedule").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

inline ordered_json nn_to_json(const NnParams& p, const TrainConfig& cfg) {
    ordered_json j;
    j["H"] = p.hidden();
    j["w"] = p.w;
    j["b"] = p.b;
    j["v"] = p.v;
    j["c"] = p.c;
    j["config_echo"] = to_json(cfg);
    return j;
}

inline NnParams nn_from_json(const nlohmann::json& j) {
    NnParams p;
    try {
        p.w = j.at("w").get<std::vector<double>>();
        p.b = j.at("b").get<std::vector<double>>();
        p.v = j.at("v").get<std::vector<double>>();
        p.c = j.at("c").get<double>();
        if (j.at("H").get<std::size_t>() != p.w.size()) throw ParseError("NN model: H does not match len(w)");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("NN model: ") + e.what());
    }
    validate(p);
    return p;
}

/// Serialized form of any fitted curve, tagged by estimator.
inline ordered_json model_to_json(const YieldCurve& curve, const FitConfig& cfg) {
    ordered_json j;
    j["estimator"] = estimator_name(cfg.estimator);
    if (const auto* nn = dynamic_cast<const NnCurve*>(&curve)) {
        auto body = nn_to_json(nn->params(), cfg.nn);
        for (auto& [k, v] : body.items()) j[k] = v;
    } else if (const auto* nss = dynamic_cast<const NssCurve*>(&curve)) {
        const auto& p = nss->params();
        j["beta"] = {p.beta0, p.beta1, p.beta2, p.beta3};
        j["lambda1"] = p.lambda1;
        j["lambda2"] = p.lambda2;
        j["objective"] = nss->objective();
        j["config_echo"] = to_json(cfg)["nss"];
    } else if (const auto* kr = dynamic_cast<const KrModel*>(&curve)) {
        j["anchor_times"] = kr->anchor_times();
        j["alphas"] = kr->alphas();
        j["lambda"] = kr->lambda();
        j["kernel"] = {{"a", kr->kernel().a}, {"b", kr->kernel().b}};
        j["objective"] = kr->objective();
    } else if (const auto* bs = dynamic_cast<const BootstrapCurve*>(&curve)) {
        j["knot_times"] = bs->knot_times();
        j["knot_yields"] = bs->knot_yields();
        j["diagnostics"] = ordered_json::array();
        for (const auto& d : bs->diagnostics()) j["diagnostics"].push_back({{"bond_id", d.bond_id}, {"message", d.message}});
    }
    return j;
}

} // namespace curvekit
