#include "demograph/config.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "demograph/errors.hpp"
#include "demograph/random.hpp"

namespace demograph {

namespace {

using json = nlohmann::ordered_json;
using Field = std::variant<int*, std::int64_t*, std::uint64_t*, double*, bool*, std::string*>;

struct Section {
    const char* name;
    std::vector<std::pair<const char*, Field>> fields;
};

std::vector<Section> sections(PipelineConfig& c) {
    return {
        {"window",
         {{"phi", &c.window.phi},
          {"stride", &c.window.stride},
          {"zeta", &c.window.zeta},
          {"epsilon", &c.window.epsilon},
          {"derivative_smoothing", &c.window.derivative_smoothing}}},
        {"thresholds",
         {{"alpha_mi", &c.thresholds.alpha_mi},
          {"gamma_mi", &c.thresholds.gamma_mi},
          {"r_th_ho", &c.thresholds.r_th_ho},
          {"r_th_oo", &c.thresholds.r_th_oo},
          {"min_event_centers", &c.thresholds.min_event_centers}}},
        {"segmentation", {{"reach_lead", &c.segmentation.reach_lead}, {"retreat_lag", &c.segmentation.retreat_lag}}},
        {"selector",
         {{"r_bonus", &c.selector.r_bonus},
          {"r_penalty", &c.selector.r_penalty},
          {"kappa", &c.selector.kappa},
          {"learning_rate", &c.selector.learning_rate},
          {"epochs", &c.selector.epochs},
          {"hidden_size", &c.selector.hidden_size},
          {"normalize_features", &c.selector.normalize_features}}},
        {"plan",
         {{"task_name", &c.plan.task_name},
          {"emit_move_arm", &c.plan.emit_move_arm},
          {"move_arm_min_frames", &c.plan.move_arm_min_frames},
          {"pose_tolerance", &c.plan.pose_tolerance}}},
        {"suite",
         {{"size", &c.suite.size},
          {"long_frames", &c.suite.long_frames},
          {"noise_sigma", &c.suite.noise_sigma},
          {"iou_threshold", &c.suite.iou_threshold},
          {"selector_samples", &c.suite.selector_samples},
          {"label_flip_rate", &c.suite.label_flip_rate}}},
        {"paths", {{"input", &c.paths.input}, {"output", &c.paths.output}, {"model", &c.paths.model}}},
    };
}

[[noreturn]] void bad(const std::string& field, const std::string& detail) {
    fail(ErrorCode::InvalidConfig, "config field '" + field + "': " + detail);
}

template <typename T>
T integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) bad(field, "expected an integer");
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) bad(field, "out of range");
        return static_cast<T>(u);
    }
    const auto s = v.get<std::int64_t>();
    if constexpr (std::is_unsigned_v<T>) {
        if (s < 0) bad(field, "must be non-negative");
    } else if (s < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
               s > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
        bad(field, "out of range");
    }
    return static_cast<T>(s);
}

void read_field(const json& v, const Field& f, const std::string& field) {
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) bad(field, "expected a boolean");
                *p = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) bad(field, "expected a string");
                *p = v.get<std::string>();
            } else if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) bad(field, "expected a number");
                *p = v.get<double>();
            } else {
                *p = integer<T>(v, field);
            }
        },
        f);
}

void write_field(json& out, const char* key, const Field& f) {
    std::visit([&](auto* p) { out[key] = *p; }, f);
}

void rethrow_as(const std::string& section, const Error& e) {
    fail(ErrorCode::InvalidConfig, "config section '" + section + "': " + e.detail());
}

}  // namespace

void SuiteConfig::validate() const {
    if (size < 1) bad("suite.size", "must be >= 1");
    if (long_frames < 0) bad("suite.long_frames", "must be >= 0");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) bad("suite.noise_sigma", "must be >= 0");
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) bad("suite.iou_threshold", "must lie in (0, 1]");
    if (selector_samples < 1) bad("suite.selector_samples", "must be >= 1");
    if (!(label_flip_rate >= 0.0 && label_flip_rate <= 1.0)) bad("suite.label_flip_rate", "must lie in [0, 1]");
}

void PipelineConfig::validate() const {
    auto check = [](const char* section, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            rethrow_as(section, e);
        }
    };
    check("window", [&] { window.validate(); });
    check("thresholds", [&] { thresholds.validate(); });
    check("segmentation", [&] { segmentation.validate(); });
    check("selector", [&] { selector.validate(); });
    check("plan", [&] { plan.validate(); });
    suite.validate();
    if (paths.output.empty()) bad("paths.output", "must not be empty");
}

AnalysisSettings PipelineConfig::analysis() const {
    AnalysisSettings s;
    s.window = window;
    s.thresholds = thresholds;
    s.segmentation = segmentation;
    s.plan = plan;
    return s;
}

ScenarioConfig PipelineConfig::scenario() const {
    ScenarioConfig s;
    s.seed = seed;
    s.noise_sigma = suite.noise_sigma;
    s.window = window;
    s.segmentation = segmentation;
    s.plan = plan;
    return s;
}

SelectorHyperparams PipelineConfig::selector_hyperparams() const {
    SelectorHyperparams hp = selector;
    hp.seed = derive_seed(seed, "selector");
    return hp;
}

std::string config_to_json(const PipelineConfig& cfg) {
    PipelineConfig copy = cfg;
    json j;
    for (const auto& s : sections(copy)) {
        json sec = json::object();
        for (const auto& [key, f] : s.fields) write_field(sec, key, f);
        j[s.name] = std::move(sec);
    }
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");

    PipelineConfig cfg;
    auto secs = sections(cfg);
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") {
            cfg.seed = integer<std::uint64_t>(value, "seed");
            continue;
        }
        const Section* sec = nullptr;
        for (const auto& s : secs)
            if (key == s.name) sec = &s;
        if (sec == nullptr) bad(key, "unknown key");
        if (!value.is_object()) bad(key, "expected an object");
        for (const auto& [fkey, fvalue] : value.items()) {
            const std::string field = key + "." + fkey;
            const Field* target = nullptr;
            for (const auto& [name, f] : sec->fields)
                if (fkey == name) target = &f;
            if (target == nullptr) bad(field, "unknown key");
            read_field(fvalue, *target, field);
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return config_from_json(text);
    } catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.detail());
    }
}

}  // namespace demograph
