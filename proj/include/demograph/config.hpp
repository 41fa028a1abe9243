#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "demograph/handselect.hpp"
#include "demograph/infotheory.hpp"
#include "demograph/interactions.hpp"
#include "demograph/metrics.hpp"
#include "demograph/pipeline.hpp"
#include "demograph/plangen.hpp"
#include "demograph/segmentation.hpp"
#include "demograph/synth.hpp"

namespace demograph {

struct SuiteConfig {
    int size = 100;
    std::int64_t long_frames = 0;  // 0 selects the mixed suite, otherwise long sessions of this length
    double noise_sigma = 0.001;
    double iou_threshold = 0.5;
    int selector_samples = 500;
    double label_flip_rate = 0.0;

    void validate() const;
    friend bool operator==(const SuiteConfig&, const SuiteConfig&) = default;
};

struct PathsConfig {
    std::string input;
    std::string output = "out";
    std::string model;  // selector model JSON; the prior alone when empty

    friend bool operator==(const PathsConfig&, const PathsConfig&) = default;
};

struct PipelineConfig {
    WindowConfig window;
    Thresholds thresholds;
    SegmentationConfig segmentation;
    SelectorHyperparams selector;
    PlanConfig plan;
    SuiteConfig suite;
    PathsConfig paths;
    std::uint64_t seed = 7;

    /// Throws InvalidConfig naming the offending field.
    void validate() const;

    AnalysisSettings analysis() const;
    /// Generator settings matching the analysis settings.
    ScenarioConfig scenario() const;
    /// Selector hyperparameters with the seed derived from the pipeline seed.
    SelectorHyperparams selector_hyperparams() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

std::string config_to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys and wrong types throw InvalidConfig.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace demograph
