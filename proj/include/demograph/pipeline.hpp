#pragma once

#include <vector>

#include "demograph/infotheory.hpp"
#include "demograph/interactions.hpp"
#include "demograph/plangen.hpp"
#include "demograph/scenegraph.hpp"
#include "demograph/segmentation.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

struct AnalysisSettings {
    WindowConfig window;
    Thresholds thresholds;
    SegmentationConfig segmentation;
    PlanConfig plan;

    void validate() const;
    friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct PipelineResult {
    InteractionTimeline timeline;
    SceneGraphSequence graphs;
    std::vector<Segment> segments;
    BehaviorTree plan;
};

/// Demonstration to timeline, scene graphs, segments and plan.
PipelineResult run_pipeline(const Demonstration& demo, const AnalysisSettings& settings, const HandAssigner& assign);

}  // namespace demograph
