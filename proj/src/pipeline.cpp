#include "demograph/pipeline.hpp"

namespace demograph {

void AnalysisSettings::validate() const {
    window.validate();
    thresholds.validate();
    segmentation.validate();
    plan.validate();
}

PipelineResult run_pipeline(const Demonstration& demo, const AnalysisSettings& settings, const HandAssigner& assign) {
    settings.validate();
    PipelineResult r;
    r.timeline = interaction_timeline(demo, settings.window, settings.thresholds);
    r.graphs = graph_sequence(demo, r.timeline, settings.window);
    r.segments = segment(r.timeline, demo, settings.segmentation);
    r.plan = emit_plan(r.segments, demo, assign, settings.plan);
    return r;
}

}  // namespace demograph
