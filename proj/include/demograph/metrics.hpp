#pragma once

#include <optional>
#include <string>
#include <vector>

#include "demograph/handselect.hpp"
#include "demograph/interactions.hpp"
#include "demograph/pipeline.hpp"
#include "demograph/synth.hpp"

namespace demograph {

struct EventScore {
    double precision = 1.0;
    double recall = 1.0;
    std::size_t matched = 0;
    std::size_t predicted = 0;
    std::size_t truth = 0;
};

/// Intersection over union of two inclusive frame spans.
double span_iou(const InteractionEvent& a, const InteractionEvent& b);

/// Greedy one-to-one matching by descending IoU among events of the same kind
/// and pair. An empty prediction has precision 1; an empty truth has recall 1.
EventScore event_prf(const InteractionTimeline& predicted, const InteractionTimeline& truth, double iou_threshold = 0.5);

struct DemoRecord {
    std::string demo_id;
    double gra = 0.0;
    double tsa = 0.0;
    double event_precision = 0.0;
    double event_recall = 0.0;
    double selector_agreement = 0.0;
    bool plan_match = false;
    bool pick_before_place = true;
};

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

struct EvalReport {
    std::vector<DemoRecord> records;
    Aggregate gra, tsa, event_precision, event_recall, selector_agreement, plan_match;
};

struct EvalOptions {
    AnalysisSettings settings;
    double iou_threshold = 0.5;
    /// Classifier used for hand assignment and agreement; the prior alone when absent.
    std::optional<SelectorModel> selector;
    double kappa = 1.0;
};

DemoRecord evaluate_demo(const SynthDemo& demo, const EvalOptions& options);
/// Records in suite order. Throws EmptyInput for an empty suite.
EvalReport evaluate_suite(const std::vector<SynthDemo>& suite, const EvalOptions& options);
/// Fills the aggregates from the records.
void aggregate(EvalReport& report);

std::string report_to_json(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace demograph
