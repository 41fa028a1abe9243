#include "demograph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

double span_iou(const InteractionEvent& a, const InteractionEvent& b) {
    const auto lo = std::max(a.start_frame, b.start_frame);
    const auto hi = std::min(a.end_frame, b.end_frame);
    const double inter = hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
    const double uni = static_cast<double>(a.length() + b.length()) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

EventScore event_prf(const InteractionTimeline& predicted, const InteractionTimeline& truth, double iou_threshold) {
    struct Candidate {
        double iou;
        std::size_t p;
        std::size_t t;
    };
    std::vector<Candidate> candidates;
    const auto& P = predicted.events;
    const auto& T = truth.events;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t k = 0; k < T.size(); ++k) {
            if (P[i].kind != T[k].kind || P[i].subject_id != T[k].subject_id || P[i].object_id != T[k].object_id) continue;
            const double iou = span_iou(P[i], T[k]);
            if (iou >= iou_threshold && iou > 0.0) candidates.push_back({iou, i, k});
        }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        return std::tie(a.p, a.t) < std::tie(b.p, b.t);
    });
    std::vector<bool> used_p(P.size(), false), used_t(T.size(), false);
    EventScore s;
    for (const auto& c : candidates) {
        if (used_p[c.p] || used_t[c.t]) continue;
        used_p[c.p] = used_t[c.t] = true;
        ++s.matched;
    }
    s.predicted = P.size();
    s.truth = T.size();
    s.precision = P.empty() ? 1.0 : static_cast<double>(s.matched) / static_cast<double>(P.size());
    s.recall = T.empty() ? 1.0 : static_cast<double>(s.matched) / static_cast<double>(T.size());
    return s;
}

DemoRecord evaluate_demo(const SynthDemo& demo, const EvalOptions& options) {
    const HandAssigner assign =
        options.selector ? selector_assigner(*options.selector, options.kappa) : prior_assigner();
    const auto result = run_pipeline(demo.demo, options.settings, assign);
    DemoRecord r;
    r.demo_id = demo.id;
    r.gra = graph_accuracy(result.graphs, demo.truth.graphs);
    r.tsa = segmentation_accuracy(result.segments, demo.truth.segments, demo.demo.frame_count());
    const auto prf = event_prf(result.timeline, demo.truth.timeline, options.iou_threshold);
    r.event_precision = prf.precision;
    r.event_recall = prf.recall;
    std::size_t agree = 0;
    for (const auto& l : demo.truth.selector_labels) {
        const auto action = options.selector ? fused_decision(*options.selector, l.state, options.kappa).action
                                             : prior_policy(l.state);
        agree += action == l.expert ? 1 : 0;
    }
    r.selector_agreement = demo.truth.selector_labels.empty()
                               ? 1.0
                               : static_cast<double>(agree) / static_cast<double>(demo.truth.selector_labels.size());
    r.plan_match = plan_matches(result.plan, demo.truth.plan);
    r.pick_before_place = pick_before_place(result.plan);
    return r;
}

void aggregate(EvalReport& report) {
    auto summarize = [&](auto field) {
        Aggregate a;
        if (report.records.empty()) return a;
        const double n = static_cast<double>(report.records.size());
        for (const auto& r : report.records) a.mean += field(r);
        a.mean /= n;
        double var = 0.0;
        for (const auto& r : report.records) var += (field(r) - a.mean) * (field(r) - a.mean);
        a.std = std::sqrt(var / n);
        return a;
    };
    report.gra = summarize([](const DemoRecord& r) { return r.gra; });
    report.tsa = summarize([](const DemoRecord& r) { return r.tsa; });
    report.event_precision = summarize([](const DemoRecord& r) { return r.event_precision; });
    report.event_recall = summarize([](const DemoRecord& r) { return r.event_recall; });
    report.selector_agreement = summarize([](const DemoRecord& r) { return r.selector_agreement; });
    report.plan_match = summarize([](const DemoRecord& r) { return r.plan_match ? 1.0 : 0.0; });
}

EvalReport evaluate_suite(const std::vector<SynthDemo>& suite, const EvalOptions& options) {
    if (suite.empty()) fail(ErrorCode::EmptyInput, "evaluation suite is empty");
    EvalReport report;
    report.records.reserve(suite.size());
    for (const auto& d : suite) report.records.push_back(evaluate_demo(d, options));
    aggregate(report);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& r : report.records)
        records.push_back({{"demo_id", r.demo_id},
                           {"gra", r.gra},
                           {"tsa", r.tsa},
                           {"event_precision", r.event_precision},
                           {"event_recall", r.event_recall},
                           {"selector_agreement", r.selector_agreement},
                           {"plan_match", r.plan_match}});
    auto agg = [](const Aggregate& a) { return nlohmann::ordered_json{{"mean", a.mean}, {"std", a.std}}; };
    nlohmann::ordered_json j;
    j["records"] = std::move(records);
    j["aggregate"] = {{"gra", agg(report.gra)},
                      {"tsa", agg(report.tsa)},
                      {"event_precision", agg(report.event_precision)},
                      {"event_recall", agg(report.event_recall)},
                      {"selector_agreement", agg(report.selector_agreement)},
                      {"plan_match", agg(report.plan_match)}};
    return j.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
    std::string out = "demo_id,gra,tsa,event_precision,event_recall,selector_agreement,plan_match\n";
    char buf[256];
    for (const auto& r : report.records) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.demo_id.c_str(), r.gra, r.tsa,
                      r.event_precision, r.event_recall, r.selector_agreement, r.plan_match ? "true" : "false");
        out += buf;
    }
    return out;
}

}  // namespace demograph
