#include "demograph/segmentation.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

namespace {

constexpr const char* kNames[] = {"Idle", "Reach", "Transport", "Place", "Hold", "Retreat"};

bool interacting(Primitive p) {
    return p == Primitive::Transport || p == Primitive::Place || p == Primitive::Hold;
}

std::map<std::string, std::vector<const Segment*>> by_hand(const std::vector<Segment>& segments) {
    std::map<std::string, std::vector<const Segment*>> out;
    for (const auto& s : segments) out[s.hand_id].push_back(&s);
    for (auto& [hand, list] : out)
        std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) { return a->start_frame < b->start_frame; });
    return out;
}

std::vector<Primitive> expand(const std::vector<const Segment*>& list, std::int64_t frame_count) {
    std::vector<Primitive> out(static_cast<std::size_t>(frame_count), Primitive::Idle);
    for (const auto* s : list)
        for (auto f = s->start_frame; f <= s->end_frame; ++f) out[static_cast<std::size_t>(f)] = s->primitive;
    return out;
}

}  // namespace

const char* to_string(Primitive p) { return kNames[static_cast<int>(p)]; }

std::optional<Primitive> parse_primitive(const std::string& text) {
    for (int i = 0; i < 6; ++i)
        if (text == kNames[i]) return static_cast<Primitive>(i);
    return std::nullopt;
}

void SegmentationConfig::validate() const {
    if (reach_lead < 0 || retreat_lag < 0)
        fail(ErrorCode::InvalidConfig, "segmentation.reach_lead and segmentation.retreat_lag must be >= 0");
}

std::vector<FrameLabel> label_frames(const InteractionTimeline& timeline, const std::string& hand_id,
                                     std::int64_t frame_count, const SegmentationConfig& cfg) {
    const auto n = static_cast<std::size_t>(frame_count);
    std::vector<FrameLabel> labels(n);
    auto clamp = [&](std::int64_t f) { return std::clamp<std::int64_t>(f, 0, frame_count - 1); };

    for (const auto& e : timeline.events) {
        if (!is_hand_object(e.kind) || e.subject_id != hand_id) continue;
        for (auto f = clamp(e.start_frame); f <= clamp(e.end_frame); ++f) {
            auto& l = labels[static_cast<std::size_t>(f)];
            l.object_id = e.object_id;
            l.target_id.reset();
            if (e.kind == InteractionKind::Docked) {
                l.primitive = Primitive::Hold;
                continue;
            }
            l.primitive = Primitive::Transport;
            for (const auto& o : timeline.events) {
                if (o.kind == InteractionKind::EOO && o.subject_id == e.object_id && o.active_at(f)) {
                    l.primitive = Primitive::Place;
                    l.target_id = o.object_id;
                    break;
                }
            }
        }
    }

    // Retreat after each interaction run, then Reach before each coupling onset.
    // Reach is written last so it wins inside short gaps.
    std::vector<FrameLabel> out = labels;
    for (std::size_t f = 0; f < n; ++f) {
        const bool ends = interacting(labels[f].primitive) && (f + 1 == n || !interacting(labels[f + 1].primitive));
        if (!ends) continue;
        for (std::size_t k = f + 1; k < n && k <= f + static_cast<std::size_t>(cfg.retreat_lag); ++k) {
            if (interacting(labels[k].primitive)) break;
            out[k] = {Primitive::Retreat, labels[f].object_id, std::nullopt};
        }
    }
    for (std::size_t f = 0; f < n; ++f) {
        const auto p = labels[f].primitive;
        const bool onset = (p == Primitive::Transport || p == Primitive::Place) && (f == 0 || !interacting(labels[f - 1].primitive));
        if (!onset) continue;
        for (std::size_t k = f; k-- > 0 && f - k <= static_cast<std::size_t>(cfg.reach_lead);) {
            if (interacting(labels[k].primitive)) break;
            out[k] = {Primitive::Reach, labels[f].object_id, std::nullopt};
        }
    }
    return out;
}

std::vector<Segment> segment(const InteractionTimeline& timeline, const Demonstration& demo,
                             const SegmentationConfig& cfg) {
    cfg.validate();
    std::vector<Segment> out;
    const auto n = demo.frame_count();
    for (const auto* hand : demo.hands()) {
        const auto labels = label_frames(timeline, hand->id, n, cfg);
        std::int64_t start = 0;
        for (std::int64_t f = 1; f <= n; ++f) {
            if (f < n && labels[static_cast<std::size_t>(f)] == labels[static_cast<std::size_t>(start)]) continue;
            const auto& l = labels[static_cast<std::size_t>(start)];
            out.push_back({l.primitive, hand->id, l.object_id, l.target_id, start, f - 1});
            start = f;
        }
    }
    return out;
}

void check_coverage(const std::vector<Segment>& segments, std::int64_t frame_count) {
    for (const auto& [hand, list] : by_hand(segments)) {
        std::int64_t next = 0;
        for (const auto* s : list) {
            if (s->start_frame != next || s->end_frame < s->start_frame)
                fail(ErrorCode::CoverageGap, "segments of '" + hand + "' do not tile frame " + std::to_string(next));
            next = s->end_frame + 1;
        }
        if (next != frame_count)
            fail(ErrorCode::CoverageGap, "segments of '" + hand + "' end at frame " + std::to_string(next) +
                                             " instead of " + std::to_string(frame_count));
    }
}

double segmentation_accuracy(const std::vector<Segment>& predicted, const std::vector<Segment>& truth,
                             std::int64_t frame_count) {
    check_coverage(predicted, frame_count);
    check_coverage(truth, frame_count);
    const auto pred = by_hand(predicted);
    const auto gt = by_hand(truth);
    if (gt.empty() || frame_count <= 0) return 1.0;
    double sum = 0.0;
    for (const auto& [hand, list] : gt) {
        auto it = pred.find(hand);
        if (it == pred.end()) fail(ErrorCode::CoverageGap, "no predicted segments for '" + hand + "'");
        const auto a = expand(it->second, frame_count);
        const auto b = expand(list, frame_count);
        std::int64_t agree = 0;
        for (std::size_t f = 0; f < a.size(); ++f) agree += a[f] == b[f] ? 1 : 0;
        sum += static_cast<double>(agree) / static_cast<double>(frame_count);
    }
    return sum / static_cast<double>(gt.size());
}

std::string segments_to_json(const std::vector<Segment>& segments) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& s : segments) {
        nlohmann::ordered_json j = {{"primitive", to_string(s.primitive)}, {"hand", s.hand_id}};
        if (s.object_id) j["object"] = *s.object_id;
        if (s.target_id) j["target"] = *s.target_id;
        j["start_frame"] = s.start_frame;
        j["end_frame"] = s.end_frame;
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

}  // namespace demograph
