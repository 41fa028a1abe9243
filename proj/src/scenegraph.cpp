#include "demograph/scenegraph.hpp"

#include <algorithm>
#include <tuple>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

namespace {

bool edge_less(const GraphEdge& a, const GraphEdge& b) {
    return std::tie(a.from_id, a.to_id, a.relation) < std::tie(b.from_id, b.to_id, b.relation);
}

bool edge_same(const GraphEdge& a, const GraphEdge& b) {
    return a.from_id == b.from_id && a.to_id == b.to_id && a.relation == b.relation;
}

}  // namespace

bool SceneGraph::same_topology(const SceneGraph& other) const {
    if (nodes.size() != other.nodes.size() || edges.size() != other.edges.size()) return false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id != other.nodes[i].id) return false;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!edge_same(edges[i], other.edges[i])) return false;
    return true;
}

std::vector<std::int64_t> SceneGraphSequence::topology_changes() const {
    std::vector<std::int64_t> out;
    for (const auto& k : keyframes)
        if (k.topology_change) out.push_back(k.frame);
    return out;
}

SceneGraph build_graph(const Demonstration& demo, const InteractionTimeline& timeline, std::int64_t frame) {
    if (frame < 0 || frame >= demo.frame_count())
        fail(ErrorCode::FrameOutOfBounds, "frame " + std::to_string(frame) + " outside [0, " +
                                              std::to_string(demo.frame_count()) + ")");
    SceneGraph g;
    std::vector<std::string> involved;
    for (const auto& e : timeline.events) {
        if (!e.active_at(frame)) continue;
        GraphEdge edge{e.subject_id, e.object_id, e.kind, std::nullopt};
        if (e.mi_trace && is_hand_object(e.kind)) {
            const auto& pts = e.mi_trace->points;
            auto it = std::find_if(pts.begin(), pts.end(), [&](const SeriesPoint& p) { return p.center_frame == frame; });
            if (it != pts.end()) edge.annotation = it->value;
        }
        if (std::none_of(g.edges.begin(), g.edges.end(), [&](const GraphEdge& x) { return edge_same(x, edge); }))
            g.edges.push_back(std::move(edge));
        involved.push_back(e.subject_id);
        involved.push_back(e.object_id);
    }
    std::sort(g.edges.begin(), g.edges.end(), edge_less);
    for (const auto& t : demo.tracks()) {
        if (std::find(involved.begin(), involved.end(), t.id) == involved.end()) continue;
        g.nodes.push_back({t.id, t.cls, t.poses[static_cast<std::size_t>(frame)]});
    }
    std::sort(involved.begin(), involved.end());
    involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
    if (g.nodes.size() != involved.size())
        fail(ErrorCode::UnknownEntity, "timeline references an entity missing from the demonstration");
    return g;
}

SceneGraphSequence graph_sequence(const Demonstration& demo, const InteractionTimeline& timeline,
                                  const WindowConfig& cfg) {
    cfg.validate();
    const WindowGrid grid(cfg, demo.frame_count());
    SceneGraphSequence seq;
    seq.keyframes.reserve(static_cast<std::size_t>(grid.count()));
    for (std::int64_t j = 0; j < grid.count(); ++j) {
        Keyframe k;
        k.frame = grid.center(j);
        k.graph = build_graph(demo, timeline, k.frame);
        k.topology_change = seq.keyframes.empty() ? !k.graph.empty()
                                                  : !k.graph.same_topology(seq.keyframes.back().graph);
        seq.keyframes.push_back(std::move(k));
    }
    return seq;
}

double graph_accuracy(const SceneGraphSequence& predicted, const SceneGraphSequence& truth) {
    const auto& p = predicted.keyframes;
    const auto& t = truth.keyframes;
    if (p.size() != t.size()) fail(ErrorCode::GridMismatch, "keyframe counts differ");
    if (p.empty()) return 1.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].frame != t[i].frame) fail(ErrorCode::GridMismatch, "keyframe " + std::to_string(i) + " differs in frame");
        if (p[i].graph.same_topology(t[i].graph)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(p.size());
}

std::string graph_sequence_to_json(const SceneGraphSequence& seq) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& k : seq.keyframes) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& n : k.graph.nodes) {
            const auto& p = n.pose;
            nodes.push_back({{"id", n.id},
                             {"label", to_string(n.label)},
                             {"pose", {p.position.x, p.position.y, p.position.z, p.orientation.x, p.orientation.y,
                                       p.orientation.z}}});
        }
        nlohmann::ordered_json edges = nlohmann::ordered_json::array();
        for (const auto& e : k.graph.edges) {
            nlohmann::ordered_json j = {{"from", e.from_id}, {"to", e.to_id}, {"relation", to_string(e.relation)}};
            if (e.annotation) j["annotation"] = *e.annotation;
            edges.push_back(std::move(j));
        }
        out.push_back({{"frame", k.frame}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)},
                       {"topology_change", k.topology_change}});
    }
    return out.dump(2) + "\n";
}

}  // namespace demograph
