#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demograph/infotheory.hpp"
#include "demograph/interactions.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

struct GraphNode {
    std::string id;
    EntityClass label = EntityClass::Object;
    Pose6D pose;

    friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

/// Directed typed edge. HO edges start at a hand and carry the MI of the
/// window at the keyframe when the detector recorded it.
struct GraphEdge {
    std::string from_id;
    std::string to_id;
    InteractionKind relation = InteractionKind::CoupledMotion;
    std::optional<double> annotation;

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct SceneGraph {
    std::vector<GraphNode> nodes;  // demonstration track order
    std::vector<GraphEdge> edges;  // sorted by (from, to, relation)

    bool empty() const { return nodes.empty(); }
    /// Node ids and typed edges match; poses and annotations are ignored.
    bool same_topology(const SceneGraph& other) const;

    friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

struct Keyframe {
    std::int64_t frame = 0;
    SceneGraph graph;
    bool topology_change = false;

    friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

struct SceneGraphSequence {
    std::vector<Keyframe> keyframes;

    std::vector<std::int64_t> topology_changes() const;
    friend bool operator==(const SceneGraphSequence&, const SceneGraphSequence&) = default;
};

/// Graph of the events active at one frame. Throws FrameOutOfBounds.
SceneGraph build_graph(const Demonstration& demo, const InteractionTimeline& timeline, std::int64_t frame);

/// One keyframe per window center. The first keyframe is flagged when it is non-empty.
SceneGraphSequence graph_sequence(const Demonstration& demo, const InteractionTimeline& timeline,
                                  const WindowConfig& cfg);

/// Fraction of keyframes whose topologies match exactly. Throws GridMismatch.
double graph_accuracy(const SceneGraphSequence& predicted, const SceneGraphSequence& truth);

std::string graph_sequence_to_json(const SceneGraphSequence& seq);

}  // namespace demograph
