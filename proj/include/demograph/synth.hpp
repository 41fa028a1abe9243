#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demograph/handselect.hpp"
#include "demograph/infotheory.hpp"
#include "demograph/interactions.hpp"
#include "demograph/plangen.hpp"
#include "demograph/scenegraph.hpp"
#include "demograph/segmentation.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

struct Workspace {
    Vec3 min{-0.5, 0.0, 0.0};
    Vec3 max{0.5, 0.6, 0.4};

    bool contains(const Vec3& p) const;
    friend bool operator==(const Workspace&, const Workspace&) = default;
};

enum class Interpolation { MinimumJerk, Linear };

/// One scripted pick-transport-place episode. The hand reaches from its
/// current position to the object, grasps, carries it through `waypoints`
/// (the last one is the placement), holds, releases and returns to rest.
struct ScriptedAction {
    EntityClass hand = EntityClass::HandRight;
    std::string object_id;
    std::vector<Vec3> waypoints;
    std::int64_t start_frame = 0;  // first frame of the reach
    int reach_frames = 5;
    int grasp_frames = 2;
    int transport_frames = 30;
    int hold_frames = 10;   // dwell at the placement while still attached
    int retreat_frames = 20;
    double retreat_lift = 0.10;

    std::int64_t transport_start() const { return start_frame + reach_frames + grasp_frames; }
    std::int64_t transport_end() const { return transport_start() + transport_frames - 1; }
    std::int64_t release_frame() const { return transport_end() + hold_frames + 1; }
    std::int64_t end_frame() const { return release_frame() + retreat_frames - 1; }

    friend bool operator==(const ScriptedAction&, const ScriptedAction&) = default;
};

struct SceneObject {
    std::string id;
    Vec3 position;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    double frame_rate = 30.0;
    int n_objects = 2;
    Workspace workspace;
    double noise_sigma = 0.001;  // uniform per-axis jitter half-width on attached objects
    Interpolation interpolation = Interpolation::MinimumJerk;
    bool flyby = false;          // pick-place: carry the object past a third block
    bool mirror = false;         // letter task: reflect the layout across x = 0
    bool dual = true;            // letter task: run scripted simultaneous pairs
    double block_size = 0.03;
    double contact_radius = 0.10;  // ground-truth hand-object contact extent
    double oo_radius = 0.05;       // ground-truth object-object contact extent
    std::int64_t min_frames = 0;   // pad the demonstration with rest frames up to this length
    std::vector<ScriptedAction> script;  // used by gen_scripted

    WindowConfig window;
    SegmentationConfig segmentation;
    PlanConfig plan;

    void validate() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct GroundTruth {
    InteractionTimeline timeline;
    std::vector<Segment> segments;
    SceneGraphSequence graphs;
    BehaviorTree plan;
    std::vector<LabeledState> selector_labels;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SynthDemo {
    std::string id;
    Demonstration demo;
    GroundTruth truth;
};

Vec3 rest_position(EntityClass hand, const ScenarioConfig& cfg);

/// Renders a script over static objects and derives the ground truth from the
/// scripted attachments. Source piles default to each object's start position.
SynthDemo gen_scripted(const ScenarioConfig& cfg, const std::vector<SceneObject>& objects,
                       const std::vector<ScriptedAction>& script, const std::string& id = "scripted");

/// One object slid along x by a single hand.
SynthDemo gen_canonical_move(const ScenarioConfig& cfg);
/// Pick a block, carry it and place it against a static background block.
SynthDemo gen_pick_place(const ScenarioConfig& cfg);
/// Build a letter (R, V, L or M) from two source piles. `cfg.n_objects` caps
/// the number of placed blocks (0 = whole letter).
SynthDemo gen_letter_task(const ScenarioConfig& cfg, const std::string& letter);
/// Many pick-place episodes over five blocks, at least `frames` long.
SynthDemo gen_long_session(const ScenarioConfig& cfg, std::int64_t frames);

/// Uniform states in the workspace labelled by the prior with independent flips.
std::vector<LabeledState> gen_selector_dataset(std::size_t n, double flip_rate, std::uint64_t seed,
                                               const Workspace& workspace = {});

/// The mixed evaluation suite: pick-place (some with a fly-by), canonical moves and letters.
std::vector<SynthDemo> gen_suite(std::size_t n, std::uint64_t seed, const ScenarioConfig& base = {});
/// Long sessions for throughput evaluation.
std::vector<SynthDemo> gen_long_suite(std::size_t n, std::int64_t frames, std::uint64_t seed,
                                      const ScenarioConfig& base = {});

std::string ground_truth_to_json(const GroundTruth& gt);

}  // namespace demograph
