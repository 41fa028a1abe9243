#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "demograph/handselect.hpp"
#include "demograph/segmentation.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

enum class PlanAction { PickObj, PlaceObj, PickObjDual, PlaceObjDual, MoveArm };
enum class PlanHand { Left, Right, Both };
enum class Gripper { Open, Closed };

const char* to_string(PlanAction a);
const char* to_string(PlanHand h);
const char* to_string(Gripper g);

struct Verification {
    Gripper expected_gripper = Gripper::Closed;
    double pose_tolerance = 0.02;

    friend bool operator==(const Verification&, const Verification&) = default;
};

/// Second object of a dual action.
struct DualPart {
    std::string object_id;
    std::optional<Pose6D> target_pose;
    std::optional<std::string> reference_id;

    friend bool operator==(const DualPart&, const DualPart&) = default;
};

struct PlanNode {
    PlanAction action = PlanAction::PickObj;
    PlanHand hand = PlanHand::Left;
    std::string object_id;
    std::optional<Pose6D> target_pose;
    std::optional<std::string> reference_id;
    std::optional<DualPart> secondary;
    std::string rationale;
    Verification verification;

    friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

struct BehaviorTree {
    std::string task_name;
    std::vector<PlanNode> nodes;

    friend bool operator==(const BehaviorTree&, const BehaviorTree&) = default;
};

struct PlanConfig {
    std::string task_name = "demonstration";
    bool emit_move_arm = true;
    int move_arm_min_frames = 8;   // MoveArm for Retreat segments longer than this
    double pose_tolerance = 0.02;

    void validate() const;
    friend bool operator==(const PlanConfig&, const PlanConfig&) = default;
};

/// Chooses the hand for a pick given the selector state at its onset, the
/// hand chosen for the previous pick and whether an E-OO-Docked hold is active.
using HandAssigner = std::function<HandAction(const SelectorState&, std::optional<HandAction>, bool)>;

HandAssigner prior_assigner();
HandAssigner selector_assigner(SelectorModel model, double kappa);

/// Throws InconsistentSegments when a place has no earlier pick of its object.
BehaviorTree emit_plan(const std::vector<Segment>& segments, const Demonstration& demo, const HandAssigner& assign,
                       const PlanConfig& cfg = {});

/// Every PlaceObj* is preceded by a PickObj* of the same object.
bool pick_before_place(const BehaviorTree& bt);

/// Same action, hand and object sequence. Rationale and poses are ignored.
bool plan_matches(const BehaviorTree& predicted, const BehaviorTree& truth);

std::string serialize_plan(const BehaviorTree& bt);
BehaviorTree parse_plan(const std::string& text);

}  // namespace demograph
