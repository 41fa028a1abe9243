#include <doctest.h>

#include <json.hpp>

#include "demograph/plangen.hpp"
#include "demograph/synth.hpp"
#include "fixtures.hpp"

using namespace demograph;
using fixtures::code_of;
using fixtures::still;

namespace {

const Demonstration& table() {
    static const Demonstration d({still("hand_left", EntityClass::HandLeft, 40, {-0.3, 0.2, 0.1}),
                                  still("hand_right", EntityClass::HandRight, 40, {0.3, 0.2, 0.1}),
                                  still("o1", EntityClass::Object, 40, {-0.2, 0.3, 0.0}),
                                  still("o2", EntityClass::Object, 40, {0.2, 0.3, 0.0})},
                                 30.0);
    return d;
}

Segment seg(Primitive p, const char* hand, std::optional<std::string> obj, std::int64_t a, std::int64_t b,
            std::optional<std::string> target = std::nullopt) {
    return {p, hand, std::move(obj), std::move(target), a, b};
}

std::vector<Segment> episode(const char* hand, const char* obj, const char* target) {
    return {seg(Primitive::Idle, hand, std::nullopt, 0, 4),   seg(Primitive::Reach, hand, obj, 5, 9),
            seg(Primitive::Transport, hand, obj, 10, 19),     seg(Primitive::Place, hand, obj, 20, 24, target),
            seg(Primitive::Retreat, hand, obj, 25, 29),       seg(Primitive::Idle, hand, std::nullopt, 30, 39)};
}

std::vector<PlanAction> actions(const BehaviorTree& bt) {
    std::vector<PlanAction> out;
    for (const auto& n : bt.nodes) out.push_back(n.action);
    return out;
}

}  // namespace

TEST_SUITE("plangen") {

TEST_CASE("single-hand pick and place") {
    const auto bt = emit_plan(episode("hand_left", "o1", "o2"), table(), prior_assigner());
    REQUIRE(actions(bt) == std::vector{PlanAction::PickObj, PlanAction::PlaceObj});
    const auto s = selector_state({-0.3, 0.2, 0.1}, {0.3, 0.2, 0.1}, {-0.2, 0.3, 0.0}, {-0.2, 0.3, 0.0});
    const PlanHand expected = prior_policy(s) == HandAction::UseLeftHand ? PlanHand::Left : PlanHand::Right;
    CHECK(bt.nodes[0].hand == expected);
    CHECK(bt.nodes[1].hand == expected);
    CHECK(bt.nodes[0].object_id == "o1");
    CHECK(bt.nodes[0].verification.expected_gripper == Gripper::Closed);
    CHECK(bt.nodes[1].verification.expected_gripper == Gripper::Open);
    CHECK(bt.nodes[1].reference_id == "o2");
    REQUIRE(bt.nodes[1].target_pose);
    CHECK(bt.nodes[1].target_pose->position == Vec3{-0.2, 0.3, 0.0});
    CHECK(pick_before_place(bt));
}

TEST_CASE("long retreats become MoveArm") {
    auto segs = episode("hand_left", "o1", "o2");
    PlanConfig cfg;
    cfg.move_arm_min_frames = 3;
    CHECK(actions(emit_plan(segs, table(), prior_assigner(), cfg)) ==
          std::vector{PlanAction::PickObj, PlanAction::PlaceObj, PlanAction::MoveArm});
    cfg.emit_move_arm = false;
    CHECK(actions(emit_plan(segs, table(), prior_assigner(), cfg)).size() == 2);
}

TEST_CASE("simultaneous picks merge into dual actions") {
    auto segs = episode("hand_right", "o2", "o1");
    for (const auto& s : episode("hand_left", "o1", "o2")) segs.push_back(s);
    const auto bt = emit_plan(segs, table(), prior_assigner());
    REQUIRE(actions(bt) == std::vector{PlanAction::PickObjDual, PlanAction::PlaceObjDual});
    for (const auto& n : bt.nodes) {
        CHECK(n.hand == PlanHand::Both);
        CHECK(n.object_id == "o1");
        REQUIRE(n.secondary);
        CHECK(n.secondary->object_id == "o2");
    }
    CHECK(pick_before_place(bt));
}

TEST_CASE("empty input gives an empty tree") {
    const auto bt = emit_plan({}, table(), prior_assigner());
    CHECK(bt.nodes.empty());
    const auto j = nlohmann::json::parse(serialize_plan(bt));
    CHECK(j["nodes"].is_array());
    CHECK(j["nodes"].empty());
}

TEST_CASE("place without a pick is rejected") {
    const std::vector<Segment> segs{seg(Primitive::Transport, "hand_left", "o2", 0, 5),
                                    seg(Primitive::Place, "hand_left", "o1", 6, 9, "o2")};
    CHECK(code_of([&] { emit_plan(segs, table(), prior_assigner()); }) == ErrorCode::InconsistentSegments);
    BehaviorTree bt;
    bt.nodes.push_back({PlanAction::PlaceObj, PlanHand::Left, "o1", std::nullopt, std::nullopt, std::nullopt, "", {}});
    CHECK_FALSE(pick_before_place(bt));
}

TEST_CASE("serialization round trip") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioConfig cfg;
        cfg.seed = seed;
        const auto bt = gen_letter_task(cfg, "M").truth.plan;
        const auto text = serialize_plan(bt);
        CHECK(parse_plan(text) == bt);
        CHECK(serialize_plan(parse_plan(text)) == text);
        for (const auto& n : nlohmann::json::parse(text)["nodes"]) {
            CHECK(n.contains("action"));
            CHECK(n.contains("hand"));
            CHECK(n.contains("object"));
            CHECK(n.contains("rationale"));
            CHECK(n["verification"].contains("expected_gripper"));
            CHECK(n["verification"].contains("pose_tolerance"));
        }
    }
}

TEST_CASE("parsing is strict") {
    const auto ok = serialize_plan(emit_plan(episode("hand_left", "o1", "o2"), table(), prior_assigner()));
    auto j = nlohmann::json::parse(ok);
    j["nodes"][0]["extra"] = 1;
    CHECK(code_of([&] { parse_plan(j.dump()); }) == ErrorCode::SchemaViolation);
    j = nlohmann::json::parse(ok);
    j["nodes"][0]["action"] = "Juggle";
    CHECK(code_of([&] { parse_plan(j.dump()); }) == ErrorCode::SchemaViolation);
    j = nlohmann::json::parse(ok);
    j["nodes"][1].erase("verification");
    CHECK(code_of([&] { parse_plan(j.dump()); }) == ErrorCode::SchemaViolation);
    CHECK(code_of([] { parse_plan("[1, 2"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("plan matching ignores rationale and poses") {
    auto a = emit_plan(episode("hand_left", "o1", "o2"), table(), prior_assigner());
    auto b = a;
    b.nodes[0].rationale = "something else";
    b.nodes[1].target_pose.reset();
    CHECK(plan_matches(a, b));
    b.nodes[0].object_id = "o2";
    CHECK_FALSE(plan_matches(a, b));
    b = a;
    b.nodes.pop_back();
    CHECK_FALSE(plan_matches(a, b));
}

}
