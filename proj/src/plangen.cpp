#include "demograph/plangen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

namespace {

struct Item {
    enum Kind { Pick, Place, Move } kind = Pick;
    std::string hand_id;
    std::string object_id;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::optional<std::string> reference;
    bool merged = false;
};

bool coupling(Primitive p) { return p == Primitive::Transport || p == Primitive::Place; }
bool interacting(Primitive p) { return coupling(p) || p == Primitive::Hold; }

PlanHand plan_hand(HandAction a) { return a == HandAction::UseLeftHand ? PlanHand::Left : PlanHand::Right; }

std::optional<PlanHand> hand_of(const Demonstration& demo, const std::string& hand_id) {
    const auto& t = demo.at(hand_id);
    if (t.cls == EntityClass::HandLeft) return PlanHand::Left;
    if (t.cls == EntityClass::HandRight) return PlanHand::Right;
    return std::nullopt;
}

Pose6D pose_at(const Demonstration& demo, const std::string& id, std::int64_t frame) {
    const auto& t = demo.at(id);
    frame = std::clamp<std::int64_t>(frame, 0, demo.frame_count() - 1);
    return t.poses[static_cast<std::size_t>(frame)];
}

std::vector<Item> collect(const std::vector<Segment>& segments, const Demonstration& demo, const PlanConfig& cfg) {
    std::map<std::string, std::vector<const Segment*>> by_hand;
    for (const auto& s : segments) by_hand[s.hand_id].push_back(&s);

    std::vector<Item> items;
    for (auto& [hand, list] : by_hand) {
        demo.at(hand);
        std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) { return a->start_frame < b->start_frame; });
        std::optional<Item> place;  // pending place within the current interaction run
        auto flush = [&] {
            if (place) items.push_back(*place);
            place.reset();
        };
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Segment& s = *list[i];
            const Segment* prev = i > 0 ? list[i - 1] : nullptr;
            if (!interacting(s.primitive)) flush();
            if (coupling(s.primitive) && s.object_id && (prev == nullptr || !interacting(prev->primitive))) {
                const bool reached = prev != nullptr && prev->primitive == Primitive::Reach && prev->object_id == s.object_id;
                items.push_back({Item::Pick, hand, *s.object_id, reached ? prev->start_frame : s.start_frame,
                                 s.end_frame, std::nullopt, false});
            }
            if (s.primitive == Primitive::Place && s.object_id) {
                if (place && place->object_id != *s.object_id) flush();
                if (!place) place = Item{Item::Place, hand, *s.object_id, s.start_frame, s.end_frame, s.target_id, false};
                place->end = s.end_frame;
                place->reference = s.target_id;
            }
            if (cfg.emit_move_arm && s.primitive == Primitive::Retreat && s.length() > cfg.move_arm_min_frames)
                items.push_back({Item::Move, hand, s.object_id.value_or(""), s.start_frame, s.end_frame, std::nullopt, false});
        }
        flush();
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.kind < b.kind;
    });
    return items;
}

std::string pick_rationale(const std::string& obj, PlanHand hand) {
    return "pick " + obj + " with the " + to_string(hand) + " hand";
}

std::string place_rationale(const std::string& obj, const std::optional<std::string>& ref) {
    return ref ? "place " + obj + " against " + *ref + " to extend structure" : "place " + obj + " at the target pose";
}

}  // namespace

const char* to_string(PlanAction a) {
    switch (a) {
        case PlanAction::PickObj: return "PickObj";
        case PlanAction::PlaceObj: return "PlaceObj";
        case PlanAction::PickObjDual: return "PickObjDual";
        case PlanAction::PlaceObjDual: return "PlaceObjDual";
        case PlanAction::MoveArm: return "MoveArm";
    }
    return "PickObj";
}

const char* to_string(PlanHand h) {
    switch (h) {
        case PlanHand::Left: return "left";
        case PlanHand::Right: return "right";
        case PlanHand::Both: return "both";
    }
    return "left";
}

const char* to_string(Gripper g) { return g == Gripper::Open ? "open" : "closed"; }

void PlanConfig::validate() const {
    if (move_arm_min_frames < 0) fail(ErrorCode::InvalidConfig, "plan.move_arm_min_frames must be >= 0");
    if (!(pose_tolerance > 0.0) || !std::isfinite(pose_tolerance))
        fail(ErrorCode::InvalidConfig, "plan.pose_tolerance must be > 0");
}

HandAssigner prior_assigner() {
    return [](const SelectorState& s, std::optional<HandAction> current, bool eoo_docked) {
        if (eoo_docked && current) return *current;
        return prior_policy(s);
    };
}

HandAssigner selector_assigner(SelectorModel model, double kappa) {
    model.validate();
    return [model = std::move(model), kappa](const SelectorState& s, std::optional<HandAction> current, bool eoo_docked) {
        return decide_with_persistence(current, eoo_docked, model, s, kappa);
    };
}

BehaviorTree emit_plan(const std::vector<Segment>& segments, const Demonstration& demo, const HandAssigner& assign,
                       const PlanConfig& cfg) {
    cfg.validate();
    auto items = collect(segments, demo, cfg);

    // Overlapping picks (resp. places) of two different hands become one dual action, keyed by the smaller object id.
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> groups;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].merged) continue;
        std::optional<std::size_t> partner;
        if (items[i].kind != Item::Move) {
            for (std::size_t k = i + 1; k < items.size() && items[k].start <= items[i].end; ++k) {
                if (items[k].merged || items[k].kind != items[i].kind || items[k].hand_id == items[i].hand_id) continue;
                partner = k;
                items[k].merged = true;
                break;
            }
        }
        if (partner && items[*partner].object_id < items[i].object_id)
            groups.emplace_back(*partner, i);
        else
            groups.emplace_back(i, partner);
    }

    const auto* left = demo.hand(EntityClass::HandLeft);
    const auto* right = demo.hand(EntityClass::HandRight);
    std::optional<HandAction> current;
    std::map<std::string, PlanHand> pick_hand;

    BehaviorTree bt;
    bt.task_name = cfg.task_name;
    for (const auto& [i, partner] : groups) {
        const Item& it = items[i];
        PlanNode node;
        node.object_id = it.object_id;
        node.verification.pose_tolerance = cfg.pose_tolerance;
        if (it.kind == Item::Pick) {
            node.verification.expected_gripper = Gripper::Closed;
            if (partner) {
                node.action = PlanAction::PickObjDual;
                node.hand = PlanHand::Both;
                node.secondary = DualPart{items[*partner].object_id, std::nullopt, std::nullopt};
                node.rationale = "pick " + it.object_id + " and " + items[*partner].object_id + " with both hands";
                pick_hand[it.object_id] = PlanHand::Both;
                pick_hand[items[*partner].object_id] = PlanHand::Both;
            } else {
                node.action = PlanAction::PickObj;
                if (left != nullptr && right != nullptr) {
                    // Target of the pick: where its place leaves the object, else where the coupling ends.
                    std::int64_t target_frame = it.end;
                    for (const auto& p : items)
                        if (p.kind == Item::Place && p.object_id == it.object_id && p.start >= it.start) {
                            target_frame = p.end;
                            break;
                        }
                    const auto f = static_cast<std::size_t>(it.start);
                    const auto state = selector_state(left->poses[f].position, right->poses[f].position,
                                                      pose_at(demo, it.object_id, it.start).position,
                                                      pose_at(demo, it.object_id, target_frame).position);
                    bool docked = false;
                    for (const auto& s : segments)
                        if (s.primitive == Primitive::Hold && s.start_frame <= it.start && it.start <= s.end_frame)
                            docked = true;
                    const auto action = assign(state, current, docked);
                    current = action;
                    node.hand = plan_hand(action);
                } else {
                    node.hand = hand_of(demo, it.hand_id).value_or(PlanHand::Left);
                }
                node.rationale = pick_rationale(it.object_id, node.hand);
                pick_hand[it.object_id] = node.hand;
            }
        } else if (it.kind == Item::Place) {
            node.verification.expected_gripper = Gripper::Open;
            node.target_pose = pose_at(demo, it.object_id, it.end);
            node.reference_id = it.reference;
            auto require_pick = [&](const std::string& obj) {
                if (!pick_hand.contains(obj))
                    fail(ErrorCode::InconsistentSegments, "place of '" + obj + "' has no earlier pick");
            };
            require_pick(it.object_id);
            if (partner) {
                const Item& other = items[*partner];
                require_pick(other.object_id);
                node.action = PlanAction::PlaceObjDual;
                node.hand = PlanHand::Both;
                node.secondary = DualPart{other.object_id, pose_at(demo, other.object_id, other.end), other.reference};
                node.rationale = "place " + it.object_id + " and " + other.object_id + " with both hands";
            } else {
                node.action = PlanAction::PlaceObj;
                node.hand = pick_hand[it.object_id];
                if (node.hand == PlanHand::Both) node.hand = hand_of(demo, it.hand_id).value_or(PlanHand::Left);
                node.rationale = place_rationale(it.object_id, it.reference);
            }
        } else {
            node.action = PlanAction::MoveArm;
            node.hand = hand_of(demo, it.hand_id).value_or(PlanHand::Left);
            node.verification.expected_gripper = Gripper::Open;
            node.rationale = "move the " + std::string(to_string(node.hand)) + " arm clear" +
                             (it.object_id.empty() ? std::string() : " of " + it.object_id);
        }
        bt.nodes.push_back(std::move(node));
    }
    return bt;
}

bool pick_before_place(const BehaviorTree& bt) {
    std::vector<std::string> picked;
    auto has = [&](const std::string& o) { return std::find(picked.begin(), picked.end(), o) != picked.end(); };
    for (const auto& n : bt.nodes) {
        if (n.action == PlanAction::PickObj || n.action == PlanAction::PickObjDual) {
            picked.push_back(n.object_id);
            if (n.secondary) picked.push_back(n.secondary->object_id);
        } else if (n.action == PlanAction::PlaceObj || n.action == PlanAction::PlaceObjDual) {
            if (!has(n.object_id) || (n.secondary && !has(n.secondary->object_id))) return false;
        }
    }
    return true;
}

bool plan_matches(const BehaviorTree& predicted, const BehaviorTree& truth) {
    if (predicted.nodes.size() != truth.nodes.size()) return false;
    for (std::size_t i = 0; i < truth.nodes.size(); ++i) {
        const auto& a = predicted.nodes[i];
        const auto& b = truth.nodes[i];
        if (a.action != b.action || a.hand != b.hand || a.object_id != b.object_id) return false;
        if (a.secondary.has_value() != b.secondary.has_value()) return false;
        if (a.secondary && a.secondary->object_id != b.secondary->object_id) return false;
    }
    return true;
}

namespace {

nlohmann::ordered_json pose_json(const Pose6D& p) {
    return {p.position.x, p.position.y, p.position.z, p.orientation.x, p.orientation.y, p.orientation.z};
}

Pose6D pose_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 6) fail(ErrorCode::SchemaViolation, "pose must be an array of 6 numbers");
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
        if (!j[i].is_number()) fail(ErrorCode::SchemaViolation, "pose must be an array of 6 numbers");
        v[i] = j[i].get<double>();
    }
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

template <typename E, std::size_t N>
E parse_enum(const nlohmann::json& j, const char* field, const E (&values)[N]) {
    if (j.is_string())
        for (E v : values)
            if (j.get<std::string>() == to_string(v)) return v;
    fail(ErrorCode::SchemaViolation, std::string("plan field '") + field + "' has an unknown value");
}

void only_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) fail(ErrorCode::SchemaViolation, std::string(what) + " must be an object");
    for (const auto& [k, v] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            fail(ErrorCode::SchemaViolation, std::string(what) + " has unknown key '" + k + "'");
}

std::string string_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        fail(ErrorCode::SchemaViolation, std::string("plan field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

}  // namespace

std::string serialize_plan(const BehaviorTree& bt) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : bt.nodes) {
        nlohmann::ordered_json j;
        j["action"] = to_string(n.action);
        j["hand"] = to_string(n.hand);
        j["object"] = n.object_id;
        if (n.target_pose) j["target_pose"] = pose_json(*n.target_pose);
        if (n.reference_id) j["reference"] = *n.reference_id;
        if (n.secondary) {
            nlohmann::ordered_json s;
            s["object"] = n.secondary->object_id;
            if (n.secondary->target_pose) s["target_pose"] = pose_json(*n.secondary->target_pose);
            if (n.secondary->reference_id) s["reference"] = *n.secondary->reference_id;
            j["secondary"] = std::move(s);
        }
        j["rationale"] = n.rationale;
        j["verification"] = {{"expected_gripper", to_string(n.verification.expected_gripper)},
                             {"pose_tolerance", n.verification.pose_tolerance}};
        nodes.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["task_name"] = bt.task_name;
    out["nodes"] = std::move(nodes);
    return out.dump(2) + "\n";
}

BehaviorTree parse_plan(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, std::string("plan is not valid JSON: ") + e.what());
    }
    only_keys(j, {"task_name", "nodes"}, "plan");
    BehaviorTree bt;
    bt.task_name = string_field(j, "task_name");
    if (!j.contains("nodes") || !j["nodes"].is_array()) fail(ErrorCode::SchemaViolation, "plan field 'nodes' must be an array");
    static constexpr PlanAction kActions[] = {PlanAction::PickObj, PlanAction::PlaceObj, PlanAction::PickObjDual,
                                              PlanAction::PlaceObjDual, PlanAction::MoveArm};
    static constexpr PlanHand kHands[] = {PlanHand::Left, PlanHand::Right, PlanHand::Both};
    static constexpr Gripper kGrippers[] = {Gripper::Open, Gripper::Closed};
    for (const auto& jn : j["nodes"]) {
        only_keys(jn, {"action", "hand", "object", "target_pose", "reference", "secondary", "rationale", "verification"},
                  "plan node");
        PlanNode n;
        n.action = parse_enum(jn.value("action", nlohmann::json()), "action", kActions);
        n.hand = parse_enum(jn.value("hand", nlohmann::json()), "hand", kHands);
        n.object_id = string_field(jn, "object");
        if (jn.contains("target_pose")) n.target_pose = pose_from(jn["target_pose"]);
        if (jn.contains("reference")) n.reference_id = string_field(jn, "reference");
        if (jn.contains("secondary")) {
            const auto& js = jn["secondary"];
            only_keys(js, {"object", "target_pose", "reference"}, "plan node secondary");
            DualPart d;
            d.object_id = string_field(js, "object");
            if (js.contains("target_pose")) d.target_pose = pose_from(js["target_pose"]);
            if (js.contains("reference")) d.reference_id = string_field(js, "reference");
            n.secondary = std::move(d);
        }
        n.rationale = string_field(jn, "rationale");
        if (!jn.contains("verification")) fail(ErrorCode::SchemaViolation, "plan node lacks 'verification'");
        const auto& jv = jn["verification"];
        only_keys(jv, {"expected_gripper", "pose_tolerance"}, "verification");
        n.verification.expected_gripper = parse_enum(jv.value("expected_gripper", nlohmann::json()), "expected_gripper", kGrippers);
        if (!jv.contains("pose_tolerance") || !jv["pose_tolerance"].is_number())
            fail(ErrorCode::SchemaViolation, "plan field 'pose_tolerance' must be a number");
        n.verification.pose_tolerance = jv["pose_tolerance"].get<double>();
        bt.nodes.push_back(std::move(n));
    }
    return bt;
}

}  // namespace demograph
