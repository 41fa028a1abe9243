#include <doctest.h>

#include <json.hpp>

#include "demograph/segmentation.hpp"
#include "demograph/synth.hpp"
#include "fixtures.hpp"

using namespace demograph;
using fixtures::code_of;
using fixtures::still;

namespace {

Segment seg(Primitive p, const char* hand, std::int64_t a, std::int64_t b) {
    return {p, hand, std::nullopt, std::nullopt, a, b};
}

InteractionEvent ev(InteractionKind k, const char* s, const char* o, std::int64_t a, std::int64_t b) {
    return {k, s, o, a, b, std::nullopt};
}

std::vector<Primitive> primitives_of(const std::vector<Segment>& segs, const std::string& hand) {
    std::vector<Primitive> out;
    for (const auto& s : segs)
        if (s.hand_id == hand) out.push_back(s.primitive);
    return out;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("empty timeline gives one Idle segment per hand") {
    const Demonstration d({still("hand_left", EntityClass::HandLeft, 50, {}), still("hand_right", EntityClass::HandRight, 50, {}),
                           still("o1", EntityClass::Object, 50, {1, 1, 0})},
                          30.0);
    InteractionTimeline t;
    t.frame_count = 50;
    const auto segs = segment(t, d);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0] == seg(Primitive::Idle, "hand_left", 0, 49));
    CHECK(segs[1] == seg(Primitive::Idle, "hand_right", 0, 49));
}

TEST_CASE("frame labels around one pick-place episode") {
    InteractionTimeline t;
    t.frame_count = 100;
    t.events = {ev(InteractionKind::CoupledMotion, "h", "o1", 20, 50), ev(InteractionKind::EOO, "o1", "o2", 40, 60),
                ev(InteractionKind::Docked, "h", "o1", 51, 60)};
    SegmentationConfig cfg;
    cfg.reach_lead = 5;
    cfg.retreat_lag = 4;
    const auto labels = label_frames(t, "h", 100, cfg);
    CHECK(labels[14].primitive == Primitive::Idle);
    CHECK(labels[15].primitive == Primitive::Reach);
    CHECK(labels[15].object_id == "o1");
    CHECK(labels[20].primitive == Primitive::Transport);
    CHECK(labels[40].primitive == Primitive::Place);
    CHECK(labels[40].target_id == "o2");
    CHECK(labels[51].primitive == Primitive::Hold);
    CHECK(labels[61].primitive == Primitive::Retreat);
    CHECK(labels[64].primitive == Primitive::Retreat);
    CHECK(labels[65].primitive == Primitive::Idle);
}

TEST_CASE("pick-move-place segments in order") {
    ScenarioConfig cfg;
    cfg.seed = 14;
    const auto d = gen_pick_place(cfg);
    const auto t = interaction_timeline(d.demo, cfg.window, {});
    const auto segs = segment(t, d.demo, cfg.segmentation);
    check_coverage(segs, d.demo.frame_count());
    std::string actor;
    for (const auto& s : segs)
        if (s.primitive == Primitive::Transport) actor = s.hand_id;
    REQUIRE(!actor.empty());
    std::vector<Primitive> active;
    for (auto p : primitives_of(segs, actor))
        if (p != Primitive::Idle && p != Primitive::Hold) active.push_back(p);
    CHECK(active == std::vector<Primitive>{Primitive::Reach, Primitive::Transport, Primitive::Place, Primitive::Retreat});
    CHECK(segmentation_accuracy(d.truth.segments, d.truth.segments, d.demo.frame_count()) == 1.0);
}

TEST_CASE("transitory object-object relations do not affect segmentation") {
    ScenarioConfig cfg;
    cfg.seed = 4;
    cfg.flyby = true;
    cfg.n_objects = 3;
    const auto d = gen_pick_place(cfg);
    const auto t = interaction_timeline(d.demo, cfg.window, {});
    InteractionTimeline without = t;
    std::erase_if(without.events, [](const auto& e) { return e.kind == InteractionKind::TOO; });
    CHECK(without.events.size() < t.events.size());
    CHECK(segment(t, d.demo, cfg.segmentation) == segment(without, d.demo, cfg.segmentation));
}

TEST_CASE("segmentation accuracy arithmetic") {
    const std::vector<Segment> truth{seg(Primitive::Idle, "h", 0, 2), seg(Primitive::Transport, "h", 3, 9)};
    const std::vector<Segment> idle{seg(Primitive::Idle, "h", 0, 9)};
    CHECK(segmentation_accuracy(truth, truth, 10) == 1.0);
    CHECK(segmentation_accuracy(idle, truth, 10) == doctest::Approx(0.3));
    CHECK(code_of([&] { check_coverage({seg(Primitive::Idle, "h", 0, 4), seg(Primitive::Idle, "h", 6, 9)}, 10); }) ==
          ErrorCode::CoverageGap);
    CHECK(code_of([&] { check_coverage(idle, 11); }) == ErrorCode::CoverageGap);
}

TEST_CASE("json rendering and primitive names") {
    const auto j = nlohmann::json::parse(segments_to_json({seg(Primitive::Hold, "h", 0, 3)}));
    REQUIRE(j.size() == 1);
    CHECK(j[0]["primitive"] == "Hold");
    CHECK(parse_primitive("Retreat") == Primitive::Retreat);
    CHECK(!parse_primitive("Lift").has_value());
}

}
