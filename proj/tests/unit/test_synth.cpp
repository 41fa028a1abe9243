#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "demograph/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace demograph;
using fixtures::code_of;

namespace {

std::size_t count_action(const BehaviorTree& bt, PlanAction a) {
    std::size_t n = 0;
    for (const auto& node : bt.nodes) n += node.action == a ? 1 : 0;
    return n;
}

std::size_t count_kind(const InteractionTimeline& t, InteractionKind k) {
    std::size_t n = 0;
    for (const auto& e : t.events) n += e.kind == k ? 1 : 0;
    return n;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("noise-free objects follow the hand while coupled") {
    ScenarioConfig cfg;
    cfg.seed = 3;
    cfg.noise_sigma = 0.0;
    const auto d = gen_pick_place(cfg);
    int checked = 0;
    for (const auto& e : d.truth.timeline.events) {
        if (e.kind != InteractionKind::CoupledMotion) continue;
        const auto& h = d.demo.at(e.subject_id);
        const auto& o = d.demo.at(e.object_id);
        for (auto f = e.start_frame; f <= e.end_frame; ++f) {
            const auto& a = h.poses[static_cast<std::size_t>(f)].position;
            const auto& b = o.poses[static_cast<std::size_t>(f)].position;
            if (a == b) ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("transport jitter stays within its half-width") {
    ScenarioConfig cfg;
    cfg.seed = 9;
    cfg.noise_sigma = 0.002;
    ScenarioConfig clean = cfg;
    clean.noise_sigma = 0.0;
    const auto a = gen_pick_place(cfg);
    const auto b = gen_pick_place(clean);
    double worst = 0.0;
    for (std::size_t t = 0; t < a.demo.tracks().size(); ++t)
        for (std::size_t f = 0; f < a.demo.tracks()[t].poses.size(); ++f) {
            const auto& p = a.demo.tracks()[t].poses[f].position;
            const auto& q = b.demo.tracks()[t].poses[f].position;
            worst = std::max({worst, std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
        }
    CHECK(worst > 0.0);
    CHECK(worst <= 4.0 * cfg.noise_sigma);
}

TEST_CASE("pick-place ground truth") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioConfig cfg;
        cfg.seed = seed;
        const auto d = gen_pick_place(cfg);
        REQUIRE(d.truth.plan.nodes.size() == 2);
        CHECK(d.truth.plan.nodes[0].action == PlanAction::PickObj);
        CHECK(d.truth.plan.nodes[1].action == PlanAction::PlaceObj);
        CHECK(d.truth.plan.nodes[0].object_id == "o1");
        CHECK(pick_before_place(d.truth.plan));
        CHECK(count_kind(d.truth.timeline, InteractionKind::TOO) == 0);

        cfg.flyby = true;
        cfg.n_objects = 3;
        const auto f = gen_pick_place(cfg);
        CHECK(count_kind(f.truth.timeline, InteractionKind::TOO) == 1);
        CHECK(f.truth.plan.nodes.size() == 2);
    }
    ScenarioConfig bad;
    bad.n_objects = 1;
    CHECK(code_of([&] { gen_pick_place(bad); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("suite variants are valid and consistent") {
    const auto suite = gen_suite(100, 7);
    REQUIRE(suite.size() == 100);
    for (const auto& d : suite) {
        CHECK(d.demo.frame_count() == d.truth.timeline.frame_count);
        CHECK(oracle::docked_before_coupled(d.truth.timeline) == 0);
        CHECK(oracle::oo_without_ho(d.truth.timeline) == 0);
        CHECK(pick_before_place(d.truth.plan));
        CHECK_FALSE(d.truth.graphs.keyframes.empty());
        for (const auto& t : d.demo.tracks())
            for (const auto& p : t.poses) CHECK(std::isfinite(p.position.x + p.position.y + p.position.z));
        for (std::size_t i = 1; i < d.truth.timeline.events.size(); ++i)
            CHECK(d.truth.timeline.events[i - 1].start_frame <= d.truth.timeline.events[i].start_frame);
    }
    CHECK(gen_suite(3, 7)[2].demo == suite[2].demo);
}

TEST_CASE("letter tasks") {
    ScenarioConfig cfg;
    cfg.seed = 2;
    cfg.n_objects = 5;
    cfg.dual = false;
    const auto r = gen_letter_task(cfg, "R");
    CHECK(count_action(r.truth.plan, PlanAction::PickObj) == 5);
    CHECK(count_action(r.truth.plan, PlanAction::PlaceObj) == 5);
    CHECK(count_action(r.truth.plan, PlanAction::PickObjDual) == 0);

    cfg.n_objects = 0;
    cfg.dual = true;
    const auto m = gen_letter_task(cfg, "M");
    CHECK(count_action(m.truth.plan, PlanAction::PickObjDual) >= 1);
    CHECK(count_action(m.truth.plan, PlanAction::PickObjDual) == count_action(m.truth.plan, PlanAction::PlaceObjDual));

    CHECK(code_of([&] { gen_letter_task(cfg, "Q"); }) == ErrorCode::UnsupportedLetter);
}

TEST_CASE("mirroring reflects the layout and swaps hands") {
    ScenarioConfig cfg;
    cfg.seed = 4;
    cfg.n_objects = 0;
    cfg.dual = false;
    const auto a = gen_letter_task(cfg, "L");
    cfg.mirror = true;
    const auto b = gen_letter_task(cfg, "L");
    for (const auto* o : a.demo.objects()) {
        const auto& p = o->poses.back().position;
        const auto& q = b.demo.at(o->id).poses.back().position;
        CHECK(q.x == doctest::Approx(-p.x));
        CHECK(q.y == doctest::Approx(p.y));
    }
    REQUIRE(a.truth.plan.nodes.size() == b.truth.plan.nodes.size());
    for (std::size_t i = 0; i < a.truth.plan.nodes.size(); ++i) {
        const auto ha = a.truth.plan.nodes[i].hand, hb = b.truth.plan.nodes[i].hand;
        if (a.truth.plan.nodes[i].action == PlanAction::MoveArm) continue;
        CHECK(ha != hb);
    }
}

TEST_CASE("selector dataset") {
    for (const auto& l : gen_selector_dataset(500, 0.0, 1)) CHECK(l.expert == prior_policy(l.state));
    const auto noisy = gen_selector_dataset(10000, 0.1, 2);
    std::size_t flipped = 0;
    for (const auto& l : noisy) flipped += l.expert != prior_policy(l.state) ? 1 : 0;
    CHECK(std::abs(static_cast<double>(flipped) / 10000.0 - 0.1) <= 0.01);
    CHECK(gen_selector_dataset(50, 0.2, 3) == gen_selector_dataset(50, 0.2, 3));
    CHECK(gen_selector_dataset(50, 0.2, 3) != gen_selector_dataset(50, 0.2, 4));
    CHECK(code_of([] { gen_selector_dataset(10, 0.7, 1); }) == ErrorCode::InvalidRate);
}

TEST_CASE("ground truth JSON") {
    ScenarioConfig cfg;
    cfg.seed = 6;
    const auto d = gen_pick_place(cfg);
    const auto j = nlohmann::json::parse(ground_truth_to_json(d.truth));
    CHECK(j["frame_count"] == d.demo.frame_count());
    CHECK(j["events"].size() == d.truth.timeline.events.size());
    CHECK(j.contains("selector_labels"));
    CHECK(ground_truth_to_json(gen_pick_place(cfg).truth) == ground_truth_to_json(d.truth));
}

}
