#include <doctest.h>

#include <cmath>

#include "demograph/infotheory.hpp"
#include "demograph/random.hpp"
#include "demograph/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace demograph;
using fixtures::code_of;

namespace {

std::vector<double> seeded(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Rng rng(seed, "unit.infotheory");
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.uniform(lo, hi));
    return v;
}

WindowConfig window(int phi, int stride = 1, double zeta = 0.1) {
    WindowConfig c;
    c.phi = phi;
    c.stride = stride;
    c.zeta = zeta;
    return c;
}

}  // namespace

TEST_SUITE("infotheory") {

TEST_CASE("histogram binning") {
    const std::vector<double> same(9, 5.0);
    const auto h = build_histogram(same, 0.01);
    REQUIRE(h.counts.size() == 1);
    CHECK(h.counts.begin()->second == 9);
    CHECK(h.total == 9);

    const std::vector<double> spread{0.05, 0.15, 0.25, 0.35};
    const auto g = build_histogram(spread, 0.1);
    CHECK(g.counts == std::map<std::int64_t, std::int64_t>{{0, 1}, {1, 1}, {2, 1}, {3, 1}});

    const auto xs = seeded(16, 1);
    const auto t = build_histogram(xs, 0.1);
    const auto direct = oracle::tally(xs, 0.1);
    CHECK(t.counts.size() == direct.size());
    for (const auto& [bin, n] : direct) CHECK(t.counts.at(bin) == n);

    CHECK(bin_index(-0.001, 0.01) == -1);
    CHECK(code_of([] { bin_index(std::nan(""), 0.1); }) == ErrorCode::NonFiniteSample);
}

TEST_CASE("window entropy values") {
    CHECK(window_entropy(std::vector<double>(12, 0.3), 0.05) == 0.0);
    const std::vector<double> four{0.1, 0.1, 1.1, 1.1, 2.1, 2.1, 3.1, 3.1};
    CHECK(window_entropy(four, 1.0) == doctest::Approx(1.3862943611198906).epsilon(1e-15));
    const std::vector<double> frozen{0.0, 0.004, 0.006, 0.012};
    CHECK(window_entropy(frozen, 0.005) == doctest::Approx(1.0397207708399179).epsilon(1e-15));
    CHECK(window_entropy(frozen, 0.005, 2.0) == doctest::Approx(2.0794415416798357).epsilon(1e-15));

    const auto xs = seeded(32, 2);
    CHECK(std::abs(window_entropy(xs, 0.05) - oracle::entropy(xs, 0.05)) < 1e-12);
    CHECK(code_of([] { window_entropy(std::vector<double>{}, 0.1); }) == ErrorCode::EmptyInput);
}

TEST_CASE("joint entropy") {
    const auto xs = seeded(40, 3);
    const std::vector<double> flat(40, 0.42);
    CHECK(std::abs(joint_entropy(xs, flat, 0.1) - window_entropy(xs, 0.1)) < 1e-12);
    CHECK(std::abs(joint_entropy(xs, xs, 0.1) - window_entropy(xs, 0.1)) < 1e-12);
    const auto ys = seeded(40, 4);
    CHECK(std::abs(joint_entropy(xs, ys, 0.2) - oracle::joint_entropy(xs, ys, 0.2)) < 1e-12);
    CHECK(code_of([&] { joint_entropy(xs, std::vector<double>(3, 0.0), 0.1); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("mutual information") {
    const auto xs = seeded(30, 5);
    const std::vector<double> flat(30, 0.7);
    CHECK(mutual_information(xs, flat, 0.1) == 0.0);
    CHECK(std::abs(mutual_information(xs, xs, 0.1) - window_entropy(xs, 0.1)) < 1e-12);
    const std::vector<double> px{0, 0, 1, 1}, py{0, 1, 0, 1};
    CHECK(std::abs(mutual_information(px, py, 1.0)) < 1e-15);
    const auto ys = seeded(30, 6);
    CHECK(mutual_information(xs, ys, 0.25) == mutual_information(ys, xs, 0.25));
    CHECK(std::abs(mutual_information(xs, ys, 0.25) - oracle::mutual_information(xs, ys, 0.25)) < 1e-12);
}

TEST_CASE("entropy series on a window grid") {
    const std::vector<double> flat(100, 1.0);
    const auto s = entropy_series(flat, window(20));
    CHECK(s.size() == 81);
    for (const auto& p : s.points) CHECK(p.value == 0.0);
    CHECK(s[0].center_frame == 10);
    CHECK(entropy_series(flat, window(20, 3)).size() == 27);

    std::vector<double> step(100, 0.0);
    for (std::size_t i = 50; i < 100; ++i) step[i] = 1.0;
    for (const auto& p : entropy_series(step, window(20)).points) {
        const bool straddles = p.center_frame - 10 < 50 && p.center_frame + 10 > 50;
        CHECK((p.value > 0.0) == straddles);
    }
    CHECK(code_of([] { entropy_series(std::vector<double>(5, 0.0), window(8)); }) == ErrorCode::SignalTooShort);
    CHECK(code_of([] { entropy_series(std::vector<double>(50, 0.0), window(7)); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("mi series and its 3-D sum") {
    const std::vector<double> a(60, 0.2), b(60, 0.9);
    for (const auto& p : mi_series(a, b, window(10)).points) CHECK(p.value == 0.0);
    const auto xs = seeded(60, 7);
    CHECK(mi_series(xs, xs, window(10)) == entropy_series(xs, window(10)));

    using fixtures::traced;
    const auto cfg = window(12, 2, 0.01);
    const auto hand = traced("h", EntityClass::HandRight, 80, [](std::size_t k) {
        const double t = static_cast<double>(k) / 79.0;
        return Vec3{0.3 * t, 0.1 * t * t, 0.05 * std::sin(3.0 * t)};
    });
    auto obj = hand;
    obj.id = "o";
    obj.cls = EntityClass::Object;
    const auto fixed = fixtures::still("c", EntityClass::Object, 80, {0.1, 0.2, 0.3});

    for (const auto& p : mi_3d(hand, fixed, cfg).points) CHECK(p.value == 0.0);
    const auto self = mi_3d(hand, obj, cfg);
    const auto ex = entropy_series(hand.axis(0), cfg), ey = entropy_series(hand.axis(1), cfg),
               ez = entropy_series(hand.axis(2), cfg);
    for (std::size_t k = 0; k < self.size(); ++k)
        CHECK(std::abs(self[k].value - (ex[k].value + ey[k].value + ez[k].value)) < 1e-12);

    for (auto& p : obj.poses) p.position.x += 0.003;
    const auto coupled = mi_3d(hand, obj, cfg);
    const auto mx = mi_series(hand.axis(0), obj.axis(0), cfg), my = mi_series(hand.axis(1), obj.axis(1), cfg),
               mz = mi_series(hand.axis(2), obj.axis(2), cfg);
    for (std::size_t k = 0; k < coupled.size(); ++k)
        CHECK(std::abs(coupled[k].value - (mx[k].value + my[k].value + mz[k].value)) < 1e-12);
}

TEST_CASE("derivative of a series") {
    ScalarSeries flat;
    flat.stride = 2;
    for (int k = 0; k < 10; ++k) flat.points.push_back({4 + 2 * k, 1.5});
    for (const auto& p : series_derivative(flat, 30.0).points) CHECK(p.value == 0.0);

    ScalarSeries ramp;
    ramp.stride = 2;
    const double m = 0.25;
    for (int k = 0; k < 10; ++k) ramp.points.push_back({4 + 2 * k, m * k});
    for (const auto& p : series_derivative(ramp, 30.0).points) CHECK(p.value == doctest::Approx(m / (2.0 / 30.0)));
    for (const auto& p : series_derivative(ramp, 30.0, 3).points) CHECK(p.value > 0.0);
}

TEST_CASE("bell-shaped entropy of a canonical move") {
    ScenarioConfig cfg;
    cfg.seed = 12;
    const auto d = gen_canonical_move(cfg);
    const auto h = entropy_series(d.demo.objects().front()->axis(0), cfg.window);
    const auto dh = series_derivative(h, d.demo.frame_rate());
    const auto b = oracle::bell_shape(h, dh);
    const auto& e = d.truth.timeline.events.front();
    CHECK(b.unimodal);
    CHECK(std::abs(static_cast<double>(b.peak_frame) - 0.5 * static_cast<double>(e.start_frame + e.end_frame)) <=
          cfg.window.phi / 2.0);
    CHECK(b.sign_fraction >= 0.95);
}

TEST_CASE("csv rendering") {
    ScalarSeries s;
    s.points = {{4, 0.5}, {5, 0.25}};
    CHECK(series_to_csv(s) == "center_frame,value\n4,0.5\n5,0.25\n");
    CHECK(s.at_frame(5) == 0.25);
    CHECK(code_of([&] { s.at_frame(6); }) == ErrorCode::FrameOutOfBounds);
}

}
