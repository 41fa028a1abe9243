#include "demograph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "demograph/errors.hpp"
#include "demograph/random.hpp"

namespace demograph {

namespace {

double min_jerk(double t) { return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t); }

/// Point at arc-length fraction u of a polyline.
Vec3 along(const std::vector<Vec3>& pts, double u) {
    if (pts.size() == 1) return pts.front();
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
    if (total == 0.0) return pts.front();
    double target = std::clamp(u, 0.0, 1.0) * total;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double len = distance(pts[i - 1], pts[i]);
        if (target <= len || i + 1 == pts.size()) {
            const double a = len == 0.0 ? 1.0 : std::min(target / len, 1.0);
            return pts[i - 1] + a * (pts[i] - pts[i - 1]);
        }
        target -= len;
    }
    return pts.back();
}

/// Position on `pts` at step k of n (k = 1..n, the last step lands on the end).
Vec3 sweep(const std::vector<Vec3>& pts, std::int64_t k, int n, Interpolation mode) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    return along(pts, mode == Interpolation::MinimumJerk ? min_jerk(t) : t);
}

Pose6D at_position(const Vec3& p) { return {p, {0.0, 0.0, 0.0}}; }

struct Pile {
    Vec3 left;
    Vec3 right;
};

struct Rendered {
    std::vector<EntityTrack> tracks;
    std::int64_t frames = 0;
};

std::int64_t track_index(const std::vector<EntityTrack>& tracks, const std::string& id) {
    for (std::size_t i = 0; i < tracks.size(); ++i)
        if (tracks[i].id == id) return static_cast<std::int64_t>(i);
    return -1;
}

const char* hand_id(EntityClass cls) { return cls == EntityClass::HandLeft ? "hand_left" : "hand_right"; }

void validate_script(const ScenarioConfig& cfg, const std::vector<SceneObject>& objects,
                     const std::vector<ScriptedAction>& script) {
    std::set<std::string> ids;
    for (const auto& o : objects) {
        if (!ids.insert(o.id).second) fail(ErrorCode::InvalidConfig, "duplicate object id '" + o.id + "'");
        if (!cfg.workspace.contains(o.position)) fail(ErrorCode::InvalidConfig, "object '" + o.id + "' outside the workspace");
    }
    std::map<EntityClass, std::int64_t> hand_free;
    std::map<std::string, std::int64_t> object_free;
    auto sorted = script;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start_frame < b.start_frame; });
    for (const auto& a : sorted) {
        if (!is_hand(a.hand)) fail(ErrorCode::InvalidConfig, "scripted action must name a hand");
        if (!ids.contains(a.object_id)) fail(ErrorCode::InvalidConfig, "script names unknown object '" + a.object_id + "'");
        if (a.waypoints.empty()) fail(ErrorCode::InvalidConfig, "scripted action needs at least one waypoint");
        for (const auto& w : a.waypoints)
            if (!cfg.workspace.contains(w)) fail(ErrorCode::InvalidConfig, "waypoint outside the workspace");
        if (a.start_frame < 0 || a.reach_frames < 1 || a.grasp_frames < 0 || a.transport_frames < 1 ||
            a.hold_frames < 0 || a.retreat_frames < 1)
            fail(ErrorCode::InvalidConfig, "scripted action has invalid timing");
        if (a.start_frame < hand_free[a.hand] || a.start_frame < object_free[a.object_id])
            fail(ErrorCode::InvalidConfig, "scripted actions overlap for the same hand or object");
        hand_free[a.hand] = a.end_frame() + 1;
        object_free[a.object_id] = a.release_frame();
    }
}

Rendered render(const ScenarioConfig& cfg, const std::vector<SceneObject>& objects,
                const std::vector<ScriptedAction>& script) {
    Rendered r;
    std::int64_t last = 0;
    for (const auto& a : script) last = std::max(last, a.end_frame());
    r.frames = std::max<std::int64_t>(last + 1 + 30, cfg.min_frames);
    const auto n = static_cast<std::size_t>(r.frames);

    for (auto side : {EntityClass::HandLeft, EntityClass::HandRight})
        r.tracks.push_back({hand_id(side), side, std::vector<Pose6D>(n, at_position(rest_position(side, cfg)))});
    for (const auto& o : objects) r.tracks.push_back({o.id, EntityClass::Object, std::vector<Pose6D>(n, at_position(o.position))});

    auto order = script;
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.start_frame < b.start_frame; });

    Rng noise(cfg.seed, "synth.noise");
    std::map<std::string, Vec3> where;
    for (const auto& o : objects) where[o.id] = o.position;

    for (const auto& a : order) {
        auto& hand = r.tracks[static_cast<std::size_t>(track_index(r.tracks, hand_id(a.hand)))].poses;
        auto& obj = r.tracks[static_cast<std::size_t>(track_index(r.tracks, a.object_id))].poses;
        const Vec3 rest = rest_position(a.hand, cfg);
        const Vec3 start = where[a.object_id];
        std::vector<Vec3> path{start};
        path.insert(path.end(), a.waypoints.begin(), a.waypoints.end());
        const Vec3 final = path.back();
        const Vec3 lifted = final + Vec3{0.0, 0.0, a.retreat_lift};

        auto set = [&](std::vector<Pose6D>& poses, std::int64_t f, const Vec3& p) {
            if (f >= 0 && f < r.frames) poses[static_cast<std::size_t>(f)] = at_position(p);
        };
        for (int k = 1; k <= a.reach_frames; ++k)
            set(hand, a.start_frame + k - 1, sweep({rest, start}, k, a.reach_frames, cfg.interpolation));
        for (int k = 0; k < a.grasp_frames; ++k) set(hand, a.start_frame + a.reach_frames + k, start);
        for (int k = 1; k <= a.transport_frames; ++k)
            set(hand, a.transport_start() + k - 1, sweep(path, k, a.transport_frames, cfg.interpolation));
        for (int k = 0; k < a.hold_frames; ++k) set(hand, a.transport_end() + 1 + k, final);
        for (int k = 1; k <= a.retreat_frames; ++k)
            set(hand, a.release_frame() + k - 1, sweep({final, lifted, rest}, k, a.retreat_frames, cfg.interpolation));

        for (auto f = a.transport_start(); f <= a.transport_end() && f < r.frames; ++f) {
            const auto& h = hand[static_cast<std::size_t>(f)].position;
            const Vec3 jitter{noise.uniform(-1.0, 1.0), noise.uniform(-1.0, 1.0), noise.uniform(-1.0, 1.0)};
            set(obj, f, h + cfg.noise_sigma * jitter);
        }
        for (auto f = a.transport_end() + 1; f < r.frames; ++f) set(obj, f, final);
        where[a.object_id] = final;
    }
    return r;
}

struct Span {
    std::int64_t first;
    std::int64_t last;
};

InteractionTimeline script_timeline(const ScenarioConfig& cfg, const Demonstration& demo,
                                    const std::vector<ScriptedAction>& script) {
    InteractionTimeline tl;
    tl.frame_count = demo.frame_count();
    const auto objects = demo.objects();
    const auto pos = [&](const std::string& id, std::int64_t f) { return demo.at(id).position(f); };

    for (const auto& a : script) {
        const std::string h = hand_id(a.hand);
        const std::string& o = a.object_id;
        const auto ts = a.transport_start();
        const auto te = std::min(a.transport_end(), demo.frame_count() - 1);
        tl.events.push_back({InteractionKind::CoupledMotion, h, o, ts, te, std::nullopt});

        std::int64_t docked_end = te;
        for (auto f = te + 1; f < demo.frame_count() && distance(pos(h, f), pos(o, f)) <= cfg.contact_radius; ++f)
            docked_end = f;
        if (docked_end > te) tl.events.push_back({InteractionKind::Docked, h, o, te + 1, docked_end, std::nullopt});

        // Nearest other object within the contact radius, frame by frame.
        auto nearest = [&](std::int64_t f) -> const EntityTrack* {
            const EntityTrack* best = nullptr;
            double best_d = cfg.oo_radius;
            for (const auto* b : objects) {
                if (b->id == o) continue;
                const double d = distance(pos(o, f), b->position(f));
                if (d < best_d || (d == best_d && best != nullptr && b->id < best->id)) {
                    best = b;
                    best_d = d;
                }
            }
            return best;
        };

        std::int64_t eoo_start = te + 1;
        const EntityTrack* partner = nearest(te);
        if (partner != nullptr) {
            eoo_start = te;
            while (eoo_start - 1 >= ts && nearest(eoo_start - 1) == partner) --eoo_start;
            tl.events.push_back({InteractionKind::EOO, o, partner->id, eoo_start, docked_end, std::nullopt});
        }
        std::optional<std::pair<const EntityTrack*, Span>> run;
        auto close = [&] {
            if (run) tl.events.push_back({InteractionKind::TOO, o, run->first->id, run->second.first, run->second.last, std::nullopt});
            run.reset();
        };
        for (auto f = ts; f < eoo_start; ++f) {
            const auto* b = nearest(f);
            if (b != nullptr && run && run->first == b && run->second.last == f - 1) {
                run->second.last = f;
                continue;
            }
            close();
            if (b != nullptr) run = std::make_pair(b, Span{f, f});
        }
        close();
    }
    sort_events(tl.events);
    return tl;
}

SynthDemo assemble(const ScenarioConfig& cfg, const std::vector<SceneObject>& objects,
                   const std::vector<ScriptedAction>& script, const std::string& id,
                   const std::map<std::string, Pile>& piles) {
    cfg.validate();
    validate_script(cfg, objects, script);
    auto r = render(cfg, objects, script);
    Demonstration demo(std::move(r.tracks), cfg.frame_rate);

    GroundTruth gt;
    gt.timeline = script_timeline(cfg, demo, script);
    gt.segments = segment(gt.timeline, demo, cfg.segmentation);
    gt.graphs = graph_sequence(demo, gt.timeline, cfg.window);
    gt.plan = emit_plan(gt.segments, demo, prior_assigner(), cfg.plan);

    auto order = script;
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.start_frame < b.start_frame; });
    const auto* left = demo.hand(EntityClass::HandLeft);
    const auto* right = demo.hand(EntityClass::HandRight);
    for (const auto& a : order) {
        const auto f = a.start_frame;
        const Vec3 start = demo.at(a.object_id).position(f);
        auto it = piles.find(a.object_id);
        const Vec3 ls = it != piles.end() ? it->second.left : start;
        const Vec3 rs = it != piles.end() ? it->second.right : start;
        const auto s = selector_state(left->position(f), right->position(f), ls, rs, a.waypoints.back());
        gt.selector_labels.push_back({s, prior_policy(s)});
    }
    return {id, std::move(demo), std::move(gt)};
}

/// Reach and grasp finish within the segmentation lead, so both hands are
/// still at rest where the Reach segment begins.
void fit_approach(ScriptedAction& a, const ScenarioConfig& cfg) {
    a.grasp_frames = 2;
    a.reach_frames = std::max(1, cfg.segmentation.reach_lead - 1 - a.grasp_frames);
}

double snap(double v, double zeta) { return (std::floor(v / zeta) + 0.5) * zeta; }

/// Hand assigned by the contralateral rule with both hands at rest.
EntityClass prior_hand(const ScenarioConfig& cfg, const Vec3& target) {
    const auto l = rest_position(EntityClass::HandLeft, cfg);
    const auto r = rest_position(EntityClass::HandRight, cfg);
    const auto s = selector_state(l, r, target, target);
    return prior_policy(s) == HandAction::UseLeftHand ? EntityClass::HandLeft : EntityClass::HandRight;
}

struct LetterSpec {
    std::vector<std::pair<int, int>> anchors;
    std::vector<std::pair<int, int>> order;
    std::vector<std::pair<int, int>> dual_pairs;  // indices into order that run together
};

LetterSpec letter_spec(const std::string& letter) {
    if (letter == "L") return {{{0, 0}}, {{0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 0}}, {}};
    if (letter == "V") return {{{2, 0}}, {{1, 1}, {0, 2}, {3, 1}, {4, 2}}, {}};
    if (letter == "R")
        return {{{0, 0}}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 4}, {2, 3}, {1, 2}, {2, 1}, {3, 0}}, {}};
    if (letter == "M")
        return {{{0, 0}, {4, 0}},
                {{0, 1}, {4, 1}, {0, 2}, {4, 2}, {0, 3}, {4, 3}, {1, 2}, {2, 1}, {3, 2}},
                {{0, 1}, {2, 3}, {4, 5}}};
    fail(ErrorCode::UnsupportedLetter, "letter '" + letter + "' is not one of R, V, L, M");
}

}  // namespace

bool Workspace::contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
}

void ScenarioConfig::validate() const {
    if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) fail(ErrorCode::InvalidConfig, "frame_rate must be > 0");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail(ErrorCode::InvalidConfig, "noise_sigma must be >= 0");
    if (n_objects < 0) fail(ErrorCode::InvalidConfig, "n_objects must be >= 0");
    if (!(block_size > 0.0) || !(contact_radius > 0.0) || !(oo_radius > 0.0))
        fail(ErrorCode::InvalidConfig, "block_size and contact radii must be > 0");
    if (workspace.min.x >= workspace.max.x || workspace.min.y >= workspace.max.y || workspace.min.z >= workspace.max.z)
        fail(ErrorCode::InvalidConfig, "workspace bounds are empty");
    window.validate();
    segmentation.validate();
    plan.validate();
}

Vec3 rest_position(EntityClass hand, const ScenarioConfig& cfg) {
    const double cx = 0.5 * (cfg.workspace.min.x + cfg.workspace.max.x);
    const double dx = 0.35 * (cfg.workspace.max.x - cfg.workspace.min.x);
    return {hand == EntityClass::HandLeft ? cx - dx : cx + dx, cfg.workspace.min.y + 0.10, cfg.workspace.min.z + 0.20};
}

SynthDemo gen_scripted(const ScenarioConfig& cfg, const std::vector<SceneObject>& objects,
                       const std::vector<ScriptedAction>& script, const std::string& id) {
    return assemble(cfg, objects, script, id, {});
}

SynthDemo gen_canonical_move(const ScenarioConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed, "synth.canonical");
    const double z = cfg.window.zeta;
    const double length = rng.uniform(0.3, 0.6);
    const double x0 = snap(rng.uniform(-0.45, 0.45 - length), z);
    const double x1 = snap(x0 + length, z);
    const double y = snap(rng.uniform(0.25, 0.45), z);
    const double h = snap(cfg.block_size / 2.0, z);
    const std::vector<SceneObject> objects{{"block", {x0, y, h}}};

    ScriptedAction a;
    a.hand = EntityClass::HandRight;
    a.object_id = "block";
    fit_approach(a, cfg);
    a.waypoints = {{x1, y, h}};
    a.start_frame = rng.uniform_int(30, 60);
    a.transport_frames = static_cast<int>(rng.uniform_int(20, 30));
    a.hold_frames = static_cast<int>(rng.uniform_int(8, 12));
    return assemble(cfg, objects, {a}, "canonical", {});
}

SynthDemo gen_pick_place(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.n_objects < 2) fail(ErrorCode::InvalidConfig, "pick-place needs at least 2 objects");
    if (cfg.flyby && cfg.n_objects < 3) fail(ErrorCode::InvalidConfig, "a fly-by needs a third object");
    Rng rng(cfg.seed, "synth.pick_place");
    const double half = cfg.block_size / 2.0;
    const double gap = cfg.block_size + 0.004;

    const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const Vec3 background{side * rng.uniform(0.08, 0.25), rng.uniform(0.15, 0.28), half};
    const Vec3 target = background + Vec3{side * gap, 0.0, 0.0};
    const Vec3 source{-side * rng.uniform(0.0, 0.2), rng.uniform(0.38, 0.50), half};
    const double height = rng.uniform(0.10, 0.16);

    std::vector<SceneObject> objects{{"o1", source}, {"o2", background}};
    if (cfg.flyby) {
        const double offset = cfg.block_size + 0.002;
        objects.push_back({"o3", source + Vec3{0.0, offset, 0.0}});
    }
    const Vec3 corners[] = {{-0.45, 0.55, half}, {0.45, 0.55, half}, {-0.45, 0.05, half}, {0.45, 0.05, half},
                            {0.0, 0.58, half},   {-0.45, 0.3, half}, {0.45, 0.3, half}};
    for (int i = static_cast<int>(objects.size()); i < cfg.n_objects; ++i)
        objects.push_back({"o" + std::to_string(i + 1), corners[(i - static_cast<int>(cfg.flyby ? 3 : 2)) % 7]});

    ScriptedAction a;
    a.hand = prior_hand(cfg, target);
    a.object_id = "o1";
    a.waypoints = {source + Vec3{0.0, 0.0, height}, target + Vec3{0.0, 0.0, height}, target};
    a.start_frame = rng.uniform_int(20, 40);
    fit_approach(a, cfg);
    a.transport_frames = static_cast<int>(cfg.flyby ? rng.uniform_int(32, 42) : rng.uniform_int(26, 36));
    a.hold_frames = static_cast<int>(rng.uniform_int(8, 14));
    a.retreat_frames = static_cast<int>(rng.uniform_int(18, 24));
    return assemble(cfg, objects, {a}, "pick_place", {});
}

SynthDemo gen_letter_task(const ScenarioConfig& cfg, const std::string& letter) {
    const auto spec = letter_spec(letter);
    cfg.validate();
    Rng rng(cfg.seed, "synth.letter." + letter);
    const double g = cfg.block_size;
    const double half = cfg.block_size / 2.0;
    const double flip = cfg.mirror ? -1.0 : 1.0;

    int cmin = 1 << 20, cmax = -(1 << 20);
    for (const auto& c : spec.anchors) cmin = std::min(cmin, c.first), cmax = std::max(cmax, c.first);
    for (const auto& c : spec.order) cmin = std::min(cmin, c.first), cmax = std::max(cmax, c.first);
    double shift = -0.5 * (cmin + cmax) * g;
    for (int c = cmin; c <= cmax; ++c)
        if (std::abs(c * g + shift) < 1e-9) shift += 0.5 * g;
    const double y0 = 0.18;
    auto cell = [&](std::pair<int, int> c) { return Vec3{flip * (c.first * g + shift), y0 + c.second * g, half}; };

    std::size_t count = spec.order.size();
    if (cfg.n_objects > 0) count = std::min<std::size_t>(count, static_cast<std::size_t>(cfg.n_objects));

    std::vector<SceneObject> objects;
    for (std::size_t i = 0; i < spec.anchors.size(); ++i)
        objects.push_back({"anchor" + std::to_string(i + 1), cell(spec.anchors[i])});

    const Vec3 pile_left{-0.32 * flip, 0.45, half};
    const Vec3 pile_right{0.32 * flip, 0.45, half};
    const Vec3 left_centroid = pile_left;
    const Vec3 right_centroid = pile_right;
    std::map<EntityClass, int> used;
    auto pile_slot = [&](EntityClass hand) {
        const int k = used[hand]++;
        const Vec3 base = hand == EntityClass::HandLeft ? pile_left : pile_right;
        return base + Vec3{(k % 3 - 1) * 0.07, (k / 3 % 3 - 1) * 0.07, 0.0};
    };

    std::vector<ScriptedAction> script;
    std::map<std::string, Pile> piles;
    std::int64_t cursor = rng.uniform_int(20, 40);
    std::vector<bool> done(count, false);
    auto make = [&](std::size_t i, double height, std::int64_t start) {
        const Vec3 target = cell(spec.order[i]);
        char name[16];
        std::snprintf(name, sizeof name, "b%02zu", i + 1);
        ScriptedAction a;
        a.hand = prior_hand(cfg, target);
        const Vec3 src = pile_slot(a.hand);
        objects.push_back({name, src});
        piles[name] = {left_centroid, right_centroid};
        a.object_id = name;
        a.waypoints = {src + Vec3{0.0, 0.0, height}, target + Vec3{0.0, 0.0, height}, target};
        a.start_frame = start;
        fit_approach(a, cfg);
        a.transport_frames = static_cast<int>(rng.uniform_int(28, 34));
        a.hold_frames = static_cast<int>(rng.uniform_int(8, 12));
        a.retreat_frames = static_cast<int>(rng.uniform_int(18, 24));
        return a;
    };
    for (std::size_t i = 0; i < count; ++i) {
        if (done[i]) continue;
        std::optional<std::size_t> mate;
        if (cfg.dual)
            for (const auto& [p, q] : spec.dual_pairs)
                if (static_cast<std::size_t>(p) == i && static_cast<std::size_t>(q) < count &&
                    prior_hand(cfg, cell(spec.order[i])) != prior_hand(cfg, cell(spec.order[static_cast<std::size_t>(q)])))
                    mate = static_cast<std::size_t>(q);
        auto a = make(i, 0.12, cursor);
        done[i] = true;
        std::int64_t end = a.end_frame();
        script.push_back(a);
        if (mate) {
            auto b = make(*mate, 0.24, cursor + 2);
            b.transport_frames = a.transport_frames;
            b.hold_frames = a.hold_frames;
            done[*mate] = true;
            end = std::max(end, b.end_frame());
            script.push_back(b);
        }
        cursor = end + 1 + rng.uniform_int(20, 35);
    }
    return assemble(cfg, objects, script, "letter_" + letter, piles);
}

SynthDemo gen_long_session(const ScenarioConfig& cfg, std::int64_t frames) {
    cfg.validate();
    Rng rng(cfg.seed, "synth.long");
    const double half = cfg.block_size / 2.0;
    const double gap = cfg.block_size + 0.004;
    const Vec3 anchor_l{-0.16, 0.22, half};
    const Vec3 anchor_r{0.17, 0.22, half};
    const std::vector<Vec3> home{{-0.30, 0.47, half}, {0.04, 0.50, half}, {0.31, 0.46, half}};
    const std::vector<Vec3> dock{anchor_l + Vec3{0.0, gap, 0.0}, anchor_r + Vec3{0.0, gap, 0.0},
                                 anchor_r + Vec3{0.0, -gap, 0.0}};
    std::vector<SceneObject> objects{{"anchor_l", anchor_l}, {"anchor_r", anchor_r}};
    for (std::size_t i = 0; i < home.size(); ++i) objects.push_back({"m" + std::to_string(i + 1), home[i]});

    std::vector<ScriptedAction> script;
    std::vector<bool> docked(home.size(), false);
    std::int64_t cursor = rng.uniform_int(20, 40);
    for (std::size_t step = 0;; ++step) {
        const std::size_t m = step % home.size();
        const Vec3 src = docked[m] ? dock[m] : home[m];
        const Vec3 dst = docked[m] ? home[m] : dock[m];
        const double height = rng.uniform(0.10, 0.16);
        ScriptedAction a;
        a.hand = prior_hand(cfg, dst);
        a.object_id = objects[2 + m].id;
        a.waypoints = {src + Vec3{0.0, 0.0, height}, dst + Vec3{0.0, 0.0, height}, dst};
        a.start_frame = cursor;
        fit_approach(a, cfg);
        a.transport_frames = static_cast<int>(rng.uniform_int(26, 36));
        a.hold_frames = static_cast<int>(rng.uniform_int(8, 14));
        a.retreat_frames = static_cast<int>(rng.uniform_int(18, 24));
        if (a.end_frame() + 31 > frames) break;
        script.push_back(a);
        docked[m] = !docked[m];
        cursor = a.end_frame() + 1 + rng.uniform_int(20, 40);
    }
    ScenarioConfig padded = cfg;
    padded.min_frames = std::max(cfg.min_frames, frames);
    return assemble(padded, objects, script, "long_session", {});
}

std::vector<LabeledState> gen_selector_dataset(std::size_t n, double flip_rate, std::uint64_t seed,
                                               const Workspace& ws) {
    if (!(flip_rate >= 0.0) || !(flip_rate < 0.5)) fail(ErrorCode::InvalidRate, "flip_rate must lie in [0, 0.5)");
    Rng rng(seed, "synth.selector");
    auto point = [&] {
        return Vec3{rng.uniform(ws.min.x, ws.max.x), rng.uniform(ws.min.y, ws.max.y), rng.uniform(ws.min.z, ws.max.z)};
    };
    std::vector<LabeledState> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 l = point(), r = point(), ls = point(), rs = point(), t = point();
        const auto s = selector_state(l, r, ls, rs, t);
        auto label = prior_policy(s);
        if (rng.bernoulli(flip_rate)) label = other(label);
        out.push_back({s, label});
    }
    return out;
}

std::vector<SynthDemo> gen_suite(std::size_t n, std::uint64_t seed, const ScenarioConfig& base) {
    static const char* letters[] = {"R", "V", "L", "M"};
    std::vector<SynthDemo> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScenarioConfig cfg = base;
        cfg.script.clear();
        cfg.seed = derive_seed(seed, "suite/" + std::to_string(i));
        const std::size_t kind = i % 10;
        SynthDemo d = [&] {
            if (kind < 5) {
                cfg.flyby = kind == 4;
                cfg.n_objects = kind >= 3 ? 3 : 2;
                return gen_pick_place(cfg);
            }
            if (kind < 7) return gen_canonical_move(cfg);
            cfg.n_objects = 0;
            cfg.mirror = (i / 10) % 2 == 1;
            return gen_letter_task(cfg, letters[(i / 10 + kind) % 4]);
        }();
        char id[32];
        std::snprintf(id, sizeof id, "demo_%03zu", i);
        d.id = id;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<SynthDemo> gen_long_suite(std::size_t n, std::int64_t frames, std::uint64_t seed,
                                      const ScenarioConfig& base) {
    std::vector<SynthDemo> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScenarioConfig cfg = base;
        cfg.seed = derive_seed(seed, "long/" + std::to_string(i));
        auto d = gen_long_session(cfg, frames);
        char id[32];
        std::snprintf(id, sizeof id, "long_%03zu", i);
        d.id = id;
        out.push_back(std::move(d));
    }
    return out;
}

std::string ground_truth_to_json(const GroundTruth& gt) {
    auto j = nlohmann::ordered_json::parse(timeline_to_json(gt.timeline));
    j["segments"] = nlohmann::ordered_json::parse(segments_to_json(gt.segments));
    j["plan"] = nlohmann::ordered_json::parse(serialize_plan(gt.plan));
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (const auto& l : gt.selector_labels)
        labels.push_back({{"state", l.state.features()}, {"expert", to_string(l.expert)}});
    j["selector_labels"] = std::move(labels);
    j["topology_changes"] = gt.graphs.topology_changes();
    return j.dump(2) + "\n";
}

}  // namespace demograph
