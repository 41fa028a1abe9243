#include "demograph/interactions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <tuple>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

void Thresholds::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(alpha_mi) || !positive(gamma_mi) || !positive(r_th_ho) || !positive(r_th_oo))
        fail(ErrorCode::InvalidConfig, "thresholds must be strictly positive");
    if (alpha_mi > gamma_mi) fail(ErrorCode::InvalidConfig, "thresholds.alpha_mi must not exceed thresholds.gamma_mi");
    if (min_event_centers < 1) fail(ErrorCode::InvalidConfig, "thresholds.min_event_centers must be >= 1");
}

const char* to_string(InteractionKind kind) {
    switch (kind) {
        case InteractionKind::CoupledMotion: return "CoupledMotion";
        case InteractionKind::Docked: return "Docked";
        case InteractionKind::EOO: return "EOO";
        case InteractionKind::TOO: return "TOO";
    }
    return "CoupledMotion";
}

std::optional<InteractionKind> parse_interaction_kind(const std::string& text) {
    if (text == "CoupledMotion") return InteractionKind::CoupledMotion;
    if (text == "Docked") return InteractionKind::Docked;
    if (text == "EOO") return InteractionKind::EOO;
    if (text == "TOO") return InteractionKind::TOO;
    return std::nullopt;
}

std::vector<const InteractionEvent*> InteractionTimeline::active_at(std::int64_t frame) const {
    std::vector<const InteractionEvent*> out;
    for (const auto& e : events)
        if (e.active_at(frame)) out.push_back(&e);
    return out;
}

void sort_events(std::vector<InteractionEvent>& events) {
    std::stable_sort(events.begin(), events.end(), [](const InteractionEvent& a, const InteractionEvent& b) {
        return std::tie(a.start_frame, a.end_frame, a.kind, a.subject_id, a.object_id) <
               std::tie(b.start_frame, b.end_frame, b.kind, b.subject_id, b.object_id);
    });
}

double mean_distance(const EntityTrack& a, const EntityTrack& b, std::int64_t center, int phi) {
    const std::int64_t lo = center - phi / 2;
    const std::int64_t hi = center + phi / 2;
    const auto n = static_cast<std::int64_t>(std::min(a.poses.size(), b.poses.size()));
    if (phi < 2 || lo < 0 || hi > n)
        fail(ErrorCode::WindowOutOfBounds, "window around frame " + std::to_string(center) + " leaves the track");
    double sum = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) sum += distance(a.position(k), b.position(k));
    return sum / static_cast<double>(hi - lo);
}

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Lazily evaluated per-window signals for pairs of tracks. Detection only
/// needs MI and distance entropy where a proximity gate holds, so nothing is
/// computed for the full grid unless asked for.
class SignalCache {
public:
    SignalCache(const Demonstration& demo, const WindowConfig& cfg)
        : demo_(demo), cfg_(cfg), grid_(cfg, demo.frame_count()), dt_(cfg.stride / demo.frame_rate()) {}

    const WindowGrid& grid() const { return grid_; }
    const EntityTrack& track(std::size_t i) const { return demo_.tracks()[i]; }

    double mean_dist(std::size_t a, std::size_t b, std::int64_t j) {
        auto& memo = slot(mean_dist_, a, b);
        double& v = memo[static_cast<std::size_t>(j)];
        if (std::isnan(v)) {
            const auto& d = frame_distances(a, b);
            const auto lo = static_cast<std::size_t>(grid_.begin(grid_.center(j)));
            double sum = 0.0;
            for (std::size_t k = lo; k < lo + static_cast<std::size_t>(cfg_.phi); ++k) sum += d[k];
            v = sum / static_cast<double>(cfg_.phi);
        }
        return v;
    }

    double mi(std::size_t a, std::size_t b, std::int64_t j) {
        auto& memo = slot(mi_, a, b);
        double& v = memo[static_cast<std::size_t>(j)];
        if (std::isnan(v)) {
            const auto& ba = bins(a);
            const auto& bb = bins(b);
            const auto lo = static_cast<std::size_t>(grid_.begin(grid_.center(j)));
            const auto n = static_cast<std::size_t>(cfg_.phi);
            double total = 0.0;
            for (std::size_t axis = 0; axis < 3; ++axis) {
                const std::span<const std::int64_t> sa(ba[axis]), sb(bb[axis]);
                const double m = mi_of_bins(sa.subspan(lo, n), sb.subspan(lo, n), cfg_.epsilon);
                total = axis == 0 ? m : total + m;
            }
            v = total;
        }
        return v;
    }

    double mi_slope(std::size_t a, std::size_t b, std::int64_t j) {
        if (grid_.count() < 2) return 0.0;
        return detail::derivative_at([&](std::int64_t i) { return mi(a, b, i); }, j, grid_.count(), dt_,
                                     cfg_.derivative_smoothing);
    }

    double distance_entropy(std::size_t a, std::size_t b, std::int64_t j) {
        auto& memo = slot(dist_entropy_, a, b);
        double& v = memo[static_cast<std::size_t>(j)];
        if (std::isnan(v)) {
            const auto key = std::make_pair(a, b);
            auto it = dist_bins_.find(key);
            if (it == dist_bins_.end()) it = dist_bins_.emplace(key, bin_signal(frame_distances(a, b), cfg_.zeta)).first;
            const std::span<const std::int64_t> s(it->second);
            v = entropy_of_bins(s.subspan(static_cast<std::size_t>(grid_.begin(grid_.center(j))),
                                          static_cast<std::size_t>(cfg_.phi)),
                                cfg_.epsilon);
        }
        return v;
    }

    double distance_entropy_slope(std::size_t a, std::size_t b, std::int64_t j) {
        if (grid_.count() < 2) return 0.0;
        return detail::derivative_at([&](std::int64_t i) { return distance_entropy(a, b, i); }, j, grid_.count(), dt_,
                                     cfg_.derivative_smoothing);
    }

private:
    using Key = std::pair<std::size_t, std::size_t>;

    std::vector<double>& slot(std::map<Key, std::vector<double>>& table, std::size_t a, std::size_t b) {
        auto it = table.find({a, b});
        if (it == table.end())
            it = table.emplace(Key{a, b}, std::vector<double>(static_cast<std::size_t>(grid_.count()), kUnset)).first;
        return it->second;
    }

    const std::vector<double>& frame_distances(std::size_t a, std::size_t b) {
        auto it = dist_.find({a, b});
        if (it == dist_.end()) {
            const auto& ta = track(a);
            const auto& tb = track(b);
            std::vector<double> d(ta.poses.size());
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = distance(ta.poses[k].position, tb.poses[k].position);
            it = dist_.emplace(Key{a, b}, std::move(d)).first;
        }
        return it->second;
    }

    const std::array<std::vector<std::int64_t>, 3>& bins(std::size_t i) {
        auto it = bins_.find(i);
        if (it == bins_.end()) {
            std::array<std::vector<std::int64_t>, 3> b;
            for (std::size_t axis = 0; axis < 3; ++axis) b[axis] = bin_signal(track(i).axis(axis), cfg_.zeta);
            it = bins_.emplace(i, std::move(b)).first;
        }
        return it->second;
    }

    const Demonstration& demo_;
    WindowConfig cfg_;
    WindowGrid grid_;
    double dt_;
    std::map<std::size_t, std::array<std::vector<std::int64_t>, 3>> bins_;
    std::map<Key, std::vector<double>> dist_;
    std::map<Key, std::vector<std::int64_t>> dist_bins_;
    std::map<Key, std::vector<double>> mean_dist_;
    std::map<Key, std::vector<double>> mi_;
    std::map<Key, std::vector<double>> dist_entropy_;
};

struct Decision {
    InteractionKind kind;
    std::size_t subject;
    std::size_t object;
    double mi = 0.0;
};

struct RawEvent {
    InteractionKind kind;
    std::size_t subject;
    std::size_t object;
    int episode = 0;
    std::int64_t first = 0;
    std::int64_t last = 0;
    std::vector<double> mi;

    std::int64_t centers() const { return last - first + 1; }
};

/// Folds per-center decisions into maximal runs of identical relations.
class EventTracker {
public:
    void observe(std::int64_t j, const std::optional<Decision>& d, int episode = 0) {
        if (open_ && d && open_->kind == d->kind && open_->subject == d->subject && open_->object == d->object &&
            open_->last == j - 1) {
            open_->last = j;
            open_->mi.push_back(d->mi);
            return;
        }
        close();
        if (d) open_ = RawEvent{d->kind, d->subject, d->object, episode, j, j, {d->mi}};
    }

    std::vector<RawEvent> finish() {
        close();
        return std::move(done_);
    }

private:
    void close() {
        if (open_) done_.push_back(std::move(*open_));
        open_.reset();
    }

    std::optional<RawEvent> open_;
    std::vector<RawEvent> done_;
};

std::size_t index_of(const Demonstration& demo, const std::string& id) {
    const auto& tracks = demo.tracks();
    for (std::size_t i = 0; i < tracks.size(); ++i)
        if (tracks[i].id == id) return i;
    fail(ErrorCode::UnknownEntity, "no entity '" + id + "'");
}

std::vector<std::size_t> object_indices(const Demonstration& demo) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < demo.tracks().size(); ++i)
        if (!demo.tracks()[i].is_hand()) out.push_back(i);
    return out;
}

void require_windows(const Demonstration& demo, const WindowConfig& cfg) {
    if (demo.frame_count() < cfg.phi)
        fail(ErrorCode::SignalTooShort, "demonstration has " + std::to_string(demo.frame_count()) +
                                            " frames, fewer than the window " + std::to_string(cfg.phi));
}

InteractionEvent to_event(const RawEvent& r, const SignalCache& cache, bool with_trace) {
    InteractionEvent e;
    e.kind = r.kind;
    e.subject_id = cache.track(r.subject).id;
    e.object_id = cache.track(r.object).id;
    e.start_frame = cache.grid().center(r.first);
    e.end_frame = cache.grid().center(r.last);
    if (with_trace) {
        ScalarSeries s;
        s.stride = cache.grid().stride;
        for (std::int64_t j = r.first; j <= r.last; ++j)
            s.points.push_back({cache.grid().center(j), r.mi[static_cast<std::size_t>(j - r.first)]});
        e.mi_trace = std::move(s);
    }
    return e;
}

struct Candidate {
    double distance;
    const std::string* id;
    std::size_t index;
};

void sort_candidates(std::vector<Candidate>& c) {
    std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return *a.id < *b.id;
    });
}

std::vector<InteractionEvent> detect_ho_with(const Demonstration& demo, std::size_t hand, SignalCache& cache,
                                             const Thresholds& th) {
    const auto objects = object_indices(demo);
    const auto& grid = cache.grid();

    std::vector<bool> gate_prev(objects.size(), false);
    std::vector<bool> coupled_in_episode(objects.size(), false);
    std::vector<int> episode(objects.size(), 0);
    std::optional<Decision> prev;
    EventTracker tracker;
    std::vector<Candidate> candidates;

    for (std::int64_t j = 0; j < grid.count(); ++j) {
        candidates.clear();
        for (std::size_t k = 0; k < objects.size(); ++k) {
            const double r = cache.mean_dist(hand, objects[k], j);
            const bool gate = r < th.r_th_ho;
            if (gate && !gate_prev[k]) {
                ++episode[k];
                coupled_in_episode[k] = false;
            }
            gate_prev[k] = gate;
            if (gate) candidates.push_back({r, &cache.track(objects[k]).id, k});
        }
        sort_candidates(candidates);

        std::optional<Decision> decision;
        std::size_t chosen = 0;
        for (const auto& c : candidates) {
            const std::size_t obj = objects[c.index];
            const double w = cache.mi(hand, obj, j);
            if (w > th.alpha_mi) {
                decision = Decision{InteractionKind::CoupledMotion, hand, obj, w};
            } else if (prev && prev->kind == InteractionKind::Docked && prev->object == obj) {
                decision = Decision{InteractionKind::Docked, hand, obj, w};
            } else if (coupled_in_episode[c.index] && w < th.gamma_mi && cache.mi_slope(hand, obj, j) < 0.0) {
                decision = Decision{InteractionKind::Docked, hand, obj, w};
            }
            if (decision) {
                chosen = c.index;
                break;
            }
        }
        if (decision && decision->kind == InteractionKind::CoupledMotion) coupled_in_episode[chosen] = true;
        tracker.observe(j, decision, decision ? episode[chosen] : 0);
        prev = decision;
    }

    auto raw = tracker.finish();
    std::erase_if(raw, [&](const RawEvent& r) { return r.centers() < th.min_event_centers; });
    // A Docked run whose coupling phase was discarded as jitter has nothing to follow.
    std::vector<RawEvent> kept;
    for (const auto& r : raw) {
        if (r.kind == InteractionKind::Docked) {
            const bool has_coupling = std::any_of(kept.begin(), kept.end(), [&](const RawEvent& c) {
                return c.kind == InteractionKind::CoupledMotion && c.object == r.object && c.episode == r.episode &&
                       c.last < r.first;
            });
            if (!has_coupling) continue;
        }
        kept.push_back(r);
    }

    std::vector<InteractionEvent> out;
    for (const auto& r : kept) out.push_back(to_event(r, cache, true));
    return out;
}

std::vector<InteractionEvent> detect_oo_with(const Demonstration& demo, const std::vector<InteractionEvent>& ho_events,
                                             SignalCache& cache, const Thresholds& th) {
    const auto objects = object_indices(demo);
    const auto& grid = cache.grid();

    // HO events per hand, in demonstration order of the hands.
    std::map<std::size_t, std::vector<const InteractionEvent*>> by_hand;
    for (const auto& e : ho_events) {
        if (!is_hand_object(e.kind)) continue;
        const auto h = index_of(demo, e.subject_id);
        index_of(demo, e.object_id);
        by_hand[h].push_back(&e);
    }

    std::vector<InteractionEvent> out;
    std::vector<Candidate> candidates;
    for (auto& [hand, events] : by_hand) {
        std::sort(events.begin(), events.end(),
                  [](const auto* a, const auto* b) { return a->start_frame < b->start_frame; });
        EventTracker tracker;
        std::optional<Decision> prev;
        std::size_t cursor = 0;
        for (std::int64_t j = 0; j < grid.count(); ++j) {
            const auto c = grid.center(j);
            while (cursor < events.size() && events[cursor]->end_frame < c) ++cursor;
            const InteractionEvent* ho = (cursor < events.size() && events[cursor]->active_at(c)) ? events[cursor] : nullptr;

            std::optional<Decision> decision;
            if (ho != nullptr) {
                const auto manipulated = index_of(demo, ho->object_id);
                candidates.clear();
                for (const auto b : objects) {
                    if (b == manipulated) continue;
                    const double r = cache.mean_dist(manipulated, b, j);
                    if (r < th.r_th_oo) candidates.push_back({r, &cache.track(b).id, b});
                }
                sort_candidates(candidates);
                if (!candidates.empty()) {
                    const auto partner = candidates.front().index;
                    bool efficient = ho->kind == InteractionKind::Docked;
                    if (!efficient && prev && prev->kind == InteractionKind::EOO && prev->subject == manipulated &&
                        prev->object == partner)
                        efficient = true;
                    if (!efficient) efficient = cache.distance_entropy_slope(manipulated, partner, j) < 0.0;
                    decision = Decision{efficient ? InteractionKind::EOO : InteractionKind::TOO, manipulated, partner, 0.0};
                }
            }
            tracker.observe(j, decision);
            prev = decision;
        }
        auto raw = tracker.finish();
        for (const auto& r : raw)
            if (r.centers() >= th.min_event_centers) out.push_back(to_event(r, cache, false));
    }
    sort_events(out);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<InteractionEvent> detect_ho(const Demonstration& demo, const std::string& hand_id, const WindowConfig& cfg,
                                        const Thresholds& th) {
    cfg.validate();
    th.validate();
    const auto hand = index_of(demo, hand_id);
    if (!demo.tracks()[hand].is_hand()) fail(ErrorCode::UnknownEntity, "'" + hand_id + "' is not a hand");
    require_windows(demo, cfg);
    SignalCache cache(demo, cfg);
    return detect_ho_with(demo, hand, cache, th);
}

std::vector<InteractionEvent> detect_oo(const Demonstration& demo, const std::vector<InteractionEvent>& ho_events,
                                        const WindowConfig& cfg, const Thresholds& th) {
    cfg.validate();
    th.validate();
    require_windows(demo, cfg);
    SignalCache cache(demo, cfg);
    return detect_oo_with(demo, ho_events, cache, th);
}

InteractionTimeline interaction_timeline(const Demonstration& demo, const WindowConfig& cfg, const Thresholds& th) {
    cfg.validate();
    th.validate();
    require_windows(demo, cfg);
    SignalCache cache(demo, cfg);
    InteractionTimeline tl;
    tl.frame_count = demo.frame_count();
    for (std::size_t i = 0; i < demo.tracks().size(); ++i) {
        if (!demo.tracks()[i].is_hand()) continue;
        auto ho = detect_ho_with(demo, i, cache, th);
        tl.events.insert(tl.events.end(), std::make_move_iterator(ho.begin()), std::make_move_iterator(ho.end()));
    }
    auto oo = detect_oo_with(demo, tl.events, cache, th);
    tl.events.insert(tl.events.end(), std::make_move_iterator(oo.begin()), std::make_move_iterator(oo.end()));
    sort_events(tl.events);
    return tl;
}

std::string timeline_to_json(const InteractionTimeline& timeline) {
    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const auto& e : timeline.events)
        events.push_back({{"kind", to_string(e.kind)},
                          {"subject", e.subject_id},
                          {"object", e.object_id},
                          {"start_frame", e.start_frame},
                          {"end_frame", e.end_frame}});
    nlohmann::ordered_json j;
    j["frame_count"] = timeline.frame_count;
    j["events"] = std::move(events);
    return j.dump(2) + "\n";
}

}  // namespace demograph
