#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demograph/infotheory.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

/// Interaction thresholds. Defaults separate the coupled and uncoupled
/// regimes of the bundled synthetic generator; treat them as tuning knobs.
struct Thresholds {
    double alpha_mi = 0.05;   // CoupledMotion when the windowed MI exceeds this (nats)
    double gamma_mi = 0.15;   // Docked entry requires MI below this ceiling (nats)
    double r_th_ho = 0.10;    // hand-object proximity / termination radius (m)
    double r_th_oo = 0.05;    // object-object proximity / termination radius (m)
    int min_event_centers = 2;  // shorter events are dropped as jitter

    void validate() const;
    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

enum class InteractionKind { CoupledMotion, Docked, EOO, TOO };

const char* to_string(InteractionKind kind);
std::optional<InteractionKind> parse_interaction_kind(const std::string& text);
inline bool is_hand_object(InteractionKind k) { return k == InteractionKind::CoupledMotion || k == InteractionKind::Docked; }

/// A typed directed relation over an inclusive frame span. For HO kinds the
/// subject is a hand; for OO kinds it is the manipulated object.
struct InteractionEvent {
    InteractionKind kind = InteractionKind::CoupledMotion;
    std::string subject_id;
    std::string object_id;
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    std::optional<ScalarSeries> mi_trace;

    bool active_at(std::int64_t frame) const { return start_frame <= frame && frame <= end_frame; }
    std::int64_t length() const { return end_frame - start_frame + 1; }

    friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

struct InteractionTimeline {
    std::vector<InteractionEvent> events;  // ordered by start_frame
    std::int64_t frame_count = 0;

    std::vector<const InteractionEvent*> active_at(std::int64_t frame) const;

    friend bool operator==(const InteractionTimeline&, const InteractionTimeline&) = default;
};

/// Deterministic event order: start, end, kind, subject, object.
void sort_events(std::vector<InteractionEvent>& events);

/// Mean Euclidean distance between the two position traces over the window
/// [center - phi/2, center + phi/2). Throws WindowOutOfBounds.
double mean_distance(const EntityTrack& a, const EntityTrack& b, std::int64_t center, int phi);

std::vector<InteractionEvent> detect_ho(const Demonstration& demo, const std::string& hand_id,
                                        const WindowConfig& cfg, const Thresholds& th);

std::vector<InteractionEvent> detect_oo(const Demonstration& demo, const std::vector<InteractionEvent>& ho_events,
                                        const WindowConfig& cfg, const Thresholds& th);

InteractionTimeline interaction_timeline(const Demonstration& demo, const WindowConfig& cfg, const Thresholds& th);

/// Events and frame count as JSON. MI traces are omitted.
std::string timeline_to_json(const InteractionTimeline& timeline);

}  // namespace demograph
