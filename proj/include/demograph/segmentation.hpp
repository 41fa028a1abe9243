#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demograph/interactions.hpp"
#include "demograph/trajectory.hpp"

namespace demograph {

enum class Primitive { Idle, Reach, Transport, Place, Hold, Retreat };

const char* to_string(Primitive p);
std::optional<Primitive> parse_primitive(const std::string& text);

/// An inclusive frame span of one primitive for one hand.
struct Segment {
    Primitive primitive = Primitive::Idle;
    std::string hand_id;
    std::optional<std::string> object_id;
    std::optional<std::string> target_id;  // Place only
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;

    std::int64_t length() const { return end_frame - start_frame + 1; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationConfig {
    int reach_lead = 8;     // frames of Reach before a coupling onset at most
    int retreat_lag = 8;    // frames of Retreat after an interaction ends at most

    void validate() const;
    friend bool operator==(const SegmentationConfig&, const SegmentationConfig&) = default;
};

/// Per-hand primitive labels for each frame, before run-length encoding.
struct FrameLabel {
    Primitive primitive = Primitive::Idle;
    std::optional<std::string> object_id;
    std::optional<std::string> target_id;

    friend bool operator==(const FrameLabel&, const FrameLabel&) = default;
};

std::vector<FrameLabel> label_frames(const InteractionTimeline& timeline, const std::string& hand_id,
                                     std::int64_t frame_count, const SegmentationConfig& cfg);

/// Segments grouped by hand (demonstration order), each group tiling every frame.
std::vector<Segment> segment(const InteractionTimeline& timeline, const Demonstration& demo,
                             const SegmentationConfig& cfg = {});

/// Throws CoverageGap unless the segments of each hand tile [0, frame_count).
void check_coverage(const std::vector<Segment>& segments, std::int64_t frame_count);

/// Frame-wise primitive agreement averaged over the hands of `truth`.
double segmentation_accuracy(const std::vector<Segment>& predicted, const std::vector<Segment>& truth,
                             std::int64_t frame_count);

std::string segments_to_json(const std::vector<Segment>& segments);

}  // namespace demograph
