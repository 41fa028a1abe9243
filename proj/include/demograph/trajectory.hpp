#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace demograph {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator[](std::size_t axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Position in meters, orientation as roll/pitch/yaw in radians, each in (-pi, pi].
struct Pose6D {
    Vec3 position;
    Vec3 orientation;

    friend bool operator==(const Pose6D&, const Pose6D&) = default;
};

bool is_valid_pose(const Pose6D& pose);

enum class EntityClass { HandLeft, HandRight, Object };

const char* to_string(EntityClass cls);
std::optional<EntityClass> parse_entity_class(const std::string& text);
inline bool is_hand(EntityClass cls) { return cls != EntityClass::Object; }

struct EntityTrack {
    std::string id;
    EntityClass cls = EntityClass::Object;
    std::vector<Pose6D> poses;

    bool is_hand() const { return demograph::is_hand(cls); }
    const Vec3& position(std::int64_t frame) const { return poses[static_cast<std::size_t>(frame)].position; }
    /// One coordinate of the position trace (0 = x, 1 = y, 2 = z).
    std::vector<double> axis(std::size_t axis) const;

    friend bool operator==(const EntityTrack&, const EntityTrack&) = default;
};

/// A uniformly sampled demonstration. Time is implicit: frame / frame_rate.
/// Instances are validated on construction and immutable afterwards.
class Demonstration {
public:
    Demonstration(std::vector<EntityTrack> tracks, double frame_rate);

    const std::vector<EntityTrack>& tracks() const { return tracks_; }
    double frame_rate() const { return frame_rate_; }
    std::int64_t frame_count() const { return frame_count_; }

    const EntityTrack* find(const std::string& id) const;
    /// Throws UnknownEntity.
    const EntityTrack& at(const std::string& id) const;
    std::vector<const EntityTrack*> hands() const;
    std::vector<const EntityTrack*> objects() const;
    const EntityTrack* hand(EntityClass side) const;

    friend bool operator==(const Demonstration&, const Demonstration&) = default;

private:
    std::vector<EntityTrack> tracks_;
    double frame_rate_;
    std::int64_t frame_count_;
};

Demonstration load_demonstration(const std::filesystem::path& path);
Demonstration parse_demonstration(const std::string& text);
std::string serialize_demonstration(const Demonstration& demo);
void save_demonstration(const Demonstration& demo, const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace demograph
