#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "demograph/errors.hpp"
#include "demograph/trajectory.hpp"

namespace fixtures {

using demograph::EntityClass;
using demograph::EntityTrack;
using demograph::Vec3;

inline EntityTrack track(const std::string& id, EntityClass cls, const std::vector<Vec3>& positions) {
    EntityTrack t{id, cls, {}};
    for (const auto& p : positions) t.poses.push_back({p, {0.0, 0.0, 0.0}});
    return t;
}

inline EntityTrack still(const std::string& id, EntityClass cls, std::size_t n, Vec3 p) {
    return track(id, cls, std::vector<Vec3>(n, p));
}

inline EntityTrack traced(const std::string& id, EntityClass cls, std::size_t n, const std::function<Vec3(std::size_t)>& f) {
    std::vector<Vec3> ps;
    for (std::size_t k = 0; k < n; ++k) ps.push_back(f(k));
    return track(id, cls, ps);
}

inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "demograph_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

template <typename F>
demograph::ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const demograph::Error& e) {
        return e.code();
    }
    return static_cast<demograph::ErrorCode>(-1);
}

}  // namespace fixtures
