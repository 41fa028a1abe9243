#include "demograph/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "demograph/errors.hpp"

namespace demograph {

using ojson = nlohmann::ordered_json;

namespace {

bool angle_in_range(double a) { return std::isfinite(a) && a > -std::numbers::pi && a <= std::numbers::pi; }

}  // namespace

bool is_valid_pose(const Pose6D& pose) {
    return pose.position.finite() && angle_in_range(pose.orientation.x) &&
           angle_in_range(pose.orientation.y) && angle_in_range(pose.orientation.z);
}

const char* to_string(EntityClass cls) {
    switch (cls) {
        case EntityClass::HandLeft: return "HandLeft";
        case EntityClass::HandRight: return "HandRight";
        case EntityClass::Object: return "Object";
    }
    return "Object";
}

std::optional<EntityClass> parse_entity_class(const std::string& text) {
    if (text == "HandLeft") return EntityClass::HandLeft;
    if (text == "HandRight") return EntityClass::HandRight;
    if (text == "Object") return EntityClass::Object;
    return std::nullopt;
}

std::vector<double> EntityTrack::axis(std::size_t a) const {
    std::vector<double> out;
    out.reserve(poses.size());
    for (const auto& p : poses) out.push_back(p.position[a]);
    return out;
}

Demonstration::Demonstration(std::vector<EntityTrack> tracks, double frame_rate)
    : tracks_(std::move(tracks)), frame_rate_(frame_rate), frame_count_(0) {
    if (tracks_.empty()) fail(ErrorCode::InvalidDemonstration, "demonstration has no tracks");
    if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_))
        fail(ErrorCode::InvalidDemonstration, "frame_rate must be positive and finite");

    std::set<std::string> seen;
    bool any_hand = false;
    for (const auto& t : tracks_) {
        if (t.id.empty()) fail(ErrorCode::InvalidDemonstration, "empty entity id");
        if (!seen.insert(t.id).second) fail(ErrorCode::InvalidDemonstration, "duplicate entity id '" + t.id + "'");
        if (t.poses.empty()) fail(ErrorCode::InvalidDemonstration, "track '" + t.id + "' has no poses");
        any_hand = any_hand || t.is_hand();
    }
    if (!any_hand) fail(ErrorCode::InvalidDemonstration, "demonstration has no hand track");

    const std::size_t longest = std::max_element(tracks_.begin(), tracks_.end(), [](const auto& a, const auto& b) {
                                    return a.poses.size() < b.poses.size();
                                })->poses.size();
    std::vector<std::string> offending;
    for (const auto& t : tracks_)
        if (t.poses.size() != longest) offending.push_back(t.id);
    if (!offending.empty()) throw UnequalTrackLength(offending);

    for (const auto& t : tracks_)
        for (std::size_t k = 0; k < t.poses.size(); ++k)
            if (!is_valid_pose(t.poses[k]))
                fail(ErrorCode::InvalidDemonstration,
                     "track '" + t.id + "' frame " + std::to_string(k) + " has a non-finite or out-of-range pose");
    frame_count_ = static_cast<std::int64_t>(longest);
}

const EntityTrack* Demonstration::find(const std::string& id) const {
    for (const auto& t : tracks_)
        if (t.id == id) return &t;
    return nullptr;
}

const EntityTrack& Demonstration::at(const std::string& id) const {
    const auto* t = find(id);
    if (t == nullptr) fail(ErrorCode::UnknownEntity, "no entity '" + id + "'");
    return *t;
}

std::vector<const EntityTrack*> Demonstration::hands() const {
    std::vector<const EntityTrack*> out;
    for (const auto& t : tracks_)
        if (t.is_hand()) out.push_back(&t);
    return out;
}

std::vector<const EntityTrack*> Demonstration::objects() const {
    std::vector<const EntityTrack*> out;
    for (const auto& t : tracks_)
        if (!t.is_hand()) out.push_back(&t);
    return out;
}

const EntityTrack* Demonstration::hand(EntityClass side) const {
    for (const auto& t : tracks_)
        if (t.cls == side) return &t;
    return nullptr;
}

// ---------------------------------------------------------------------------
// JSONL encoding

namespace {

struct Header {
    double frame_rate = 0.0;
    std::vector<std::pair<std::string, EntityClass>> entities;
};

Header parse_header(const std::string& line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw SchemaViolation(1, "header", e.what());
    }
    if (!j.is_object()) throw SchemaViolation(1, "header", "expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "frame_rate" && key != "entities") throw SchemaViolation(1, key, "unknown header key");

    Header h;
    if (!j.contains("frame_rate") || !j["frame_rate"].is_number())
        throw SchemaViolation(1, "frame_rate", "missing or not a number");
    h.frame_rate = j["frame_rate"].get<double>();
    if (!(h.frame_rate > 0.0) || !std::isfinite(h.frame_rate))
        throw SchemaViolation(1, "frame_rate", "must be positive");

    if (!j.contains("entities") || !j["entities"].is_array() || j["entities"].empty())
        throw SchemaViolation(1, "entities", "missing or empty array");
    std::set<std::string> seen;
    for (const auto& e : j["entities"]) {
        if (!e.is_object() || !e.contains("id") || !e["id"].is_string())
            throw SchemaViolation(1, "entities.id", "entity without string id");
        if (!e.contains("class") || !e["class"].is_string())
            throw SchemaViolation(1, "entities.class", "entity without string class");
        const auto id = e["id"].get<std::string>();
        const auto cls = parse_entity_class(e["class"].get<std::string>());
        if (!cls) throw SchemaViolation(1, "entities.class", "unknown class '" + e["class"].get<std::string>() + "'");
        if (id.empty() || !seen.insert(id).second) throw SchemaViolation(1, "entities.id", "empty or duplicate id '" + id + "'");
        h.entities.emplace_back(id, *cls);
    }
    return h;
}

Pose6D parse_pose(const ojson& arr, std::size_t line, const std::string& field) {
    if (!arr.is_array() || arr.size() != 6) throw SchemaViolation(line, field, "expected [x,y,z,roll,pitch,yaw]");
    double v[6];
    for (std::size_t i = 0; i < 6; ++i) {
        if (!arr[i].is_number()) throw SchemaViolation(line, field, "non-numeric pose component");
        v[i] = arr[i].get<double>();
    }
    Pose6D p{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    if (!is_valid_pose(p)) throw SchemaViolation(line, field, "non-finite pose or angle outside (-pi, pi]");
    return p;
}

}  // namespace

Demonstration parse_demonstration(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::optional<Header> header;
    std::vector<std::vector<Pose6D>> poses;
    std::vector<bool> ended;  // track stopped appearing; may not reappear
    std::int64_t expected_k = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!header) {
            if (line_no != 1) throw SchemaViolation(line_no, "header", "header must be the first line");
            header = parse_header(line);
            poses.resize(header->entities.size());
            ended.assign(header->entities.size(), false);
            continue;
        }
        ojson j;
        try {
            j = ojson::parse(line);
        } catch (const ojson::parse_error& e) {
            throw SchemaViolation(line_no, "frame", e.what());
        }
        if (!j.is_object()) throw SchemaViolation(line_no, "frame", "expected a JSON object");
        for (const auto& [key, _] : j.items())
            if (key != "k" && key != "poses") throw SchemaViolation(line_no, key, "unknown frame key");
        if (!j.contains("k") || !j["k"].is_number_integer()) throw SchemaViolation(line_no, "k", "missing or not an integer");
        if (j["k"].get<std::int64_t>() != expected_k)
            throw SchemaViolation(line_no, "k", "expected frame index " + std::to_string(expected_k));
        if (!j.contains("poses") || !j["poses"].is_object()) throw SchemaViolation(line_no, "poses", "missing or not an object");
        const auto& pj = j["poses"];
        for (const auto& [key, _] : pj.items()) {
            const bool declared = std::any_of(header->entities.begin(), header->entities.end(),
                                              [&](const auto& e) { return e.first == key; });
            if (!declared) throw SchemaViolation(line_no, "poses." + key, "undeclared entity");
        }
        for (std::size_t i = 0; i < header->entities.size(); ++i) {
            const auto& id = header->entities[i].first;
            if (!pj.contains(id)) {
                ended[i] = true;
                continue;
            }
            if (ended[i]) throw SchemaViolation(line_no, "poses." + id, "entity missing from an earlier frame");
            poses[i].push_back(parse_pose(pj[id], line_no, "poses." + id));
        }
        ++expected_k;
    }
    if (!header) throw SchemaViolation(1, "header", "empty file");

    std::vector<EntityTrack> tracks;
    for (std::size_t i = 0; i < header->entities.size(); ++i)
        tracks.push_back({header->entities[i].first, header->entities[i].second, std::move(poses[i])});
    for (const auto& t : tracks)
        if (t.poses.empty()) throw SchemaViolation(line_no, "poses." + t.id, "entity has no frames");
    return Demonstration(std::move(tracks), header->frame_rate);
}

std::string serialize_demonstration(const Demonstration& demo) {
    std::string out;
    ojson header;
    header["frame_rate"] = demo.frame_rate();
    header["entities"] = ojson::array();
    for (const auto& t : demo.tracks()) header["entities"].push_back({{"id", t.id}, {"class", to_string(t.cls)}});
    out += header.dump();
    out += '\n';
    for (std::int64_t k = 0; k < demo.frame_count(); ++k) {
        ojson frame;
        frame["k"] = k;
        ojson poses = ojson::object();
        for (const auto& t : demo.tracks()) {
            const auto& p = t.poses[static_cast<std::size_t>(k)];
            poses[t.id] = {p.position.x, p.position.y, p.position.z, p.orientation.x, p.orientation.y, p.orientation.z};
        }
        frame["poses"] = std::move(poses);
        out += frame.dump();
        out += '\n';
    }
    return out;
}

Demonstration load_demonstration(const std::filesystem::path& path) {
    return parse_demonstration(read_file(path));
}

void save_demonstration(const Demonstration& demo, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_demonstration(demo));
}

std::string read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorCode::MissingFile, path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(ErrorCode::IoFailure, "read error on " + path.string());
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) fail(ErrorCode::IoFailure, "write failed on " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::IoFailure, "cannot rename into " + path.string());
    }
}

}  // namespace demograph
