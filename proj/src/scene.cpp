#include "cadrobot/scene.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cadrobot::scene {

using json = nlohmann::json;
using geometry::Quaternion;
using geometry::RotationMatrix;

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::line: return "line";
        case SegmentKind::arc: return "arc";
        case SegmentKind::spline: return "spline";
    }
    return "?";
}

std::string_view to_string(Diagnostic::Kind kind) {
    switch (kind) {
        case Diagnostic::Kind::point_count: return "point count";
        case Diagnostic::Kind::duplicate_point: return "duplicate point";
        case Diagnostic::Kind::chain_break: return "chain break";
        case Diagnostic::Kind::dangling_tool_frame: return "dangling tool frame";
        case Diagnostic::Kind::bad_speed: return "bad speed";
        case Diagnostic::Kind::empty_path: return "empty path";
        case Diagnostic::Kind::no_frames: return "no frames";
        case Diagnostic::Kind::duplicate_name: return "duplicate name";
        case Diagnostic::Kind::bad_workspace: return "bad workspace";
        case Diagnostic::Kind::non_finite: return "non-finite value";
    }
    return "?";
}

SceneError::SceneError(Kind kind, const std::string& message, std::size_t line, std::size_t column)
    : Error("scene", message), kind_(kind), line_(line), column_(column) {}

std::optional<Transform> Scene::find_frame(std::string_view name) const {
    if (name == reference) return Transform::identity();
    for (const Frame& f : frames) {
        if (f.name == name) return f.transform;
    }
    if (name == kUniverseFrame) return universe;
    return std::nullopt;
}

// ============================================================================
// Validation
// ============================================================================

namespace {

std::size_t expected_points(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::line: return 2;
        case SegmentKind::arc: return 3;
        case SegmentKind::spline: return 3;  // minimum
    }
    return 0;
}

std::string where(const Path& p, std::size_t pi, std::size_t si) {
    std::ostringstream os;
    os << "path '" << p.name << "' (#" << pi << ") segment " << si;
    return os.str();
}

}  // namespace

std::vector<Diagnostic> validate_chain(const Scene& scene) {
    std::vector<Diagnostic> out;
    using K = Diagnostic::Kind;

    if (scene.frames.empty()) {
        out.push_back({K::no_frames, {}, {}, "scene declares no frames besides U"});
    }
    std::set<std::string> names;
    for (const Frame& f : scene.frames) {
        if (!names.insert(f.name).second) {
            out.push_back({K::duplicate_name, {}, {}, "duplicate frame name '" + f.name + "'"});
        }
    }
    if (scene.workspace) {
        const Box& b = *scene.workspace;
        if (!b.min.finite() || !b.max.finite() || b.min.x > b.max.x || b.min.y > b.max.y ||
            b.min.z > b.max.z) {
            out.push_back({K::bad_workspace, {}, {}, "workspace min must not exceed max on any axis"});
        }
    }

    for (std::size_t pi = 0; pi < scene.paths.size(); ++pi) {
        const Path& path = scene.paths[pi];
        if (path.segments.empty()) {
            out.push_back({K::empty_path, pi, {}, "path '" + path.name + "' has no segments"});
            continue;
        }
        for (std::size_t si = 0; si < path.segments.size(); ++si) {
            const PathSegment& seg = path.segments[si];
            const std::size_t want = expected_points(seg.kind);
            const bool count_ok = seg.kind == SegmentKind::spline ? seg.points.size() >= want
                                                                  : seg.points.size() == want;
            if (!count_ok) {
                std::ostringstream os;
                os << where(path, pi, si) << ": " << to_string(seg.kind) << " needs "
                   << (seg.kind == SegmentKind::spline ? "at least " : "exactly ") << want
                   << " points, got " << seg.points.size();
                out.push_back({K::point_count, pi, si, os.str()});
            }
            bool finite = true;
            for (const Vec3& p : seg.points) finite = finite && p.finite();
            if (!finite) {
                out.push_back({K::non_finite, pi, si, where(path, pi, si) + ": non-finite point"});
            } else {
                for (std::size_t k = 1; k < seg.points.size(); ++k) {
                    if (geometry::distance(seg.points[k - 1], seg.points[k]) <= kChainTolerance) {
                        std::ostringstream os;
                        os << where(path, pi, si) << ": points " << k - 1 << " and " << k
                           << " coincide";
                        out.push_back({K::duplicate_point, pi, si, os.str()});
                    }
                }
            }
            if (!scene.find_frame(seg.tool_frame)) {
                out.push_back({K::dangling_tool_frame, pi, si,
                               where(path, pi, si) + ": unknown tool frame '" + seg.tool_frame + "'"});
            }
            if (!(seg.speed > 0.0) || !std::isfinite(seg.speed)) {
                out.push_back({K::bad_speed, pi, si, where(path, pi, si) + ": speed must be > 0"});
            }
            if (si + 1 < path.segments.size()) {
                const PathSegment& next = path.segments[si + 1];
                if (!seg.points.empty() && !next.points.empty()) {
                    const double gap = geometry::distance(seg.back(), next.front());
                    if (!(gap <= kChainTolerance)) {
                        std::ostringstream os;
                        os << "path '" << path.name << "' (#" << pi << "): chain break between segments "
                           << si << " and " << si + 1 << " (gap " << gap << " mm)";
                        out.push_back({K::chain_break, pi, si, os.str()});
                    }
                }
            }
        }
    }
    return out;
}

// ============================================================================
// Parsing
// ============================================================================

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw SceneError(SceneError::Kind::schema, msg); }

void check_keys(const json& obj, const std::string& ctx, std::initializer_list<std::string_view> allowed,
                std::initializer_list<std::string_view> required) {
    if (!obj.is_object()) schema_error(ctx + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            schema_error(ctx + ": unknown key '" + key + "'");
        }
    }
    for (std::string_view key : required) {
        if (!obj.contains(key)) schema_error(ctx + ": missing key '" + std::string(key) + "'");
    }
}

double number(const json& j, const std::string& ctx) {
    if (!j.is_number()) schema_error(ctx + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema_error(ctx + ": number is not finite");
    return v;
}

Vec3 vec3(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 3) schema_error(ctx + ": expected [x, y, z]");
    return {number(j[0], ctx), number(j[1], ctx), number(j[2], ctx)};
}

std::string string_field(const json& j, const std::string& ctx) {
    if (!j.is_string()) schema_error(ctx + ": expected a string");
    return j.get<std::string>();
}

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

RotationMatrix rotation(const json& j, const std::string& ctx) {
    if (j.is_object()) {
        check_keys(j, ctx, {"quat"}, {"quat"});
        const json& q = j["quat"];
        if (!q.is_array() || q.size() != 4) schema_error(ctx + ": quat must be [w, x, y, z]");
        try {
            return geometry::quaternion_to_rotation(Quaternion::normalized(
                number(q[0], ctx), number(q[1], ctx), number(q[2], ctx), number(q[3], ctx)));
        } catch (const ValidationError& e) {
            throw SceneError(SceneError::Kind::invariant, ctx + ": " + e.what());
        }
    }
    if (!j.is_array() || j.size() != 3) schema_error(ctx + ": rotation must be a 3x3 matrix or {\"quat\": [...]}");
    RotationMatrix::Entries m{};
    for (std::size_t r = 0; r < 3; ++r) {
        if (!j[r].is_array() || j[r].size() != 3) schema_error(ctx + ": rotation rows must have 3 entries");
        for (std::size_t c = 0; c < 3; ++c) m[r * 3 + c] = number(j[r][c], ctx);
    }
    try {
        return RotationMatrix(m);
    } catch (const ValidationError& e) {
        throw SceneError(SceneError::Kind::invariant, ctx + ": " + e.what());
    }
}

SegmentKind segment_kind(const json& j, const std::string& ctx) {
    const std::string s = string_field(j, ctx);
    if (s == "line") return SegmentKind::line;
    if (s == "arc") return SegmentKind::arc;
    if (s == "spline") return SegmentKind::spline;
    schema_error(ctx + ": unknown segment kind '" + s + "'");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Scene parse_scene(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // nlohmann reports the 1-based byte index of the offending character.
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream os;
        os << "syntax error at line " << line << ", column " << col << ": " << e.what();
        throw SceneError(SceneError::Kind::syntax, os.str(), line, col);
    }

    check_keys(root, "scene", {"units", "frames", "workspace", "paths"}, {"units", "frames", "paths"});

    Scene scene;
    scene.units = string_field(root["units"], "units");
    if (scene.units != "mm") schema_error("units must be \"mm\", got \"" + scene.units + "\"");

    const json& frames = root["frames"];
    if (!frames.is_array()) schema_error("frames: expected an array");
    std::set<std::string> frame_names;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string ctx = "frames[" + std::to_string(i) + "]";
        check_keys(frames[i], ctx, {"name", "rotation", "origin"}, {"name", "rotation", "origin"});
        Frame f;
        f.name = string_field(frames[i]["name"], ctx + ".name");
        if (!is_identifier(f.name)) schema_error(ctx + ": frame name '" + f.name + "' is not an identifier");
        if (f.name == kUniverseFrame) schema_error(ctx + ": frame name 'U' is reserved for the universe frame");
        if (!frame_names.insert(f.name).second) schema_error("duplicate frame name '" + f.name + "'");
        const std::string fctx = "frame '" + f.name + "'";
        f.transform = Transform(rotation(frames[i]["rotation"], fctx + " rotation"),
                                vec3(frames[i]["origin"], fctx + " origin"));
        scene.frames.push_back(std::move(f));
    }

    if (root.contains("workspace")) {
        const json& ws = root["workspace"];
        check_keys(ws, "workspace", {"min", "max"}, {"min", "max"});
        scene.workspace = Box{vec3(ws["min"], "workspace.min"), vec3(ws["max"], "workspace.max")};
    }

    const json& paths = root["paths"];
    if (!paths.is_array()) schema_error("paths: expected an array");
    std::set<std::string> path_names;
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
        const std::string ctx = "paths[" + std::to_string(pi) + "]";
        check_keys(paths[pi], ctx, {"name", "segments"}, {"name", "segments"});
        Path path;
        path.name = string_field(paths[pi]["name"], ctx + ".name");
        if (!is_identifier(path.name)) schema_error(ctx + ": path name '" + path.name + "' is not an identifier");
        if (!path_names.insert(path.name).second) schema_error("duplicate path name '" + path.name + "'");
        const json& segs = paths[pi]["segments"];
        if (!segs.is_array()) schema_error(ctx + ".segments: expected an array");
        for (std::size_t si = 0; si < segs.size(); ++si) {
            const std::string sctx = "path '" + path.name + "' segment " + std::to_string(si);
            check_keys(segs[si], sctx, {"kind", "points", "tool_frame", "risk", "speed"},
                       {"kind", "points", "tool_frame", "speed"});
            PathSegment seg;
            seg.kind = segment_kind(segs[si]["kind"], sctx + ".kind");
            const json& pts = segs[si]["points"];
            if (!pts.is_array()) schema_error(sctx + ".points: expected an array");
            for (const json& p : pts) seg.points.push_back(vec3(p, sctx + ".points"));
            seg.tool_frame = string_field(segs[si]["tool_frame"], sctx + ".tool_frame");
            if (segs[si].contains("risk")) {
                if (!segs[si]["risk"].is_boolean()) schema_error(sctx + ".risk: expected a boolean");
                seg.risk = segs[si]["risk"].get<bool>();
            }
            seg.speed = number(segs[si]["speed"], sctx + ".speed");
            path.segments.push_back(std::move(seg));
        }
        scene.paths.push_back(std::move(path));
    }

    const auto diags = validate_chain(scene);
    if (!diags.empty()) {
        std::string msg;
        for (const auto& d : diags) {
            if (!msg.empty()) msg += "; ";
            msg += d.message;
        }
        throw SceneError(SceneError::Kind::invariant, msg);
    }
    return scene;
}

// ============================================================================
// Serialization
// ============================================================================

std::string serialize_scene(const Scene& scene) {
    using ojson = nlohmann::ordered_json;
    auto vec = [](const Vec3& v) { return ojson::array({v.x, v.y, v.z}); };

    ojson root;
    root["units"] = scene.units;
    root["frames"] = ojson::array();
    for (const Frame& f : scene.frames) {
        ojson rot = ojson::array();
        for (int r = 0; r < 3; ++r) {
            rot.push_back(ojson::array({f.transform.rotation(r, 0), f.transform.rotation(r, 1),
                                        f.transform.rotation(r, 2)}));
        }
        ojson fj;
        fj["name"] = f.name;
        fj["rotation"] = std::move(rot);
        fj["origin"] = vec(f.transform.origin);
        root["frames"].push_back(std::move(fj));
    }
    if (scene.workspace) {
        root["workspace"] = {{"min", vec(scene.workspace->min)}, {"max", vec(scene.workspace->max)}};
    }
    root["paths"] = ojson::array();
    for (const Path& p : scene.paths) {
        ojson pj;
        pj["name"] = p.name;
        pj["segments"] = ojson::array();
        for (const PathSegment& s : p.segments) {
            ojson sj;
            sj["kind"] = std::string(to_string(s.kind));
            sj["points"] = ojson::array();
            for (const Vec3& pt : s.points) sj["points"].push_back(vec(pt));
            sj["tool_frame"] = s.tool_frame;
            sj["risk"] = s.risk;
            sj["speed"] = s.speed;
            pj["segments"].push_back(std::move(sj));
        }
        root["paths"].push_back(std::move(pj));
    }
    return root.dump(2) + "\n";
}

}  // namespace cadrobot::scene
