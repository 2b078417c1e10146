#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadrobot/error.hpp"
#include "cadrobot/geometry.hpp"

namespace cadrobot::scene {

using geometry::Transform;
using geometry::Vec3;

/// Name of the implicit CAD assembly origin.  Always resolvable; never declared.
inline constexpr std::string_view kUniverseFrame = "U";

/// Consecutive points closer than this are "the same point"; also the
/// segment-chaining tolerance.
inline constexpr double kChainTolerance = 1e-6;

struct Frame {
    std::string name;
    Transform transform;  // pose relative to the scene's reference frame

    bool operator==(const Frame&) const = default;
};

enum class SegmentKind { line, arc, spline };

std::string_view to_string(SegmentKind kind);

struct PathSegment {
    SegmentKind kind = SegmentKind::line;
    std::vector<Vec3> points;  // line: 2, arc: start/via/end, spline: >= 3 via-points
    std::string tool_frame;
    bool risk = false;
    double speed = 0.0;  // mm/s

    const Vec3& front() const { return points.front(); }
    const Vec3& back() const { return points.back(); }

    bool operator==(const PathSegment&) const = default;
};

struct Path {
    std::string name;
    std::vector<PathSegment> segments;

    bool operator==(const Path&) const = default;
};

/// Axis-aligned box, inclusive bounds.
struct Box {
    Vec3 min;
    Vec3 max;

    bool operator==(const Box&) const = default;
};

struct Scene {
    std::string units = "mm";
    std::vector<Frame> frames;
    std::vector<Path> paths;
    /// Expressed in the universe frame {U}, whatever the scene's reference.
    std::optional<Box> workspace;

    /// Frame all coordinates are expressed in.  "U" for a parsed scene; the
    /// calibration frame name after rebasing.
    std::string reference = std::string(kUniverseFrame);
    /// Pose of {U} relative to the reference frame.
    Transform universe;

    /// Pose of `name` relative to the reference frame, or nullopt if unknown.
    /// Resolves the reference frame and "U" even when not declared.
    std::optional<Transform> find_frame(std::string_view name) const;

    bool operator==(const Scene&) const = default;
};

struct Diagnostic {
    enum class Kind { point_count, duplicate_point, chain_break, dangling_tool_frame, bad_speed,
                      empty_path, no_frames, duplicate_name, bad_workspace, non_finite };

    Kind kind;
    std::optional<std::size_t> path;     // path index
    std::optional<std::size_t> segment;  // segment index within the path
    std::string message;
};

std::string_view to_string(Diagnostic::Kind kind);

/// Parse failure.  `kind()` separates malformed text, schema misuse, and
/// invariant violations; `line()`/`column()` are set for syntax errors only.
class SceneError : public Error {
public:
    enum class Kind { syntax, schema, invariant };

    SceneError(Kind kind, const std::string& message, std::size_t line = 0, std::size_t column = 0);

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

/// Parse and fully validate scene JSON.  Throws SceneError; never returns a
/// partially valid scene.
Scene parse_scene(std::string_view text);

/// One diagnostic per violated scene invariant; empty iff the scene is valid.
std::vector<Diagnostic> validate_chain(const Scene& scene);

/// Serialize back to scene JSON.  Rotations are written as full-precision
/// matrices so that parse_scene(serialize_scene(s)) == s.
std::string serialize_scene(const Scene& scene);

}  // namespace cadrobot::scene
