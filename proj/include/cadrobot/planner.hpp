#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cadrobot/geometry.hpp"
#include "cadrobot/scene.hpp"

namespace cadrobot::planner {

using geometry::Quaternion;
using geometry::Vec3;

enum class MotionKind { joint, linear, circular_via, circular_end, spline_via };

std::string_view to_string(MotionKind kind);

/// One robot target: position and orientation in the calibration frame.
struct TargetPose {
    Vec3 position;
    Quaternion orientation;
    MotionKind motion_kind = MotionKind::linear;
    double speed = 0.0;  // mm/s
    bool interpolated = false;

    bool operator==(const TargetPose&) const = default;
};

/// Poses closer than these count as identical.
inline constexpr double kPoseDistanceTolerance = 1e-6;  // mm
inline constexpr double kPoseAngleTolerance = 1e-7;     // rad

struct PlannedPath {
    std::string name;
    std::vector<TargetPose> poses;
    std::vector<std::size_t> source_segment;  // parallel to poses
    /// Risk flag per source segment; cleared by interpolate_risk.
    std::vector<bool> segment_risk;

    bool has_risk() const;
    bool operator==(const PlannedPath&) const = default;
};

/// Re-express every frame and point relative to `base`.  The base frame
/// becomes exactly the identity.  Throws PlanError for an unknown base.
scene::Scene rebase(const scene::Scene& scene, std::string_view base);

/// One PlannedPath per scene path.  Each pose takes the orientation of its
/// segment's tool frame; the first pose of a path is a joint approach move.
std::vector<PlannedPath> assign_orientations(const scene::Scene& rebased);

/// Replace every risk run with equally spaced linear poses (per straight
/// section, spacing close to v_mag * dt) and slerp the orientation from the
/// run's entry to its exit quaternion by arc-length fraction.  Poses outside
/// risk runs pass through untouched.
PlannedPath interpolate_risk(const PlannedPath& path, double v_mag, double dt);

/// As above, but each section is discretized with its own programmed speed.
PlannedPath interpolate_risk(const PlannedPath& path, double dt);

/// Interval count for one section of length `length`: max(1, round(length / (v_mag * dt))).
std::size_t section_intervals(double length, double v_mag, double dt);

/// Throws PlanError when two consecutive poses coincide.
void check_distinct(const PlannedPath& path);

}  // namespace cadrobot::planner
