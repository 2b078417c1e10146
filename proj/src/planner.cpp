#include "cadrobot/planner.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "cadrobot/error.hpp"

namespace cadrobot::planner {

using geometry::Transform;
using scene::SegmentKind;

std::string_view to_string(MotionKind kind) {
    switch (kind) {
        case MotionKind::joint: return "joint";
        case MotionKind::linear: return "linear";
        case MotionKind::circular_via: return "circular_via";
        case MotionKind::circular_end: return "circular_end";
        case MotionKind::spline_via: return "spline_via";
    }
    return "?";
}

bool PlannedPath::has_risk() const {
    for (bool r : segment_risk) {
        if (r) return true;
    }
    return false;
}

void check_distinct(const PlannedPath& path) {
    for (std::size_t i = 1; i < path.poses.size(); ++i) {
        const TargetPose& a = path.poses[i - 1];
        const TargetPose& b = path.poses[i];
        if (geometry::distance(a.position, b.position) <= kPoseDistanceTolerance &&
            geometry::rotation_angle(a.orientation, b.orientation) <= kPoseAngleTolerance) {
            std::ostringstream os;
            os << "path '" << path.name << "': poses " << i - 1 << " and " << i << " are identical";
            throw PlanError(os.str());
        }
    }
}

// ============================================================================
// Calibration rebase
// ============================================================================

scene::Scene rebase(const scene::Scene& in, std::string_view base) {
    const std::optional<Transform> base_pose = in.find_frame(base);
    if (!base_pose) {
        throw PlanError("unknown base frame '" + std::string(base) + "'");
    }
    // {B} <- {reference}: rotation Rᵀ, origin −Rᵀ·p.
    const Transform to_base = geometry::invert(*base_pose);

    scene::Scene out = in;
    out.reference = std::string(base);
    out.universe = geometry::compose(to_base, in.universe);
    for (scene::Frame& f : out.frames) {
        f.transform = f.name == base ? Transform::identity() : geometry::compose(to_base, f.transform);
    }
    for (scene::Path& p : out.paths) {
        for (scene::PathSegment& s : p.segments) {
            for (Vec3& pt : s.points) pt = geometry::apply(to_base, pt);
        }
    }
    return out;
}

// ============================================================================
// Orientation assignment
// ============================================================================

namespace {

MotionKind kind_for(SegmentKind seg, std::size_t point_index) {
    switch (seg) {
        case SegmentKind::line: return MotionKind::linear;
        case SegmentKind::arc: return point_index == 1 ? MotionKind::circular_via : MotionKind::circular_end;
        case SegmentKind::spline: return MotionKind::spline_via;
    }
    return MotionKind::linear;
}

}  // namespace

std::vector<PlannedPath> assign_orientations(const scene::Scene& rebased) {
    std::vector<PlannedPath> out;
    out.reserve(rebased.paths.size());
    for (const scene::Path& path : rebased.paths) {
        PlannedPath planned;
        planned.name = path.name;
        for (std::size_t si = 0; si < path.segments.size(); ++si) {
            const scene::PathSegment& seg = path.segments[si];
            const std::optional<Transform> tool = rebased.find_frame(seg.tool_frame);
            if (!tool) {
                std::ostringstream os;
                os << "path '" << path.name << "' segment " << si << ": dangling tool frame '"
                   << seg.tool_frame << "'";
                throw PlanError(os.str());
            }
            const Quaternion q = geometry::rotation_to_quaternion(tool->rotation);
            planned.segment_risk.push_back(seg.risk);
            if (si == 0) {
                planned.poses.push_back({seg.front(), q, MotionKind::joint, seg.speed, false});
                planned.source_segment.push_back(0);
            }
            for (std::size_t k = 1; k < seg.points.size(); ++k) {
                planned.poses.push_back({seg.points[k], q, kind_for(seg.kind, k), seg.speed, false});
                planned.source_segment.push_back(si);
            }
        }
        if (planned.poses.empty()) {
            throw PlanError("path '" + path.name + "' has no poses");
        }
        check_distinct(planned);
        out.push_back(std::move(planned));
    }
    return out;
}

// ============================================================================
// Risk-area interpolation
// ============================================================================

std::size_t section_intervals(double length, double v_mag, double dt) {
    if (!(v_mag > 0.0) || !(dt > 0.0)) throw PlanError("interpolation speed and time step must be > 0");
    const double ratio = length / (v_mag * dt);
    if (!std::isfinite(ratio) || ratio > 1e6) {
        throw PlanError("risk section needs too many interpolation points");
    }
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    return n < 1 ? 1 : n;
}

namespace {

PlannedPath interpolate(const PlannedPath& path, std::optional<double> v_mag, double dt) {
    if (!(dt > 0.0)) throw PlanError("interpolation time step must be > 0");
    if (v_mag && !(*v_mag > 0.0)) throw PlanError("interpolation speed must be > 0");

    const auto section_risky = [&](std::size_t i) {
        const std::size_t seg = path.source_segment[i];
        return seg < path.segment_risk.size() && path.segment_risk[seg];
    };

    PlannedPath out;
    out.name = path.name;
    out.segment_risk.assign(path.segment_risk.size(), false);
    if (path.poses.empty()) return out;

    out.poses.push_back(path.poses[0]);
    out.source_segment.push_back(path.source_segment[0]);

    std::size_t i = 1;
    while (i < path.poses.size()) {
        if (!section_risky(i)) {
            out.poses.push_back(path.poses[i]);
            out.source_segment.push_back(path.source_segment[i]);
            ++i;
            continue;
        }
        // Section i runs from pose i-1 to pose i; collect the maximal run.
        const std::size_t first = i;
        std::size_t last = i;
        while (last + 1 < path.poses.size() && section_risky(last + 1)) ++last;

        double total = 0.0;
        for (std::size_t s = first; s <= last; ++s) {
            const double len = geometry::distance(path.poses[s - 1].position, path.poses[s].position);
            if (len < kPoseDistanceTolerance) {
                std::ostringstream os;
                os << "path '" << path.name << "': zero-length section between poses " << s - 1 << " and " << s
                   << " inside a risk run";
                throw PlanError(os.str());
            }
            total += len;
        }

        const Quaternion entry = path.poses[first - 1].orientation;
        const Quaternion exit = path.poses[last].orientation;
        double travelled = 0.0;
        for (std::size_t s = first; s <= last; ++s) {
            const TargetPose& from = path.poses[s - 1];
            const TargetPose& to = path.poses[s];
            const Vec3 w = to.position - from.position;
            const double len = geometry::norm(w);
            const std::size_t n = section_intervals(len, v_mag.value_or(to.speed), dt);
            for (std::size_t k = 1; k <= n; ++k) {
                const bool section_end = k == n;
                const bool run_end = section_end && s == last;
                const double frac = static_cast<double>(k) / static_cast<double>(n);
                const Vec3 position = section_end ? to.position : from.position + w * frac;
                const double t = run_end ? 1.0 : (travelled + len * frac) / total;
                TargetPose pose;
                pose.position = position;
                pose.orientation = geometry::slerp(entry, exit, t);
                pose.motion_kind = MotionKind::linear;
                pose.speed = to.speed;
                pose.interpolated = true;
                out.poses.push_back(pose);
                out.source_segment.push_back(path.source_segment[s]);
            }
            travelled += len;
        }
        i = last + 1;
    }
    check_distinct(out);
    return out;
}

}  // namespace

PlannedPath interpolate_risk(const PlannedPath& path, double v_mag, double dt) {
    return interpolate(path, v_mag, dt);
}

PlannedPath interpolate_risk(const PlannedPath& path, double dt) { return interpolate(path, std::nullopt, dt); }

}  // namespace cadrobot::planner
