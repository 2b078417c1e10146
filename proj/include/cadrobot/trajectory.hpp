#pragma once

#include <vector>

#include "cadrobot/geometry.hpp"
#include "cadrobot/program.hpp"

namespace cadrobot::sim {

using geometry::Vec3;

/// Local frame along the path: x is the travel direction, z the component of
/// the reference "up" axis orthogonal to it, y = z × x.
struct PathFrame {
    Vec3 x{1, 0, 0};
    Vec3 y{0, 1, 0};
    Vec3 z{0, 0, 1};
};

PathFrame path_frame(const Vec3& travel);

struct TrajectorySample {
    Vec3 position;
    Vec3 tangent;  // unit
};

/// Cartesian motion that replays a program's moves at their programmed
/// speeds.  MOVEJ and MOVEL are straight lines, MOVEC the circle through the
/// current point, via and end, and MOVES passes straight through its via points.
class Trajectory {
public:
    explicit Trajectory(const program::RobotProgram& program);

    double duration() const { return duration_; }
    double length() const;

    /// Position at time `t` seconds; holds the final pose after the end.
    TrajectorySample at(double t) const;

    /// Vertices densely covering the path (arcs chorded to < 1e-4 mm sagitta).
    std::vector<Vec3> polyline() const;

private:
    struct Piece {
        bool arc = false;
        Vec3 start, end;
        Vec3 center, u, v;  // arc basis: point(phi) = center + r (cos phi u + sin phi v)
        double radius = 0.0;
        double sweep = 0.0;
        double length = 0.0;
        double speed = 0.0;
        double t0 = 0.0;  // start time

        TrajectorySample sample(double s) const;
    };

    void add_line(const Vec3& to, double speed);
    void add_arc(const Vec3& via, const Vec3& to, double speed);

    std::vector<Piece> pieces_;
    Vec3 start_;
    Vec3 current_;
    double duration_ = 0.0;
};

/// Closest point on a polyline; `distance` is |closest − p|.
struct ClosestPoint {
    Vec3 point;
    double distance = 0.0;
};

ClosestPoint closest_point(const std::vector<Vec3>& polyline, const Vec3& p);

}  // namespace cadrobot::sim
