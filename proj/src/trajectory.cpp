#include "cadrobot/trajectory.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>

namespace cadrobot::sim {

using geometry::cross;
using geometry::dot;
using geometry::norm;

PathFrame path_frame(const Vec3& travel) {
    PathFrame f;
    f.x = geometry::normalized(travel);
    Vec3 y = cross(Vec3{0, 0, 1}, f.x);
    if (norm(y) < 1e-9) {
        // Travelling vertically: fall back to the reference x axis.
        y = cross(f.x, Vec3{1, 0, 0});
    }
    f.y = geometry::normalized(y);
    f.z = cross(f.x, f.y);
    return f;
}

TrajectorySample Trajectory::Piece::sample(double s) const {
    if (!arc) {
        const Vec3 d = end - start;
        return {start + d * (s / length), d / length};
    }
    const double phi = s / radius;
    const double c = std::cos(phi), sn = std::sin(phi);
    return {center + (u * c + v * sn) * radius, u * -sn + v * c};
}

Trajectory::Trajectory(const program::RobotProgram& program) {
    program::validate(program);
    if (program.targets.size() < 2 || program.instructions.empty()) {
        throw program::ProgramError("program needs at least two targets to simulate");
    }
    const auto position = [&](const std::string& name) { return program.find(name)->position; };

    const program::Instruction& first = program.instructions.front();
    if (first.opcode == program::Opcode::MOVEC) {
        throw program::ProgramError("program must start with a point-to-point move");
    }
    start_ = current_ = position(first.targets.front());

    for (std::size_t i = 1; i < program.instructions.size(); ++i) {
        const program::Instruction& ins = program.instructions[i];
        if (ins.opcode == program::Opcode::MOVEC) {
            add_arc(position(ins.targets[0]), position(ins.targets[1]), ins.speed);
        } else {
            add_line(position(ins.targets[0]), ins.speed);
        }
    }
    if (pieces_.empty()) {
        throw program::ProgramError("program has no motion to simulate");
    }
}

void Trajectory::add_line(const Vec3& to, double speed) {
    const double len = geometry::distance(current_, to);
    if (len < 1e-9) return;
    Piece p;
    p.start = current_;
    p.end = to;
    p.length = len;
    p.speed = speed;
    p.t0 = duration_;
    duration_ += len / speed;
    pieces_.push_back(p);
    current_ = to;
}

void Trajectory::add_arc(const Vec3& via, const Vec3& to, double speed) {
    const Vec3 a = current_ - to;
    const Vec3 b = via - to;
    const Vec3 axb = cross(a, b);
    const double axb2 = dot(axb, axb);
    if (axb2 < 1e-12 * dot(a, a) * dot(b, b) || axb2 == 0.0) {
        add_line(via, speed);
        add_line(to, speed);
        return;
    }
    // Circumcenter of (current, via, to).
    const Vec3 center = to + cross(b * dot(a, a) - a * dot(b, b), axb) / (2.0 * axb2);
    const Vec3 n = geometry::normalized(cross(via - current_, to - current_));
    Piece p;
    p.arc = true;
    p.start = current_;
    p.end = to;
    p.center = center;
    p.radius = geometry::distance(current_, center);
    p.u = (current_ - center) / p.radius;
    p.v = cross(n, p.u);
    const Vec3 rel = to - center;
    double sweep = std::atan2(dot(rel, p.v), dot(rel, p.u));
    if (sweep <= 0.0) sweep += 2.0 * std::numbers::pi;
    p.sweep = sweep;
    p.length = p.radius * sweep;
    p.speed = speed;
    p.t0 = duration_;
    duration_ += p.length / speed;
    pieces_.push_back(p);
    current_ = to;
}

double Trajectory::length() const {
    double l = 0.0;
    for (const Piece& p : pieces_) l += p.length;
    return l;
}

TrajectorySample Trajectory::at(double t) const {
    if (t <= 0.0) return {start_, pieces_.front().sample(0.0).tangent};
    for (const Piece& p : pieces_) {
        const double dt = p.length / p.speed;
        if (t < p.t0 + dt) return p.sample((t - p.t0) * p.speed);
    }
    const Piece& last = pieces_.back();
    return {last.end, last.sample(last.length).tangent};
}

std::vector<Vec3> Trajectory::polyline() const {
    std::vector<Vec3> out{start_};
    for (const Piece& p : pieces_) {
        if (p.arc) {
            const double step = std::sqrt(8.0 * 1e-4 / p.radius);
            const auto n = static_cast<std::size_t>(std::ceil(p.sweep / step));
            for (std::size_t k = 1; k < n; ++k) {
                out.push_back(p.sample(p.length * static_cast<double>(k) / static_cast<double>(n)).position);
            }
        }
        out.push_back(p.end);
    }
    return out;
}

ClosestPoint closest_point(const std::vector<Vec3>& polyline, const Vec3& p) {
    ClosestPoint best{polyline.front(), geometry::distance(polyline.front(), p)};
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const Vec3& a = polyline[i - 1];
        const Vec3 d = polyline[i] - a;
        const double len2 = dot(d, d);
        double s = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        const Vec3 q = a + d * s;
        const double dist = geometry::distance(q, p);
        if (dist < best.distance) best = {q, dist};
    }
    return best;
}

}  // namespace cadrobot::sim
