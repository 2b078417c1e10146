#include "cadrobot/program.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace cadrobot::program {

using planner::MotionKind;
using planner::PlannedPath;

std::string_view to_string(Opcode op) {
    switch (op) {
        case Opcode::MOVEJ: return "MOVEJ";
        case Opcode::MOVEL: return "MOVEL";
        case Opcode::MOVEC: return "MOVEC";
        case Opcode::MOVES: return "MOVES";
    }
    return "?";
}

Quaternion Target::orientation() const {
    return Quaternion::normalized(quaternion[0], quaternion[1], quaternion[2], quaternion[3]);
}

const Target* RobotProgram::find(std::string_view name) const {
    for (const Target& t : targets) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

void validate(const RobotProgram& program) {
    std::set<std::string_view> declared;
    for (const Target& t : program.targets) {
        if (!declared.insert(t.name).second) {
            throw ProgramError("target '" + t.name + "' declared more than once");
        }
    }
    for (std::size_t i = 0; i < program.instructions.size(); ++i) {
        const Instruction& ins = program.instructions[i];
        const std::size_t want = ins.opcode == Opcode::MOVEC ? 2 : 1;
        if (ins.targets.size() != want) {
            std::ostringstream os;
            os << "instruction " << i << " (" << to_string(ins.opcode) << ") needs " << want << " target(s)";
            throw ProgramError(os.str());
        }
        for (const std::string& name : ins.targets) {
            if (!declared.count(name)) {
                throw ProgramError("instruction " + std::to_string(i) + " references undeclared target '" +
                                   name + "'");
            }
        }
        if (!(ins.speed > 0.0)) {
            throw ProgramError("instruction " + std::to_string(i) + " has non-positive speed");
        }
    }
}

// ============================================================================
// Lowering
// ============================================================================

namespace {

Opcode opcode_for(const planner::TargetPose& pose) {
    if (pose.interpolated) return Opcode::MOVEL;
    switch (pose.motion_kind) {
        case MotionKind::joint: return Opcode::MOVEJ;
        case MotionKind::linear: return Opcode::MOVEL;
        case MotionKind::spline_via: return Opcode::MOVES;
        case MotionKind::circular_via:
        case MotionKind::circular_end: return Opcode::MOVEC;
    }
    return Opcode::MOVEL;
}

void lower_into(const PlannedPath& path, RobotProgram& program, std::size_t& group) {
    const std::size_t base = program.targets.size();
    for (std::size_t i = 0; i < path.poses.size(); ++i) {
        const auto& pose = path.poses[i];
        program.targets.push_back({"t" + std::to_string(base + i + 1), pose.position, pose.orientation.wxyz()});
    }
    const auto name = [&](std::size_t i) { return program.targets[base + i].name; };

    bool in_spline = false;
    for (std::size_t i = 0; i < path.poses.size(); ++i) {
        const auto& pose = path.poses[i];
        const Opcode op = opcode_for(pose);
        if (op == Opcode::MOVES) {
            if (!in_spline) ++group;
            in_spline = true;
            program.instructions.push_back({op, {name(i)}, pose.speed, group});
            continue;
        }
        in_spline = false;
        if (op == Opcode::MOVEC) {
            if (pose.motion_kind != MotionKind::circular_via || i + 1 >= path.poses.size() ||
                path.poses[i + 1].interpolated || path.poses[i + 1].motion_kind != MotionKind::circular_end) {
                throw ProgramError("path '" + path.name + "': pose " + std::to_string(i) +
                                   " is not a circular via point followed by a circular end point");
            }
            program.instructions.push_back({op, {name(i), name(i + 1)}, path.poses[i + 1].speed, 0});
            ++i;
            continue;
        }
        program.instructions.push_back({op, {name(i)}, pose.speed, 0});
    }
}

}  // namespace

RobotProgram lower(const std::vector<PlannedPath>& paths, const std::string& name) {
    RobotProgram program;
    program.name = name;
    std::size_t group = 0;
    for (const PlannedPath& p : paths) lower_into(p, program, group);
    validate(program);
    return program;
}

RobotProgram lower(const PlannedPath& path) { return lower(std::vector<PlannedPath>{path}, path.name); }

// ============================================================================
// Emission
// ============================================================================

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

std::string emit(const RobotProgram& program) {
    std::string out;
    out += "PROGRAM " + program.name + "\n";
    for (const Target& t : program.targets) {
        out += "TARGET " + t.name + " = [" + format_fixed(t.position.x) + ", " + format_fixed(t.position.y) +
               ", " + format_fixed(t.position.z) + "], [" + format_fixed(t.quaternion[0]) + ", " +
               format_fixed(t.quaternion[1]) + ", " + format_fixed(t.quaternion[2]) + ", " +
               format_fixed(t.quaternion[3]) + "]\n";
    }
    for (const Instruction& ins : program.instructions) {
        out += std::string(to_string(ins.opcode));
        for (const std::string& name : ins.targets) out += " " + name;
        out += " SPEED " + format_fixed(ins.speed) + "\n";
    }
    out += "END\n";
    return out;
}

// ============================================================================
// Workspace lint
// ============================================================================

std::vector<LintDiagnostic> workspace_lint(const RobotProgram& program, const scene::Box& box,
                                           const geometry::Transform& to_box) {
    static constexpr char kAxis[] = {'x', 'y', 'z'};
    std::vector<LintDiagnostic> out;
    for (const Target& t : program.targets) {
        const Vec3 p = geometry::apply(to_box, t.position);
        LintDiagnostic d;
        d.target = t.name;
        std::ostringstream os;
        os << "target " << t.name << " outside workspace on axis";
        for (int a = 0; a < 3; ++a) {
            if (p[a] < box.min[a] || p[a] > box.max[a]) {
                d.axes.push_back(kAxis[a]);
                os << ' ' << kAxis[a] << " (" << format_fixed(p[a]) << " not in [" << format_fixed(box.min[a])
                   << ", " << format_fixed(box.max[a]) << "])";
            }
        }
        if (!d.axes.empty()) {
            d.message = os.str();
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace cadrobot::program
