#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cadrobot/error.hpp"
#include "cadrobot/geometry.hpp"
#include "cadrobot/planner.hpp"
#include "cadrobot/scene.hpp"

namespace cadrobot::program {

using geometry::Quaternion;
using geometry::Vec3;

enum class Opcode { MOVEJ, MOVEL, MOVEC, MOVES };

std::string_view to_string(Opcode op);

/// Declared robot target: the 7-tuple x, y, z, q1..q4 (w, x, y, z).
///
/// The quaternion is stored exactly as it will be (or was) written out, so a
/// program loaded from text keeps its 4-decimal values; `orientation()`
/// returns the normalized rotation for consumers that need one.
struct Target {
    std::string name;
    Vec3 position;
    std::array<double, 4> quaternion{1.0, 0.0, 0.0, 0.0};

    Quaternion orientation() const;
    bool operator==(const Target&) const = default;
};

struct Instruction {
    Opcode opcode = Opcode::MOVEL;
    std::vector<std::string> targets;  // MOVEC: via, end; otherwise exactly one
    double speed = 0.0;                // mm/s
    /// Consecutive MOVES instructions share a nonzero group id; 0 otherwise.
    std::size_t group = 0;

    bool operator==(const Instruction&) const = default;
};

struct RobotProgram {
    std::string name;
    std::vector<Target> targets;
    std::vector<Instruction> instructions;

    /// nullptr when `name` is not declared.
    const Target* find(std::string_view name) const;
    bool operator==(const RobotProgram&) const = default;
};

class ProgramError : public Error {
public:
    explicit ProgramError(const std::string& message, std::size_t line = 0)
        : Error("program", message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Throws ProgramError unless every instruction's targets are declared exactly
/// once, target names are unique, and operand counts match the opcode.
void validate(const RobotProgram& program);

/// Lower one planned path; targets are named t1, t2, ... in pose order.
RobotProgram lower(const planner::PlannedPath& path);

/// Lower several paths into one program; target numbering continues across paths.
RobotProgram lower(const std::vector<planner::PlannedPath>& paths, const std::string& name);

/// Fixed-point, exactly 4 decimals, never "-0.0000".
std::string format_fixed(double value);

/// Deterministic program text, one statement per line, LF endings.
std::string emit(const RobotProgram& program);

struct LintDiagnostic {
    std::string target;
    std::vector<char> axes;  // subset of {'x', 'y', 'z'}, in that order
    std::string message;
};

/// One diagnostic per target whose position, mapped through `to_box`, lies
/// outside `box` (bounds inclusive).
std::vector<LintDiagnostic> workspace_lint(const RobotProgram& program, const scene::Box& box,
                                           const geometry::Transform& to_box = geometry::Transform::identity());

}  // namespace cadrobot::program
