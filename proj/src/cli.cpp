#include "cadrobot/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cadrobot/error.hpp"
#include "cadrobot/planner.hpp"
#include "cadrobot/program.hpp"
#include "cadrobot/scene.hpp"
#include "cadrobot/sim.hpp"

#ifndef CADROBOT_VERSION
#define CADROBOT_VERSION "0.0.0"
#endif

namespace cadrobot::cli {

using json = nlohmann::ordered_json;

std::string tool_version() { return CADROBOT_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write '" + path + "'");
    out << content;
    if (!out.flush()) throw Error("io", "failed writing '" + path + "'");
}

json file_entry(const std::string& path, const std::string& content) {
    return {{"path", path}, {"fnv1a64", hex(fnv1a64(content))}};
}

json manifest_header(const char* subcommand) {
    json m;
    m["tool"] = "cadrobot";
    m["version"] = tool_version();
    m["subcommand"] = subcommand;
    return m;
}

void write_manifest(const std::string& out_path, const json& manifest) {
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

/// Strip stray line breaks so every error stays on one line.
std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

// ============================================================================
// compile
// ============================================================================

struct CompileOptions {
    std::string scene;
    std::string base;
    double interp_dt = 0.1;
    std::optional<double> speed_override;
    bool strict = false;
    std::string name;
    std::string out;
};

int cmd_compile(const CompileOptions& o, std::ostream& out, std::ostream& err) {
    const std::string text = read_file(o.scene);
    const scene::Scene parsed = scene::parse_scene(text);
    if (parsed.paths.empty()) throw Error("scene", "scene declares no paths");
    const scene::Scene rebased = planner::rebase(parsed, o.base);

    std::vector<planner::PlannedPath> planned = planner::assign_orientations(rebased);
    for (planner::PlannedPath& p : planned) {
        if (o.speed_override) {
            if (!(*o.speed_override > 0.0)) throw Error("usage", "--speed-override must be > 0");
            for (planner::TargetPose& pose : p.poses) pose.speed = *o.speed_override;
            p = planner::interpolate_risk(p, *o.speed_override, o.interp_dt);
        } else {
            p = planner::interpolate_risk(p, o.interp_dt);
        }
    }

    std::string name = o.name;
    if (name.empty()) name = planned.size() == 1 ? planned.front().name : "main";
    const program::RobotProgram prog = program::lower(planned, name);
    const std::string program_text = program::emit(prog);

    std::size_t lint_count = 0;
    if (parsed.workspace) {
        // Targets are in {B}; the workspace box is in {U}.
        const auto lint = program::workspace_lint(prog, *parsed.workspace, geometry::invert(rebased.universe));
        for (const auto& d : lint) err << "warning: lint: " << d.message << "\n";
        lint_count = lint.size();
    }
    if (o.strict && lint_count > 0) {
        err << "error: lint: " << lint_count << " target(s) outside the workspace\n";
        return kExitLint;
    }

    write_file(o.out, program_text);

    json m = manifest_header("compile");
    m["inputs"] = {{"scene", file_entry(o.scene, text)}};
    json cfg;
    cfg["base"] = o.base;
    cfg["interp_dt"] = o.interp_dt;
    cfg["speed_override"] = o.speed_override ? json(*o.speed_override) : json(nullptr);
    cfg["strict"] = o.strict;
    cfg["name"] = name;
    m["config"] = cfg;
    m["seed"] = nullptr;
    m["outputs"] = {{"program", file_entry(o.out, program_text)}};
    m["lint_warnings"] = lint_count;
    write_manifest(o.out, m);

    out << "compiled " << prog.targets.size() << " targets, " << prog.instructions.size() << " instructions -> "
        << o.out << "\n";
    return kExitOk;
}

// ============================================================================
// simulate
// ============================================================================

struct SimulateOptions {
    std::string program;
    std::string scenario = "seam";
    double offset_x = 0.0, offset_y = 0.0, offset_z = 0.0, rot_z_deg = 0.0;
    std::optional<double> gain, gain_y, gain_z;
    std::optional<double> rate;
    sim::SeamConfig seam;
    sim::ForceConfig force;
    std::string controller = "pi";
    double stiffness = 10.0;
    double roughness = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> duration;
    std::string out;
};

int cmd_simulate(SimulateOptions o, std::ostream& out, std::ostream& err) {
    const std::string text = read_file(o.program);
    const program::RobotProgram prog = sim::load_program(text);

    sim::Environment env;
    env.offset = geometry::Transform(geometry::RotationMatrix::about_z(geometry::deg_to_rad(o.rot_z_deg)),
                                     {o.offset_x, o.offset_y, o.offset_z});
    env.roughness = o.roughness;
    env.seed = o.seed;
    env.stiffness = o.stiffness;

    json m = manifest_header("simulate");
    m["inputs"] = {{"program", file_entry(o.program, text)}};
    json envj;
    envj["offset"] = {{"x", o.offset_x}, {"y", o.offset_y}, {"z", o.offset_z}, {"rot_z_deg", o.rot_z_deg}};
    envj["roughness"] = env.roughness;
    envj["stiffness"] = env.stiffness;
    json cfg;
    cfg["scenario"] = o.scenario;
    cfg["environment"] = envj;

    sim::SimTrace trace;
    std::string summary;
    if (o.scenario == "seam") {
        sim::SeamConfig& c = o.seam;
        if (o.gain) c.gain_y = c.gain_z = *o.gain;
        if (o.gain_y) c.gain_y = *o.gain_y;
        if (o.gain_z) c.gain_z = *o.gain_z;
        if (o.rate) c.rate = *o.rate;
        c.duration = o.duration;
        trace = sim::run_seam(prog, env, c);
        cfg["rate_hz"] = c.rate;
        cfg["resolution_mm"] = c.resolution;
        cfg["gain_y"] = c.gain_y;
        cfg["gain_z"] = c.gain_z;
        cfg["max_step_mm"] = c.max_step;
        cfg["sensing_range_mm"] = c.sensing_range;
        const sim::TraceRow& last = trace.rows.back();
        summary = "final correction: y=" + program::format_fixed(last.corr_y) +
                  " mm z=" + program::format_fixed(last.corr_z) + " mm";
    } else {
        sim::ForceConfig& c = o.force;
        if (o.controller == "pi") c.controller = sim::ControllerKind::pi;
        else c.controller = sim::ControllerKind::fuzzy_pi;
        if (o.rate) c.rate = *o.rate;
        c.duration = o.duration;
        trace = sim::run_force(prog, env, c);
        cfg["rate_hz"] = c.rate;
        cfg["setpoint_N"] = c.setpoint;
        cfg["controller"] = std::string(sim::to_string(c.controller));
        cfg["kp"] = c.pi.kp;
        cfg["ki"] = c.pi.ki;
        cfg["u_max_mm"] = c.controller == sim::ControllerKind::pi ? c.pi.u_max : c.fuzzy.u_max;
        cfg["fuzzy_error_scale"] = c.fuzzy.error;
        cfg["fuzzy_rate_scale"] = c.fuzzy.error_rate;
        cfg["fuzzy_output_scale"] = c.fuzzy.output;
        cfg["contact_timeout_s"] = c.contact_timeout;
        summary = "steady-state force error: " + program::format_fixed(sim::steady_state_force_error(trace)) + " N";
    }
    cfg["duration_s"] = o.duration ? json(*o.duration) : json(nullptr);

    const std::string csv = sim::to_csv(trace);
    write_file(o.out, csv);

    m["config"] = cfg;
    m["seed"] = o.seed;
    m["outputs"] = {{"trace", file_entry(o.out, csv)}};
    m["rows"] = trace.rows.size();
    m["status"] = trace.aborted ? "ABORTED" : "OK";
    write_manifest(o.out, m);

    out << summary << "\n";
    if (trace.aborted) {
        err << "error: sim: run aborted: " << trace.abort_reason << "\n";
        return kExitAborted;
    }
    return kExitOk;
}

}  // namespace

// ============================================================================
// Entry point
// ============================================================================

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offline robot programming from neutral CAD scenes, with closed-loop replay", "cadrobot"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    CompileOptions co;
    CLI::App* compile = app.add_subcommand("compile", "Compile a scene file into a robot program");
    compile->add_option("--scene", co.scene, "Scene JSON file")->required();
    compile->add_option("--base", co.base, "Calibration frame all targets are expressed in")->required();
    compile->add_option("--interp-dt", co.interp_dt, "Risk-area sampling width, s")->capture_default_str();
    compile->add_option("--speed-override", co.speed_override, "Replace every programmed speed, mm/s");
    compile->add_flag("--strict", co.strict, "Fail (exit 2) when a target leaves the workspace");
    compile->add_option("--name", co.name, "Program name (default: the path name)");
    compile->add_option("--out", co.out, "Program text output file")->required();

    SimulateOptions so;
    CLI::App* simulate = app.add_subcommand("simulate", "Replay a program against a perturbed cell");
    simulate->add_option("--program", so.program, "Program text file")->required();
    simulate->add_option("--scenario", so.scenario, "seam or force")
        ->check(CLI::IsMember({"seam", "force"}))
        ->capture_default_str();
    simulate->add_option("--offset-x", so.offset_x, "Workpiece offset along x, mm");
    simulate->add_option("--offset-y", so.offset_y, "Workpiece offset along y, mm");
    simulate->add_option("--offset-z", so.offset_z, "Workpiece offset along z, mm");
    simulate->add_option("--rot-z-deg", so.rot_z_deg, "Workpiece rotation about z, degrees");
    simulate->add_option("--gain", so.gain, "Seam gain for both Y and Z");
    simulate->add_option("--gain-y", so.gain_y, "Seam gain, Y");
    simulate->add_option("--gain-z", so.gain_z, "Seam gain, Z");
    simulate->add_option("--rate", so.rate, "Control rate, Hz (default 5 seam / 20 force)");
    simulate->add_option("--resolution", so.seam.resolution, "Robot correction resolution, mm")
        ->capture_default_str();
    simulate->add_option("--max-step", so.seam.max_step, "Largest seam correction per tick, mm")
        ->capture_default_str();
    simulate->add_option("--range", so.seam.sensing_range, "Seam sensing range, mm")->capture_default_str();
    simulate->add_option("--setpoint", so.force.setpoint, "Contact force setpoint, N")->capture_default_str();
    simulate->add_option("--controller", so.controller, "pi or fuzzy")
        ->check(CLI::IsMember({"pi", "fuzzy"}))
        ->capture_default_str();
    simulate->add_option("--kp", so.force.pi.kp, "PI proportional gain, mm/N")->capture_default_str();
    simulate->add_option("--ki", so.force.pi.ki, "PI integral gain, mm/(N s)")->capture_default_str();
    simulate->add_option("--fuzzy-error-scale", so.force.fuzzy.error, "Fuzzy error scaling, 1/N")
        ->capture_default_str();
    simulate->add_option("--fuzzy-rate-scale", so.force.fuzzy.error_rate, "Fuzzy error-rate scaling, s/N")
        ->capture_default_str();
    simulate->add_option("--fuzzy-output-scale", so.force.fuzzy.output, "Fuzzy output scaling, mm")
        ->capture_default_str();
    simulate->add_option("--contact-timeout", so.force.contact_timeout, "Zero-force time before abort, s")
        ->capture_default_str();
    simulate->add_option("--stiffness", so.stiffness, "Contact stiffness, N/mm")->capture_default_str();
    simulate->add_option("--roughness", so.roughness, "Surface roughness standard deviation, mm")
        ->capture_default_str();
    simulate->add_option("--seed", so.seed, "Roughness RNG seed")->capture_default_str();
    simulate->add_option("--duration", so.duration, "Simulated time, s (default: program motion time)");
    simulate->add_option("--out", so.out, "Trace CSV output file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << "\n";
        return kExitFailure;
    }

    try {
        if (compile->parsed()) return cmd_compile(co, out, err);
        return cmd_simulate(so, out, err);
    } catch (const Error& e) {
        err << "error: " << e.category() << ": " << one_line(e.what()) << "\n";
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
    }
    return kExitFailure;
}

}  // namespace cadrobot::cli
