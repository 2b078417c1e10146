#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "cadrobot/sim.hpp"

namespace cadrobot::sim {

using program::Instruction;
using program::Opcode;
using program::ProgramError;
using program::RobotProgram;
using program::Target;

namespace {

/// Tokens of one statement: words, numbers, and the punctuation [ ] , =
class LineLexer {
public:
    LineLexer(std::string_view line, std::size_t line_no) : line_no_(line_no) {
        std::size_t i = 0;
        while (i < line.size()) {
            const char c = line[i];
            if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
            } else if (c == '[' || c == ']' || c == ',' || c == '=') {
                tokens_.push_back(line.substr(i, 1));
                ++i;
            } else {
                const std::size_t start = i;
                while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '[' &&
                       line[i] != ']' && line[i] != ',' && line[i] != '=') {
                    ++i;
                }
                tokens_.push_back(line.substr(start, i - start));
            }
        }
    }

    bool empty() const { return tokens_.empty(); }
    bool done() const { return pos_ == tokens_.size(); }

    std::string_view peek() const { return done() ? std::string_view{} : tokens_[pos_]; }

    std::string_view next(const char* what) {
        if (done()) fail(std::string("expected ") + what + " at end of line");
        return tokens_[pos_++];
    }

    void expect(std::string_view tok) {
        const std::string_view got = next(std::string(tok).c_str());
        if (got != tok) fail("expected '" + std::string(tok) + "', got '" + std::string(got) + "'");
    }

    std::string name() {
        const std::string_view tok = next("a name");
        const bool ok = !tok.empty() && (std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_') &&
                        std::all_of(tok.begin(), tok.end(), [](char c) {
                            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                        });
        if (!ok) fail("invalid name '" + std::string(tok) + "'");
        return std::string(tok);
    }

    double number() {
        const std::string_view tok = next("a number");
        // Fixed-point only: optional sign, digits, optional fraction.
        std::size_t i = tok.empty() || tok[0] != '-' ? 0 : 1;
        const std::size_t int_start = i;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
        bool ok = i > int_start;
        if (ok && i < tok.size() && tok[i] == '.') {
            const std::size_t frac_start = ++i;
            while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
            ok = i > frac_start;
        }
        ok = ok && i == tok.size();
        double value = 0.0;
        if (ok) {
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            ok = ec == std::errc{} && ptr == tok.data() + tok.size() && std::isfinite(value);
        }
        if (!ok) fail("invalid number '" + std::string(tok) + "'");
        return value;
    }

    void end() {
        if (!done()) fail("unexpected '" + std::string(peek()) + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ProgramError("line " + std::to_string(line_no_) + ": " + msg, line_no_);
    }

private:
    std::vector<std::string_view> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_no_;
};

std::optional<Opcode> opcode(std::string_view word) {
    if (word == "MOVEJ") return Opcode::MOVEJ;
    if (word == "MOVEL") return Opcode::MOVEL;
    if (word == "MOVEC") return Opcode::MOVEC;
    if (word == "MOVES") return Opcode::MOVES;
    return std::nullopt;
}

}  // namespace

RobotProgram load_program(std::string_view text) {
    enum class Phase { header, targets, moves, finished };
    Phase phase = Phase::header;
    RobotProgram program;
    std::set<std::string> declared;
    std::size_t group = 0;
    bool in_spline = false;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        LineLexer lex(line, line_no);
        if (lex.empty()) continue;
        const std::string_view word = lex.next("a statement");

        if (phase == Phase::finished) lex.fail("statement after END");
        if (phase == Phase::header) {
            if (word != "PROGRAM") lex.fail("expected PROGRAM, got '" + std::string(word) + "'");
            program.name = lex.name();
            lex.end();
            phase = Phase::targets;
            continue;
        }
        if (word == "END") {
            lex.end();
            phase = Phase::finished;
            continue;
        }
        if (word == "TARGET") {
            if (phase != Phase::targets) lex.fail("TARGET after the first move");
            Target t;
            t.name = lex.name();
            if (!declared.insert(t.name).second) lex.fail("target '" + t.name + "' declared twice");
            lex.expect("=");
            lex.expect("[");
            t.position.x = lex.number();
            lex.expect(",");
            t.position.y = lex.number();
            lex.expect(",");
            t.position.z = lex.number();
            lex.expect("]");
            lex.expect(",");
            lex.expect("[");
            for (std::size_t i = 0; i < 4; ++i) {
                if (i > 0) lex.expect(",");
                t.quaternion[i] = lex.number();
            }
            lex.expect("]");
            lex.end();
            const auto& q = t.quaternion;
            const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
            // Four printed decimals leave at most ~1e-4 of norm error.
            if (std::abs(n - 1.0) > 1e-3) lex.fail("target '" + t.name + "' quaternion is not unit length");
            program.targets.push_back(std::move(t));
            continue;
        }
        const std::optional<Opcode> op = opcode(word);
        if (!op) lex.fail("unknown statement '" + std::string(word) + "'");
        phase = Phase::moves;
        Instruction ins;
        ins.opcode = *op;
        ins.targets.push_back(lex.name());
        if (*op == Opcode::MOVEC) ins.targets.push_back(lex.name());
        for (const std::string& name : ins.targets) {
            if (!declared.count(name)) lex.fail("undeclared target '" + name + "'");
        }
        lex.expect("SPEED");
        ins.speed = lex.number();
        if (!(ins.speed > 0.0)) lex.fail("speed must be > 0");
        lex.end();
        if (*op == Opcode::MOVES) {
            if (!in_spline) ++group;
            in_spline = true;
            ins.group = group;
        } else {
            in_spline = false;
        }
        program.instructions.push_back(std::move(ins));
    }
    if (phase == Phase::header) throw ProgramError("empty program text", line_no);
    if (phase != Phase::finished) throw ProgramError("missing END", line_no);
    return program;
}

}  // namespace cadrobot::sim
