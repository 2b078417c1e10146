#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "cadrobot/sim.hpp"

using cadrobot::program::Opcode;
using cadrobot::program::ProgramError;
using cadrobot::sim::load_program;

namespace {

const char* kSmall =
    "PROGRAM demo\n"
    "TARGET t1 = [0.0000, 0.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
    "TARGET t2 = [10.0000, 0.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
    "TARGET t3 = [20.0000, 5.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
    "MOVEJ t1 SPEED 10.0000\n"
    "MOVEC t2 t3 SPEED 5.0000\n"
    "END\n";

std::size_t error_line(const std::string& text) {
    try {
        load_program(text);
    } catch (const ProgramError& e) {
        return e.line();
    }
    FAIL("expected a program error");
    return 0;
}

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
    return text.replace(text.find(from), from.size(), to);
}

}  // namespace

TEST_CASE("small program loads") {
    const auto p = load_program(kSmall);
    CHECK(p.name == "demo");
    CHECK(p.targets.size() == 3);
    REQUIRE(p.instructions.size() == 2);
    CHECK(p.instructions[1].opcode == Opcode::MOVEC);
    CHECK(p.instructions[1].targets == std::vector<std::string>{"t2", "t3"});
    CHECK(p.instructions[1].speed == 5.0);
}

TEST_CASE("golden butt joint program loads with every target") {
    const auto p = load_program(testing::slurp(testing::fixture("butt_joint.golden.prog")));
    CHECK(p.targets.size() == 23);
    CHECK(p.instructions.size() == 23);
}

TEST_CASE("unknown opcode names the line") {
    CHECK(error_line(replace_line(kSmall, "MOVEJ", "MOVEX")) == 5);
    try {
        load_program(replace_line(kSmall, "MOVEJ", "MOVEX"));
    } catch (const ProgramError& e) {
        CHECK(std::string(e.what()).rfind("line 5:", 0) == 0);
    }
}

TEST_CASE("loader errors") {
    CHECK(error_line(replace_line(kSmall, "MOVEC t2 t3", "MOVEC t2 t9")) == 6);
    CHECK(error_line(replace_line(kSmall, "END\n", "")) > 0);
    CHECK(error_line(std::string(kSmall) + "MOVEL t1 SPEED 1.0000\n") == 8);
    CHECK(error_line(replace_line(kSmall, "[10.0000,", "[1e1,")) == 3);
    CHECK(error_line(replace_line(kSmall, "[1.0000, 0.0000, 0.0000, 0.0000]\nTARGET t3", "[0.5000, 0.0000, 0.0000, 0.0000]\nTARGET t3")) == 3);
    CHECK(error_line(replace_line(kSmall, "SPEED 5.0000", "SPEED 0.0000")) == 6);
    CHECK(error_line(replace_line(kSmall, "SPEED 5.0000", "5.0000")) == 6);
    CHECK(error_line(replace_line(kSmall, "TARGET t2", "TARGET t1")) == 3);
    CHECK(error_line(replace_line(kSmall, "PROGRAM demo", "PROGRAM")) == 1);
    CHECK(error_line(std::string(kSmall).insert(std::string(kSmall).find("MOVEC"), "TARGET t4 = [0.0000, 0.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n")) == 6);
    CHECK_THROWS_AS(load_program(""), ProgramError);
}

TEST_CASE("blank lines and CRLF endings are tolerated") {
    std::string text;
    for (char c : std::string(kSmall)) {
        if (c == '\n') text += "\r\n";
        else text += c;
    }
    text.insert(0, "\n");
    CHECK(load_program(text).targets.size() == 3);
}

TEST_CASE("spline groups are rebuilt") {
    const auto p = load_program(
        "PROGRAM s\n"
        "TARGET a = [0.0000, 0.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
        "TARGET b = [1.0000, 0.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
        "TARGET c = [2.0000, 1.0000, 0.0000], [1.0000, 0.0000, 0.0000, 0.0000]\n"
        "MOVEJ a SPEED 1.0000\n"
        "MOVES b SPEED 1.0000\n"
        "MOVES c SPEED 1.0000\n"
        "MOVEL a SPEED 1.0000\n"
        "MOVES b SPEED 1.0000\n"
        "END\n");
    std::vector<std::size_t> groups;
    for (const auto& i : p.instructions) groups.push_back(i.group);
    CHECK(groups == std::vector<std::size_t>{0, 1, 1, 0, 2});
}
