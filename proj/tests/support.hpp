#pragma once

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cadrobot/geometry.hpp"

namespace testing {

using cadrobot::geometry::Quaternion;
using cadrobot::geometry::RotationMatrix;
using cadrobot::geometry::Transform;
using cadrobot::geometry::Vec3;

inline std::string fixture(const std::string& name) { return std::string(CADROBOT_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Random {
    std::mt19937_64 rng;
    explicit Random(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    Vec3 point(double extent = 500.0) { return {uniform(-extent, extent), uniform(-extent, extent), uniform(-extent, extent)}; }

    Quaternion quaternion() {
        std::normal_distribution<double> n(0.0, 1.0);
        return Quaternion::normalized(n(rng), n(rng), n(rng), n(rng));
    }

    RotationMatrix rotation() { return cadrobot::geometry::quaternion_to_rotation(quaternion()); }

    Transform transform(double extent = 500.0) { return {rotation(), point(extent)}; }
};

inline double max_diff(const RotationMatrix& a, const RotationMatrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 9; ++i) worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    return worst;
}

inline double max_diff(const Transform& a, const Transform& b) {
    return std::max(max_diff(a.rotation, b.rotation), cadrobot::geometry::norm(a.origin - b.origin));
}

}  // namespace testing
