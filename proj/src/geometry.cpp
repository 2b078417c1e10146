#include "cadrobot/geometry.hpp"

#include <algorithm>
#include <string>

#include "cadrobot/error.hpp"

namespace cadrobot::geometry {

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("cannot normalize a zero-length vector");
    }
    return v / n;
}

// ============================================================================
// RotationMatrix
// ============================================================================

RotationMatrix::RotationMatrix() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

RotationMatrix::RotationMatrix(const Entries& row_major) : m_(row_major) {
    if (!is_rotation(row_major)) {
        throw ValidationError("rotation matrix is not orthonormal with det = +1");
    }
}

bool RotationMatrix::is_rotation(const Entries& m, double tol) {
    for (double v : m) {
        if (!std::isfinite(v)) return false;
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // (RᵀR)_ij = sum_k R_ki R_kj
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[k * 3 + i] * m[k * 3 + j];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
        }
    }
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    return std::abs(det - 1.0) <= tol;
}

RotationMatrix RotationMatrix::about_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return RotationMatrix({1, 0, 0, 0, c, -s, 0, s, c}, Unchecked{});
}

RotationMatrix RotationMatrix::about_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return RotationMatrix({c, 0, s, 0, 1, 0, -s, 0, c}, Unchecked{});
}

RotationMatrix RotationMatrix::about_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return RotationMatrix({c, -s, 0, s, c, 0, 0, 0, 1}, Unchecked{});
}

RotationMatrix RotationMatrix::from_axis_angle(const Vec3& axis, double a) {
    const Vec3 u = normalized(axis);
    const double c = std::cos(a), s = std::sin(a), C = 1.0 - c;
    return RotationMatrix({c + u.x * u.x * C, u.x * u.y * C - u.z * s, u.x * u.z * C + u.y * s,
                           u.y * u.x * C + u.z * s, c + u.y * u.y * C, u.y * u.z * C - u.x * s,
                           u.z * u.x * C - u.y * s, u.z * u.y * C + u.x * s, c + u.z * u.z * C},
                          Unchecked{});
}

RotationMatrix RotationMatrix::transposed() const {
    const auto& m = m_;
    return RotationMatrix({m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}, Unchecked{});
}

RotationMatrix RotationMatrix::operator*(const RotationMatrix& o) const {
    Entries r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r[static_cast<std::size_t>(i * 3 + j)] = s;
        }
    }
    return RotationMatrix(r, Unchecked{});
}

Vec3 RotationMatrix::operator*(const Vec3& v) const {
    const auto& m = m_;
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

// ============================================================================
// Quaternion
// ============================================================================

void Quaternion::canonicalize() {
    bool flip = false;
    if (w_ < 0.0) {
        flip = true;
    } else if (w_ == 0.0) {
        if (x_ != 0.0) flip = x_ < 0.0;
        else if (y_ != 0.0) flip = y_ < 0.0;
        else flip = z_ < 0.0;
    }
    if (flip) {
        w_ = -w_; x_ = -x_; y_ = -y_; z_ = -z_;
    }
    // Collapse -0.0 so equal rotations compare equal.
    w_ += 0.0; x_ += 0.0; y_ += 0.0; z_ += 0.0;
}

Quaternion Quaternion::from_unit(double w, double x, double y, double z) {
    const double n2 = w * w + x * x + y * y + z * z;
    if (!std::isfinite(n2) || std::abs(std::sqrt(n2) - 1.0) > kAlgebraTolerance) {
        throw ValidationError("quaternion is not unit length");
    }
    Quaternion q(w, x, y, z);
    q.canonicalize();
    return q;
}

Quaternion Quaternion::normalized(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 1e-12) || !std::isfinite(n)) {
        throw ValidationError("cannot normalize a zero or non-finite quaternion");
    }
    Quaternion q(w / n, x / n, y / n, z / n);
    q.canonicalize();
    return q;
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double radians) {
    const Vec3 u = geometry::normalized(axis);
    const double s = std::sin(radians / 2.0);
    return normalized(std::cos(radians / 2.0), u.x * s, u.y * s, u.z * s);
}

Quaternion Quaternion::operator*(const Quaternion& o) const {
    return normalized(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
                      w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
                      w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
                      w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

namespace {

std::array<double, 4> aligned(const Quaternion& a, const Quaternion& b) {
    auto v = b.wxyz();
    if (a.dot(b) < 0.0) {
        for (double& c : v) c = -c;
    }
    return v;
}

}  // namespace

double arc_angle(const Quaternion& a, const Quaternion& b) {
    // atan2 form stays accurate near 0 where acos(dot) loses half the digits.
    const auto av = a.wxyz();
    const auto bv = aligned(a, b);
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        diff += (av[i] - bv[i]) * (av[i] - bv[i]);
        sum += (av[i] + bv[i]) * (av[i] + bv[i]);
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

double rotation_angle(const Quaternion& a, const Quaternion& b) { return 2.0 * arc_angle(a, b); }

Quaternion rotation_to_quaternion(const RotationMatrix& r) {
    // Shepperd: pivot on the largest of trace and the diagonal.
    const double m00 = r(0, 0), m11 = r(1, 1), m22 = r(2, 2);
    const double trace = m00 + m11 + m22;
    double w, x, y, z;
    if (trace >= m00 && trace >= m11 && trace >= m22) {
        const double s = 2.0 * std::sqrt(1.0 + trace);
        w = 0.25 * s;
        x = (r(2, 1) - r(1, 2)) / s;
        y = (r(0, 2) - r(2, 0)) / s;
        z = (r(1, 0) - r(0, 1)) / s;
    } else if (m00 >= m11 && m00 >= m22) {
        const double s = 2.0 * std::sqrt(1.0 + m00 - m11 - m22);
        w = (r(2, 1) - r(1, 2)) / s;
        x = 0.25 * s;
        y = (r(0, 1) + r(1, 0)) / s;
        z = (r(0, 2) + r(2, 0)) / s;
    } else if (m11 >= m22) {
        const double s = 2.0 * std::sqrt(1.0 - m00 + m11 - m22);
        w = (r(0, 2) - r(2, 0)) / s;
        x = (r(0, 1) + r(1, 0)) / s;
        y = 0.25 * s;
        z = (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = 2.0 * std::sqrt(1.0 - m00 - m11 + m22);
        w = (r(1, 0) - r(0, 1)) / s;
        x = (r(0, 2) + r(2, 0)) / s;
        y = (r(1, 2) + r(2, 1)) / s;
        z = 0.25 * s;
    }
    return Quaternion::normalized(w, x, y, z);
}

RotationMatrix quaternion_to_rotation(const Quaternion& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    return RotationMatrix({1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                           2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                           2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)});
}

Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ValidationError("slerp parameter must lie in [0, 1], got " + std::to_string(t));
    }
    if (t == 0.0) return q0;
    if (t == 1.0) return q1;

    const auto a = q0.wxyz();
    const auto b = aligned(q0, q1);
    if (a == b) return q0;
    const double theta = arc_angle(q0, q1);

    double s0, s1;
    if (theta < kSlerpLinearThreshold) {
        s0 = 1.0 - t;
        s1 = t;
    } else {
        const double sin_theta = std::sin(theta);
        s0 = std::sin((1.0 - t) * theta) / sin_theta;
        s1 = std::sin(t * theta) / sin_theta;
    }
    return Quaternion::normalized(s0 * a[0] + s1 * b[0], s0 * a[1] + s1 * b[1],
                                  s0 * a[2] + s1 * b[2], s0 * a[3] + s1 * b[3]);
}

// ============================================================================
// Transform
// ============================================================================

Transform::Transform(const RotationMatrix& r, const Vec3& o) : rotation(r), origin(o) {
    if (!o.finite()) {
        throw ValidationError("transform origin must be finite");
    }
}

Transform compose(const Transform& a, const Transform& b) {
    return {a.rotation * b.rotation, a.rotation * b.origin + a.origin};
}

Transform invert(const Transform& t) {
    const RotationMatrix rt = t.rotation.transposed();
    return {rt, -(rt * t.origin)};
}

Vec3 apply(const Transform& t, const Vec3& p) { return t.rotation * p + t.origin; }

}  // namespace cadrobot::geometry
