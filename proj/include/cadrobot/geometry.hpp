#pragma once

#include <array>
#include <cmath>

namespace cadrobot::geometry {

inline constexpr double kAlgebraTolerance = 1e-9;

// ============================================================================
// Vec3
// ============================================================================

/// Point or direction in millimetres.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

    bool operator==(const Vec3&) const = default;

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Unit vector along `v`; throws ValidationError for a zero-length input.
Vec3 normalized(const Vec3& v);

// ============================================================================
// RotationMatrix
// ============================================================================

/// Row-major 3x3 proper rotation.  Construction from raw entries validates
/// orthonormality and det = +1 within kAlgebraTolerance.
class RotationMatrix {
public:
    using Entries = std::array<double, 9>;

    RotationMatrix();  // identity
    explicit RotationMatrix(const Entries& row_major);

    static RotationMatrix identity() { return {}; }
    static RotationMatrix about_x(double radians);
    static RotationMatrix about_y(double radians);
    static RotationMatrix about_z(double radians);
    /// Rodrigues construction; `axis` need not be unit length but must be nonzero.
    static RotationMatrix from_axis_angle(const Vec3& axis, double radians);

    double operator()(int row, int col) const { return m_[static_cast<std::size_t>(row * 3 + col)]; }
    const Entries& entries() const { return m_; }

    RotationMatrix transposed() const;
    Vec3 column(int col) const { return {(*this)(0, col), (*this)(1, col), (*this)(2, col)}; }

    RotationMatrix operator*(const RotationMatrix& o) const;
    Vec3 operator*(const Vec3& v) const;

    bool operator==(const RotationMatrix&) const = default;

    /// True when `row_major` is orthonormal with det = +1 within `tol`.
    static bool is_rotation(const Entries& row_major, double tol = kAlgebraTolerance);

private:
    struct Unchecked {};
    RotationMatrix(const Entries& row_major, Unchecked) : m_(row_major) {}

    Entries m_;
};

// ============================================================================
// Quaternion
// ============================================================================

/// Unit quaternion, order (w, x, y, z), kept in canonical sign: w >= 0, and if
/// w == 0 the first nonzero of x, y, z is positive.
class Quaternion {
public:
    Quaternion() = default;  // identity

    /// Validates |q| = 1 within kAlgebraTolerance, then canonicalizes.
    static Quaternion from_unit(double w, double x, double y, double z);
    /// Normalizes any nonzero 4-vector, then canonicalizes.
    static Quaternion normalized(double w, double x, double y, double z);
    static Quaternion from_axis_angle(const Vec3& axis, double radians);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    std::array<double, 4> wxyz() const { return {w_, x_, y_, z_}; }

    double dot(const Quaternion& o) const { return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

    /// Hamilton product, renormalized.
    Quaternion operator*(const Quaternion& o) const;
    Quaternion conjugate() const { return normalized(w_, -x_, -y_, -z_); }

    bool operator==(const Quaternion&) const = default;

private:
    Quaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}
    void canonicalize();

    double w_ = 1.0;
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
};

/// Shortest-path great-circle angle between two unit quaternions on S3
/// (half the relative rotation angle), in [0, pi/2].
double arc_angle(const Quaternion& a, const Quaternion& b);

/// Relative rotation angle between the orientations (in [0, pi]).
double rotation_angle(const Quaternion& a, const Quaternion& b);

Quaternion rotation_to_quaternion(const RotationMatrix& r);
RotationMatrix quaternion_to_rotation(const Quaternion& q);

/// Spherical linear interpolation along the shortest arc.  `t` must lie in
/// [0, 1].  Below 1e-6 rad of separation the result is a normalized lerp.
Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double t);

inline constexpr double kSlerpLinearThreshold = 1e-6;

// ============================================================================
// Transform
// ============================================================================

/// Rigid frame relation: maps coordinates expressed in the child frame into
/// the parent frame, p_parent = R * p_child + origin.
struct Transform {
    RotationMatrix rotation;
    Vec3 origin;

    Transform() = default;
    Transform(const RotationMatrix& r, const Vec3& o);

    static Transform identity() { return {}; }

    bool operator==(const Transform&) const = default;
};

/// Chained relation a∘b: rotation Ra·Rb, origin Ra·pb + pa.
Transform compose(const Transform& a, const Transform& b);
/// Rotation Rᵀ, origin −Rᵀ·p.
Transform invert(const Transform& t);
/// R·p + origin.
Vec3 apply(const Transform& t, const Vec3& p);
/// R·v (directions ignore the origin).
inline Vec3 rotate(const Transform& t, const Vec3& v) { return t.rotation * v; }

inline constexpr double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }

}  // namespace cadrobot::geometry
