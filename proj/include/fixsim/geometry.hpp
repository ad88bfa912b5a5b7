#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace fixsim {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Point positions are in millimeters; directions are dimensionless.
using Point3 = Vec3;
using UnitVec3 = Vec3;

inline bool is_unit(const Vec3& v, double tol = 1e-9) {
    return std::abs(v.norm() - 1.0) <= tol;
}

inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    if (n <= 0.0) {
        throw std::invalid_argument("cannot normalize zero-length vector");
    }
    return v / n;
}

inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

// Angle between two vectors in [0, pi]. Inputs need not be unit length.
inline double angle_between(const Vec3& a, const Vec3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) {
        throw std::invalid_argument("angle_between: zero-length vector");
    }
    double c = dot(a, b) / (na * nb);
    c = c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
    return std::acos(c);
}

// Angle between a vector and a line spanned by `axis`, in [0, pi/2].
inline double angle_to_line(const Vec3& v, const Vec3& axis) {
    const double a = angle_between(v, axis);
    return a > kPi / 2.0 ? kPi - a : a;
}

double clamp(double value, double lo, double hi);

// Right-hand-rule rotation of v about a unit axis. Throws if the axis is not
// unit length to within 1e-9.
Vec3 rotate_about_axis(const Vec3& v, const UnitVec3& axis, double angle_rad);

// Deterministic orthonormal pair (u, v) with {u, v, dir} right-handed.
std::array<Vec3, 2> orthonormal_basis(const UnitVec3& dir);

}  // namespace fixsim
