#include "fixsim/geometry.hpp"

namespace fixsim {

double clamp(double value, double lo, double hi) {
    if (lo > hi) {
        throw std::invalid_argument("clamp: lo > hi");
    }
    return value < lo ? lo : (value > hi ? hi : value);
}

Vec3 rotate_about_axis(const Vec3& v, const UnitVec3& axis, double angle_rad) {
    if (!is_unit(axis)) {
        throw std::invalid_argument("rotate_about_axis: axis must be unit length");
    }
    // Rodrigues: v cos t + (k x v) sin t + k (k.v)(1 - cos t)
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1.0 - c));
}

std::array<Vec3, 2> orthonormal_basis(const UnitVec3& dir) {
    const double ax = std::abs(dir.x);
    const double ay = std::abs(dir.y);
    const double az = std::abs(dir.z);
    Vec3 helper;
    if (ax <= ay && ax <= az) {
        helper = {1.0, 0.0, 0.0};
    } else if (ay <= az) {
        helper = {0.0, 1.0, 0.0};
    } else {
        helper = {0.0, 0.0, 1.0};
    }
    const Vec3 u = normalized(cross(helper, dir));
    const Vec3 v = cross(dir, u);
    return {u, v};
}

}  // namespace fixsim
