#include "fixsim/sampling.hpp"

namespace fixsim {

Point3 sample_in_sphere(Rng& rng, const Point3& center, double radius_mm) {
    if (radius_mm < 0.0) {
        throw std::invalid_argument("sample_in_sphere: negative radius");
    }
    if (radius_mm == 0.0) {
        return center;
    }
    const double r2 = radius_mm * radius_mm;
    for (;;) {
        const Vec3 v{rng.uniform(-radius_mm, radius_mm), rng.uniform(-radius_mm, radius_mm),
                     rng.uniform(-radius_mm, radius_mm)};
        if (v.norm2() <= r2) {
            return center + v;
        }
    }
}

UnitVec3 sample_solid_angle(Rng& rng, const UnitVec3& dir, double colatitude_rad) {
    if (colatitude_rad < 0.0 || colatitude_rad > kPi) {
        throw std::invalid_argument("sample_solid_angle: colatitude outside [0, pi]");
    }
    if (!is_unit(dir)) {
        throw std::invalid_argument("sample_solid_angle: dir must be unit length");
    }
    if (colatitude_rad == 0.0) {
        return dir;
    }
    // cos(theta) uniform on [cos(colatitude), 1] gives a cap-uniform density.
    const double cos_theta = rng.uniform(std::cos(colatitude_rad), 1.0);
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const auto [u, v] = orthonormal_basis(dir);
    return u * (sin_theta * std::cos(phi)) + v * (sin_theta * std::sin(phi)) + dir * cos_theta;
}

}  // namespace fixsim
