#pragma once

#include <array>
#include <optional>

#include "fixsim/geometry.hpp"

namespace fixsim {

// Intrinsics of the virtual C-arm. Pixel pitch is sensor_width_mm / width_px.
struct CameraModel {
    double sensor_width_mm = 0.0;    // w_s
    double source_detector_mm = 0.0; // d_sd, focal length in mm
    int image_height_px = 0;
    int image_width_px = 0;
    double principal_u_px = 0.0;
    double principal_v_px = 0.0;

    static CameraModel with_centered_principal_point(double sensor_width_mm,
                                                     double source_detector_mm,
                                                     int height_px, int width_px);

    double pixel_pitch_mm() const { return sensor_width_mm / image_width_px; }
    double focal_px() const { return source_detector_mm / pixel_pitch_mm(); }
    void validate() const;
};

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

// 3x4 homogeneous projection. Row-major; pixel = dehomogenize(P * [x 1]^T).
struct Projection {
    std::array<double, 12> p{};
    Point3 source;
    UnitVec3 ray;

    // Signed depth of a point along the principal ray, measured from the source.
    double depth(const Point3& x) const {
        return p[8] * x.x + p[9] * x.y + p[10] * x.z + p[11];
    }

    // Nullopt when the point is at or behind the source (non-positive
    // homogeneous depth), where the pinhole map is undefined.
    std::optional<Pixel> project(const Point3& x) const;
};

// Camera center at viewpoint - d_sp * ray, principal ray `ray`. The viewpoint
// itself projects onto the principal point.
Projection make_projection(const Point3& viewpoint, const UnitVec3& ray,
                           const CameraModel& camera, double d_sp_mm);

}  // namespace fixsim
