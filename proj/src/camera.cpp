#include "fixsim/camera.hpp"

namespace fixsim {

CameraModel CameraModel::with_centered_principal_point(double sensor_width_mm,
                                                       double source_detector_mm,
                                                       int height_px, int width_px) {
    CameraModel cam;
    cam.sensor_width_mm = sensor_width_mm;
    cam.source_detector_mm = source_detector_mm;
    cam.image_height_px = height_px;
    cam.image_width_px = width_px;
    cam.principal_u_px = width_px / 2.0;
    cam.principal_v_px = height_px / 2.0;
    cam.validate();
    return cam;
}

void CameraModel::validate() const {
    if (sensor_width_mm <= 0.0 || source_detector_mm <= 0.0) {
        throw std::invalid_argument("CameraModel: sensor width and source-detector distance must be positive");
    }
    if (image_height_px <= 0 || image_width_px <= 0) {
        throw std::invalid_argument("CameraModel: image dimensions must be positive");
    }
}

std::optional<Pixel> Projection::project(const Point3& x) const {
    const double hu = p[0] * x.x + p[1] * x.y + p[2] * x.z + p[3];
    const double hv = p[4] * x.x + p[5] * x.y + p[6] * x.z + p[7];
    const double hw = depth(x);
    if (hw <= 1e-12) {
        return std::nullopt;
    }
    return Pixel{hu / hw, hv / hw};
}

Projection make_projection(const Point3& viewpoint, const UnitVec3& ray,
                           const CameraModel& camera, double d_sp_mm) {
    camera.validate();
    if (d_sp_mm <= 0.0) {
        throw std::invalid_argument("make_projection: d_sp must be positive");
    }
    if (!is_unit(ray)) {
        throw std::invalid_argument("make_projection: ray must be unit length");
    }

    const Point3 source = viewpoint - ray * d_sp_mm;
    const auto [xc, yc] = orthonormal_basis(ray);  // camera x, y axes; z = ray

    const double f = camera.focal_px();
    const double cu = camera.principal_u_px;
    const double cv = camera.principal_v_px;

    // P = K [R | -R s] with R rows (xc, yc, ray).
    Projection proj;
    proj.source = source;
    proj.ray = ray;

    const Vec3 row_u = xc * f + ray * cu;
    const Vec3 row_v = yc * f + ray * cv;
    const Vec3 row_w = ray;

    proj.p = {row_u.x, row_u.y, row_u.z, -dot(row_u, source),
              row_v.x, row_v.y, row_v.z, -dot(row_v, source),
              row_w.x, row_w.y, row_w.z, -dot(row_w, source)};
    return proj;
}

}  // namespace fixsim
