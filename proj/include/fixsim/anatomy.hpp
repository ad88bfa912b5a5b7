#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fixsim/geometry.hpp"
#include "fixsim/labels.hpp"
#include "fixsim/random.hpp"

namespace fixsim {

// A bony screw corridor modeled as a cylinder from a to b.
struct Corridor {
    CorridorId id = CorridorId::ramus_left;
    Point3 start_a;
    Point3 end_b;
    double radius_mm = 0.0;

    Vec3 axis() const { return end_b - start_a; }
    double length() const { return axis().norm(); }
    UnitVec3 axis_dir() const { return normalized(axis()); }
    Point3 midpoint() const { return lerp(start_a, end_b, 0.5); }
};

constexpr int kNumLandmarks = 16;

// Fixed landmark naming; index order is the serialization order.
const std::array<std::string_view, kNumLandmarks>& landmark_names();
int landmark_index(std::string_view name);

struct LandmarkSet {
    std::array<Point3, kNumLandmarks> points{};

    const Point3& at(std::string_view name) const { return points[landmark_index(name)]; }
    Point3& at(std::string_view name) { return points[landmark_index(name)]; }
};

// Rigid map between anatomy coordinates and the anterior pelvic plane frame.
// Axes are the APP basis vectors expressed in anatomy coordinates: x toward
// the patient's right (left ASIS -> right ASIS), y anterior, z cranial.
struct AppFrame {
    Point3 origin;
    UnitVec3 x{1, 0, 0};
    UnitVec3 y{0, 1, 0};
    UnitVec3 z{0, 0, 1};

    Vec3 dir_to_world(const Vec3& d_app) const { return x * d_app.x + y * d_app.y + z * d_app.z; }
    Vec3 dir_to_app(const Vec3& d_world) const {
        return {dot(d_world, x), dot(d_world, y), dot(d_world, z)};
    }
    Point3 point_to_app(const Point3& p) const { return dir_to_app(p - origin); }
    Point3 point_to_world(const Point3& p_app) const { return origin + dir_to_world(p_app); }

    void validate() const;  // orthonormal, det +1
};

// Ideal principal ray (in APP coordinates) and angular tolerance for one
// standard view.
struct ViewSpec {
    ViewName name = ViewName::ap;
    UnitVec3 ideal_ray_app{0, -1, 0};
    double tolerance_rad = 0.0;
};

class ViewTable {
  public:
    // Clinically conventional default rays with tolerances 3 deg (teardrops)
    // to 10 deg (lateral).
    static ViewTable defaults();

    const ViewSpec& spec(ViewName v) const { return specs_[static_cast<size_t>(v)]; }
    void set(ViewName v, const UnitVec3& ray_app, double tolerance_rad);
    void validate() const;

  private:
    std::array<ViewSpec, kNumViews> specs_{};
};

struct AnatomySpec {
    std::vector<Corridor> corridors;  // exactly 8, one per CorridorId
    LandmarkSet landmarks;
    AppFrame app_frame;
    std::string side = "bilateral";
    std::string source = "synthetic";

    const Corridor& corridor(CorridorId id) const;
    void validate() const;
};

// APP frame from the two ASIS and the pubic-tubercle midpoint. Throws on a
// degenerate (collinear) configuration.
AppFrame app_frame_from_landmarks(const LandmarkSet& landmarks);

// Ideal viewing point (corridor midpoint) and world-frame ideal ray for a
// standard view of a target corridor.
struct IdealView {
    Point3 viewpoint;
    UnitVec3 ray;
};
IdealView ideal_view(const ViewSpec& view, const Corridor& corridor, const AppFrame& app);

// The oblique view playing the obturator-oblique role for a ramus corridor:
// right ramus -> oblique_left, left ramus -> oblique_right.
ViewName resolve_oblique(CorridorId corridor);

struct SynthParams {
    LandmarkSet template_landmarks;
    double jitter_mm = 2.0;   // per-landmark isotropic Gaussian sigma
    double scale_min = 0.95;
    double scale_max = 1.05;
    double ramus_radius_mm = 5.0;
    double teardrop_radius_mm = 6.0;
    double sacral_radius_mm = 8.0;
};

// Corridor endpoints as fixed affine combinations of landmarks, so corridors
// co-transform with the landmark set.
std::vector<Corridor> derive_corridors(const LandmarkSet& landmarks, const SynthParams& params);

// Random plausible pelvis: global scale draw, per-landmark jitter, corridors
// and APP frame re-derived from the jittered landmarks.
AnatomySpec synth_pelvis(Rng& rng, const SynthParams& params);

// Canonical JSON document (schema_version 1).
std::string anatomy_to_json(const AnatomySpec& spec);
AnatomySpec anatomy_from_json(const std::string& text);

// The versioned template shipped with the project (data/pelvis_template.json,
// embedded at build time).
const AnatomySpec& builtin_template();
SynthParams default_synth_params();

}  // namespace fixsim
