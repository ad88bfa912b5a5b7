#include "fixsim/anatomy.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fixsim/jsonfmt.hpp"

namespace fixsim {

namespace {

const std::array<std::string_view, kNumLandmarks> kLandmarkNames = {
    "asis_l",          "asis_r",          "pubic_tubercle_l", "pubic_tubercle_r",
    "pubic_symphysis", "iliopectineal_l", "iliopectineal_r",  "teardrop_l",
    "teardrop_r",      "ischial_spine_l", "ischial_spine_r",  "sacral_promontory",
    "s1_body",         "s2_body",         "iliac_crest_l",    "iliac_crest_r",
};

}  // namespace

const std::array<std::string_view, kNumLandmarks>& landmark_names() { return kLandmarkNames; }

int landmark_index(std::string_view name) {
    for (int i = 0; i < kNumLandmarks; ++i) {
        if (kLandmarkNames[i] == name) {
            return i;
        }
    }
    throw std::invalid_argument("unknown landmark: " + std::string(name));
}

void AppFrame::validate() const {
    // Loose enough to survive a round-trip through 9-significant-digit JSON.
    const double tol = 1e-6;
    if (!is_unit(x, tol) || !is_unit(y, tol) || !is_unit(z, tol)) {
        throw std::invalid_argument("AppFrame: axes must be unit length");
    }
    if (std::abs(dot(x, y)) > tol || std::abs(dot(x, z)) > tol || std::abs(dot(y, z)) > tol) {
        throw std::invalid_argument("AppFrame: axes must be orthogonal");
    }
    if (dot(cross(x, y), z) < 0.0) {
        throw std::invalid_argument("AppFrame: axes must be right-handed");
    }
}

ViewTable ViewTable::defaults() {
    const UnitVec3 ap{0.0, -1.0, 0.0};        // anterior -> posterior
    const UnitVec3 right{1.0, 0.0, 0.0};      // patient left -> right
    const UnitVec3 cranial{0.0, 0.0, 1.0};

    const double d5 = deg_to_rad(5.0);
    ViewTable t;
    t.set(ViewName::ap, ap, d5);
    t.set(ViewName::lateral, right, deg_to_rad(10.0));
    // Inlet tilts the AP beam caudally, outlet cranially.
    t.set(ViewName::inlet, rotate_about_axis(ap, right, deg_to_rad(45.0)), d5);
    t.set(ViewName::outlet, rotate_about_axis(ap, right, deg_to_rad(-30.0)), d5);
    t.set(ViewName::oblique_left, rotate_about_axis(ap, cranial, deg_to_rad(45.0)), d5);
    t.set(ViewName::oblique_right, rotate_about_axis(ap, cranial, deg_to_rad(-45.0)), d5);
    // Teardrops combine the oblique rotation with a caudal tilt.
    const Vec3 caudal_ap = rotate_about_axis(ap, right, deg_to_rad(25.0));
    t.set(ViewName::teardrop_left, rotate_about_axis(caudal_ap, cranial, deg_to_rad(45.0)),
          deg_to_rad(3.0));
    t.set(ViewName::teardrop_right, rotate_about_axis(caudal_ap, cranial, deg_to_rad(-45.0)),
          deg_to_rad(3.0));
    t.validate();
    return t;
}

void ViewTable::set(ViewName v, const UnitVec3& ray_app, double tolerance_rad) {
    specs_[static_cast<size_t>(v)] = ViewSpec{v, normalized(ray_app), tolerance_rad};
}

void ViewTable::validate() const {
    const double lo = deg_to_rad(3.0) - 1e-12;
    const double hi = deg_to_rad(10.0) + 1e-12;
    const double td_l = spec(ViewName::teardrop_left).tolerance_rad;
    const double td_r = spec(ViewName::teardrop_right).tolerance_rad;
    const double lat = spec(ViewName::lateral).tolerance_rad;
    for (const auto& s : specs_) {
        if (s.tolerance_rad < lo || s.tolerance_rad > hi) {
            throw std::invalid_argument("ViewTable: tolerance outside [3, 10] deg for view " +
                                        std::string(to_string(s.name)));
        }
        if (s.tolerance_rad < std::max(td_l, td_r) - 1e-12 || s.tolerance_rad > lat + 1e-12) {
            throw std::invalid_argument("ViewTable: teardrop <= tolerance <= lateral violated");
        }
        if (!is_unit(s.ideal_ray_app, 1e-9)) {
            throw std::invalid_argument("ViewTable: ideal ray must be unit length");
        }
    }
}

const Corridor& AnatomySpec::corridor(CorridorId id) const {
    for (const auto& c : corridors) {
        if (c.id == id) {
            return c;
        }
    }
    throw std::invalid_argument("AnatomySpec: missing corridor " + std::string(to_string(id)));
}

void AnatomySpec::validate() const {
    if (corridors.size() != static_cast<size_t>(kNumCorridors)) {
        throw std::invalid_argument("AnatomySpec: expected 8 corridors");
    }
    std::array<int, kNumCorridors> seen{};
    for (const auto& c : corridors) {
        seen[static_cast<size_t>(c.id)]++;
        if (c.radius_mm <= 0.0) {
            throw std::invalid_argument("AnatomySpec: corridor radius must be positive");
        }
        if (c.length() <= 0.0) {
            throw std::invalid_argument("AnatomySpec: zero-length corridor " +
                                        std::string(to_string(c.id)));
        }
    }
    for (int i = 0; i < kNumCorridors; ++i) {
        if (seen[i] != 1) {
            throw std::invalid_argument("AnatomySpec: corridor id must appear exactly once");
        }
    }
    for (const auto& p : landmarks.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw std::invalid_argument("AnatomySpec: non-finite landmark");
        }
    }
    app_frame.validate();
}

AppFrame app_frame_from_landmarks(const LandmarkSet& landmarks) {
    const Point3& asis_l = landmarks.at("asis_l");
    const Point3& asis_r = landmarks.at("asis_r");
    const Point3 tubercle_mid =
        lerp(landmarks.at("pubic_tubercle_l"), landmarks.at("pubic_tubercle_r"), 0.5);

    const Vec3 across = asis_r - asis_l;
    if (across.norm() < 1e-9) {
        throw std::invalid_argument("app_frame_from_landmarks: coincident ASIS landmarks");
    }
    const UnitVec3 x = normalized(across);

    const Vec3 d = lerp(asis_l, asis_r, 0.5) - tubercle_mid;
    const Vec3 in_plane = d - x * dot(d, x);
    if (in_plane.norm() < 1e-6 * std::max(1.0, d.norm()) || d.norm() < 1e-9) {
        throw std::invalid_argument(
            "app_frame_from_landmarks: ASIS and pubic tubercles are collinear");
    }

    AppFrame frame;
    frame.origin = tubercle_mid;
    frame.x = x;
    frame.z = normalized(in_plane);  // cranial, in the anterior pelvic plane
    frame.y = cross(frame.z, frame.x);
    frame.validate();
    return frame;
}

IdealView ideal_view(const ViewSpec& view, const Corridor& corridor, const AppFrame& app) {
    return IdealView{corridor.midpoint(), normalized(app.dir_to_world(view.ideal_ray_app))};
}

ViewName resolve_oblique(CorridorId corridor) {
    switch (corridor) {
        case CorridorId::ramus_right:
            return ViewName::oblique_left;
        case CorridorId::ramus_left:
            return ViewName::oblique_right;
        default:
            throw std::invalid_argument("resolve_oblique: not a ramus corridor: " +
                                        std::string(to_string(corridor)));
    }
}

std::vector<Corridor> derive_corridors(const LandmarkSet& lm, const SynthParams& params) {
    const Vec3 across = lm.at("asis_r") - lm.at("asis_l");

    std::vector<Corridor> out;
    out.reserve(kNumCorridors);
    for (bool left : {true, false}) {
        const auto side = [&](std::string_view base) {
            return std::string(base) + (left ? "_l" : "_r");
        };
        // Superior ramus: pubic-tubercle-adjacent entry toward the
        // iliopectineal region and supra-acetabular bone.
        Corridor ramus;
        ramus.id = left ? CorridorId::ramus_left : CorridorId::ramus_right;
        ramus.start_a = lerp(lm.at(side("pubic_tubercle")), lm.at("pubic_symphysis"), 0.2);
        ramus.end_b = lerp(lm.at(side("iliopectineal")), lm.at(side("iliac_crest")), 0.3);
        ramus.radius_mm = params.ramus_radius_mm;

        Corridor teardrop;
        teardrop.id = left ? CorridorId::teardrop_left : CorridorId::teardrop_right;
        teardrop.start_a = lm.at(side("teardrop"));
        teardrop.end_b = lerp(lm.at(side("teardrop")), lm.at(side("iliac_crest")), 0.8);
        teardrop.radius_mm = params.teardrop_radius_mm;

        // Sacroiliac corridors: lateral ilium entry into the S1/S2 body,
        // crossing slightly past the midline.
        Corridor s1;
        s1.id = left ? CorridorId::s1_left : CorridorId::s1_right;
        s1.start_a = lerp(lm.at(side("iliac_crest")), lm.at(side("ischial_spine")), 0.45);
        s1.end_b = lm.at("s1_body") + across * (left ? 0.1 : -0.1);
        s1.radius_mm = params.sacral_radius_mm;

        Corridor s2;
        s2.id = left ? CorridorId::s2_left : CorridorId::s2_right;
        s2.start_a = lerp(lm.at(side("iliac_crest")), lm.at(side("ischial_spine")), 0.6);
        s2.end_b = lm.at("s2_body") + across * (left ? 0.1 : -0.1);
        s2.radius_mm = params.sacral_radius_mm;

        out.push_back(ramus);
        out.push_back(teardrop);
        out.push_back(s1);
        out.push_back(s2);
    }

    // Canonical order: CorridorId enum order.
    std::sort(out.begin(), out.end(),
              [](const Corridor& a, const Corridor& b) { return a.id < b.id; });
    return out;
}

AnatomySpec synth_pelvis(Rng& rng, const SynthParams& params) {
    if (params.jitter_mm < 0.0) {
        throw std::invalid_argument("synth_pelvis: negative jitter");
    }
    if (params.scale_min > params.scale_max || params.scale_min <= 0.0) {
        throw std::invalid_argument("synth_pelvis: bad scale range");
    }
    const double scale = rng.uniform(params.scale_min, params.scale_max);

    AnatomySpec spec;
    for (int i = 0; i < kNumLandmarks; ++i) {
        Point3 p = params.template_landmarks.points[i] * scale;
        if (params.jitter_mm > 0.0) {
            p += Vec3{rng.gaussian(), rng.gaussian(), rng.gaussian()} * params.jitter_mm;
        }
        spec.landmarks.points[i] = p;
    }
    spec.corridors = derive_corridors(spec.landmarks, params);
    spec.app_frame = app_frame_from_landmarks(spec.landmarks);
    spec.validate();
    return spec;
}

std::string anatomy_to_json(const AnatomySpec& spec) {
    JsonWriter w;
    w.begin_object();
    w.key("schema_version").value_int(1);
    w.key("landmarks").begin_array();
    for (int i = 0; i < kNumLandmarks; ++i) {
        w.begin_object();
        w.key("name").value_str(kLandmarkNames[i]);
        w.key("p").value_vec3(spec.landmarks.points[i]);
        w.end_object();
    }
    w.end_array();
    w.key("corridors").begin_array();
    for (const auto& c : spec.corridors) {
        w.begin_object();
        w.key("id").value_str(to_string(c.id));
        w.key("a").value_vec3(c.start_a);
        w.key("b").value_vec3(c.end_b);
        w.key("radius_mm").value_num(c.radius_mm);
        w.end_object();
    }
    w.end_array();
    w.key("app_frame").begin_object();
    w.key("origin").value_vec3(spec.app_frame.origin);
    w.key("x").value_vec3(spec.app_frame.x);
    w.key("y").value_vec3(spec.app_frame.y);
    w.key("z").value_vec3(spec.app_frame.z);
    w.end_object();
    w.key("meta").begin_object();
    w.key("side").value_str(spec.side);
    w.key("source").value_str(spec.source);
    w.end_object();
    w.end_object();
    return w.take();
}

namespace {

Vec3 vec3_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument("anatomy json: expected [x, y, z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

AnatomySpec anatomy_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("anatomy json: ") + e.what());
    }
    if (j.value("schema_version", 0) != 1) {
        throw std::invalid_argument("anatomy json: unsupported schema_version");
    }

    AnatomySpec spec;
    const auto& lms = j.at("landmarks");
    if (!lms.is_array() || lms.size() != static_cast<size_t>(kNumLandmarks)) {
        throw std::invalid_argument("anatomy json: expected 16 landmarks");
    }
    for (const auto& lj : lms) {
        spec.landmarks.at(lj.at("name").get<std::string>()) = vec3_from_json(lj.at("p"));
    }
    for (const auto& cj : j.at("corridors")) {
        Corridor c;
        c.id = corridor_from_string(cj.at("id").get<std::string>());
        c.start_a = vec3_from_json(cj.at("a"));
        c.end_b = vec3_from_json(cj.at("b"));
        c.radius_mm = cj.at("radius_mm").get<double>();
        spec.corridors.push_back(c);
    }
    const auto& af = j.at("app_frame");
    spec.app_frame.origin = vec3_from_json(af.at("origin"));
    spec.app_frame.x = vec3_from_json(af.at("x"));
    spec.app_frame.y = vec3_from_json(af.at("y"));
    spec.app_frame.z = vec3_from_json(af.at("z"));
    if (j.contains("meta")) {
        spec.side = j["meta"].value("side", spec.side);
        spec.source = j["meta"].value("source", spec.source);
    }
    spec.validate();
    return spec;
}

// Defined in the build-generated template_json.cpp (embeds
// data/pelvis_template.json).
const char* embedded_pelvis_template_json();

const AnatomySpec& builtin_template() {
    static const AnatomySpec spec = anatomy_from_json(embedded_pelvis_template_json());
    return spec;
}

SynthParams default_synth_params() {
    const AnatomySpec& tpl = builtin_template();
    SynthParams p;
    p.template_landmarks = tpl.landmarks;
    p.ramus_radius_mm = tpl.corridor(CorridorId::ramus_left).radius_mm;
    p.teardrop_radius_mm = tpl.corridor(CorridorId::teardrop_left).radius_mm;
    p.sacral_radius_mm = tpl.corridor(CorridorId::s1_left).radius_mm;
    return p;
}

}  // namespace fixsim

