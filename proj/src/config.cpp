#include "fixsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixsim/jsonfmt.hpp"

namespace fixsim {

namespace {

void set_row(std::array<double, kNumViews>& row,
             std::initializer_list<std::pair<ViewName, double>> main_views,
             double remainder_total) {
    row.fill(0.0);
    int n_main = 0;
    for (const auto& [v, w] : main_views) {
        row[static_cast<size_t>(v)] = w;
        ++n_main;
    }
    const double rest = remainder_total / (kNumViews - n_main);
    for (auto& w : row) {
        if (w == 0.0) {
            w = rest;
        }
    }
}

}  // namespace

std::array<std::array<double, kNumViews>, kNumCorridors> default_view_distribution() {
    std::array<std::array<double, kNumViews>, kNumCorridors> d{};

    // Rami are worked in the inlet and the obturator-role oblique.
    set_row(d[static_cast<size_t>(CorridorId::ramus_left)],
            {{ViewName::inlet, 0.4}, {resolve_oblique(CorridorId::ramus_left), 0.4}}, 0.2);
    set_row(d[static_cast<size_t>(CorridorId::ramus_right)],
            {{ViewName::inlet, 0.4}, {resolve_oblique(CorridorId::ramus_right), 0.4}}, 0.2);

    // Teardrops: mostly the same-side teardrop view, plus the iliac-role
    // oblique and AP.
    set_row(d[static_cast<size_t>(CorridorId::teardrop_left)],
            {{ViewName::teardrop_left, 0.45}, {ViewName::oblique_left, 0.2}, {ViewName::ap, 0.15}},
            0.2);
    set_row(d[static_cast<size_t>(CorridorId::teardrop_right)],
            {{ViewName::teardrop_right, 0.45},
             {ViewName::oblique_right, 0.2},
             {ViewName::ap, 0.15}},
            0.2);

    // Sacroiliac corridors: inlet/outlet pair, some lateral.
    for (CorridorId id : {CorridorId::s1_left, CorridorId::s1_right, CorridorId::s2_left,
                          CorridorId::s2_right}) {
        set_row(d[static_cast<size_t>(id)],
                {{ViewName::inlet, 0.35}, {ViewName::outlet, 0.35}, {ViewName::lateral, 0.15},
                 {ViewName::ap, 0.05}},
                0.1);
    }
    return d;
}

SimConfig SimConfig::defaults() {
    SimConfig cfg;
    cfg.view_distribution = default_view_distribution();
    cfg.validate();
    return cfg;
}

SynthParams SimConfig::synth_params() const {
    SynthParams p = default_synth_params();
    if (!anatomy_template_path.empty()) {
        std::ifstream in(anatomy_template_path);
        if (!in) {
            throw std::runtime_error("cannot open anatomy template: " + anatomy_template_path);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        const AnatomySpec tpl = anatomy_from_json(ss.str());
        p.template_landmarks = tpl.landmarks;
        p.ramus_radius_mm = tpl.corridor(CorridorId::ramus_left).radius_mm;
        p.teardrop_radius_mm = tpl.corridor(CorridorId::teardrop_left).radius_mm;
        p.sacral_radius_mm = tpl.corridor(CorridorId::s1_left).radius_mm;
    }
    p.jitter_mm = anatomy_jitter_mm;
    p.scale_min = anatomy_scale_min;
    p.scale_max = anatomy_scale_max;
    return p;
}

void SimConfig::validate() const {
    const auto check_range = [](double lo, double hi, const char* what) {
        if (!(lo <= hi)) {
            throw std::invalid_argument(std::string("SimConfig: empty range for ") + what);
        }
    };
    check_range(lambda_adj_min, lambda_adj_max, "lambda_adj");
    if (lambda_adj_min < 0.0 || lambda_adj_max > 1.0) {
        throw std::invalid_argument("SimConfig: lambda_adj must stay within [0, 1]");
    }
    if (max_frames < 1 || max_frames > 1000) {
        throw std::invalid_argument("SimConfig: max_frames must be in [1, 1000]");
    }
    if (corridors_min < 0 || corridors_max > kNumCorridors || corridors_min > corridors_max) {
        throw std::invalid_argument("SimConfig: bad corridors_per_sequence range");
    }
    check_range(sensor_width_min_mm, sensor_width_max_mm, "sensor_width");
    check_range(source_detector_min_mm, source_detector_max_mm, "source_detector");
    check_range(d_sp_fraction_min, d_sp_fraction_max, "d_sp_fraction");
    if (image_height_px <= 0 || image_width_px <= 0) {
        throw std::invalid_argument("SimConfig: bad image size");
    }
    check_range(view_position_clamp_min_mm, view_position_clamp_max_mm, "view position clamp");
    check_range(view_angle_clamp_min_rad, view_angle_clamp_max_rad, "view angle clamp");
    check_range(tip_clamp_min_mm, tip_clamp_max_mm, "tip clamp");
    check_range(theta_parallel_clamp_min_rad, theta_parallel_clamp_max_rad, "theta parallel");
    check_range(insertion_step_min_mm, insertion_step_max_mm, "insertion step");
    check_range(screw_length_min_mm, screw_length_max_mm, "screw length");
    if (insertion_step_min_mm <= 0.0) {
        throw std::invalid_argument("SimConfig: insertion step must be positive");
    }
    if (theta_perp_fraction < 0.0) {
        throw std::invalid_argument("SimConfig: theta_perp_fraction must be >= 0");
    }
    if (false_positive_base < 0.0 || false_positive_base > 1.0) {
        throw std::invalid_argument("SimConfig: false_positive_base must be in [0, 1]");
    }
    if (reverify_after_good_wire < 0.0 || direct_to_screw < 0.0 ||
        reverify_after_good_wire + direct_to_screw > 1.0) {
        throw std::invalid_argument("SimConfig: bad activity transition probabilities");
    }
    if (view_change_during_insertion < 0.0 || view_change_during_insertion > 1.0) {
        throw std::invalid_argument("SimConfig: bad view_change_during_insertion");
    }
    if (max_tool_instances < 1 || max_tool_instances > 8) {
        throw std::invalid_argument("SimConfig: max_tool_instances must be in [1, 8]");
    }
    if (corridors_max > max_tool_instances) {
        throw std::invalid_argument("SimConfig: corridor plan may exceed tool budget");
    }
    views.validate();
    for (const auto& row : view_distribution) {
        double sum = 0.0;
        for (double w : row) {
            if (w < 0.0) {
                throw std::invalid_argument("SimConfig: negative view weight");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("SimConfig: view distribution row must sum to 1");
        }
    }
}

namespace {

void load_range(const toml::Document& doc, const std::string& table, const std::string& key,
                double& lo, double& hi) {
    if (!doc.has(table, key)) {
        return;
    }
    const auto vals = doc.number_array(table, key);
    if (vals.size() != 2) {
        throw toml::ParseError(0, "[" + table + "] " + key + " must be [lo, hi]");
    }
    lo = vals[0];
    hi = vals[1];
}

void load_range_deg(const toml::Document& doc, const std::string& table, const std::string& key,
                    double& lo_rad, double& hi_rad) {
    double lo = rad_to_deg(lo_rad);
    double hi = rad_to_deg(hi_rad);
    load_range(doc, table, key, lo, hi);
    lo_rad = deg_to_rad(lo);
    hi_rad = deg_to_rad(hi);
}

}  // namespace

SimConfig SimConfig::from_toml(const toml::Document& doc) {
    SimConfig cfg;
    cfg.view_distribution = default_view_distribution();

    load_range(doc, "sequence", "lambda_adj_range", cfg.lambda_adj_min, cfg.lambda_adj_max);
    cfg.max_frames = static_cast<int>(doc.number_or("sequence", "max_frames", cfg.max_frames));
    {
        double lo = cfg.corridors_min;
        double hi = cfg.corridors_max;
        load_range(doc, "sequence", "corridors_per_sequence", lo, hi);
        cfg.corridors_min = static_cast<int>(lo);
        cfg.corridors_max = static_cast<int>(hi);
    }

    load_range(doc, "camera", "sensor_width_mm", cfg.sensor_width_min_mm, cfg.sensor_width_max_mm);
    load_range(doc, "camera", "source_detector_mm", cfg.source_detector_min_mm,
               cfg.source_detector_max_mm);
    load_range(doc, "camera", "d_sp_fraction", cfg.d_sp_fraction_min, cfg.d_sp_fraction_max);
    if (doc.has("camera", "image_size")) {
        const auto sz = doc.number_array("camera", "image_size");
        if (sz.size() != 2) {
            throw toml::ParseError(0, "[camera] image_size must be [height, width]");
        }
        cfg.image_height_px = static_cast<int>(sz[0]);
        cfg.image_width_px = static_cast<int>(sz[1]);
    }

    load_range(doc, "view_sampling", "position_clamp_mm", cfg.view_position_clamp_min_mm,
               cfg.view_position_clamp_max_mm);
    load_range_deg(doc, "view_sampling", "angle_clamp_deg", cfg.view_angle_clamp_min_rad,
                   cfg.view_angle_clamp_max_rad);
    cfg.initial_view_offset_mm =
        doc.number_or("view_sampling", "initial_offset_mm", cfg.initial_view_offset_mm);
    cfg.initial_view_angle_rad = deg_to_rad(doc.number_or(
        "view_sampling", "initial_angle_deg", rad_to_deg(cfg.initial_view_angle_rad)));

    cfg.initial_tip_jitter_mm =
        doc.number_or("wire", "initial_tip_jitter_mm", cfg.initial_tip_jitter_mm);
    cfg.initial_dir_jitter_rad = deg_to_rad(
        doc.number_or("wire", "initial_dir_jitter_deg", rad_to_deg(cfg.initial_dir_jitter_rad)));
    load_range(doc, "wire", "tip_clamp_mm", cfg.tip_clamp_min_mm, cfg.tip_clamp_max_mm);
    load_range_deg(doc, "wire", "theta_parallel_clamp_deg", cfg.theta_parallel_clamp_min_rad,
                   cfg.theta_parallel_clamp_max_rad);
    cfg.theta_perp_fraction = doc.number_or("wire", "theta_perp_fraction", cfg.theta_perp_fraction);
    cfg.wire_diameter_mm = doc.number_or("wire", "diameter_mm", cfg.wire_diameter_mm);
    cfg.wire_probe_mm = doc.number_or("wire", "probe_mm", cfg.wire_probe_mm);

    cfg.false_positive_base =
        doc.number_or("wire_eval", "false_positive_base", cfg.false_positive_base);
    cfg.down_barrel_threshold_rad = deg_to_rad(doc.number_or(
        "wire_eval", "down_barrel_threshold_deg", rad_to_deg(cfg.down_barrel_threshold_rad)));
    cfg.align_tolerance_rad = deg_to_rad(
        doc.number_or("wire_eval", "align_tolerance_deg", rad_to_deg(cfg.align_tolerance_rad)));

    cfg.reverify_after_good_wire =
        doc.number_or("transitions", "reverify_after_good_wire", cfg.reverify_after_good_wire);
    cfg.direct_to_screw = doc.number_or("transitions", "direct_to_screw", cfg.direct_to_screw);
    cfg.view_change_during_insertion = doc.number_or("transitions", "view_change_during_insertion",
                                                     cfg.view_change_during_insertion);

    load_range(doc, "insertion", "step_mm", cfg.insertion_step_min_mm, cfg.insertion_step_max_mm);
    load_range(doc, "screw", "length_mm", cfg.screw_length_min_mm, cfg.screw_length_max_mm);
    cfg.screw_thread_mm = doc.number_or("screw", "thread_mm", cfg.screw_thread_mm);
    cfg.max_tool_instances =
        static_cast<int>(doc.number_or("tools", "max_instances", cfg.max_tool_instances));

    cfg.anatomy_template_path =
        doc.string_or("anatomy", "template_path", cfg.anatomy_template_path);
    cfg.anatomy_jitter_mm = doc.number_or("anatomy", "jitter_mm", cfg.anatomy_jitter_mm);
    load_range(doc, "anatomy", "scale_range", cfg.anatomy_scale_min, cfg.anatomy_scale_max);

    // Optional overrides of the standard-view table.
    for (int i = 0; i < kNumViews; ++i) {
        const ViewName v = static_cast<ViewName>(i);
        const std::string name(to_string(v));
        UnitVec3 ray = cfg.views.spec(v).ideal_ray_app;
        double tol = cfg.views.spec(v).tolerance_rad;
        if (doc.has("view_rays", name)) {
            const auto r = doc.number_array("view_rays", name);
            if (r.size() != 3) {
                throw toml::ParseError(0, "[view_rays] " + name + " must be [x, y, z]");
            }
            ray = normalized(Vec3{r[0], r[1], r[2]});
        }
        if (doc.has("view_tolerance_deg", name)) {
            tol = deg_to_rad(doc.number("view_tolerance_deg", name));
        }
        cfg.views.set(v, ray, tol);
    }

    // Optional per-corridor view weights; unnamed views get weight 0, rows
    // are renormalized.
    for (int c = 0; c < kNumCorridors; ++c) {
        const std::string table =
            "view_distribution." + std::string(to_string(static_cast<CorridorId>(c)));
        if (!doc.has_table(table)) {
            continue;
        }
        std::array<double, kNumViews> row{};
        double sum = 0.0;
        for (const auto& key : doc.keys(table)) {
            const ViewName v = view_from_string(key);
            row[static_cast<size_t>(v)] = doc.number(table, key);
            sum += row[static_cast<size_t>(v)];
        }
        if (sum <= 0.0) {
            throw toml::ParseError(0, "view distribution for " + table + " sums to zero");
        }
        for (auto& w : row) {
            w /= sum;
        }
        cfg.view_distribution[c] = row;
    }

    cfg.validate();
    return cfg;
}

SimConfig SimConfig::from_file(const std::string& path) {
    return from_toml(toml::Document::parse_file(path));
}

std::string SimConfig::canonical_string() const {
    JsonWriter w;
    w.begin_object();
    const auto num = [&w](const char* k, double v) { w.key(k).value_num(v); };
    num("lambda_adj_min", lambda_adj_min);
    num("lambda_adj_max", lambda_adj_max);
    w.key("max_frames").value_int(max_frames);
    w.key("corridors_min").value_int(corridors_min);
    w.key("corridors_max").value_int(corridors_max);
    num("sensor_width_min_mm", sensor_width_min_mm);
    num("sensor_width_max_mm", sensor_width_max_mm);
    num("source_detector_min_mm", source_detector_min_mm);
    num("source_detector_max_mm", source_detector_max_mm);
    w.key("image_height_px").value_int(image_height_px);
    w.key("image_width_px").value_int(image_width_px);
    num("d_sp_fraction_min", d_sp_fraction_min);
    num("d_sp_fraction_max", d_sp_fraction_max);
    num("view_position_clamp_min_mm", view_position_clamp_min_mm);
    num("view_position_clamp_max_mm", view_position_clamp_max_mm);
    num("view_angle_clamp_min_rad", view_angle_clamp_min_rad);
    num("view_angle_clamp_max_rad", view_angle_clamp_max_rad);
    num("initial_view_offset_mm", initial_view_offset_mm);
    num("initial_view_angle_rad", initial_view_angle_rad);
    num("initial_tip_jitter_mm", initial_tip_jitter_mm);
    num("initial_dir_jitter_rad", initial_dir_jitter_rad);
    num("tip_clamp_min_mm", tip_clamp_min_mm);
    num("tip_clamp_max_mm", tip_clamp_max_mm);
    num("theta_parallel_clamp_min_rad", theta_parallel_clamp_min_rad);
    num("theta_parallel_clamp_max_rad", theta_parallel_clamp_max_rad);
    num("theta_perp_fraction", theta_perp_fraction);
    num("wire_diameter_mm", wire_diameter_mm);
    num("wire_probe_mm", wire_probe_mm);
    num("false_positive_base", false_positive_base);
    num("down_barrel_threshold_rad", down_barrel_threshold_rad);
    num("align_tolerance_rad", align_tolerance_rad);
    num("reverify_after_good_wire", reverify_after_good_wire);
    num("direct_to_screw", direct_to_screw);
    num("view_change_during_insertion", view_change_during_insertion);
    num("insertion_step_min_mm", insertion_step_min_mm);
    num("insertion_step_max_mm", insertion_step_max_mm);
    num("screw_length_min_mm", screw_length_min_mm);
    num("screw_length_max_mm", screw_length_max_mm);
    num("screw_thread_mm", screw_thread_mm);
    w.key("max_tool_instances").value_int(max_tool_instances);
    w.key("anatomy_template_path").value_str(anatomy_template_path);
    num("anatomy_jitter_mm", anatomy_jitter_mm);
    num("anatomy_scale_min", anatomy_scale_min);
    num("anatomy_scale_max", anatomy_scale_max);
    w.key("views").begin_array();
    for (int i = 0; i < kNumViews; ++i) {
        const auto& s = views.spec(static_cast<ViewName>(i));
        w.begin_object();
        w.key("name").value_str(to_string(s.name));
        w.key("ray").value_vec3(s.ideal_ray_app);
        w.key("tolerance_rad").value_num(s.tolerance_rad);
        w.end_object();
    }
    w.end_array();
    w.key("view_distribution").begin_array();
    for (const auto& row : view_distribution) {
        w.value_num_array(row);
    }
    w.end_array();
    w.end_object();
    return w.take();
}

}  // namespace fixsim
