#pragma once

#include <array>
#include <string>

#include "fixsim/anatomy.hpp"
#include "fixsim/toml.hpp"

namespace fixsim {

// All tunables of the workflow simulator. Defaults reflect the standard
// operating ranges; every numeric value here is a TOML key.
struct SimConfig {
    // Per-sequence draws.
    double lambda_adj_min = 0.6;
    double lambda_adj_max = 0.8;
    int max_frames = 1000;
    int corridors_min = 1;
    int corridors_max = 3;

    // Virtual C-arm intrinsics, drawn once per sequence.
    double sensor_width_min_mm = 300.0;
    double sensor_width_max_mm = 400.0;
    double source_detector_min_mm = 900.0;
    double source_detector_max_mm = 1200.0;
    int image_height_px = 384;
    int image_width_px = 384;
    double d_sp_fraction_min = 0.65;
    double d_sp_fraction_max = 0.75;

    // View hunting: resample window clamps and the initial pose spread.
    double view_position_clamp_min_mm = 5.0;
    double view_position_clamp_max_mm = 100.0;
    double view_angle_clamp_min_rad = deg_to_rad(1.0);
    double view_angle_clamp_max_rad = deg_to_rad(45.0);
    double initial_view_offset_mm = 150.0;
    double initial_view_angle_rad = deg_to_rad(30.0);
    // Image-free gross repositioning accuracy when the desired view changes;
    // fluoro-hunting takes over from inside this envelope.
    double reposition_angle_rad = deg_to_rad(8.0);
    double reposition_offset_mm = 50.0;

    // Wire initialization and repositioning.
    double initial_tip_jitter_mm = 5.0;
    double initial_dir_jitter_rad = deg_to_rad(15.0);
    double tip_clamp_min_mm = 5.0;
    double tip_clamp_max_mm = 10.0;
    double theta_parallel_clamp_min_rad = deg_to_rad(3.0);
    double theta_parallel_clamp_max_rad = deg_to_rad(10.0);
    double theta_perp_fraction = 0.1;
    double wire_diameter_mm = 2.0;
    double wire_probe_mm = 10.0;

    // Wire evaluation.
    double false_positive_base = 0.05;  // p0, decays linearly with depth
    double down_barrel_threshold_rad = deg_to_rad(15.0);
    double align_tolerance_rad = deg_to_rad(5.0);

    // Activity transitions after a good wire evaluation, and during insertion.
    double reverify_after_good_wire = 0.4;
    double direct_to_screw = 0.0;
    double view_change_during_insertion = 0.05;

    // Insertion progression.
    double insertion_step_min_mm = 5.0;
    double insertion_step_max_mm = 25.0;

    // Tools.
    double screw_length_min_mm = 30.0;
    double screw_length_max_mm = 130.0;
    double screw_thread_mm = 16.0;
    int max_tool_instances = 8;

    // Anatomy synthesis.
    std::string anatomy_template_path;  // empty -> built-in template
    double anatomy_jitter_mm = 2.0;
    double anatomy_scale_min = 0.95;
    double anatomy_scale_max = 1.05;

    // Standard views: ideal rays (APP frame) and angular tolerances.
    ViewTable views = ViewTable::defaults();

    // Per-corridor desired-view distribution; rows normalized to sum 1.
    std::array<std::array<double, kNumViews>, kNumCorridors> view_distribution{};

    static SimConfig defaults();
    static SimConfig from_toml(const toml::Document& doc);
    static SimConfig from_file(const std::string& path);

    SynthParams synth_params() const;
    void validate() const;

    // Deterministic rendering of every field, used for the manifest's
    // config hash.
    std::string canonical_string() const;
};

// Default per-corridor view weights: the working views for each corridor
// carry most of the mass (inlet + obturator oblique for rami), the rest is
// spread thin.
std::array<std::array<double, kNumViews>, kNumCorridors> default_view_distribution();

}  // namespace fixsim
