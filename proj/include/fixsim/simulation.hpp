#pragma once

#include <optional>
#include <vector>

#include "fixsim/anatomy.hpp"
#include "fixsim/camera.hpp"
#include "fixsim/config.hpp"
#include "fixsim/frame_record.hpp"
#include "fixsim/random.hpp"
#include "fixsim/sampling.hpp"

namespace fixsim {

struct WireState {
    Point3 tip;            // current tip position
    UnitVec3 dir;          // pointing from entry toward the corridor end
    double inserted_depth_mm = 0.0;
    CorridorId corridor = CorridorId::ramus_left;

    Point3 entry() const { return tip - dir * inserted_depth_mm; }
};

struct ScrewState {
    Point3 entry;          // inherited from the guide wire
    UnitVec3 dir;
    double length_mm = 0.0;
    double inserted_depth_mm = 0.0;
    CorridorId corridor = CorridorId::ramus_left;

    Point3 tip() const { return entry + dir * inserted_depth_mm; }
};

struct PlanItem {
    Corridor corridor;       // endpoints already swapped when retrograde
    bool retrograde = false;
};

struct SequenceState {
    uint32_t sequence_id = 0;
    double lambda_adj = 0.0;
    CameraModel camera;
    double d_sp_mm = 0.0;
    AnatomySpec anatomy;

    std::vector<PlanItem> plan;
    size_t plan_pos = 0;

    Activity activity = Activity::position_wire;
    ViewName desired_view = ViewName::ap;
    Point3 view_point;
    UnitVec3 view_ray{0, 0, 1};

    std::vector<WireState> wires;
    std::vector<ScrewState> screws;
    // Tool creation order for frame emission: (is_screw, index into vector).
    std::vector<std::pair<bool, size_t>> tool_order;

    uint32_t frame_index = 0;
    bool finished = false;

    const PlanItem& current_target() const;
};

// --- view handling -------------------------------------------------------

struct ViewEvaluation {
    bool accepted = false;
    double ray_angle_rad = 0.0;
    // Distance of the projected ideal viewpoint from the principal point;
    // empty when the viewpoint is behind the source (always rejected).
    std::optional<double> center_offset_px;
};

ViewEvaluation evaluate_view(const Projection& proj, const CameraModel& camera,
                             const UnitVec3& current_ray, const IdealView& desired,
                             double tolerance_rad);

struct ViewSampleResult {
    Point3 viewpoint;
    UnitVec3 ray;
    double ball_radius_mm = 0.0;      // after clamping
    double cap_colatitude_rad = 0.0;  // after clamping
};

// One fluoro-hunting adjustment: shrink toward the desired view within a
// clamped window scaled by lambda_adj.
ViewSampleResult sample_view(Rng& rng, const SequenceState& state, const IdealView& desired,
                             const SimConfig& cfg);

ViewName sample_desired_view(Rng& rng, const SimConfig& cfg, CorridorId corridor);

// --- wire handling -------------------------------------------------------

// Signed in-plane angle (radians) from the projected wire direction to the
// projected corridor axis; empty when either cannot be projected.
std::optional<double> projected_inplane_angle(const Projection& proj, const WireState& wire,
                                              double probe_mm, const Corridor& corridor);

// Whether a pixel falls inside the image-plane silhouette of the corridor
// cylinder (union of projected cross-section outlines).
bool pixel_in_projected_corridor(const Projection& proj, const Corridor& corridor,
                                 const Pixel& px);

struct WireEvaluation {
    bool good = false;
    bool geometric_good = false;
    bool false_positive = false;
    bool down_barrel = false;
    double theta_star_rad = 0.0;  // signed in-plane angle (orthogonal views)
};

WireEvaluation evaluate_wire(Rng& rng, const Projection& proj, const Corridor& corridor,
                             const WireState& wire, const SimConfig& cfg);

struct WireSampleResult {
    WireState wire;
    bool down_barrel = false;
    double tip_ball_radius_mm = 0.0;     // after clamping
    double direction_bound_rad = 0.0;    // theta_parallel bound / barrel cap, after clamping
    double theta_star_rad = 0.0;         // magnitude used for the bounds
    std::optional<double> theta_perp_rad;
};

WireSampleResult sample_wire(Rng& rng, const Projection& proj, const Corridor& corridor,
                             const WireState& wire, double lambda_adj, const SimConfig& cfg);

// --- insertion and sequence loop ----------------------------------------

struct AdvanceResult {
    bool completed = false;
    double step_mm = 0.0;
};

// Clamp values observed during resampling, for conformance checks.
struct SampleTrace {
    std::vector<double> view_ball_radius_mm;
    std::vector<double> view_cap_rad;
    std::vector<double> tip_ball_radius_mm;
    std::vector<double> direction_bound_rad;
    std::vector<std::pair<double, double>> theta_perp_events;  // (|theta_perp|, theta*)
};

// Advance the active wire/screw by a random step; on completion performs the
// follow-up transition (wire -> screw, screw -> next corridor or finish).
AdvanceResult advance_insertion(Rng& rng, SequenceState& state, const SimConfig& cfg,
                                SampleTrace* trace = nullptr);

SequenceState start_sequence(Rng& rng, const AnatomySpec& anatomy, const SimConfig& cfg,
                             uint32_t sequence_id = 0);

// One acquisition: evaluates the current view, emits exactly one frame
// record, then applies the post-acquisition decision (view adjustment, wire
// evaluation/repositioning, insertion advance, transitions). Throws
// std::logic_error for a finished or frame-capped sequence.
FrameRecord step(Rng& rng, SequenceState& state, const SimConfig& cfg,
                 SampleTrace* trace = nullptr);

std::vector<FrameRecord> run_sequence(uint64_t seed, const AnatomySpec& anatomy,
                                      const SimConfig& cfg, uint32_t sequence_id = 0,
                                      SampleTrace* trace = nullptr);

}  // namespace fixsim
