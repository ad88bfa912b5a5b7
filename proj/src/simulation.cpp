#include "fixsim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace fixsim {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

bool is_ramus(CorridorId id) {
    return id == CorridorId::ramus_left || id == CorridorId::ramus_right;
}

WireState init_wire(Rng& rng, const Corridor& corridor, const SimConfig& cfg) {
    WireState wire;
    wire.corridor = corridor.id;
    wire.tip = sample_in_sphere(rng, corridor.start_a, cfg.initial_tip_jitter_mm);
    wire.dir = sample_solid_angle(rng, corridor.axis_dir(), cfg.initial_dir_jitter_rad);
    wire.inserted_depth_mm = 0.0;
    return wire;
}

void begin_screw(Rng& rng, SequenceState& s, const SimConfig& cfg) {
    const WireState& wire = s.wires.back();
    const double corridor_len = s.current_target().corridor.length();

    ScrewState screw;
    screw.entry = wire.entry();
    screw.dir = wire.dir;
    screw.corridor = wire.corridor;
    const double hi =
        std::min(cfg.screw_length_max_mm, std::max(cfg.screw_length_min_mm, corridor_len));
    screw.length_mm = rng.uniform(cfg.screw_length_min_mm, hi);
    screw.inserted_depth_mm = 0.0;

    s.screws.push_back(screw);
    s.tool_order.emplace_back(true, s.screws.size() - 1);
    s.activity = Activity::insert_screw;
}

// Redirects the C-arm at the newly desired view. Gross repositioning happens
// without acquisitions: the crew cranks the C-arm toward the requested view
// and imaging resumes once the pose is within the rough-positioning envelope,
// from where the fluoro-hunting loop takes over.
void switch_desired_view(Rng& rng, SequenceState& s, const SimConfig& cfg, ViewName view,
                         SampleTrace* trace) {
    s.desired_view = view;
    const ViewSpec& vspec = cfg.views.spec(view);
    const IdealView ideal = ideal_view(vspec, s.current_target().corridor, s.anatomy.app_frame);

    for (int i = 0; i < 32; ++i) {
        const bool parked =
            angle_between(s.view_ray, ideal.ray) <= cfg.reposition_angle_rad &&
            (ideal.viewpoint - s.view_point).norm() <= cfg.reposition_offset_mm;
        if (parked) {
            break;
        }
        const Projection proj = make_projection(s.view_point, s.view_ray, s.camera, s.d_sp_mm);
        if (evaluate_view(proj, s.camera, s.view_ray, ideal, vspec.tolerance_rad).accepted) {
            break;
        }
        const ViewSampleResult vs = sample_view(rng, s, ideal, cfg);
        if (trace) {
            trace->view_ball_radius_mm.push_back(vs.ball_radius_mm);
            trace->view_cap_rad.push_back(vs.cap_colatitude_rad);
        }
        s.view_point = vs.viewpoint;
        s.view_ray = vs.ray;
    }
}

void advance_corridor(Rng& rng, SequenceState& s, const SimConfig& cfg, SampleTrace* trace) {
    s.plan_pos++;
    if (s.plan_pos >= s.plan.size()) {
        s.finished = true;
        return;
    }
    const PlanItem& item = s.plan[s.plan_pos];
    s.wires.push_back(init_wire(rng, item.corridor, cfg));
    s.tool_order.emplace_back(false, s.wires.size() - 1);
    s.activity = Activity::position_wire;
    switch_desired_view(rng, s, cfg, sample_desired_view(rng, cfg, item.corridor.id), trace);
}

FrameRecord make_frame_record(const SequenceState& s, const Projection& proj, FrameValue fv) {
    FrameRecord rec;
    rec.sequence_id = s.sequence_id;
    rec.frame_index = s.frame_index;
    rec.labels.corridor = s.current_target().corridor.id;
    rec.labels.activity = s.activity;
    rec.labels.view = s.desired_view;
    rec.labels.frame_value = fv;
    rec.sync_label_vector();

    rec.projection = proj.p;
    rec.sensor_width_mm = s.camera.sensor_width_mm;
    rec.source_detector_mm = s.camera.source_detector_mm;
    rec.d_sp_mm = s.d_sp_mm;
    rec.image_height_px = s.camera.image_height_px;
    rec.image_width_px = s.camera.image_width_px;
    rec.view_point = s.view_point;
    rec.view_ray = s.view_ray;

    for (const auto& [is_screw, idx] : s.tool_order) {
        ToolRecord t;
        if (is_screw) {
            const ScrewState& sc = s.screws[idx];
            t.kind = ToolKind::screw;
            t.corridor = sc.corridor;
            t.tip = sc.tip();
            t.dir = sc.dir;
            t.depth_mm = sc.inserted_depth_mm;
            t.length_mm = sc.length_mm;
        } else {
            const WireState& w = s.wires[idx];
            t.kind = ToolKind::wire;
            t.corridor = w.corridor;
            t.tip = w.tip;
            t.dir = w.dir;
            t.depth_mm = w.inserted_depth_mm;
        }
        rec.tools.push_back(t);
    }

    rec.landmarks_2d.reserve(kNumLandmarks);
    for (int i = 0; i < kNumLandmarks; ++i) {
        Landmark2D lm;
        lm.name = std::string(landmark_names()[i]);
        const auto px = proj.project(s.anatomy.landmarks.points[i]);
        if (px) {
            lm.pixel = *px;
            lm.visible = px->u >= 0.0 && px->u < s.camera.image_width_px && px->v >= 0.0 &&
                         px->v < s.camera.image_height_px;
        }
        rec.landmarks_2d.push_back(std::move(lm));
    }
    return rec;
}

}  // namespace

const PlanItem& SequenceState::current_target() const {
    if (plan_pos >= plan.size()) {
        throw std::logic_error("SequenceState: no active target corridor");
    }
    return plan[plan_pos];
}

ViewEvaluation evaluate_view(const Projection& proj, const CameraModel& camera,
                             const UnitVec3& current_ray, const IdealView& desired,
                             double tolerance_rad) {
    ViewEvaluation ev;
    ev.ray_angle_rad = angle_between(current_ray, desired.ray);
    const auto px = proj.project(desired.viewpoint);
    if (!px) {
        return ev;  // behind the source: rejected, no centering distance
    }
    const double du = px->u - camera.principal_u_px;
    const double dv = px->v - camera.principal_v_px;
    ev.center_offset_px = std::hypot(du, dv);
    const double limit =
        0.4 * std::min(camera.image_height_px, camera.image_width_px);
    ev.accepted = ev.ray_angle_rad <= tolerance_rad && *ev.center_offset_px < limit;
    return ev;
}

ViewSampleResult sample_view(Rng& rng, const SequenceState& state, const IdealView& desired,
                             const SimConfig& cfg) {
    ViewSampleResult out;
    const double dist = (desired.viewpoint - state.view_point).norm();
    out.ball_radius_mm = clamp(state.lambda_adj * dist, cfg.view_position_clamp_min_mm,
                               cfg.view_position_clamp_max_mm);
    out.viewpoint = sample_in_sphere(rng, desired.viewpoint, out.ball_radius_mm);

    const double ang = angle_between(desired.ray, state.view_ray);
    out.cap_colatitude_rad = clamp(state.lambda_adj * ang, cfg.view_angle_clamp_min_rad,
                                   cfg.view_angle_clamp_max_rad);
    out.ray = sample_solid_angle(rng, desired.ray, out.cap_colatitude_rad);
    return out;
}

ViewName sample_desired_view(Rng& rng, const SimConfig& cfg, CorridorId corridor) {
    const auto& row = cfg.view_distribution[static_cast<size_t>(corridor)];
    return static_cast<ViewName>(rng.pick_weighted(row));
}

std::optional<double> projected_inplane_angle(const Projection& proj, const WireState& wire,
                                              double probe_mm, const Corridor& corridor) {
    const auto t0 = proj.project(wire.tip);
    const auto t1 = proj.project(wire.tip + wire.dir * probe_mm);
    const auto c0 = proj.project(corridor.start_a);
    const auto c1 = proj.project(corridor.end_b);
    if (!t0 || !t1 || !c0 || !c1) {
        return std::nullopt;
    }
    const double wu = t1->u - t0->u;
    const double wv = t1->v - t0->v;
    const double cu = c1->u - c0->u;
    const double cv = c1->v - c0->v;
    const double wire_len = std::hypot(wu, wv);
    const double cor_len = std::hypot(cu, cv);
    if (wire_len < 1e-9 || cor_len < 1e-9) {
        // One of the directions collapses to a point in the image; no
        // in-plane misalignment is observable.
        return 0.0;
    }
    return std::atan2(wu * cv - wv * cu, wu * cu + wv * cv);
}

bool pixel_in_projected_corridor(const Projection& proj, const Corridor& corridor,
                                 const Pixel& px) {
    // The cylinder is convex, so its image is the convex hull of the two
    // projected end-rim circles.
    constexpr int kRimPoints = 24;
    const UnitVec3 axis = corridor.axis_dir();
    const auto [e1, e2] = orthonormal_basis(axis);

    std::vector<Pixel> pts;
    pts.reserve(2 * kRimPoints);
    for (const Point3& center : {corridor.start_a, corridor.end_b}) {
        for (int k = 0; k < kRimPoints; ++k) {
            const double phi = 2.0 * kPi * k / kRimPoints;
            const Point3 rim =
                center + (e1 * std::cos(phi) + e2 * std::sin(phi)) * corridor.radius_mm;
            const auto rim_px = proj.project(rim);
            if (!rim_px) {
                return false;  // corridor clipped by the camera plane
            }
            pts.push_back(*rim_px);
        }
    }

    // Andrew monotone chain.
    std::sort(pts.begin(), pts.end(), [](const Pixel& a, const Pixel& b) {
        return a.u < b.u || (a.u == b.u && a.v < b.v);
    });
    const auto cross2 = [](const Pixel& o, const Pixel& a, const Pixel& b) {
        return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
    };
    std::vector<Pixel> hull(2 * pts.size());
    size_t h = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (h >= 2 && cross2(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) {
            --h;
        }
        hull[h++] = pts[i];
    }
    for (size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
        while (h >= lower && cross2(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) {
            --h;
        }
        hull[h++] = pts[i];
    }
    hull.resize(h > 0 ? h - 1 : 0);
    if (hull.size() < 3) {
        return false;
    }

    // Inside (or on the boundary of) the counter-clockwise hull.
    for (size_t i = 0; i < hull.size(); ++i) {
        const Pixel& a = hull[i];
        const Pixel& b = hull[(i + 1) % hull.size()];
        if (cross2(a, b, px) < 0.0) {
            return false;
        }
    }
    return true;
}

WireEvaluation evaluate_wire(Rng& rng, const Projection& proj, const Corridor& corridor,
                             const WireState& wire, const SimConfig& cfg) {
    WireEvaluation ev;
    const double len = corridor.length();
    const double depth_frac = clamp01(wire.inserted_depth_mm / len);
    const double p_fp = cfg.false_positive_base * (1.0 - depth_frac);

    const double axis_angle = angle_to_line(proj.ray, corridor.axis());
    ev.down_barrel = axis_angle <= cfg.down_barrel_threshold_rad;

    if (ev.down_barrel) {
        const auto tip_px = proj.project(wire.tip);
        const auto probe_px = proj.project(wire.tip + wire.dir * cfg.wire_probe_mm);
        ev.geometric_good = tip_px && probe_px &&
                            pixel_in_projected_corridor(proj, corridor, *tip_px) &&
                            pixel_in_projected_corridor(proj, corridor, *probe_px);
    } else {
        const auto inplane = projected_inplane_angle(proj, wire, cfg.wire_probe_mm, corridor);
        const auto tip_px = proj.project(wire.tip);
        if (inplane && tip_px) {
            ev.theta_star_rad = *inplane;
            ev.geometric_good = std::abs(*inplane) <= cfg.align_tolerance_rad &&
                                pixel_in_projected_corridor(proj, corridor, *tip_px);
        }
    }

    ev.good = ev.geometric_good;
    if (!ev.good && p_fp > 0.0 && rng.bernoulli(p_fp)) {
        ev.false_positive = true;
        ev.good = true;
    }
    return ev;
}

WireSampleResult sample_wire(Rng& rng, const Projection& proj, const Corridor& corridor,
                             const WireState& wire, double lambda_adj, const SimConfig& cfg) {
    WireSampleResult out;
    out.wire = wire;

    const double axis_angle = angle_to_line(proj.ray, corridor.axis());
    out.down_barrel = axis_angle <= cfg.down_barrel_threshold_rad;

    if (out.down_barrel) {
        // Shrink the 3D offset toward the corridor axis.
        const UnitVec3 axis = corridor.axis_dir();
        const double len = corridor.length();
        const double t = clamp01(dot(wire.tip - corridor.start_a, axis) / len);
        const Point3 on_axis = corridor.start_a + axis * (t * len);

        out.tip_ball_radius_mm = clamp(lambda_adj * (wire.tip - on_axis).norm(),
                                       cfg.tip_clamp_min_mm, cfg.tip_clamp_max_mm);
        out.wire.tip = sample_in_sphere(rng, on_axis, out.tip_ball_radius_mm);

        const UnitVec3 target_dir = dot(wire.dir, axis) >= 0.0 ? axis : -axis;
        const double ang = angle_between(wire.dir, target_dir);
        out.theta_star_rad = ang;
        out.direction_bound_rad = clamp(lambda_adj * ang, cfg.theta_parallel_clamp_min_rad,
                                        cfg.theta_parallel_clamp_max_rad);
        out.wire.dir = sample_solid_angle(rng, target_dir, out.direction_bound_rad);
        return out;
    }

    // Orthogonal-style view: adjust the degrees of freedom visible in the
    // image; tip ball shrinks with the distance to the corridor entry.
    const double theta_signed =
        projected_inplane_angle(proj, wire, cfg.wire_probe_mm, corridor).value_or(0.0);
    const double theta_mag = std::abs(theta_signed);
    out.theta_star_rad = theta_mag;

    out.tip_ball_radius_mm = clamp(lambda_adj * (wire.tip - corridor.start_a).norm(),
                                   cfg.tip_clamp_min_mm, cfg.tip_clamp_max_mm);
    out.wire.tip = sample_in_sphere(rng, wire.tip, out.tip_ball_radius_mm);

    out.direction_bound_rad = clamp(lambda_adj * theta_mag, cfg.theta_parallel_clamp_min_rad,
                                    cfg.theta_parallel_clamp_max_rad);
    const double theta_par = rng.uniform(-out.direction_bound_rad, out.direction_bound_rad);
    const double perp_limit = cfg.theta_perp_fraction * theta_mag;
    const double theta_perp = rng.uniform(-perp_limit, perp_limit);
    out.theta_perp_rad = theta_perp;

    Vec3 dir = rotate_about_axis(wire.dir, proj.ray, theta_signed + theta_par);
    const Vec3 perp_axis = cross(wire.dir, proj.ray);
    if (perp_axis.norm() > 1e-9) {
        dir = rotate_about_axis(dir, normalized(perp_axis), theta_perp);
    }
    out.wire.dir = normalized(dir);
    return out;
}

AdvanceResult advance_insertion(Rng& rng, SequenceState& s, const SimConfig& cfg,
                                SampleTrace* trace) {
    if (s.activity != Activity::insert_wire && s.activity != Activity::insert_screw) {
        throw std::logic_error("advance_insertion: not in an insertion activity");
    }
    AdvanceResult out;
    const double draw = rng.uniform(cfg.insertion_step_min_mm, cfg.insertion_step_max_mm);

    if (s.activity == Activity::insert_wire) {
        WireState& wire = s.wires.back();
        const double limit = s.current_target().corridor.length();
        const double new_depth = std::min(wire.inserted_depth_mm + draw, limit);
        out.step_mm = new_depth - wire.inserted_depth_mm;
        wire.tip += wire.dir * out.step_mm;
        wire.inserted_depth_mm = new_depth;
        if (new_depth >= limit) {
            out.completed = true;
            begin_screw(rng, s, cfg);
        }
    } else {
        ScrewState& screw = s.screws.back();
        const double new_depth = std::min(screw.inserted_depth_mm + draw, screw.length_mm);
        out.step_mm = new_depth - screw.inserted_depth_mm;
        screw.inserted_depth_mm = new_depth;
        if (new_depth >= screw.length_mm) {
            out.completed = true;
            advance_corridor(rng, s, cfg, trace);
        }
    }
    return out;
}

SequenceState start_sequence(Rng& rng, const AnatomySpec& anatomy, const SimConfig& cfg,
                             uint32_t sequence_id) {
    anatomy.validate();
    SequenceState s;
    s.sequence_id = sequence_id;
    s.lambda_adj = rng.uniform(cfg.lambda_adj_min, cfg.lambda_adj_max);
    const double ws = rng.uniform(cfg.sensor_width_min_mm, cfg.sensor_width_max_mm);
    const double dsd = rng.uniform(cfg.source_detector_min_mm, cfg.source_detector_max_mm);
    s.camera = CameraModel::with_centered_principal_point(ws, dsd, cfg.image_height_px,
                                                          cfg.image_width_px);
    s.d_sp_mm = dsd * rng.uniform(cfg.d_sp_fraction_min, cfg.d_sp_fraction_max);
    s.anatomy = anatomy;

    // Corridor plan: a random subset in random order; ramus corridors may be
    // approached retrograde (endpoints swapped).
    const int span = cfg.corridors_max - cfg.corridors_min + 1;
    const int count = cfg.corridors_min + static_cast<int>(rng.uniform_index(span));
    std::array<CorridorId, kNumCorridors> ids;
    for (int i = 0; i < kNumCorridors; ++i) {
        ids[i] = static_cast<CorridorId>(i);
    }
    for (int i = kNumCorridors - 1; i > 0; --i) {
        std::swap(ids[i], ids[rng.uniform_index(i + 1)]);
    }
    for (int i = 0; i < count; ++i) {
        PlanItem item;
        item.corridor = anatomy.corridor(ids[i]);
        if (is_ramus(ids[i]) && rng.bernoulli(0.5)) {
            std::swap(item.corridor.start_a, item.corridor.end_b);
            item.retrograde = true;
        }
        s.plan.push_back(item);
    }

    if (s.plan.empty()) {
        s.finished = true;
        return s;
    }

    const PlanItem& first = s.plan.front();
    s.wires.push_back(init_wire(rng, first.corridor, cfg));
    s.tool_order.emplace_back(false, size_t{0});
    s.activity = Activity::position_wire;
    s.desired_view = sample_desired_view(rng, cfg, first.corridor.id);

    const IdealView ideal =
        ideal_view(cfg.views.spec(s.desired_view), first.corridor, anatomy.app_frame);
    s.view_point = sample_in_sphere(rng, ideal.viewpoint, cfg.initial_view_offset_mm);
    s.view_ray = sample_solid_angle(rng, ideal.ray, cfg.initial_view_angle_rad);
    return s;
}

FrameRecord step(Rng& rng, SequenceState& s, const SimConfig& cfg, SampleTrace* trace) {
    if (s.finished) {
        throw std::logic_error("step: sequence already finished");
    }
    if (s.frame_index >= static_cast<uint32_t>(cfg.max_frames)) {
        throw std::logic_error("step: frame budget exhausted");
    }

    const Corridor& corridor = s.current_target().corridor;
    const ViewSpec& vspec = cfg.views.spec(s.desired_view);
    const IdealView ideal = ideal_view(vspec, corridor, s.anatomy.app_frame);
    const Projection proj = make_projection(s.view_point, s.view_ray, s.camera, s.d_sp_mm);

    const ViewEvaluation view_ev =
        evaluate_view(proj, s.camera, s.view_ray, ideal, vspec.tolerance_rad);
    const FrameValue fv = view_ev.accepted ? FrameValue::assessment : FrameValue::hunting;

    FrameRecord rec = make_frame_record(s, proj, fv);
    s.frame_index++;

    if (!view_ev.accepted) {
        const ViewSampleResult vs = sample_view(rng, s, ideal, cfg);
        if (trace) {
            trace->view_ball_radius_mm.push_back(vs.ball_radius_mm);
            trace->view_cap_rad.push_back(vs.cap_colatitude_rad);
        }
        s.view_point = vs.viewpoint;
        s.view_ray = vs.ray;
        return rec;
    }

    switch (s.activity) {
        case Activity::position_wire: {
            WireState& wire = s.wires.back();
            const WireEvaluation wire_ev = evaluate_wire(rng, proj, corridor, wire, cfg);
            if (!wire_ev.good) {
                const WireSampleResult ws =
                    sample_wire(rng, proj, corridor, wire, s.lambda_adj, cfg);
                if (trace) {
                    trace->tip_ball_radius_mm.push_back(ws.tip_ball_radius_mm);
                    trace->direction_bound_rad.push_back(ws.direction_bound_rad);
                    if (ws.theta_perp_rad) {
                        trace->theta_perp_events.emplace_back(std::abs(*ws.theta_perp_rad),
                                                              ws.theta_star_rad);
                    }
                }
                wire = ws.wire;
            } else {
                const double r = rng.uniform();
                if (r < cfg.reverify_after_good_wire) {
                    switch_desired_view(rng, s, cfg, sample_desired_view(rng, cfg, corridor.id),
                                        trace);
                } else if (r < cfg.reverify_after_good_wire + cfg.direct_to_screw) {
                    begin_screw(rng, s, cfg);
                } else {
                    s.activity = Activity::insert_wire;
                }
            }
            break;
        }
        case Activity::insert_wire:
        case Activity::insert_screw: {
            const AdvanceResult adv = advance_insertion(rng, s, cfg, trace);
            if (!adv.completed && rng.bernoulli(cfg.view_change_during_insertion)) {
                switch_desired_view(rng, s, cfg, sample_desired_view(rng, cfg, corridor.id),
                                    trace);
            }
            break;
        }
    }
    return rec;
}

std::vector<FrameRecord> run_sequence(uint64_t seed, const AnatomySpec& anatomy,
                                      const SimConfig& cfg, uint32_t sequence_id,
                                      SampleTrace* trace) {
    Rng rng(seed);
    SequenceState s = start_sequence(rng, anatomy, cfg, sequence_id);
    std::vector<FrameRecord> records;
    while (!s.finished && s.frame_index < static_cast<uint32_t>(cfg.max_frames)) {
        records.push_back(step(rng, s, cfg, trace));
    }
    return records;
}

}  // namespace fixsim
