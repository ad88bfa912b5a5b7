// Randomized-but-valid FrameRecord factory for round-trip and validator tests.
#pragma once

#include "fixsim/anatomy.hpp"
#include "fixsim/frame_record.hpp"
#include "fixsim/random.hpp"

namespace fixsim::testing {

inline FrameRecord random_record(Rng& rng, uint32_t sequence_id, uint32_t frame_index) {
    FrameRecord r;
    r.sequence_id = sequence_id;
    r.frame_index = frame_index;
    r.labels.corridor = static_cast<CorridorId>(rng.uniform_index(kNumCorridors));
    r.labels.activity = static_cast<Activity>(rng.uniform_index(kNumActivities));
    r.labels.view = static_cast<ViewName>(rng.uniform_index(kNumViews));
    r.labels.frame_value = static_cast<FrameValue>(rng.uniform_index(kNumFrameValues));
    r.sync_label_vector();

    for (auto& p : r.projection) {
        p = rng.uniform(-2000.0, 2000.0);
    }
    r.sensor_width_mm = rng.uniform(300.0, 400.0);
    r.source_detector_mm = rng.uniform(900.0, 1200.0);
    r.d_sp_mm = rng.uniform(600.0, 900.0);
    r.image_height_px = 384;
    r.image_width_px = 384;
    r.view_point = {rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500)};
    const Vec3 raw{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    r.view_ray = raw.norm() > 1e-6 ? normalized(raw) : Vec3{0, 0, 1};

    const int n_tools = static_cast<int>(rng.uniform_index(4));
    for (int i = 0; i < n_tools; ++i) {
        ToolRecord t;
        t.kind = rng.bernoulli(0.5) ? ToolKind::wire : ToolKind::screw;
        t.corridor = static_cast<CorridorId>(rng.uniform_index(kNumCorridors));
        t.tip = {rng.uniform(-200, 200), rng.uniform(-200, 200), rng.uniform(-200, 200)};
        const Vec3 d{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        t.dir = d.norm() > 1e-6 ? normalized(d) : Vec3{1, 0, 0};
        if (t.kind == ToolKind::screw) {
            t.length_mm = rng.uniform(30.0, 130.0);
            t.depth_mm = rng.uniform(0.0, t.length_mm);
        } else {
            t.depth_mm = rng.uniform(0.0, 100.0);
        }
        r.tools.push_back(t);
    }

    for (int i = 0; i < kNumLandmarks; ++i) {
        Landmark2D lm;
        lm.name = std::string(landmark_names()[i]);
        const int mode = static_cast<int>(rng.uniform_index(3));
        if (mode == 0) {
            lm.visible = false;  // behind source: no pixel
        } else {
            lm.pixel = Pixel{rng.uniform(-100.0, 500.0), rng.uniform(-100.0, 500.0)};
            lm.visible = mode == 1;
        }
        r.landmarks_2d.push_back(std::move(lm));
    }
    return r;
}

}  // namespace fixsim::testing
