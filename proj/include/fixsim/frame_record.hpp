#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fixsim/camera.hpp"
#include "fixsim/geometry.hpp"
#include "fixsim/labels.hpp"

namespace fixsim {

constexpr int kSchemaVersion = 1;
constexpr int kNumAnnotationChannels = 33;  // 7 anatomy + 8 corridor + 2 tool + 16 landmark

// The 33 spatial annotation channel names carried as schema metadata (this
// artifact emits no pixels; the names define the channel contract).
const std::array<std::string_view, kNumAnnotationChannels>& annotation_channel_names();

enum class ToolKind : uint8_t { wire, screw };

struct ToolRecord {
    ToolKind kind = ToolKind::wire;
    CorridorId corridor = CorridorId::ramus_left;
    Point3 tip;        // current tip position
    UnitVec3 dir;      // pointing from entry into the bone
    double depth_mm = 0.0;
    double length_mm = 0.0;  // screws only; 0 for wires
};

struct Landmark2D {
    std::string name;
    bool visible = false;               // projects inside the image bounds
    std::optional<Pixel> pixel;         // present whenever the projection exists
};

// One emitted decision point.
struct FrameRecord {
    uint32_t sequence_id = 0;
    uint32_t frame_index = 0;
    PhaseLabels labels;

    // Camera for this acquisition.
    std::array<double, 12> projection{};  // row-major 3x4
    double sensor_width_mm = 0.0;
    double source_detector_mm = 0.0;
    double d_sp_mm = 0.0;
    int image_height_px = 0;
    int image_width_px = 0;

    // Current C-arm viewpoint/ray.
    Point3 view_point;
    UnitVec3 view_ray;

    std::vector<ToolRecord> tools;
    std::vector<Landmark2D> landmarks_2d;  // exactly 16, fixed name order

    // Stored alongside the categorical labels; the validator checks the
    // bijection. sync_label_vector() refreshes it from `labels`.
    std::array<uint8_t, kLabelVectorDim> label_vector{};

    void sync_label_vector() { label_vector = encode_label_vector(labels); }
};

// Canonical single-line JSON. Serializing the parse of a line reproduces the
// line byte for byte.
std::string frame_record_to_json(const FrameRecord& record);

// Throws std::invalid_argument with a description naming the offending field;
// callers add file/line position.
FrameRecord frame_record_from_json(const std::string& line);

// Canonical-form equality (floats compared at serialization precision).
bool records_equivalent(const FrameRecord& a, const FrameRecord& b);

}  // namespace fixsim
