#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace fixsim {

// The four phase label groups. Slot order in the 21-dim label vector is
// corridors(8) | activities(3) | views(8) | frame values(2) and is frozen by
// the dataset schema; do not reorder.

enum class CorridorId : uint8_t {
    ramus_left,
    ramus_right,
    teardrop_left,
    teardrop_right,
    s1_left,
    s1_right,
    s2_left,
    s2_right,
};
constexpr int kNumCorridors = 8;

enum class Activity : uint8_t {
    position_wire,
    insert_wire,
    insert_screw,
};
constexpr int kNumActivities = 3;

enum class ViewName : uint8_t {
    ap,
    lateral,
    inlet,
    outlet,
    oblique_left,
    oblique_right,
    teardrop_left,
    teardrop_right,
};
constexpr int kNumViews = 8;

enum class FrameValue : uint8_t {
    hunting,
    assessment,
};
constexpr int kNumFrameValues = 2;

constexpr int kLabelVectorDim = kNumCorridors + kNumActivities + kNumViews + kNumFrameValues;

std::string_view to_string(CorridorId id);
std::string_view to_string(Activity a);
std::string_view to_string(ViewName v);
std::string_view to_string(FrameValue f);

CorridorId corridor_from_string(std::string_view s);
Activity activity_from_string(std::string_view s);
ViewName view_from_string(std::string_view s);
FrameValue frame_value_from_string(std::string_view s);

struct PhaseLabels {
    CorridorId corridor = CorridorId::ramus_left;
    Activity activity = Activity::position_wire;
    ViewName view = ViewName::ap;
    FrameValue frame_value = FrameValue::hunting;

    bool operator==(const PhaseLabels&) const = default;
};

// One-hot-per-group encoding, 21 slots.
std::array<uint8_t, kLabelVectorDim> encode_label_vector(const PhaseLabels& labels);

// Inverse of encode_label_vector; throws if any group is not exactly one-hot.
PhaseLabels decode_label_vector(const std::array<uint8_t, kLabelVectorDim>& vec);

}  // namespace fixsim
