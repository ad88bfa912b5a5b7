#include "fixsim/labels.hpp"

#include <stdexcept>

namespace fixsim {

namespace {

constexpr std::array<std::string_view, kNumCorridors> kCorridorNames = {
    "ramus_left",  "ramus_right",  "teardrop_left", "teardrop_right",
    "s1_left",     "s1_right",     "s2_left",       "s2_right",
};

constexpr std::array<std::string_view, kNumActivities> kActivityNames = {
    "position_wire",
    "insert_wire",
    "insert_screw",
};

constexpr std::array<std::string_view, kNumViews> kViewNames = {
    "ap",           "lateral",       "inlet",          "outlet",
    "oblique_left", "oblique_right", "teardrop_left",  "teardrop_right",
};

constexpr std::array<std::string_view, kNumFrameValues> kFrameValueNames = {
    "hunting",
    "assessment",
};

template <typename Enum, size_t N>
Enum from_string(const std::array<std::string_view, N>& names, std::string_view s,
                 const char* what) {
    for (size_t i = 0; i < N; ++i) {
        if (names[i] == s) {
            return static_cast<Enum>(i);
        }
    }
    throw std::invalid_argument(std::string("unknown ") + what + ": " + std::string(s));
}

}  // namespace

std::string_view to_string(CorridorId id) { return kCorridorNames.at(static_cast<size_t>(id)); }
std::string_view to_string(Activity a) { return kActivityNames.at(static_cast<size_t>(a)); }
std::string_view to_string(ViewName v) { return kViewNames.at(static_cast<size_t>(v)); }
std::string_view to_string(FrameValue f) { return kFrameValueNames.at(static_cast<size_t>(f)); }

CorridorId corridor_from_string(std::string_view s) {
    return from_string<CorridorId>(kCorridorNames, s, "corridor");
}
Activity activity_from_string(std::string_view s) {
    return from_string<Activity>(kActivityNames, s, "activity");
}
ViewName view_from_string(std::string_view s) {
    return from_string<ViewName>(kViewNames, s, "view");
}
FrameValue frame_value_from_string(std::string_view s) {
    return from_string<FrameValue>(kFrameValueNames, s, "frame value");
}

std::array<uint8_t, kLabelVectorDim> encode_label_vector(const PhaseLabels& labels) {
    std::array<uint8_t, kLabelVectorDim> vec{};
    vec[static_cast<size_t>(labels.corridor)] = 1;
    vec[kNumCorridors + static_cast<size_t>(labels.activity)] = 1;
    vec[kNumCorridors + kNumActivities + static_cast<size_t>(labels.view)] = 1;
    vec[kNumCorridors + kNumActivities + kNumViews + static_cast<size_t>(labels.frame_value)] = 1;
    return vec;
}

PhaseLabels decode_label_vector(const std::array<uint8_t, kLabelVectorDim>& vec) {
    const auto one_hot = [&vec](int offset, int count) {
        int hit = -1;
        for (int i = 0; i < count; ++i) {
            if (vec[offset + i] == 1) {
                if (hit >= 0) {
                    throw std::invalid_argument("label vector: multiple slots set in one group");
                }
                hit = i;
            } else if (vec[offset + i] != 0) {
                throw std::invalid_argument("label vector: slot not 0/1");
            }
        }
        if (hit < 0) {
            throw std::invalid_argument("label vector: empty group");
        }
        return hit;
    };

    PhaseLabels labels;
    labels.corridor = static_cast<CorridorId>(one_hot(0, kNumCorridors));
    labels.activity = static_cast<Activity>(one_hot(kNumCorridors, kNumActivities));
    labels.view = static_cast<ViewName>(one_hot(kNumCorridors + kNumActivities, kNumViews));
    labels.frame_value = static_cast<FrameValue>(
        one_hot(kNumCorridors + kNumActivities + kNumViews, kNumFrameValues));
    return labels;
}

}  // namespace fixsim
