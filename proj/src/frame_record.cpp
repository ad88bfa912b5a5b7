#include "fixsim/frame_record.hpp"

#include <nlohmann/json.hpp>

#include "fixsim/anatomy.hpp"
#include "fixsim/jsonfmt.hpp"

namespace fixsim {

const std::array<std::string_view, kNumAnnotationChannels>& annotation_channel_names() {
    static const std::array<std::string_view, kNumAnnotationChannels> names = [] {
        std::array<std::string_view, kNumAnnotationChannels> n{};
        size_t i = 0;
        // 7 anatomy segmentation channels.
        for (std::string_view s : {"left_hip", "right_hip", "left_femur", "right_femur", "sacrum",
                                   "l5_vertebra", "pelvis"}) {
            n[i++] = s;
        }
        // 8 corridor channels.
        for (int c = 0; c < kNumCorridors; ++c) {
            n[i++] = to_string(static_cast<CorridorId>(c));
        }
        // 2 tool channels.
        n[i++] = "wire";
        n[i++] = "screw";
        // 16 landmark heatmap channels.
        for (std::string_view s : landmark_names()) {
            n[i++] = s;
        }
        return n;
    }();
    return names;
}

std::string frame_record_to_json(const FrameRecord& r) {
    JsonWriter w;
    w.begin_object();
    w.key("schema_version").value_int(kSchemaVersion);
    w.key("sequence_id").value_uint(r.sequence_id);
    w.key("frame_index").value_uint(r.frame_index);

    w.key("labels").begin_object();
    w.key("corridor").value_str(to_string(r.labels.corridor));
    w.key("activity").value_str(to_string(r.labels.activity));
    w.key("view").value_str(to_string(r.labels.view));
    w.key("frame_value").value_str(to_string(r.labels.frame_value));
    w.end_object();

    w.key("label_vector").begin_array();
    for (uint8_t b : r.label_vector) {
        w.value_int(b);
    }
    w.end_array();

    w.key("camera").begin_object();
    w.key("P").value_num_array(r.projection);
    w.key("sensor_width_mm").value_num(r.sensor_width_mm);
    w.key("source_detector_mm").value_num(r.source_detector_mm);
    w.key("d_sp_mm").value_num(r.d_sp_mm);
    w.key("image_height_px").value_int(r.image_height_px);
    w.key("image_width_px").value_int(r.image_width_px);
    w.end_object();

    w.key("view").begin_object();
    w.key("p").value_vec3(r.view_point);
    w.key("r").value_vec3(r.view_ray);
    w.end_object();

    w.key("tools").begin_array();
    for (const auto& t : r.tools) {
        w.begin_object();
        w.key("kind").value_str(t.kind == ToolKind::wire ? "wire" : "screw");
        w.key("corridor").value_str(to_string(t.corridor));
        w.key("tip").value_vec3(t.tip);
        w.key("dir").value_vec3(t.dir);
        w.key("depth_mm").value_num(t.depth_mm);
        if (t.kind == ToolKind::screw) {
            w.key("length_mm").value_num(t.length_mm);
        }
        w.end_object();
    }
    w.end_array();

    w.key("landmarks_2d").begin_array();
    for (const auto& lm : r.landmarks_2d) {
        w.begin_object();
        w.key("name").value_str(lm.name);
        w.key("visible").value_bool(lm.visible);
        if (lm.pixel) {
            w.key("u").value_num(lm.pixel->u);
            w.key("v").value_num(lm.pixel->v);
        }
        w.end_object();
    }
    w.end_array();

    w.end_object();
    return w.take();
}

namespace {

Vec3 vec3_at(const nlohmann::json& j, const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3) {
        throw std::invalid_argument(std::string("field '") + key + "' must be [x, y, z]");
    }
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

FrameRecord frame_record_from_json(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    try {
        if (j.value("schema_version", -1) != kSchemaVersion) {
            throw std::invalid_argument("unsupported schema_version");
        }
        FrameRecord r;
        r.sequence_id = j.at("sequence_id").get<uint32_t>();
        r.frame_index = j.at("frame_index").get<uint32_t>();

        const auto& lj = j.at("labels");
        r.labels.corridor = corridor_from_string(lj.at("corridor").get<std::string>());
        r.labels.activity = activity_from_string(lj.at("activity").get<std::string>());
        r.labels.view = view_from_string(lj.at("view").get<std::string>());
        r.labels.frame_value = frame_value_from_string(lj.at("frame_value").get<std::string>());

        const auto& vec = j.at("label_vector");
        if (!vec.is_array() || vec.size() != static_cast<size_t>(kLabelVectorDim)) {
            throw std::invalid_argument("label_vector must have 21 entries");
        }
        // Kept as stored; consistency with the categorical labels is the
        // validator's job, not the parser's.
        for (int i = 0; i < kLabelVectorDim; ++i) {
            r.label_vector[i] = vec[i].get<uint8_t>();
        }

        const auto& cj = j.at("camera");
        const auto& pj = cj.at("P");
        if (!pj.is_array() || pj.size() != 12) {
            throw std::invalid_argument("camera.P must have 12 entries");
        }
        for (int i = 0; i < 12; ++i) {
            r.projection[i] = pj[i].get<double>();
        }
        r.sensor_width_mm = cj.at("sensor_width_mm").get<double>();
        r.source_detector_mm = cj.at("source_detector_mm").get<double>();
        r.d_sp_mm = cj.at("d_sp_mm").get<double>();
        r.image_height_px = cj.at("image_height_px").get<int>();
        r.image_width_px = cj.at("image_width_px").get<int>();

        const auto& vj = j.at("view");
        r.view_point = vec3_at(vj, "p");
        r.view_ray = vec3_at(vj, "r");

        for (const auto& tj : j.at("tools")) {
            ToolRecord t;
            const std::string kind = tj.at("kind").get<std::string>();
            if (kind == "wire") {
                t.kind = ToolKind::wire;
            } else if (kind == "screw") {
                t.kind = ToolKind::screw;
            } else {
                throw std::invalid_argument("unknown tool kind: " + kind);
            }
            t.corridor = corridor_from_string(tj.at("corridor").get<std::string>());
            t.tip = vec3_at(tj, "tip");
            t.dir = vec3_at(tj, "dir");
            t.depth_mm = tj.at("depth_mm").get<double>();
            if (t.kind == ToolKind::screw) {
                t.length_mm = tj.at("length_mm").get<double>();
            }
            r.tools.push_back(t);
        }

        const auto& lms = j.at("landmarks_2d");
        if (!lms.is_array() || lms.size() != static_cast<size_t>(kNumLandmarks)) {
            throw std::invalid_argument("landmarks_2d must have 16 entries");
        }
        for (const auto& mj : lms) {
            Landmark2D lm;
            lm.name = mj.at("name").get<std::string>();
            lm.visible = mj.at("visible").get<bool>();
            if (mj.contains("u") != mj.contains("v")) {
                throw std::invalid_argument("landmark pixel must have both u and v");
            }
            if (mj.contains("u")) {
                lm.pixel = Pixel{mj.at("u").get<double>(), mj.at("v").get<double>()};
            }
            r.landmarks_2d.push_back(std::move(lm));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad frame record: ") + e.what());
    }
}

bool records_equivalent(const FrameRecord& a, const FrameRecord& b) {
    return frame_record_to_json(a) == frame_record_to_json(b);
}

}  // namespace fixsim
