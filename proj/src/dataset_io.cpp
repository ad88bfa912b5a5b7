#include "fixsim/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixsim/anatomy.hpp"
#include "fixsim/jsonfmt.hpp"

namespace fixsim {

namespace {

constexpr uint32_t kFrameCap = 1000;
constexpr int kToolCap = 8;

}  // namespace

std::string manifest_to_json(const SequenceManifest& m) {
    JsonWriter w;
    w.begin_object();
    w.key("schema_version").value_int(m.schema_version);
    w.key("config_hash").value_str(m.config_hash);
    w.key("master_seed").value_uint(m.master_seed);
    w.key("anatomy_file").value_str(m.anatomy_file);
    w.key("annotation_channels").begin_array();
    for (const auto& name : annotation_channel_names()) {
        w.value_str(name);
    }
    w.end_array();
    w.key("sequences").begin_array();
    for (const auto& e : m.sequences) {
        w.begin_object();
        w.key("id").value_uint(e.sequence_id);
        w.key("file").value_str(e.file);
        w.key("frames").value_uint(e.frames);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.take();
}

SequenceManifest manifest_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("manifest: malformed JSON: ") + e.what());
    }
    SequenceManifest m;
    m.schema_version = j.value("schema_version", -1);
    if (m.schema_version != kSchemaVersion) {
        throw std::runtime_error("manifest: unsupported schema_version");
    }
    m.config_hash = j.value("config_hash", "");
    m.master_seed = j.value("master_seed", uint64_t{0});
    m.anatomy_file = j.value("anatomy_file", "");
    const auto& chans = j.at("annotation_channels");
    if (!chans.is_array() || chans.size() != static_cast<size_t>(kNumAnnotationChannels)) {
        throw std::runtime_error("manifest: expected 33 annotation channels");
    }
    for (int i = 0; i < kNumAnnotationChannels; ++i) {
        if (chans[i].get<std::string>() != annotation_channel_names()[i]) {
            throw std::runtime_error("manifest: unexpected channel name at index " +
                                     std::to_string(i));
        }
    }
    for (const auto& ej : j.at("sequences")) {
        ManifestEntry e;
        e.sequence_id = ej.at("id").get<uint32_t>();
        e.file = ej.at("file").get<std::string>();
        e.frames = ej.at("frames").get<uint32_t>();
        m.sequences.push_back(std::move(e));
    }
    return m;
}

ManifestEntry write_sequence(const std::vector<FrameRecord>& records, const std::string& path,
                             uint32_t sequence_id) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    for (const auto& r : records) {
        out << frame_record_to_json(r) << '\n';
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
    ManifestEntry e;
    e.sequence_id = sequence_id;
    const size_t slash = path.find_last_of('/');
    e.file = slash == std::string::npos ? path : path.substr(slash + 1);
    e.frames = static_cast<uint32_t>(records.size());
    return e;
}

std::vector<FrameRecord> read_sequence(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::vector<FrameRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            records.push_back(frame_record_from_json(line));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

namespace {

struct GrammarChecker {
    ValidationReport report;

    void add(int frame, std::string code, std::string message) {
        report.violations.push_back({frame, std::move(code), std::move(message)});
    }
};

}  // namespace

ValidationReport validate_sequence(const std::vector<FrameRecord>& records) {
    GrammarChecker g;

    if (records.size() > kFrameCap) {
        g.add(-1, "frame_cap",
              "sequence has " + std::to_string(records.size()) + " frames, cap is " +
                  std::to_string(kFrameCap));
    }

    int prev_activity = -1;
    int prev_corridor = -1;
    int prev_view = -1;
    bool episode_saw_assessment = false;
    int max_wires = 0;
    int max_screws = 0;

    for (size_t i = 0; i < records.size(); ++i) {
        const FrameRecord& r = records[i];
        const int frame = static_cast<int>(i);

        if (r.frame_index != i) {
            g.add(frame, "frame_index",
                  "expected frame_index " + std::to_string(i) + ", found " +
                      std::to_string(r.frame_index));
        }
        if (!records.empty() && r.sequence_id != records.front().sequence_id) {
            g.add(frame, "sequence_id", "sequence_id differs within one sequence");
        }

        // Label vector must be one-hot per group and agree with the labels.
        try {
            if (decode_label_vector(r.label_vector) != r.labels) {
                g.add(frame, "label_vector", "label_vector disagrees with categorical labels");
            }
        } catch (const std::exception& e) {
            g.add(frame, "label_vector", e.what());
        }

        if (r.landmarks_2d.size() != static_cast<size_t>(kNumLandmarks)) {
            g.add(frame, "landmark_count",
                  "expected 16 landmarks, found " + std::to_string(r.landmarks_2d.size()));
        }

        int wires = 0;
        int screws = 0;
        for (const auto& t : r.tools) {
            if (t.kind == ToolKind::wire) {
                ++wires;
            } else {
                ++screws;
                if (t.depth_mm > t.length_mm + 1e-9) {
                    g.add(frame, "tool_depth", "screw depth exceeds its length");
                }
            }
            if (t.depth_mm < 0.0) {
                g.add(frame, "tool_depth", "negative insertion depth");
            }
        }
        max_wires = std::max(max_wires, wires);
        max_screws = std::max(max_screws, screws);

        const int corridor = static_cast<int>(r.labels.corridor);
        const int activity = static_cast<int>(r.labels.activity);
        const int view = static_cast<int>(r.labels.view);

        if (corridor == prev_corridor && activity < prev_activity) {
            g.add(frame, "activity_order",
                  "activity moved backward within a corridor episode (" +
                      std::string(to_string(static_cast<Activity>(prev_activity))) + " -> " +
                      std::string(to_string(r.labels.activity)) + ")");
        }

        // Within one (corridor, view) episode all hunting frames precede the
        // assessment frames.
        if (corridor == prev_corridor && view == prev_view) {
            if (episode_saw_assessment && r.labels.frame_value == FrameValue::hunting) {
                g.add(frame, "frame_value_order", "hunting frame after assessment in one view episode");
            }
        } else {
            episode_saw_assessment = false;
        }
        if (r.labels.frame_value == FrameValue::assessment) {
            episode_saw_assessment = true;
        }

        prev_corridor = corridor;
        prev_activity = activity;
        prev_view = view;
    }

    if (max_wires > kToolCap) {
        g.add(-1, "tool_cap", "wire count " + std::to_string(max_wires) + " exceeds 8");
    }
    if (max_screws > kToolCap) {
        g.add(-1, "tool_cap", "screw count " + std::to_string(max_screws) + " exceeds 8");
    }
    return g.report;
}

double CorpusStats::hunting_to_assessment_ratio() const {
    const auto h = frame_value_counts.find("hunting");
    const auto a = frame_value_counts.find("assessment");
    const double hv = h == frame_value_counts.end() ? 0.0 : static_cast<double>(h->second);
    const double av = a == frame_value_counts.end() ? 0.0 : static_cast<double>(a->second);
    return av > 0.0 ? hv / av : 0.0;
}

namespace {

void write_count_group(JsonWriter& w, const char* key,
                       const std::map<std::string, uint64_t>& counts, uint64_t total) {
    w.key(key).begin_object();
    for (const auto& [name, count] : counts) {
        w.key(name).begin_object();
        w.key("count").value_uint(count);
        w.key("fraction").value_num(total > 0 ? static_cast<double>(count) / total : 0.0);
        w.end_object();
    }
    w.end_object();
}

}  // namespace

std::string CorpusStats::to_json() const {
    JsonWriter w;
    w.begin_object();
    w.key("total_sequences").value_uint(total_sequences);
    w.key("total_frames").value_uint(total_frames);
    write_count_group(w, "corridor", corridor_counts, total_frames);
    write_count_group(w, "activity", activity_counts, total_frames);
    write_count_group(w, "view", view_counts, total_frames);
    write_count_group(w, "frame_value", frame_value_counts, total_frames);
    w.key("hunting_to_assessment_ratio").value_num(hunting_to_assessment_ratio());
    w.key("length_histogram").begin_array();
    for (const auto& [len, count] : length_histogram) {
        w.begin_object();
        w.key("length").value_uint(len);
        w.key("count").value_uint(count);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.take();
}

std::string CorpusStats::to_text() const {
    std::ostringstream out;
    out << "sequences: " << total_sequences << "\n";
    out << "frames:    " << total_frames << "\n";
    const auto dump = [&](const char* title, const std::map<std::string, uint64_t>& counts) {
        out << title << "\n";
        for (const auto& [name, count] : counts) {
            const double frac = total_frames > 0 ? 100.0 * count / total_frames : 0.0;
            char line[128];
            std::snprintf(line, sizeof(line), "  %-16s %10llu  %6.2f%%\n", name.c_str(),
                          static_cast<unsigned long long>(count), frac);
            out << line;
        }
    };
    dump("corridor:", corridor_counts);
    dump("activity:", activity_counts);
    dump("view:", view_counts);
    dump("frame value:", frame_value_counts);
    char ratio[64];
    std::snprintf(ratio, sizeof(ratio), "hunting:assessment = %.3f\n",
                  hunting_to_assessment_ratio());
    out << ratio;
    return out.str();
}

CorpusStats corpus_stats(const SequenceManifest& manifest, const std::string& dir) {
    CorpusStats stats;
    for (int i = 0; i < kNumCorridors; ++i) {
        stats.corridor_counts[std::string(to_string(static_cast<CorridorId>(i)))] = 0;
    }
    for (int i = 0; i < kNumActivities; ++i) {
        stats.activity_counts[std::string(to_string(static_cast<Activity>(i)))] = 0;
    }
    for (int i = 0; i < kNumViews; ++i) {
        stats.view_counts[std::string(to_string(static_cast<ViewName>(i)))] = 0;
    }
    for (int i = 0; i < kNumFrameValues; ++i) {
        stats.frame_value_counts[std::string(to_string(static_cast<FrameValue>(i)))] = 0;
    }
    for (const auto& entry : manifest.sequences) {
        const auto records = read_sequence(dir + "/" + entry.file);
        if (records.size() != entry.frames) {
            throw std::runtime_error("manifest frame count mismatch for " + entry.file);
        }
        stats.total_sequences++;
        stats.length_histogram[static_cast<uint32_t>(records.size())]++;
        for (const auto& r : records) {
            stats.total_frames++;
            stats.corridor_counts[std::string(to_string(r.labels.corridor))]++;
            stats.activity_counts[std::string(to_string(r.labels.activity))]++;
            stats.view_counts[std::string(to_string(r.labels.view))]++;
            stats.frame_value_counts[std::string(to_string(r.labels.frame_value))]++;
        }
    }
    return stats;
}

SequenceManifest load_manifest(const std::string& dir) {
    const std::string path = dir + "/manifest.json";
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return manifest_from_json(ss.str());
}

}  // namespace fixsim
