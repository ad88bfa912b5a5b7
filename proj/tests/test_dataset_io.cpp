#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fixsim/corpus.hpp"
#include "fixsim/dataset_io.hpp"
#include "fixsim/jsonfmt.hpp"
#include "fixsim/simulation.hpp"
#include "record_gen.hpp"

using namespace fixsim;

namespace {

std::string temp_dir() {
    static int counter = 0;
    const std::string dir =
        (std::filesystem::temp_directory_path() / ("fixsim_io_" + std::to_string(counter++)))
            .string();
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<FrameRecord> simulated_records(uint64_t seed) {
    return run_sequence(seed, builtin_template(), SimConfig::defaults(), 0);
}

}  // namespace

TEST_CASE("label vector encoding is a bijection") {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        PhaseLabels l;
        l.corridor = static_cast<CorridorId>(rng.uniform_index(kNumCorridors));
        l.activity = static_cast<Activity>(rng.uniform_index(kNumActivities));
        l.view = static_cast<ViewName>(rng.uniform_index(kNumViews));
        l.frame_value = static_cast<FrameValue>(rng.uniform_index(kNumFrameValues));
        const auto vec = encode_label_vector(l);
        int set = 0;
        for (uint8_t b : vec) {
            set += b;
        }
        CHECK(set == 4);
        CHECK(vec.size() == 21);
        CHECK(decode_label_vector(vec) == l);
    }
    std::array<uint8_t, kLabelVectorDim> twice{};
    twice[0] = twice[1] = 1;  // two corridors
    twice[8] = 1;
    twice[11] = 1;
    twice[19] = 1;
    CHECK_THROWS_AS(decode_label_vector(twice), std::invalid_argument);
}

TEST_CASE("annotation channel metadata is the fixed 33-name set") {
    const auto& names = annotation_channel_names();
    CHECK(names.size() == 33);
    CHECK(names[0] == "left_hip");
    CHECK(names[6] == "pelvis");
    CHECK(names[7] == "ramus_left");
    CHECK(names[15] == "wire");
    CHECK(names[16] == "screw");
    CHECK(names[17] == "asis_l");
    CHECK(names[32] == "iliac_crest_r");
}

TEST_CASE("canonical serialization round-trips byte for byte") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const FrameRecord r = testing::random_record(rng, 3, i);
        const std::string line = frame_record_to_json(r);
        const FrameRecord parsed = frame_record_from_json(line);
        CHECK(frame_record_to_json(parsed) == line);
        CHECK(records_equivalent(r, parsed));
    }
}

TEST_CASE("write and read a sequence file losslessly") {
    const std::string dir = temp_dir();
    Rng rng(5);
    std::vector<FrameRecord> records;
    for (int i = 0; i < 200; ++i) {
        records.push_back(testing::random_record(rng, 9, i));
    }
    const std::string path = dir + "/0009.jsonl";
    const ManifestEntry entry = write_sequence(records, path, 9);
    CHECK(entry.frames == 200);
    CHECK(entry.file == "0009.jsonl");

    const auto loaded = read_sequence(path);
    REQUIRE(loaded.size() == records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(records_equivalent(records[i], loaded[i]));
    }
}

TEST_CASE("an empty sequence produces an empty file that reads back empty") {
    const std::string dir = temp_dir();
    const std::string path = dir + "/0000.jsonl";
    const ManifestEntry entry = write_sequence({}, path, 0);
    CHECK(entry.frames == 0);
    CHECK(std::filesystem::file_size(path) == 0);
    CHECK(read_sequence(path).empty());
}

TEST_CASE("a corrupted line reports its position") {
    const std::string dir = temp_dir();
    const std::string path = dir + "/bad.jsonl";
    Rng rng(6);
    {
        std::ofstream out(path);
        out << frame_record_to_json(testing::random_record(rng, 1, 0)) << "\n";
        out << "{\"schema_version\":1,broken\n";
    }
    try {
        read_sequence(path);
        FAIL("expected parse failure");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find(":2:") != std::string::npos);
        CHECK(what.find("bad.jsonl") != std::string::npos);
    }
    CHECK_THROWS(read_sequence(dir + "/missing.jsonl"));
}

TEST_CASE("schema version mismatches are rejected") {
    CHECK_THROWS_AS(frame_record_from_json("{\"schema_version\":2}"), std::invalid_argument);
    CHECK_THROWS_AS(manifest_from_json("{\"schema_version\":2}"), std::runtime_error);
}

TEST_CASE("simulator output validates clean") {
    for (uint64_t seed : {11ull, 22ull, 33ull}) {
        const auto records = simulated_records(seed);
        CHECK(validate_sequence(records).ok());
    }
}

TEST_CASE("validator flags a double-set label group") {
    auto records = simulated_records(44);
    REQUIRE(!records.empty());
    records[0].label_vector[0] = 1;
    records[0].label_vector[1] = 1;
    const auto report = validate_sequence(records);
    CHECK(!report.ok());
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.code == "label_vector" && v.frame_index == 0) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("validator flags sequences beyond the frame cap") {
    std::vector<FrameRecord> records;
    Rng rng(7);
    FrameRecord base = testing::random_record(rng, 1, 0);
    base.labels.frame_value = FrameValue::hunting;
    base.sync_label_vector();
    for (int i = 0; i < 1001; ++i) {
        base.frame_index = i;
        records.push_back(base);
    }
    const auto report = validate_sequence(records);
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.code == "frame_cap") {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("validator flags backward activity moves within a corridor episode") {
    Rng rng(8);
    std::vector<FrameRecord> records;
    for (int i = 0; i < 2; ++i) {
        FrameRecord r = testing::random_record(rng, 2, i);
        r.labels.corridor = CorridorId::s1_left;
        r.labels.view = ViewName::inlet;
        r.labels.frame_value = FrameValue::assessment;
        r.labels.activity = i == 0 ? Activity::insert_screw : Activity::position_wire;
        r.sync_label_vector();
        records.push_back(r);
    }
    const auto report = validate_sequence(records);
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.code == "activity_order" && v.frame_index == 1) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("validator flags hunting after assessment within one view episode") {
    Rng rng(9);
    std::vector<FrameRecord> records;
    const FrameValue pattern[3] = {FrameValue::hunting, FrameValue::assessment,
                                   FrameValue::hunting};
    for (int i = 0; i < 3; ++i) {
        FrameRecord r = testing::random_record(rng, 2, i);
        r.labels.corridor = CorridorId::ramus_left;
        r.labels.view = ViewName::inlet;
        r.labels.activity = Activity::position_wire;
        r.labels.frame_value = pattern[i];
        r.sync_label_vector();
        records.push_back(r);
    }
    const auto report = validate_sequence(records);
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.code == "frame_value_order" && v.frame_index == 2) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("validator flags tool budget overruns and landmark miscounts") {
    Rng rng(10);
    FrameRecord r = testing::random_record(rng, 2, 0);
    r.tools.clear();
    for (int i = 0; i < 9; ++i) {
        ToolRecord t;
        t.kind = ToolKind::wire;
        t.dir = {1, 0, 0};
        r.tools.push_back(t);
    }
    r.landmarks_2d.pop_back();
    const auto report = validate_sequence({r});
    bool tool_cap = false;
    bool landmarks = false;
    for (const auto& v : report.violations) {
        tool_cap |= v.code == "tool_cap";
        landmarks |= v.code == "landmark_count";
    }
    CHECK(tool_cap);
    CHECK(landmarks);
}

TEST_CASE("manifest serialization round-trips") {
    SequenceManifest m;
    m.config_hash = "00ff00ff00ff00ff";
    m.master_seed = 123456789;
    m.anatomy_file = "anatomy.json";
    m.sequences.push_back({0, "0000.jsonl", 57});
    m.sequences.push_back({1, "0001.jsonl", 0});
    const std::string text = manifest_to_json(m);
    const SequenceManifest parsed = manifest_from_json(text);
    CHECK(manifest_to_json(parsed) == text);
    CHECK(parsed.master_seed == m.master_seed);
    REQUIRE(parsed.sequences.size() == 2);
    CHECK(parsed.sequences[1].frames == 0);
}

TEST_CASE("corpus stats cover every label and sum to one per group") {
    const std::string dir = temp_dir();
    const SimConfig cfg = SimConfig::defaults();
    generate_corpus(cfg, 2026, 8, 2, dir);

    const SequenceManifest manifest = load_manifest(dir);
    const CorpusStats stats = corpus_stats(manifest, dir);
    CHECK(stats.total_sequences == 8);
    CHECK(stats.total_frames > 0);

    CHECK(stats.corridor_counts.size() == 8);
    CHECK(stats.activity_counts.size() == 3);
    CHECK(stats.view_counts.size() == 8);
    CHECK(stats.frame_value_counts.size() == 2);

    const auto group_total = [&](const std::map<std::string, uint64_t>& counts) {
        uint64_t sum = 0;
        for (const auto& [name, c] : counts) {
            (void)name;
            sum += c;
        }
        return sum;
    };
    CHECK(group_total(stats.corridor_counts) == stats.total_frames);
    CHECK(group_total(stats.activity_counts) == stats.total_frames);
    CHECK(group_total(stats.view_counts) == stats.total_frames);
    CHECK(group_total(stats.frame_value_counts) == stats.total_frames);

    uint64_t hist_total = 0;
    for (const auto& [len, count] : stats.length_histogram) {
        (void)len;
        hist_total += count;
    }
    CHECK(hist_total == 8);
    CHECK(stats.to_json().find("hunting_to_assessment_ratio") != std::string::npos);
}

TEST_CASE("single-frame corpus is trivially one bucket") {
    const std::string dir = temp_dir();
    Rng rng(12);
    FrameRecord r = testing::random_record(rng, 0, 0);
    r.labels.frame_value = FrameValue::assessment;
    r.sync_label_vector();
    write_sequence({r}, dir + "/0000.jsonl", 0);

    SequenceManifest m;
    m.anatomy_file = "anatomy.json";
    m.sequences.push_back({0, "0000.jsonl", 1});
    const CorpusStats stats = corpus_stats(m, dir);
    CHECK(stats.total_frames == 1);
    CHECK(stats.frame_value_counts.at("assessment") == 1);
    CHECK(stats.frame_value_counts.at("hunting") == 0);
    CHECK(stats.length_histogram.at(1) == 1);
}

TEST_CASE("corpus generation is identical across worker counts") {
    const SimConfig cfg = SimConfig::defaults();
    const std::string dir1 = temp_dir();
    const std::string dir4 = temp_dir();
    generate_corpus(cfg, 77, 6, 1, dir1);
    generate_corpus(cfg, 77, 6, 4, dir4);
    for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
        const std::string name = entry.path().filename().string();
        std::ifstream a(entry.path(), std::ios::binary);
        std::ifstream b(dir4 + "/" + name, std::ios::binary);
        REQUIRE(b.good());
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
    }
}
