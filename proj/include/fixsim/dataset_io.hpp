#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fixsim/frame_record.hpp"

namespace fixsim {

struct ManifestEntry {
    uint32_t sequence_id = 0;
    std::string file;        // relative to the manifest directory
    uint32_t frames = 0;
};

struct SequenceManifest {
    int schema_version = kSchemaVersion;
    std::string config_hash;
    uint64_t master_seed = 0;
    std::string anatomy_file;
    std::vector<ManifestEntry> sequences;
};

std::string manifest_to_json(const SequenceManifest& manifest);
SequenceManifest manifest_from_json(const std::string& text);

// One record per line, canonical JSONL. Empty sequences produce an empty
// file. Returns the manifest entry for the written file.
ManifestEntry write_sequence(const std::vector<FrameRecord>& records, const std::string& path,
                             uint32_t sequence_id);

// Throws std::runtime_error naming file and line on any malformed content.
std::vector<FrameRecord> read_sequence(const std::string& path);

// --- grammar validation ---------------------------------------------------

struct Violation {
    int frame_index = -1;  // -1 for sequence-level findings
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Report-only check of the label grammar: one-hot label groups matching the
// categorical labels, contiguous frame indices, activity ordering within a
// corridor episode, hunting-before-assessment within a view episode, the
// 1000-frame cap, tool-count caps, and landmark cardinality.
ValidationReport validate_sequence(const std::vector<FrameRecord>& records);

// --- corpus statistics ------------------------------------------------------

struct CorpusStats {
    uint64_t total_frames = 0;
    uint64_t total_sequences = 0;
    std::map<std::string, uint64_t> corridor_counts;
    std::map<std::string, uint64_t> activity_counts;
    std::map<std::string, uint64_t> view_counts;
    std::map<std::string, uint64_t> frame_value_counts;
    std::map<uint32_t, uint64_t> length_histogram;  // sequence length -> count

    double hunting_to_assessment_ratio() const;
    std::string to_json() const;
    std::string to_text() const;
};

// Reads every sequence referenced by the manifest in `dir`.
CorpusStats corpus_stats(const SequenceManifest& manifest, const std::string& dir);

SequenceManifest load_manifest(const std::string& dir);

}  // namespace fixsim
