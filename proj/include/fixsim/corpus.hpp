#pragma once

#include <cstdint>
#include <string>

#include "fixsim/config.hpp"
#include "fixsim/dataset_io.hpp"

namespace fixsim {

// Generates `num_sequences` sequences under out_dir (anatomy.json, NNNN.jsonl
// per sequence, manifest.json). Sequence i runs on seed
// derive_sequence_seed(master_seed, i); the anatomy is synthesized once from
// splitmix64(master_seed). Workers only affect scheduling: output bytes are a
// function of (config, master_seed, num_sequences) alone.
SequenceManifest generate_corpus(const SimConfig& cfg, uint64_t master_seed, int num_sequences,
                                 int workers, const std::string& out_dir);

std::string sequence_file_name(uint32_t sequence_id);

}  // namespace fixsim
