#include "fixsim/corpus.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "fixsim/jsonfmt.hpp"
#include "fixsim/simulation.hpp"

namespace fixsim {

std::string sequence_file_name(uint32_t sequence_id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04u.jsonl", sequence_id);
    return buf;
}

SequenceManifest generate_corpus(const SimConfig& cfg, uint64_t master_seed, int num_sequences,
                                 int workers, const std::string& out_dir) {
    cfg.validate();
    if (num_sequences < 1) {
        throw std::invalid_argument("generate_corpus: need at least one sequence");
    }
    if (workers < 1) {
        workers = 1;
    }
    std::filesystem::create_directories(out_dir);

    // One anatomy per corpus, derived from the master seed.
    Rng anatomy_rng(splitmix64(master_seed));
    const AnatomySpec anatomy = synth_pelvis(anatomy_rng, cfg.synth_params());
    {
        std::ofstream out(out_dir + "/anatomy.json", std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + out_dir + "/anatomy.json");
        }
        out << anatomy_to_json(anatomy) << "\n";
    }

    // Sequences are independent given their derived seed; workers race over
    // an index counter and results land in slots, so ordering is stable.
    std::vector<std::vector<FrameRecord>> results(num_sequences);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    const auto worker_loop = [&] {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= num_sequences || failed.load()) {
                return;
            }
            try {
                const uint64_t seed = derive_sequence_seed(master_seed, idx);
                results[idx] = run_sequence(seed, anatomy, cfg, static_cast<uint32_t>(idx));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed.store(true);
                if (error_message.empty()) {
                    error_message = e.what();
                }
                return;
            }
        }
    };

    if (workers == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker_loop);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failed.load()) {
        throw std::runtime_error("sequence generation failed: " + error_message);
    }

    SequenceManifest manifest;
    manifest.config_hash = to_hex(fnv1a64(cfg.canonical_string()));
    manifest.master_seed = master_seed;
    manifest.anatomy_file = "anatomy.json";
    for (int i = 0; i < num_sequences; ++i) {
        const std::string file = sequence_file_name(static_cast<uint32_t>(i));
        manifest.sequences.push_back(
            write_sequence(results[i], out_dir + "/" + file, static_cast<uint32_t>(i)));
    }
    {
        std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + out_dir + "/manifest.json");
        }
        out << manifest_to_json(manifest) << "\n";
    }
    return manifest;
}

}  // namespace fixsim
