// fixsim: stochastic X-ray-guided pelvic fixation workflow simulator.
//
// Subcommands: simulate, validate, stats, fit, eval. Exit codes:
//   0 success, 1 validation findings, 2 configuration error, 3 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fixsim/corpus.hpp"
#include "fixsim/dataset_io.hpp"
#include "fixsim/jsonfmt.hpp"
#include "fixsim/recognize.hpp"
#include "fixsim/simulation.hpp"

namespace {

using namespace fixsim;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

SimConfig load_config(const std::string& path) {
    if (path.empty()) {
        return SimConfig::defaults();
    }
    return SimConfig::from_file(path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AnatomySpec load_corpus_anatomy(const SequenceManifest& manifest, const std::string& dir) {
    return anatomy_from_json(read_text_file(dir + "/" + manifest.anatomy_file));
}

struct CorpusTables {
    std::vector<std::vector<FrameFeatures>> features;
    std::vector<std::vector<PhaseLabels>> labels;
};

CorpusTables featurize_corpus(const SequenceManifest& manifest, const std::string& dir,
                              const FeatureContext& ctx, uint64_t seed, double noise_rad,
                              size_t skip, size_t limit) {
    CorpusTables out;
    const size_t total = manifest.sequences.size();
    const size_t end = limit < total - std::min(skip, total) ? skip + limit : total;
    for (size_t i = skip; i < end; ++i) {
        const auto& entry = manifest.sequences[i];
        const auto records = read_sequence(dir + "/" + entry.file);
        out.features.push_back(featurize_sequence(
            records, ctx, derive_sequence_seed(seed, entry.sequence_id), noise_rad));
        std::vector<PhaseLabels> labels;
        labels.reserve(records.size());
        for (const auto& r : records) {
            labels.push_back(r.labels);
        }
        out.labels.push_back(std::move(labels));
    }
    return out;
}

int cmd_simulate(const std::string& config_path, bool seed_given, uint64_t seed,
                 const std::string& out_dir, int sequences, int workers) {
    const SimConfig cfg = load_config(config_path);
    if (!seed_given) {
        seed = (static_cast<uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
        std::cout << "seed " << seed << " (drawn from system entropy)\n";
    }
    const SequenceManifest manifest = generate_corpus(cfg, seed, sequences, workers, out_dir);
    uint64_t frames = 0;
    for (const auto& e : manifest.sequences) {
        frames += e.frames;
    }
    std::cout << "wrote " << manifest.sequences.size() << " sequences, " << frames
              << " frames to " << out_dir << " (config " << manifest.config_hash << ")\n";
    return kExitOk;
}

int cmd_validate(const std::string& dir, bool as_json) {
    const SequenceManifest manifest = load_manifest(dir);
    uint64_t total_violations = 0;
    JsonWriter jw;
    jw.begin_object();
    jw.key("sequences").begin_array();

    for (const auto& entry : manifest.sequences) {
        const auto records = read_sequence(dir + "/" + entry.file);
        ValidationReport report = validate_sequence(records);
        if (records.size() != entry.frames) {
            report.violations.push_back(
                {-1, "manifest", "manifest declares " + std::to_string(entry.frames) +
                                     " frames, file has " + std::to_string(records.size())});
        }
        total_violations += report.violations.size();
        if (as_json) {
            jw.begin_object();
            jw.key("id").value_uint(entry.sequence_id);
            jw.key("violations").begin_array();
            for (const auto& v : report.violations) {
                jw.begin_object();
                jw.key("frame").value_int(v.frame_index);
                jw.key("code").value_str(v.code);
                jw.key("message").value_str(v.message);
                jw.end_object();
            }
            jw.end_array();
            jw.end_object();
        } else {
            for (const auto& v : report.violations) {
                std::cout << entry.file << " frame " << v.frame_index << " [" << v.code << "] "
                          << v.message << "\n";
            }
        }
    }

    jw.end_array();
    jw.key("total_violations").value_uint(total_violations);
    jw.end_object();
    if (as_json) {
        std::cout << jw.str() << "\n";
    } else {
        std::cout << manifest.sequences.size() << " sequences checked, " << total_violations
                  << " violations\n";
    }
    return total_violations == 0 ? kExitOk : kExitFindings;
}

int cmd_stats(const std::string& dir, bool as_json) {
    const SequenceManifest manifest = load_manifest(dir);
    const CorpusStats stats = corpus_stats(manifest, dir);
    std::cout << (as_json ? stats.to_json() + "\n" : stats.to_text());
    return kExitOk;
}

int cmd_fit(const std::string& dir, const std::string& out_path, const std::string& config_path,
            double noise_deg, uint64_t seed, size_t limit) {
    const SimConfig cfg = load_config(config_path);
    const SequenceManifest manifest = load_manifest(dir);
    const AnatomySpec anatomy = load_corpus_anatomy(manifest, dir);
    const FeatureContext ctx = FeatureContext::make(anatomy, cfg.views);

    const CorpusTables tables =
        featurize_corpus(manifest, dir, ctx, seed, deg_to_rad(noise_deg), 0, limit);
    if (tables.features.empty()) {
        throw std::invalid_argument("fit: no sequences selected");
    }
    const PhaseDecoder decoder = fit_decoder(tables.features, tables.labels);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write: " + out_path);
    }
    out << decoder_to_json(decoder) << "\n";
    std::cout << "fitted decoder on " << tables.features.size() << " sequences -> " << out_path
              << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& decoder_path, const std::string& dir,
             const std::string& config_path, double noise_deg, uint64_t seed, size_t skip,
             size_t limit, bool as_json) {
    const SimConfig cfg = load_config(config_path);
    const PhaseDecoder decoder = decoder_from_json(read_text_file(decoder_path));
    const SequenceManifest manifest = load_manifest(dir);
    const AnatomySpec anatomy = load_corpus_anatomy(manifest, dir);
    const FeatureContext ctx = FeatureContext::make(anatomy, cfg.views);

    const CorpusTables tables =
        featurize_corpus(manifest, dir, ctx, seed, deg_to_rad(noise_deg), skip, limit);
    if (tables.features.empty()) {
        throw std::invalid_argument("eval: no sequences selected (check --skip/--limit)");
    }
    std::vector<std::vector<PhaseLabels>> predictions;
    predictions.reserve(tables.features.size());
    for (const auto& seq : tables.features) {
        predictions.push_back(decode(decoder, seq));
    }
    const Metrics metrics = evaluate(predictions, tables.labels);
    std::cout << (as_json ? metrics.to_json() + "\n" : metrics.to_text());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"X-ray-guided percutaneous pelvic fixation workflow simulator"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate an annotated frame-record corpus");
    std::string sim_config;
    std::string sim_out;
    uint64_t sim_seed = 0;
    int sim_sequences = 100;
    int sim_workers = 1;
    sim->add_option("--config", sim_config, "TOML configuration file");
    sim->add_option("--out", sim_out, "output directory")->required();
    auto* seed_opt = sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--sequences", sim_sequences, "number of sequences")
        ->check(CLI::PositiveNumber);
    sim->add_option("--workers", sim_workers, "parallel workers")->check(CLI::PositiveNumber);

    // validate
    auto* val = app.add_subcommand("validate", "check a corpus against the label grammar");
    std::string val_corpus;
    bool val_json = false;
    val->add_option("--corpus", val_corpus, "corpus directory")->required();
    val->add_flag("--json", val_json, "machine-readable report");

    // stats
    auto* st = app.add_subcommand("stats", "label frequencies and sequence-length histogram");
    std::string st_corpus;
    bool st_json = false;
    st->add_option("--corpus", st_corpus, "corpus directory")->required();
    st->add_flag("--json", st_json, "machine-readable report");

    // fit
    auto* fit = app.add_subcommand("fit", "fit the sequential phase decoder on a corpus");
    std::string fit_corpus;
    std::string fit_out;
    std::string fit_config;
    double fit_noise = 0.0;
    uint64_t fit_seed = 0;
    size_t fit_limit = SIZE_MAX;
    fit->add_option("--corpus", fit_corpus, "corpus directory")->required();
    fit->add_option("--out", fit_out, "decoder output file")->required();
    fit->add_option("--config", fit_config, "TOML configuration file");
    fit->add_option("--noise", fit_noise, "feature noise sigma (degrees)");
    fit->add_option("--seed", fit_seed, "feature noise seed");
    fit->add_option("--limit", fit_limit, "use only the first N sequences");

    // eval
    auto* ev = app.add_subcommand("eval", "decode a corpus and report per-level accuracy");
    std::string ev_decoder;
    std::string ev_corpus;
    std::string ev_config;
    double ev_noise = 0.0;
    uint64_t ev_seed = 0;
    size_t ev_skip = 0;
    size_t ev_limit = SIZE_MAX;
    bool ev_json = false;
    ev->add_option("--decoder", ev_decoder, "decoder JSON file")->required();
    ev->add_option("--corpus", ev_corpus, "corpus directory")->required();
    ev->add_option("--config", ev_config, "TOML configuration file");
    ev->add_option("--noise", ev_noise, "feature noise sigma (degrees)");
    ev->add_option("--seed", ev_seed, "feature noise seed");
    ev->add_option("--skip", ev_skip, "skip the first N sequences");
    ev->add_option("--limit", ev_limit, "evaluate at most N sequences");
    ev->add_flag("--json", ev_json, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_config, seed_opt->count() > 0, sim_seed, sim_out,
                                sim_sequences, sim_workers);
        }
        if (val->parsed()) {
            return cmd_validate(val_corpus, val_json);
        }
        if (st->parsed()) {
            return cmd_stats(st_corpus, st_json);
        }
        if (fit->parsed()) {
            return cmd_fit(fit_corpus, fit_out, fit_config, fit_noise, fit_seed, fit_limit);
        }
        if (ev->parsed()) {
            return cmd_eval(ev_decoder, ev_corpus, ev_config, ev_noise, ev_seed, ev_skip,
                            ev_limit, ev_json);
        }
    } catch (const toml::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
