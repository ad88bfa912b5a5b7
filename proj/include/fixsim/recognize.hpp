#pragma once

#include <string>
#include <vector>

#include "fixsim/anatomy.hpp"
#include "fixsim/config.hpp"
#include "fixsim/frame_record.hpp"
#include "fixsim/random.hpp"

namespace fixsim {

// Geometry shared by the featurizer across one corpus (world-frame view rays
// and corridor cylinders).
struct FeatureContext {
    std::array<UnitVec3, kNumViews> view_rays_world{};
    std::array<double, kNumViews> view_tolerance_rad{};
    std::vector<Corridor> corridors;

    static FeatureContext make(const AnatomySpec& anatomy, const ViewTable& views);
};

// Noisy per-frame observations standing in for an image encoder: the ray
// quantized to the nearest standard view plus its residual, the nearest
// corridor to the active tool, tool kind/depth, and a view-centering bit.
struct FrameFeatures {
    int view_bin = 0;
    double view_residual_rad = 0.0;
    double residual_ratio = 0.0;  // residual / tolerance of the nearest view
    bool aligned_ok = false;      // residual_ratio <= 1
    int corridor_bin = -1;        // -1 when no tool is present
    int active_kind = 0;          // 0 none, 1 wire, 2 screw
    double depth_fraction = 0.0;
    double tool_angle_rad = 0.0;  // active tool direction vs. nearest corridor axis
    bool center_ok = false;
    int n_wires = 0;
    int n_screws = 0;
};

// Deterministic given the rng state; noise_rad > 0 perturbs the observed ray
// uniformly within a cap of that colatitude before quantization.
FrameFeatures featurize(const FrameRecord& record, const FeatureContext& ctx, Rng& rng,
                        double noise_rad);

std::vector<FrameFeatures> featurize_sequence(const std::vector<FrameRecord>& records,
                                              const FeatureContext& ctx, uint64_t seed,
                                              double noise_rad);

// --- per-level causal decoder ----------------------------------------------

struct LevelModel {
    int n_states = 0;
    int n_symbols = 0;
    std::vector<double> initial;     // n_states
    std::vector<double> transition;  // n_states x n_states, rows sum to 1
    std::vector<double> emission;    // n_states x n_symbols, rows sum to 1
};

struct PhaseDecoder {
    LevelModel corridor;
    LevelModel activity;
    LevelModel view;
    LevelModel frame;
};

int feature_symbol(const FrameFeatures& f, int level);  // level 0..3
int level_symbol_count(int level);

// Maximum-likelihood count estimates with add-one smoothing. Throws on an
// empty corpus or shape mismatch.
PhaseDecoder fit_decoder(const std::vector<std::vector<FrameFeatures>>& features,
                         const std::vector<std::vector<PhaseLabels>>& labels);

// Causal forward filtering: the prediction at frame t uses symbols [0, t]
// only. Ties in the argmax break toward the lower label index.
std::vector<PhaseLabels> decode(const PhaseDecoder& decoder,
                                const std::vector<FrameFeatures>& features);

// Total forward log-likelihood of a symbol sequence under one level model.
double level_log_likelihood(const LevelModel& model, const std::vector<int>& symbols);

std::string decoder_to_json(const PhaseDecoder& decoder);
PhaseDecoder decoder_from_json(const std::string& text);

// --- metrics -----------------------------------------------------------------

struct LevelMetrics {
    int n_classes = 0;
    uint64_t total = 0;
    uint64_t correct = 0;
    std::vector<uint64_t> confusion;  // n_classes x n_classes, row = truth

    double accuracy() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

struct Metrics {
    LevelMetrics corridor;
    LevelMetrics activity;
    LevelMetrics view;
    LevelMetrics frame;

    // Mean of the four per-level frame accuracies.
    double mean_accuracy() const;
    std::string to_json() const;
    std::string to_text() const;
};

// Frame accuracy per level plus confusion matrices. Throws on length
// mismatch between predictions and truth.
Metrics evaluate(const std::vector<std::vector<PhaseLabels>>& predictions,
                 const std::vector<std::vector<PhaseLabels>>& truth);

}  // namespace fixsim
