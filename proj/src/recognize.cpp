#include "fixsim/recognize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixsim/camera.hpp"
#include "fixsim/jsonfmt.hpp"
#include "fixsim/sampling.hpp"

namespace fixsim {

FeatureContext FeatureContext::make(const AnatomySpec& anatomy, const ViewTable& views) {
    FeatureContext ctx;
    for (int i = 0; i < kNumViews; ++i) {
        const ViewSpec& s = views.spec(static_cast<ViewName>(i));
        ctx.view_rays_world[i] = normalized(anatomy.app_frame.dir_to_world(s.ideal_ray_app));
        ctx.view_tolerance_rad[i] = s.tolerance_rad;
    }
    ctx.corridors = anatomy.corridors;
    return ctx;
}

namespace {

double point_to_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.norm2();
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return (p - (a + ab * t)).norm();
}

int depth_bin(double fraction) {
    if (fraction <= 0.0) return 0;
    if (fraction < 1.0 / 3.0) return 1;
    if (fraction < 2.0 / 3.0) return 2;
    return 3;
}

}  // namespace

FrameFeatures featurize(const FrameRecord& record, const FeatureContext& ctx, Rng& rng,
                        double noise_rad) {
    FrameFeatures f;

    UnitVec3 ray = record.view_ray;
    if (noise_rad > 0.0) {
        ray = sample_solid_angle(rng, normalized(ray), noise_rad);
    }
    double best = 1e30;
    for (int i = 0; i < kNumViews; ++i) {
        const double a = angle_between(ray, ctx.view_rays_world[i]);
        if (a < best) {
            best = a;
            f.view_bin = i;
        }
    }
    f.view_residual_rad = best;
    f.residual_ratio = best / ctx.view_tolerance_rad[f.view_bin];
    f.aligned_ok = f.residual_ratio <= 1.0;

    for (const auto& t : record.tools) {
        if (t.kind == ToolKind::wire) {
            f.n_wires++;
        } else {
            f.n_screws++;
        }
    }

    if (!record.tools.empty()) {
        const ToolRecord& active = record.tools.back();
        f.active_kind = active.kind == ToolKind::wire ? 1 : 2;

        // Nearest corridor by proximity plus a direction-mismatch penalty; a
        // tool sits near and points along its corridor. Uninserted wires
        // hover at the corridor mouth, so distance is taken to the entry
        // point until insertion starts.
        constexpr double kAnglePenaltyMmPerRad = 30.0;
        const bool inserted = active.depth_mm > 1.0;
        double best_score = 1e30;
        for (size_t i = 0; i < ctx.corridors.size(); ++i) {
            const double d =
                inserted ? point_to_segment_distance(active.tip, ctx.corridors[i].start_a,
                                                     ctx.corridors[i].end_b)
                         : std::min((active.tip - ctx.corridors[i].start_a).norm(),
                                    (active.tip - ctx.corridors[i].end_b).norm());
            const double mis = angle_to_line(active.dir, ctx.corridors[i].axis());
            const double score = d + kAnglePenaltyMmPerRad * mis;
            if (score < best_score) {
                best_score = score;
                f.corridor_bin = static_cast<int>(i);
            }
        }
        const Corridor& nearest = ctx.corridors[f.corridor_bin];
        const double max_depth =
            active.kind == ToolKind::screw && active.length_mm > 0.0 ? active.length_mm
                                                                     : nearest.length();
        f.depth_fraction =
            max_depth > 0.0 ? std::min(1.0, std::max(0.0, active.depth_mm / max_depth)) : 0.0;
        f.tool_angle_rad = angle_to_line(active.dir, nearest.axis());

        // Does the nearest corridor midpoint land near the image center?
        Projection proj;
        proj.p = record.projection;
        const auto px = proj.project(nearest.midpoint());
        if (px) {
            const double du = px->u - record.image_width_px / 2.0;
            const double dv = px->v - record.image_height_px / 2.0;
            const double limit = 0.4 * std::min(record.image_height_px, record.image_width_px);
            f.center_ok = std::hypot(du, dv) < limit;
        }
    }
    return f;
}

std::vector<FrameFeatures> featurize_sequence(const std::vector<FrameRecord>& records,
                                              const FeatureContext& ctx, uint64_t seed,
                                              double noise_rad) {
    Rng rng(seed);
    std::vector<FrameFeatures> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(featurize(r, ctx, rng, noise_rad));
    }
    return out;
}

namespace {

int residual_ratio_bin(double ratio) {
    if (ratio < 0.5) return 0;
    if (ratio <= 1.0) return 1;
    if (ratio <= 2.0) return 2;
    return 3;
}

}  // namespace

int level_symbol_count(int level) {
    switch (level) {
        case 0: return kNumCorridors + 1;  // nearest corridor or none
        case 1: return 3 * 4;              // active kind x depth bin
        case 2: return kNumViews * 2;      // nearest view x aligned bit
        case 3: return 4 * 2;              // residual-ratio bin x centered bit
        default: throw std::invalid_argument("level must be 0..3");
    }
}

int feature_symbol(const FrameFeatures& f, int level) {
    switch (level) {
        case 0: return f.corridor_bin + 1;
        case 1: return f.active_kind * 4 + depth_bin(f.depth_fraction);
        case 2: return f.view_bin * 2 + (f.aligned_ok ? 1 : 0);
        case 3: return residual_ratio_bin(f.residual_ratio) * 2 + (f.center_ok ? 1 : 0);
        default: throw std::invalid_argument("level must be 0..3");
    }
}

namespace {

constexpr std::array<int, 4> kLevelStates = {kNumCorridors, kNumActivities, kNumViews,
                                             kNumFrameValues};

int label_state(const PhaseLabels& l, int level) {
    switch (level) {
        case 0: return static_cast<int>(l.corridor);
        case 1: return static_cast<int>(l.activity);
        case 2: return static_cast<int>(l.view);
        case 3: return static_cast<int>(l.frame_value);
        default: throw std::invalid_argument("level must be 0..3");
    }
}

LevelModel fit_level(const std::vector<std::vector<FrameFeatures>>& features,
                     const std::vector<std::vector<PhaseLabels>>& labels, int level) {
    LevelModel m;
    m.n_states = kLevelStates[level];
    m.n_symbols = level_symbol_count(level);

    // Add-one smoothing on the initial and transition counts; emissions get
    // a light epsilon so rare symbols keep their discriminative weight.
    std::vector<double> init(m.n_states, 1.0);
    std::vector<double> trans(m.n_states * m.n_states, 1.0);
    std::vector<double> emit(m.n_states * m.n_symbols, 0.1);

    for (size_t s = 0; s < labels.size(); ++s) {
        const auto& seq_labels = labels[s];
        const auto& seq_features = features[s];
        for (size_t t = 0; t < seq_labels.size(); ++t) {
            const int state = label_state(seq_labels[t], level);
            const int symbol = feature_symbol(seq_features[t], level);
            emit[state * m.n_symbols + symbol] += 1.0;
            if (t == 0) {
                init[state] += 1.0;
            } else {
                const int prev = label_state(seq_labels[t - 1], level);
                trans[prev * m.n_states + state] += 1.0;
            }
        }
    }

    const auto normalize_rows = [](std::vector<double>& mat, int rows, int cols) {
        for (int r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < cols; ++c) {
                sum += mat[r * cols + c];
            }
            for (int c = 0; c < cols; ++c) {
                mat[r * cols + c] /= sum;
            }
        }
    };
    normalize_rows(init, 1, m.n_states);
    normalize_rows(trans, m.n_states, m.n_states);
    normalize_rows(emit, m.n_states, m.n_symbols);

    m.initial = std::move(init);
    m.transition = std::move(trans);
    m.emission = std::move(emit);
    return m;
}

// One forward filtering step; alpha is renormalized to sum 1.
void forward_step(const LevelModel& m, std::vector<double>& alpha, int symbol, bool first) {
    std::vector<double> next(m.n_states, 0.0);
    for (int s = 0; s < m.n_states; ++s) {
        double prior = 0.0;
        if (first) {
            prior = m.initial[s];
        } else {
            for (int p = 0; p < m.n_states; ++p) {
                prior += alpha[p] * m.transition[p * m.n_states + s];
            }
        }
        next[s] = prior * m.emission[s * m.n_symbols + symbol];
    }
    double sum = 0.0;
    for (double v : next) {
        sum += v;
    }
    if (sum <= 0.0) {
        // Unreachable with smoothed models, but keep the filter well-defined.
        std::fill(next.begin(), next.end(), 1.0 / m.n_states);
        sum = 1.0;
    }
    for (double& v : next) {
        v /= sum;
    }
    alpha = std::move(next);
}

int argmax_state(const std::vector<double>& alpha) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(alpha.size()); ++i) {
        if (alpha[i] > alpha[best]) {
            best = i;
        }
    }
    return best;
}

void check_model(const LevelModel& m, int level, const char* name) {
    if (m.n_states != kLevelStates[level] || m.n_symbols != level_symbol_count(level)) {
        throw std::invalid_argument(std::string("decoder: bad shape for level ") + name);
    }
    const auto check_rows = [&](const std::vector<double>& mat, int rows, int cols,
                                const char* what) {
        if (mat.size() != static_cast<size_t>(rows) * cols) {
            throw std::invalid_argument(std::string("decoder: bad ") + what + " size for " + name);
        }
        for (int r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < cols; ++c) {
                const double v = mat[r * cols + c];
                if (v < 0.0) {
                    throw std::invalid_argument(std::string("decoder: negative ") + what);
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                throw std::invalid_argument(std::string("decoder: ") + what +
                                            " row does not sum to 1");
            }
        }
    };
    check_rows(m.initial, 1, m.n_states, "initial");
    check_rows(m.transition, m.n_states, m.n_states, "transition");
    check_rows(m.emission, m.n_states, m.n_symbols, "emission");
}

}  // namespace

PhaseDecoder fit_decoder(const std::vector<std::vector<FrameFeatures>>& features,
                         const std::vector<std::vector<PhaseLabels>>& labels) {
    if (features.size() != labels.size()) {
        throw std::invalid_argument("fit_decoder: features/labels sequence count mismatch");
    }
    size_t total = 0;
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != labels[i].size()) {
            throw std::invalid_argument("fit_decoder: sequence length mismatch");
        }
        total += features[i].size();
    }
    if (total == 0) {
        throw std::invalid_argument("fit_decoder: empty corpus");
    }
    PhaseDecoder d;
    d.corridor = fit_level(features, labels, 0);
    d.activity = fit_level(features, labels, 1);
    d.view = fit_level(features, labels, 2);
    d.frame = fit_level(features, labels, 3);
    return d;
}

std::vector<PhaseLabels> decode(const PhaseDecoder& decoder,
                                const std::vector<FrameFeatures>& features) {
    const std::array<const LevelModel*, 4> models = {&decoder.corridor, &decoder.activity,
                                                     &decoder.view, &decoder.frame};
    std::array<std::vector<double>, 4> alpha;
    std::vector<PhaseLabels> out;
    out.reserve(features.size());

    for (size_t t = 0; t < features.size(); ++t) {
        PhaseLabels pred;
        for (int level = 0; level < 4; ++level) {
            forward_step(*models[level], alpha[level], feature_symbol(features[t], level),
                         t == 0);
            const int s = argmax_state(alpha[level]);
            switch (level) {
                case 0: pred.corridor = static_cast<CorridorId>(s); break;
                case 1: pred.activity = static_cast<Activity>(s); break;
                case 2: pred.view = static_cast<ViewName>(s); break;
                case 3: pred.frame_value = static_cast<FrameValue>(s); break;
            }
        }
        out.push_back(pred);
    }
    return out;
}

double level_log_likelihood(const LevelModel& m, const std::vector<int>& symbols) {
    std::vector<double> alpha(m.n_states, 0.0);
    double log_lik = 0.0;
    for (size_t t = 0; t < symbols.size(); ++t) {
        const int symbol = symbols[t];
        if (symbol < 0 || symbol >= m.n_symbols) {
            throw std::invalid_argument("level_log_likelihood: symbol out of range");
        }
        std::vector<double> next(m.n_states, 0.0);
        for (int s = 0; s < m.n_states; ++s) {
            double prior = 0.0;
            if (t == 0) {
                prior = m.initial[s];
            } else {
                for (int p = 0; p < m.n_states; ++p) {
                    prior += alpha[p] * m.transition[p * m.n_states + s];
                }
            }
            next[s] = prior * m.emission[s * m.n_symbols + symbol];
        }
        double sum = 0.0;
        for (double v : next) {
            sum += v;
        }
        if (sum <= 0.0) {
            return -1e300;
        }
        log_lik += std::log(sum);
        for (double& v : next) {
            v /= sum;
        }
        alpha = std::move(next);
    }
    return log_lik;
}

namespace {

void write_level(JsonWriter& w, const char* name, const LevelModel& m) {
    w.key(name).begin_object();
    w.key("n_states").value_int(m.n_states);
    w.key("n_symbols").value_int(m.n_symbols);
    w.key("initial").value_num_array(m.initial);
    w.key("transition").value_num_array(m.transition);
    w.key("emission").value_num_array(m.emission);
    w.end_object();
}

LevelModel read_level(const nlohmann::json& j, int level, const char* name) {
    LevelModel m;
    const auto& lj = j.at(name);
    m.n_states = lj.at("n_states").get<int>();
    m.n_symbols = lj.at("n_symbols").get<int>();
    m.initial = lj.at("initial").get<std::vector<double>>();
    m.transition = lj.at("transition").get<std::vector<double>>();
    m.emission = lj.at("emission").get<std::vector<double>>();
    check_model(m, level, name);
    return m;
}

}  // namespace

std::string decoder_to_json(const PhaseDecoder& d) {
    JsonWriter w;
    w.begin_object();
    w.key("schema_version").value_int(kSchemaVersion);
    write_level(w, "corridor", d.corridor);
    write_level(w, "activity", d.activity);
    write_level(w, "view", d.view);
    write_level(w, "frame", d.frame);
    w.end_object();
    return w.take();
}

PhaseDecoder decoder_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("decoder: malformed JSON: ") + e.what());
    }
    if (j.value("schema_version", -1) != kSchemaVersion) {
        throw std::runtime_error("decoder: unsupported schema_version");
    }
    PhaseDecoder d;
    d.corridor = read_level(j, 0, "corridor");
    d.activity = read_level(j, 1, "activity");
    d.view = read_level(j, 2, "view");
    d.frame = read_level(j, 3, "frame");
    return d;
}

double Metrics::mean_accuracy() const {
    return (corridor.accuracy() + activity.accuracy() + view.accuracy() + frame.accuracy()) / 4.0;
}

namespace {

void accumulate_level(LevelMetrics& lm, int truth, int pred) {
    lm.total++;
    if (truth == pred) {
        lm.correct++;
    }
    lm.confusion[truth * lm.n_classes + pred]++;
}

void write_metrics_level(JsonWriter& w, const char* name, const LevelMetrics& lm) {
    w.key(name).begin_object();
    w.key("accuracy").value_num(lm.accuracy());
    w.key("total").value_uint(lm.total);
    w.key("correct").value_uint(lm.correct);
    w.key("confusion").begin_array();
    for (uint64_t v : lm.confusion) {
        w.value_uint(v);
    }
    w.end_array();
    w.end_object();
}

}  // namespace

std::string Metrics::to_json() const {
    JsonWriter w;
    w.begin_object();
    write_metrics_level(w, "corridor", corridor);
    write_metrics_level(w, "activity", activity);
    write_metrics_level(w, "view", view);
    write_metrics_level(w, "frame", frame);
    w.key("mean_accuracy").value_num(mean_accuracy());
    w.end_object();
    return w.take();
}

std::string Metrics::to_text() const {
    std::ostringstream out;
    char line[96];
    const auto row = [&](const char* name, const LevelMetrics& lm) {
        std::snprintf(line, sizeof(line), "%-10s %8.3f%%  (%llu/%llu)\n", name,
                      100.0 * lm.accuracy(), static_cast<unsigned long long>(lm.correct),
                      static_cast<unsigned long long>(lm.total));
        out << line;
    };
    row("corridor", corridor);
    row("activity", activity);
    row("view", view);
    row("frame", frame);
    std::snprintf(line, sizeof(line), "%-10s %8.3f%%\n", "mean", 100.0 * mean_accuracy());
    out << line;
    return out.str();
}

Metrics evaluate(const std::vector<std::vector<PhaseLabels>>& predictions,
                 const std::vector<std::vector<PhaseLabels>>& truth) {
    if (predictions.size() != truth.size()) {
        throw std::invalid_argument("evaluate: sequence count mismatch");
    }
    Metrics m;
    const std::array<LevelMetrics*, 4> levels = {&m.corridor, &m.activity, &m.view, &m.frame};
    for (int level = 0; level < 4; ++level) {
        levels[level]->n_classes = kLevelStates[level];
        levels[level]->confusion.assign(
            static_cast<size_t>(kLevelStates[level]) * kLevelStates[level], 0);
    }
    for (size_t s = 0; s < predictions.size(); ++s) {
        if (predictions[s].size() != truth[s].size()) {
            throw std::invalid_argument("evaluate: sequence length mismatch at index " +
                                        std::to_string(s));
        }
        for (size_t t = 0; t < predictions[s].size(); ++t) {
            for (int level = 0; level < 4; ++level) {
                accumulate_level(*levels[level], label_state(truth[s][t], level),
                                 label_state(predictions[s][t], level));
            }
        }
    }
    return m;
}

}  // namespace fixsim
