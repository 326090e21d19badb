#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foundad/dataset.hpp"
#include "foundad/embedding.hpp"
#include "foundad/projector.hpp"
#include "foundad/synthesis.hpp"

namespace foundad {

enum class LossNormalization {
    ElementMean,  // mean over all patches x channels (default)
    PatchSum,     // (1/N) sum_i ||projected_i - reference_i||^2
};

struct TrainConfig {
    double lr = 1e-3;
    double weight_decay = 1e-4;
    int batch_size = 8;
    int iterations = 1000;
    double sigma = 0.5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t data_seed = 0;
    std::uint64_t init_seed = 0;  // overrides ProjectorConfig::init_seed
    LossNormalization loss = LossNormalization::ElementMean;
    int image_size = 512;
    SynthesisParams synthesis;

    void validate() const;
};

struct TrainLog {
    std::vector<double> losses;
    std::vector<int> synthesized;  // images synthesized per iteration
    double wall_seconds = 0.0;

    /// Comment header with the run configuration, then iteration,loss,synth_flag_count.
    /// Wall time is excluded so reruns are byte-identical.
    std::string to_csv(const TrainConfig& config) const;
};

double manifold_loss(const PatchGrid& projected, const PatchGrid& reference,
                     LossNormalization mode = LossNormalization::ElementMean);

/// d loss / d projected.
PatchGrid manifold_loss_grad(const PatchGrid& projected, const PatchGrid& reference,
                             LossNormalization mode = LossNormalization::ElementMean);

struct AdamSettings {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // coupled: added to the gradient
};

/// One Adam update of a flat tensor at step t >= 1 with bias correction.
void adam_update(std::span<float> param, std::span<const float> grad, std::span<float> first_moment,
                 std::span<float> second_moment, const AdamSettings& settings, int t);

struct AdamState {
    std::vector<std::vector<float>> first_moment;
    std::vector<std::vector<float>> second_moment;

    static AdamState like(const ProjectorParams& params);
};

/// Throws Error(Numeric) naming the first tensor holding a non-finite gradient.
void adam_step(ProjectorParams& params, const ProjectorParams& grads, AdamState& state, const AdamSettings& settings, int t);

AdamSettings adam_settings(const TrainConfig& config) noexcept;

struct TrainingImage {
    std::string id;
    Image pixels;
};

struct TrainResult {
    ProjectorParams params;
    TrainLog log;
};

/// Few-shot training over a pooled image set (all categories share one model).
/// Each iteration samples batch_size images uniformly with replacement, gates
/// synthesis per image, and minimizes the mean manifold loss between
/// forward(encode(I_s)) and encode(I_r) with Adam.
TrainResult train(const std::vector<TrainingImage>& pool, const EmbeddingProvider& provider,
                  const ProjectorConfig& projector, const TrainConfig& config);

/// Loads every manifest selection from the dataset root at config.image_size.
std::vector<TrainingImage> load_training_pool(const FewShotManifest& manifest, const std::filesystem::path& root,
                                              int image_size);

TrainResult train(const FewShotManifest& manifest, const std::filesystem::path& root, const EmbeddingProvider& provider,
                  const ProjectorConfig& projector, const TrainConfig& config);

}  // namespace foundad
