#include "foundad/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "foundad/error.hpp"
#include "foundad/parallel.hpp"
#include "foundad/rng.hpp"

namespace foundad {

void TrainConfig::validate() const {
    if (!(lr > 0.0)) fail(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (!(weight_decay >= 0.0)) fail(ErrorKind::InvalidArgument, "weight decay must be non-negative");
    if (batch_size < 1) fail(ErrorKind::InvalidArgument, "batch size must be at least 1");
    if (iterations < 0) fail(ErrorKind::InvalidArgument, "iterations must be non-negative");
    if (!(sigma >= 0.0 && sigma <= 1.0)) fail(ErrorKind::InvalidArgument, "sigma must lie in [0, 1]");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        fail(ErrorKind::InvalidArgument, "Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) fail(ErrorKind::InvalidArgument, "Adam epsilon must be positive");
    if (image_size < 1) fail(ErrorKind::InvalidArgument, "image size must be positive");
    synthesis.validate();
}

namespace {

double loss_denominator(const PatchGrid& grid, LossNormalization mode) {
    return mode == LossNormalization::ElementMean ? static_cast<double>(grid.values.size()) : static_cast<double>(grid.tokens());
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

}  // namespace

double manifold_loss(const PatchGrid& projected, const PatchGrid& reference, LossNormalization mode) {
    if (!projected.same_shape(reference)) fail(ErrorKind::ShapeMismatch, "manifold_loss: grids differ in shape");
    double sum = 0.0;
    for (std::size_t i = 0; i < projected.values.size(); ++i) {
        const double diff = static_cast<double>(projected.values[i]) - reference.values[i];
        sum += diff * diff;
    }
    return sum / loss_denominator(projected, mode);
}

PatchGrid manifold_loss_grad(const PatchGrid& projected, const PatchGrid& reference, LossNormalization mode) {
    if (!projected.same_shape(reference)) fail(ErrorKind::ShapeMismatch, "manifold_loss: grids differ in shape");
    PatchGrid grad(projected.rows, projected.cols, projected.dim);
    const double scale = 2.0 / loss_denominator(projected, mode);
    for (std::size_t i = 0; i < grad.values.size(); ++i) {
        grad.values[i] = static_cast<float>(scale * (static_cast<double>(projected.values[i]) - reference.values[i]));
    }
    return grad;
}

void adam_update(std::span<float> param, std::span<const float> grad, std::span<float> first_moment,
                 std::span<float> second_moment, const AdamSettings& s, int t) {
    if (t < 1) fail(ErrorKind::InvalidArgument, "Adam step index must be >= 1");
    if (grad.size() != param.size() || first_moment.size() != param.size() || second_moment.size() != param.size()) {
        fail(ErrorKind::ShapeMismatch, "Adam buffers differ in size");
    }
    const double correction1 = 1.0 - std::pow(s.beta1, t);
    const double correction2 = 1.0 - std::pow(s.beta2, t);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = static_cast<double>(grad[i]) + s.weight_decay * param[i];
        const double m = s.beta1 * first_moment[i] + (1.0 - s.beta1) * g;
        const double v = s.beta2 * second_moment[i] + (1.0 - s.beta2) * g * g;
        first_moment[i] = static_cast<float>(m);
        second_moment[i] = static_cast<float>(v);
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        param[i] = static_cast<float>(param[i] - s.lr * m_hat / (std::sqrt(v_hat) + s.eps));
    }
}

AdamState AdamState::like(const ProjectorParams& params) {
    AdamState state;
    for (const auto& t : params.tensors) {
        state.first_moment.emplace_back(t.values.size(), 0.0f);
        state.second_moment.emplace_back(t.values.size(), 0.0f);
    }
    return state;
}

void adam_step(ProjectorParams& params, const ProjectorParams& grads, AdamState& state, const AdamSettings& settings, int t) {
    if (grads.tensors.size() != params.tensors.size() || state.first_moment.size() != params.tensors.size()) {
        fail(ErrorKind::ShapeMismatch, "Adam state does not match the parameter layout");
    }
    for (const auto& g : grads.tensors) {
        for (float v : g.values) {
            if (!std::isfinite(v)) fail(ErrorKind::Numeric, "non-finite gradient in tensor " + g.name);
        }
    }
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        adam_update(params.tensors[i].values, grads.tensors[i].values, state.first_moment[i], state.second_moment[i], settings, t);
    }
}

AdamSettings adam_settings(const TrainConfig& c) noexcept {
    return AdamSettings{c.lr, c.adam_beta1, c.adam_beta2, c.adam_eps, c.weight_decay};
}

std::string TrainLog::to_csv(const TrainConfig& c) const {
    std::ostringstream out;
    out << "# foundad train log\n";
    out << "# iterations=" << c.iterations << " batch_size=" << c.batch_size << " lr=" << format_double(c.lr)
        << " weight_decay=" << format_double(c.weight_decay) << " sigma=" << format_double(c.sigma)
        << " data_seed=" << c.data_seed << " init_seed=" << c.init_seed
        << " loss=" << (c.loss == LossNormalization::ElementMean ? "element_mean" : "patch_sum") << "\n";
    out << "# stopping=fixed iteration budget (no convergence criterion)\n";
    out << "iteration,loss,synth_flag_count\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out << (i + 1) << ',' << format_double(losses[i]) << ',' << synthesized[i] << '\n';
    }
    return out.str();
}

TrainResult train(const std::vector<TrainingImage>& pool, const EmbeddingProvider& provider,
                  const ProjectorConfig& projector, const TrainConfig& config) {
    config.validate();
    if (!provider.encodes_pixels()) {
        fail(ErrorKind::InvalidArgument, "training needs a provider that encodes pixels: file provider cannot encode novel pixels");
    }
    if (pool.empty()) fail(ErrorKind::InvalidArgument, "training pool is empty");
    const auto start = std::chrono::steady_clock::now();

    // Reference embeddings and foreground masks are fixed per pool image.
    std::vector<PatchGrid> references(pool.size());
    std::vector<ForegroundMask> foregrounds(pool.size());
    parallel_for(pool.size(), [&](std::size_t i) {
        references[i] = provider.encode(pool[i].pixels);
        foregrounds[i] = binarize_foreground(pool[i].pixels);
    });
    for (const auto& ref : references) {
        if (!ref.same_shape(references.front())) fail(ErrorKind::ShapeMismatch, "training images produce differently shaped grids");
    }

    ProjectorConfig proj = projector;
    proj.init_seed = config.init_seed;
    if (proj.dim != references.front().dim) {
        fail(ErrorKind::ShapeMismatch, "projector dim " + std::to_string(proj.dim) + " does not match provider dim " +
                                           std::to_string(references.front().dim));
    }
    TrainResult result{init_projector(proj, references.front().tokens()), {}};
    AdamState adam = AdamState::like(result.params);
    const AdamSettings settings = adam_settings(config);

    const auto batch = static_cast<std::size_t>(config.batch_size);
    SplitMix64 batch_rng(config.data_seed);
    std::vector<ProjectorParams> slot_grads(batch, ProjectorParams::zeros(result.params.config, result.params.tokens));
    std::vector<double> slot_loss(batch);
    std::vector<int> slot_synth(batch);
    std::vector<std::size_t> picks(batch);
    ProjectorParams total = ProjectorParams::zeros(result.params.config, result.params.tokens);

    for (int it = 0; it < config.iterations; ++it) {
        for (auto& p : picks) p = static_cast<std::size_t>(batch_rng.below(pool.size()));
        parallel_for(batch, [&](std::size_t s) {
            const std::size_t idx = picks[s];
            SplitMix64 rng(derive_seed(config.data_seed, static_cast<std::uint64_t>(it) * batch + s));
            const GateResult gate = gate_synthesis(pool[idx].pixels, config.sigma, config.synthesis, foregrounds[idx], rng);
            const PatchGrid synthesized = gate.synthesized ? provider.encode(gate.image) : references[idx];

            ForwardTrace<float> trace;
            PatchGrid projected(synthesized.rows, synthesized.cols, synthesized.dim);
            projected.values = forward_tokens<float>(result.params, synthesized.values, &trace);
            slot_loss[s] = manifold_loss(projected, references[idx], config.loss);
            slot_synth[s] = gate.synthesized ? 1 : 0;

            PatchGrid upstream = manifold_loss_grad(projected, references[idx], config.loss);
            for (float& g : upstream.values) g /= static_cast<float>(batch);
            slot_grads[s].set_zero();
            backward_tokens<float>(result.params, trace, upstream.values, slot_grads[s]);
        });

        total.set_zero();
        double loss = 0.0;
        int synth = 0;
        for (std::size_t s = 0; s < batch; ++s) {
            for (std::size_t t = 0; t < total.tensors.size(); ++t) {
                auto& dst = total.tensors[t].values;
                const auto& src = slot_grads[s].tensors[t].values;
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
            }
            loss += slot_loss[s];
            synth += slot_synth[s];
        }
        adam_step(result.params, total, adam, settings, it + 1);
        result.log.losses.push_back(loss / static_cast<double>(batch));
        result.log.synthesized.push_back(synth);
    }
    result.log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<TrainingImage> load_training_pool(const FewShotManifest& manifest, const std::filesystem::path& root,
                                              int image_size) {
    std::vector<TrainingImage> pool;
    for (const auto& [category, ids] : manifest.selections) {
        for (const auto& id : ids) pool.push_back({id, {}});
    }
    parallel_for(pool.size(), [&](std::size_t i) { pool[i].pixels = load_rgb(root / pool[i].id, image_size); });
    return pool;
}

TrainResult train(const FewShotManifest& manifest, const std::filesystem::path& root, const EmbeddingProvider& provider,
                  const ProjectorConfig& projector, const TrainConfig& config) {
    config.validate();
    if (!provider.encodes_pixels()) {
        fail(ErrorKind::InvalidArgument, "training needs a provider that encodes pixels: file provider cannot encode novel pixels");
    }
    return train(load_training_pool(manifest, root, config.image_size), provider, projector, config);
}

}  // namespace foundad
