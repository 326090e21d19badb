#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foundad/embedding.hpp"

namespace foundad {

struct ProjectorConfig {
    int depth = 6;
    int dim = 64;
    int heads = 1;
    double mlp_ratio = 4.0;  // 0 disables the MLP sub-block
    bool use_pos_embed = true;
    std::uint64_t init_seed = 0;

    int hidden() const noexcept;
    int head_dim() const noexcept { return dim / heads; }
    void validate() const;

    /// dim / 64, at least 1.
    static int default_heads(int dim) noexcept;
};

/// Tensor slots of one transformer block, in checkpoint order.
enum class BlockSlot : int {
    Norm1Gain,
    Norm1Bias,
    QueryWeight,
    QueryBias,
    KeyWeight,
    KeyBias,
    ValueWeight,
    ValueBias,
    OutWeight,
    OutBias,
    Norm2Gain,
    Norm2Bias,
    Mlp1Weight,
    Mlp1Bias,
    Mlp2Weight,
    Mlp2Bias,
};
inline constexpr int kBlockSlots = 16;

template <typename Scalar>
struct ParamTensor {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<Scalar> values;
};

/// Weights of the projector. Linear layers compute y = x W + b with W stored
/// (in, out) row-major. Tensor order: optional "pos_embed" (tokens x dim), then
/// for each block the 16 BlockSlot tensors.
template <typename Scalar>
struct ProjectorParamsT {
    ProjectorConfig config;
    int tokens = 0;
    std::vector<ParamTensor<Scalar>> tensors;

    /// Correctly shaped, zero-filled parameters (and the gradient accumulator layout).
    static ProjectorParamsT zeros(const ProjectorConfig& config, int tokens);

    bool has_pos_embed() const noexcept { return config.use_pos_embed; }
    ParamTensor<Scalar>& pos_embed() { return tensors.front(); }
    const ParamTensor<Scalar>& pos_embed() const { return tensors.front(); }
    ParamTensor<Scalar>& block(int index, BlockSlot slot) { return tensors[block_offset(index, slot)]; }
    const ParamTensor<Scalar>& block(int index, BlockSlot slot) const { return tensors[block_offset(index, slot)]; }

    std::size_t parameter_count() const noexcept;
    void set_zero();

    template <typename Other>
    ProjectorParamsT<Other> cast() const {
        ProjectorParamsT<Other> out;
        out.config = config;
        out.tokens = tokens;
        for (const auto& t : tensors) out.tensors.push_back({t.name, t.shape, std::vector<Other>(t.values.begin(), t.values.end())});
        return out;
    }

private:
    std::size_t block_offset(int index, BlockSlot slot) const noexcept {
        return (config.use_pos_embed ? 1u : 0u) + static_cast<std::size_t>(index) * kBlockSlots + static_cast<std::size_t>(slot);
    }
};

using ProjectorParams = ProjectorParamsT<float>;

/// Near-identity start: weights uniform in +-fan_in^-1/2 drawn in tensor order
/// from SplitMix64(init_seed), attention output and second MLP weights scaled
/// by 1e-3, biases and positional table zero, norms gain 1 shift 0.
ProjectorParams init_projector(const ProjectorConfig& config, int tokens);

/// Per-block activations kept for the backward pass.
template <typename Scalar>
struct BlockTrace {
    std::vector<Scalar> input, norm1_hat, norm1_rstd, norm1_out, query, key, value, attention, mixed;
    std::vector<Scalar> after_attention, norm2_hat, norm2_rstd, norm2_out, mlp_pre, mlp_act;
};

template <typename Scalar>
struct ForwardTrace {
    std::vector<BlockTrace<Scalar>> blocks;
    std::vector<Scalar> output;
};

/// Runs the projector on tokens x dim row-major inputs. `attention` in each
/// block trace holds the softmax probabilities, heads x tokens x tokens.
template <typename Scalar>
std::vector<Scalar> forward_tokens(const ProjectorParamsT<Scalar>& params, std::span<const Scalar> input,
                                   ForwardTrace<Scalar>* trace = nullptr);

/// Reverse-mode pass: accumulates parameter gradients into `grads` (layout of
/// ProjectorParamsT::zeros) and returns the gradient w.r.t. the input tokens.
template <typename Scalar>
std::vector<Scalar> backward_tokens(const ProjectorParamsT<Scalar>& params, const ForwardTrace<Scalar>& trace,
                                    std::span<const Scalar> upstream, ProjectorParamsT<Scalar>& grads);

PatchGrid forward(const ProjectorParams& params, const PatchGrid& grid);

struct ProjectorGradients {
    ProjectorParams params;
    PatchGrid input;
};

ProjectorGradients backward(const ProjectorParams& params, const PatchGrid& grid, const PatchGrid& upstream);

/// FADP checkpoint: "FADP", u32 version, u32 header length, UTF-8 JSON header
/// (config, tokens, tensor names), then per tensor in parameter order a u32
/// name length, the name bytes and an FTNS blob.
void save_params(const std::filesystem::path& path, const ProjectorParams& params);
ProjectorParams load_params(const std::filesystem::path& path);

std::string checkpoint_header_json(const ProjectorParams& params);
/// Reads only the JSON header of a checkpoint.
std::string read_checkpoint_header(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace foundad
