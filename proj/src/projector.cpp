#include "foundad/projector.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "foundad/error.hpp"
#include "foundad/rng.hpp"
#include "foundad/tensor_io.hpp"

namespace foundad {

namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MatMap = Eigen::Map<Mat<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const Mat<S>>;
template <typename S>
using RowMap = Eigen::Map<Eigen::Matrix<S, 1, Eigen::Dynamic>>;
template <typename S>
using ConstRowMap = Eigen::Map<const Eigen::Matrix<S, 1, Eigen::Dynamic>>;

constexpr double kNormEps = 1e-5;

constexpr const char* kSlotNames[kBlockSlots] = {
    "norm1.gain", "norm1.bias", "attn.query.weight", "attn.query.bias", "attn.key.weight", "attn.key.bias",
    "attn.value.weight", "attn.value.bias", "attn.out.weight", "attn.out.bias", "norm2.gain", "norm2.bias",
    "mlp.fc1.weight", "mlp.fc1.bias", "mlp.fc2.weight", "mlp.fc2.bias",
};

template <typename S>
ConstMatMap<S> view(const std::vector<S>& v, Eigen::Index rows, Eigen::Index cols) {
    return ConstMatMap<S>(v.data(), rows, cols);
}
template <typename S>
MatMap<S> view(std::vector<S>& v, Eigen::Index rows, Eigen::Index cols) {
    return MatMap<S>(v.data(), rows, cols);
}
template <typename S>
ConstMatMap<S> weight(const ParamTensor<S>& t) {
    return ConstMatMap<S>(t.values.data(), t.shape[0], t.shape[1]);
}
template <typename S>
MatMap<S> weight(ParamTensor<S>& t) {
    return MatMap<S>(t.values.data(), t.shape[0], t.shape[1]);
}
template <typename S>
ConstRowMap<S> vec(const ParamTensor<S>& t) {
    return ConstRowMap<S>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}
template <typename S>
RowMap<S> vec(ParamTensor<S>& t) {
    return RowMap<S>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}

template <typename S>
void layer_norm(const Mat<S>& x, const ParamTensor<S>& gain, const ParamTensor<S>& bias, std::vector<S>& hat_out,
                std::vector<S>& rstd_out, std::vector<S>& out) {
    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    hat_out.resize(static_cast<std::size_t>(rows * cols));
    rstd_out.resize(static_cast<std::size_t>(rows));
    out.resize(static_cast<std::size_t>(rows * cols));
    auto hat = view(hat_out, rows, cols);
    auto y = view(out, rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const S mean = x.row(r).mean();
        const S var = (x.row(r).array() - mean).square().mean();
        const S rstd = S(1) / std::sqrt(var + static_cast<S>(kNormEps));
        rstd_out[static_cast<std::size_t>(r)] = rstd;
        hat.row(r) = (x.row(r).array() - mean) * rstd;
    }
    y = (hat.array().rowwise() * vec(gain).array()).rowwise() + vec(bias).array();
}

template <typename S>
Mat<S> layer_norm_backward(const Mat<S>& dout, const std::vector<S>& hat_v, const std::vector<S>& rstd,
                           const ParamTensor<S>& gain, ParamTensor<S>& dgain, ParamTensor<S>& dbias) {
    const Eigen::Index rows = dout.rows();
    const Eigen::Index cols = dout.cols();
    const auto hat = view(hat_v, rows, cols);
    vec(dgain) += (dout.array() * hat.array()).colwise().sum().matrix();
    vec(dbias) += dout.colwise().sum();
    const Mat<S> dhat = dout.array().rowwise() * vec(gain).array();
    Mat<S> dx(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const S mean_dhat = dhat.row(r).mean();
        const S mean_dhat_hat = (dhat.row(r).array() * hat.row(r).array()).mean();
        dx.row(r) = rstd[static_cast<std::size_t>(r)] *
                    (dhat.row(r).array() - mean_dhat - hat.row(r).array() * mean_dhat_hat).matrix();
    }
    return dx;
}

template <typename S>
S gelu(S x) {
    return S(0.5) * x * (S(1) + std::erf(x / std::numbers::sqrt2_v<S>));
}

template <typename S>
S gelu_grad(S x) {
    const S cdf = S(0.5) * (S(1) + std::erf(x / std::numbers::sqrt2_v<S>));
    const S pdf = std::exp(S(-0.5) * x * x) * std::numbers::inv_sqrtpi_v<S> / std::numbers::sqrt2_v<S>;
    return cdf + x * pdf;
}

template <typename S>
void add_bias(Mat<S>& m, const ParamTensor<S>& b) {
    m.rowwise() += vec(b);
}

template <typename S>
void store(std::vector<S>& dst, const Mat<S>& src) {
    dst.assign(src.data(), src.data() + src.size());
}

std::vector<std::uint32_t> slot_shape(const ProjectorConfig& c, BlockSlot slot) {
    const auto d = static_cast<std::uint32_t>(c.dim);
    const auto h = static_cast<std::uint32_t>(c.hidden());
    switch (slot) {
        case BlockSlot::QueryWeight:
        case BlockSlot::KeyWeight:
        case BlockSlot::ValueWeight:
        case BlockSlot::OutWeight: return {d, d};
        case BlockSlot::Mlp1Weight: return {d, h};
        case BlockSlot::Mlp1Bias: return {h};
        case BlockSlot::Mlp2Weight: return {h, d};
        default: return {d};
    }
}

bool is_weight(BlockSlot slot) {
    switch (slot) {
        case BlockSlot::QueryWeight:
        case BlockSlot::KeyWeight:
        case BlockSlot::ValueWeight:
        case BlockSlot::OutWeight:
        case BlockSlot::Mlp1Weight:
        case BlockSlot::Mlp2Weight: return true;
        default: return false;
    }
}

}  // namespace

int ProjectorConfig::hidden() const noexcept { return static_cast<int>(std::lround(mlp_ratio * dim)); }

int ProjectorConfig::default_heads(int dim) noexcept { return std::max(1, dim / 64); }

void ProjectorConfig::validate() const {
    if (depth < 1) fail(ErrorKind::InvalidArgument, "projector depth must be at least 1");
    if (dim < 1) fail(ErrorKind::InvalidArgument, "projector dim must be at least 1");
    if (heads < 1 || dim % heads != 0) {
        fail(ErrorKind::InvalidArgument, "projector dim " + std::to_string(dim) + " is not divisible by heads " + std::to_string(heads));
    }
    if (!(mlp_ratio >= 0.0) || !std::isfinite(mlp_ratio)) fail(ErrorKind::InvalidArgument, "mlp_ratio must be non-negative");
}

template <typename S>
ProjectorParamsT<S> ProjectorParamsT<S>::zeros(const ProjectorConfig& config, int tokens) {
    config.validate();
    if (tokens < 1) fail(ErrorKind::InvalidArgument, "projector needs at least one token");
    ProjectorParamsT params;
    params.config = config;
    params.tokens = tokens;
    auto add = [&](std::string name, std::vector<std::uint32_t> shape) {
        std::size_t n = 1;
        for (auto s : shape) n *= s;
        params.tensors.push_back({std::move(name), std::move(shape), std::vector<S>(n, S(0))});
    };
    if (config.use_pos_embed) add("pos_embed", {static_cast<std::uint32_t>(tokens), static_cast<std::uint32_t>(config.dim)});
    for (int b = 0; b < config.depth; ++b) {
        for (int s = 0; s < kBlockSlots; ++s) {
            add("blocks." + std::to_string(b) + "." + kSlotNames[s], slot_shape(config, static_cast<BlockSlot>(s)));
        }
    }
    return params;
}

template <typename S>
std::size_t ProjectorParamsT<S>::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.values.size();
    return n;
}

template <typename S>
void ProjectorParamsT<S>::set_zero() {
    for (auto& t : tensors) std::fill(t.values.begin(), t.values.end(), S(0));
}

template struct ProjectorParamsT<float>;
template struct ProjectorParamsT<double>;

ProjectorParams init_projector(const ProjectorConfig& config, int tokens) {
    ProjectorParams params = ProjectorParams::zeros(config, tokens);
    SplitMix64 rng(config.init_seed);
    for (int b = 0; b < config.depth; ++b) {
        for (int s = 0; s < kBlockSlots; ++s) {
            const auto slot = static_cast<BlockSlot>(s);
            auto& t = params.block(b, slot);
            if (slot == BlockSlot::Norm1Gain || slot == BlockSlot::Norm2Gain) {
                std::fill(t.values.begin(), t.values.end(), 1.0f);
                continue;
            }
            if (!is_weight(slot) || t.values.empty()) continue;
            const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[0]));
            const double scale = (slot == BlockSlot::OutWeight || slot == BlockSlot::Mlp2Weight) ? 1e-3 : 1.0;
            for (float& w : t.values) w = static_cast<float>(scale * bound * (2.0 * rng.uniform01() - 1.0));
        }
    }
    return params;
}

template <typename S>
std::vector<S> forward_tokens(const ProjectorParamsT<S>& params, std::span<const S> input, ForwardTrace<S>* trace) {
    const ProjectorConfig& cfg = params.config;
    const Eigen::Index n = params.tokens;
    const Eigen::Index d = cfg.dim;
    const Eigen::Index hd = cfg.head_dim();
    const Eigen::Index hidden = cfg.hidden();
    if (input.size() != static_cast<std::size_t>(n * d)) {
        fail(ErrorKind::ShapeMismatch, "projector input has " + std::to_string(input.size()) + " values, expected " +
                                           std::to_string(n) + " tokens x " + std::to_string(d));
    }
    const S scale = S(1) / std::sqrt(static_cast<S>(hd));

    Mat<S> x = ConstMatMap<S>(input.data(), n, d);
    if (params.has_pos_embed()) x += weight(params.pos_embed());

    BlockTrace<S> local;
    if (trace) trace->blocks.assign(static_cast<std::size_t>(cfg.depth), {});
    for (int b = 0; b < cfg.depth; ++b) {
        BlockTrace<S>& bt = trace ? trace->blocks[static_cast<std::size_t>(b)] : local;
        auto p = [&](BlockSlot slot) -> const ParamTensor<S>& { return params.block(b, slot); };
        store(bt.input, x);

        layer_norm(x, p(BlockSlot::Norm1Gain), p(BlockSlot::Norm1Bias), bt.norm1_hat, bt.norm1_rstd, bt.norm1_out);
        const auto h1 = view(bt.norm1_out, n, d);
        Mat<S> q = h1 * weight(p(BlockSlot::QueryWeight));
        Mat<S> k = h1 * weight(p(BlockSlot::KeyWeight));
        Mat<S> v = h1 * weight(p(BlockSlot::ValueWeight));
        add_bias(q, p(BlockSlot::QueryBias));
        add_bias(k, p(BlockSlot::KeyBias));
        add_bias(v, p(BlockSlot::ValueBias));

        bt.attention.resize(static_cast<std::size_t>(cfg.heads * n * n));
        Mat<S> mixed(n, d);
        for (int h = 0; h < cfg.heads; ++h) {
            auto probs = MatMap<S>(bt.attention.data() + static_cast<std::size_t>(h) * n * n, n, n);
            probs.noalias() = q.middleCols(h * hd, hd) * k.middleCols(h * hd, hd).transpose();
            probs *= scale;
            for (Eigen::Index r = 0; r < n; ++r) {
                const S peak = probs.row(r).maxCoeff();
                probs.row(r) = (probs.row(r).array() - peak).exp();
                probs.row(r) /= probs.row(r).sum();
            }
            mixed.middleCols(h * hd, hd).noalias() = probs * v.middleCols(h * hd, hd);
        }
        Mat<S> attn_out = mixed * weight(p(BlockSlot::OutWeight));
        add_bias(attn_out, p(BlockSlot::OutBias));
        x += attn_out;
        store(bt.query, q);
        store(bt.key, k);
        store(bt.value, v);
        store(bt.mixed, mixed);
        store(bt.after_attention, x);

        if (hidden > 0) {
            layer_norm(x, p(BlockSlot::Norm2Gain), p(BlockSlot::Norm2Bias), bt.norm2_hat, bt.norm2_rstd, bt.norm2_out);
            Mat<S> pre = view(bt.norm2_out, n, d) * weight(p(BlockSlot::Mlp1Weight));
            add_bias(pre, p(BlockSlot::Mlp1Bias));
            Mat<S> act = pre.unaryExpr([](S u) { return gelu(u); });
            Mat<S> mlp_out = act * weight(p(BlockSlot::Mlp2Weight));
            add_bias(mlp_out, p(BlockSlot::Mlp2Bias));
            x += mlp_out;
            store(bt.mlp_pre, pre);
            store(bt.mlp_act, act);
        }
    }
    std::vector<S> out(x.data(), x.data() + x.size());
    if (trace) trace->output = out;
    return out;
}

template <typename S>
std::vector<S> backward_tokens(const ProjectorParamsT<S>& params, const ForwardTrace<S>& trace, std::span<const S> upstream,
                               ProjectorParamsT<S>& grads) {
    const ProjectorConfig& cfg = params.config;
    const Eigen::Index n = params.tokens;
    const Eigen::Index d = cfg.dim;
    const Eigen::Index hd = cfg.head_dim();
    const Eigen::Index hidden = cfg.hidden();
    if (upstream.size() != static_cast<std::size_t>(n * d)) fail(ErrorKind::ShapeMismatch, "upstream gradient shape mismatch");
    if (grads.tensors.size() != params.tensors.size()) fail(ErrorKind::ShapeMismatch, "gradient accumulator layout mismatch");
    if (trace.blocks.size() != static_cast<std::size_t>(cfg.depth)) fail(ErrorKind::InvalidArgument, "forward trace is incomplete");
    const S scale = S(1) / std::sqrt(static_cast<S>(hd));

    Mat<S> dx = ConstMatMap<S>(upstream.data(), n, d);
    for (int b = cfg.depth - 1; b >= 0; --b) {
        const BlockTrace<S>& bt = trace.blocks[static_cast<std::size_t>(b)];
        auto p = [&](BlockSlot slot) -> const ParamTensor<S>& { return params.block(b, slot); };
        auto g = [&](BlockSlot slot) -> ParamTensor<S>& { return grads.block(b, slot); };

        if (hidden > 0) {
            const auto act = view(bt.mlp_act, n, hidden);
            const auto pre = view(bt.mlp_pre, n, hidden);
            weight(g(BlockSlot::Mlp2Weight)).noalias() += act.transpose() * dx;
            vec(g(BlockSlot::Mlp2Bias)) += dx.colwise().sum();
            Mat<S> dpre = dx * weight(p(BlockSlot::Mlp2Weight)).transpose();
            dpre.array() *= pre.unaryExpr([](S u) { return gelu_grad(u); }).array();
            weight(g(BlockSlot::Mlp1Weight)).noalias() += view(bt.norm2_out, n, d).transpose() * dpre;
            vec(g(BlockSlot::Mlp1Bias)) += dpre.colwise().sum();
            const Mat<S> dnorm2 = dpre * weight(p(BlockSlot::Mlp1Weight)).transpose();
            dx += layer_norm_backward(dnorm2, bt.norm2_hat, bt.norm2_rstd, p(BlockSlot::Norm2Gain), g(BlockSlot::Norm2Gain),
                                      g(BlockSlot::Norm2Bias));
        }

        const auto mixed = view(bt.mixed, n, d);
        const auto q = view(bt.query, n, d);
        const auto k = view(bt.key, n, d);
        const auto v = view(bt.value, n, d);
        weight(g(BlockSlot::OutWeight)).noalias() += mixed.transpose() * dx;
        vec(g(BlockSlot::OutBias)) += dx.colwise().sum();
        const Mat<S> dmixed = dx * weight(p(BlockSlot::OutWeight)).transpose();

        Mat<S> dq(n, d);
        Mat<S> dk(n, d);
        Mat<S> dv(n, d);
        for (int h = 0; h < cfg.heads; ++h) {
            const auto probs = ConstMatMap<S>(bt.attention.data() + static_cast<std::size_t>(h) * n * n, n, n);
            const auto dmix_h = dmixed.middleCols(h * hd, hd);
            dv.middleCols(h * hd, hd).noalias() = probs.transpose() * dmix_h;
            Mat<S> dprobs = dmix_h * v.middleCols(h * hd, hd).transpose();
            // softmax Jacobian: dS = P * (dP - rowsum(dP * P))
            const Eigen::Matrix<S, Eigen::Dynamic, 1> inner = (dprobs.array() * probs.array()).rowwise().sum();
            Mat<S> dscores = (probs.array() * (dprobs.array().colwise() - inner.array())).matrix() * scale;
            dq.middleCols(h * hd, hd).noalias() = dscores * k.middleCols(h * hd, hd);
            dk.middleCols(h * hd, hd).noalias() = dscores.transpose() * q.middleCols(h * hd, hd);
        }
        const auto h1 = view(bt.norm1_out, n, d);
        weight(g(BlockSlot::QueryWeight)).noalias() += h1.transpose() * dq;
        weight(g(BlockSlot::KeyWeight)).noalias() += h1.transpose() * dk;
        weight(g(BlockSlot::ValueWeight)).noalias() += h1.transpose() * dv;
        vec(g(BlockSlot::QueryBias)) += dq.colwise().sum();
        vec(g(BlockSlot::KeyBias)) += dk.colwise().sum();
        vec(g(BlockSlot::ValueBias)) += dv.colwise().sum();
        Mat<S> dnorm1 = dq * weight(p(BlockSlot::QueryWeight)).transpose();
        dnorm1.noalias() += dk * weight(p(BlockSlot::KeyWeight)).transpose();
        dnorm1.noalias() += dv * weight(p(BlockSlot::ValueWeight)).transpose();
        dx += layer_norm_backward(dnorm1, bt.norm1_hat, bt.norm1_rstd, p(BlockSlot::Norm1Gain), g(BlockSlot::Norm1Gain),
                                  g(BlockSlot::Norm1Bias));
    }
    if (params.has_pos_embed()) weight(grads.pos_embed()) += dx;
    return std::vector<S>(dx.data(), dx.data() + dx.size());
}

template std::vector<float> forward_tokens<float>(const ProjectorParamsT<float>&, std::span<const float>, ForwardTrace<float>*);
template std::vector<double> forward_tokens<double>(const ProjectorParamsT<double>&, std::span<const double>, ForwardTrace<double>*);
template std::vector<float> backward_tokens<float>(const ProjectorParamsT<float>&, const ForwardTrace<float>&,
                                                   std::span<const float>, ProjectorParamsT<float>&);
template std::vector<double> backward_tokens<double>(const ProjectorParamsT<double>&, const ForwardTrace<double>&,
                                                     std::span<const double>, ProjectorParamsT<double>&);

namespace {

void check_grid(const ProjectorParams& params, const PatchGrid& grid) {
    if (grid.dim != params.config.dim) {
        fail(ErrorKind::ShapeMismatch, "patch grid dim " + std::to_string(grid.dim) + " does not match projector dim " +
                                           std::to_string(params.config.dim));
    }
    if (grid.tokens() != params.tokens) {
        fail(ErrorKind::ShapeMismatch, "patch grid has " + std::to_string(grid.tokens()) + " patches, projector expects " +
                                           std::to_string(params.tokens));
    }
}

}  // namespace

PatchGrid forward(const ProjectorParams& params, const PatchGrid& grid) {
    check_grid(params, grid);
    PatchGrid out(grid.rows, grid.cols, grid.dim);
    out.values = forward_tokens<float>(params, grid.values);
    return out;
}

ProjectorGradients backward(const ProjectorParams& params, const PatchGrid& grid, const PatchGrid& upstream) {
    check_grid(params, grid);
    if (!upstream.same_shape(grid)) fail(ErrorKind::ShapeMismatch, "upstream gradient shape differs from the input grid");
    ForwardTrace<float> trace;
    forward_tokens<float>(params, grid.values, &trace);
    ProjectorGradients result{ProjectorParams::zeros(params.config, params.tokens), PatchGrid(grid.rows, grid.cols, grid.dim)};
    result.input.values = backward_tokens<float>(params, trace, upstream.values, result.params);
    return result;
}

std::string checkpoint_header_json(const ProjectorParams& params) {
    nlohmann::ordered_json doc;
    doc["format"] = "foundad-projector/1";
    doc["depth"] = params.config.depth;
    doc["dim"] = params.config.dim;
    doc["heads"] = params.config.heads;
    doc["mlp_ratio"] = params.config.mlp_ratio;
    doc["use_pos_embed"] = params.config.use_pos_embed;
    doc["init_seed"] = params.config.init_seed;
    doc["tokens"] = params.tokens;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto& t : params.tensors) names.push_back(t.name);
    doc["tensors"] = std::move(names);
    return doc.dump();
}

void save_params(const std::filesystem::path& path, const ProjectorParams& params) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot create checkpoint " + path.string());
    const std::string header = checkpoint_header_json(params);
    out.write("FADP", 4);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& t : params.tensors) {
        write_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        write_ftns(out, t.shape, t.values);
    }
    if (!out) fail(ErrorKind::Io, "failed writing checkpoint " + path.string());
}

namespace {

std::string read_header(std::istream& in, const std::filesystem::path& path) {
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string_view(magic, 4) != "FADP") fail(ErrorKind::Format, path.string() + ": not a FADP checkpoint");
    const std::uint32_t version = read_u32(in, "checkpoint version");
    if (version != kCheckpointVersion) {
        fail(ErrorKind::Format, path.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t length = read_u32(in, "checkpoint header length");
    if (length > (1u << 24)) fail(ErrorKind::Format, path.string() + ": checkpoint header too large");
    std::string header(length, '\0');
    in.read(header.data(), length);
    if (static_cast<std::uint32_t>(in.gcount()) != length) fail(ErrorKind::Format, path.string() + ": truncated checkpoint header");
    return header;
}

}  // namespace

std::string read_checkpoint_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open checkpoint " + path.string());
    return read_header(in, path);
}

ProjectorParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open checkpoint " + path.string());
    const std::string header_text = read_header(in, path);

    ProjectorConfig config;
    int tokens = 0;
    try {
        const auto doc = nlohmann::json::parse(header_text);
        config.depth = doc.at("depth").get<int>();
        config.dim = doc.at("dim").get<int>();
        config.heads = doc.at("heads").get<int>();
        config.mlp_ratio = doc.at("mlp_ratio").get<double>();
        config.use_pos_embed = doc.at("use_pos_embed").get<bool>();
        config.init_seed = doc.at("init_seed").get<std::uint64_t>();
        tokens = doc.at("tokens").get<int>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, path.string() + ": malformed checkpoint header: " + e.what());
    }

    ProjectorParams params;
    try {
        params = ProjectorParams::zeros(config, tokens);
    } catch (const Error& e) {
        fail(ErrorKind::Format, path.string() + ": invalid checkpoint config: " + e.what());
    }
    for (auto& t : params.tensors) {
        const std::uint32_t name_length = read_u32(in, "tensor name length");
        if (name_length > 4096) fail(ErrorKind::Format, path.string() + ": tensor name too long");
        std::string name(name_length, '\0');
        in.read(name.data(), name_length);
        if (name != t.name) fail(ErrorKind::Format, path.string() + ": expected tensor " + t.name + ", found '" + name + "'");
        FtnsTensor tensor = read_ftns(in);
        if (tensor.dims != t.shape) {
            fail(ErrorKind::ShapeMismatch, path.string() + ": tensor " + t.name + " shape does not match the declared config");
        }
        t.values = std::move(tensor.values);
    }
    return params;
}

}  // namespace foundad
