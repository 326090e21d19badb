#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "foundad/analysis.hpp"
#include "foundad/dataset.hpp"
#include "foundad/error.hpp"
#include "foundad/image_io.hpp"
#include "foundad/inference.hpp"
#include "foundad/metrics.hpp"
#include "foundad/parallel.hpp"
#include "foundad/projector.hpp"
#include "foundad/synthesis.hpp"
#include "foundad/tensor_io.hpp"
#include "foundad/training.hpp"

namespace foundad::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kDefaultProvider = "toy:dim=64,patch=16,seed=7";

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<std::uint8_t> to_bytes(const Image& image) {
    std::vector<std::uint8_t> bytes(image.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.values[i], 0.0f, 1.0f) * 255.0f));
    }
    return bytes;
}

std::vector<std::uint8_t> to_bytes(const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.values[i] ? 255 : 0;
    return bytes;
}

fs::path with_suffix(const std::string& id, const char* extension) {
    fs::path path(id);
    path.replace_extension(extension);
    return path;
}

std::string category_of(const std::string& id) {
    const auto slash = id.find('/');
    return slash == std::string::npos ? std::string() : id.substr(0, slash);
}

LossNormalization parse_loss(const std::string& name) {
    if (name == "element_mean") return LossNormalization::ElementMean;
    if (name == "patch_sum") return LossNormalization::PatchSum;
    fail(ErrorKind::InvalidArgument, "unknown loss normalization: " + name);
}

std::vector<double> parse_ratios(const std::string& text) {
    std::vector<double> ratios;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) fail(ErrorKind::InvalidArgument, "invalid ratio: " + item);
        ratios.push_back(value);
    }
    if (ratios.empty()) fail(ErrorKind::InvalidArgument, "no area ratios given");
    return ratios;
}

std::string default_ratios() {
    std::string text = "0";
    for (int i = 0; i < 20; ++i) text += "," + format_double(0.005 + (0.15 - 0.005) * i / 19.0);
    return text;
}

/// Processed image side that reproduces the checkpoint's token count.
int infer_image_size(const ProjectorParams& params, const EmbeddingProvider& provider) {
    const auto* toy = std::get_if<ToyEncoderSpec>(&provider.spec());
    if (!toy) return 512;
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(params.tokens))));
    if (side * side != params.tokens) {
        fail(ErrorKind::InvalidArgument, "cannot infer image size from a non-square token grid; pass --image-size");
    }
    return side * toy->patch_size;
}

struct SynthFlags {
    double area_lo = SynthesisParams{}.area_lo;
    double area_hi = SynthesisParams{}.area_hi;
    double aspect_lo = SynthesisParams{}.aspect_lo;
    double aspect_hi = SynthesisParams{}.aspect_hi;
    int max_attempts = SynthesisParams{}.max_attempts;
    bool rotate = false;

    void add_to(CLI::App& app) {
        app.add_option("--area-lo", area_lo, "Smallest pasted area as a fraction of the image")->capture_default_str();
        app.add_option("--area-hi", area_hi, "Largest pasted area as a fraction of the image")->capture_default_str();
        app.add_option("--aspect-lo", aspect_lo, "Smallest patch aspect ratio")->capture_default_str();
        app.add_option("--aspect-hi", aspect_hi, "Largest patch aspect ratio")->capture_default_str();
        app.add_option("--max-attempts", max_attempts, "Foreground center draws before best-effort placement")
            ->capture_default_str();
        app.add_flag("--rotate", rotate, "Rotate pasted patches by random quarter turns");
    }

    SynthesisParams params() const {
        SynthesisParams p;
        p.area_lo = area_lo;
        p.area_hi = area_hi;
        p.aspect_lo = aspect_lo;
        p.aspect_hi = aspect_hi;
        p.max_attempts = max_attempts;
        p.rotate = rotate;
        p.validate();
        return p;
    }
};

struct SampleArgs {
    std::string root;
    std::string layout = "mvtec";
    int k = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    if (a.k < 1) fail(ErrorKind::InvalidArgument, "--k must be at least 1");
    const DatasetIndex index = scan_dataset(a.root, parse_layout(a.layout));
    const FewShotManifest manifest = sample_few_shot(index, a.k, a.seed);
    write_text(a.out, manifest.to_json());
    for (const auto& [category, ids] : manifest.selections) {
        out << category << ": " << ids.size() << " selected\n";
    }
    out << "manifest written to " << a.out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string manifest;
    std::string root;
    std::string provider = kDefaultProvider;
    int depth = ProjectorConfig{}.depth;
    int heads = 0;
    double mlp_ratio = ProjectorConfig{}.mlp_ratio;
    bool no_pos_embed = false;
    TrainConfig config;
    std::string loss = "element_mean";
    SynthFlags synth;
    std::string out;
    std::string log;
};

int cmd_train(TrainArgs a, std::ostream& out) {
    const FewShotManifest manifest = FewShotManifest::from_json(read_text(a.manifest));
    const EmbeddingProvider provider(parse_provider_spec(a.provider));
    if (!provider.encodes_pixels()) {
        fail(ErrorKind::InvalidArgument, "training needs a provider that encodes pixels: file provider cannot encode novel pixels");
    }
    ProjectorConfig projector;
    projector.depth = a.depth;
    projector.dim = provider.dim();
    projector.heads = a.heads > 0 ? a.heads : ProjectorConfig::default_heads(projector.dim);
    projector.mlp_ratio = a.mlp_ratio;
    projector.use_pos_embed = !a.no_pos_embed;
    projector.validate();

    a.config.loss = parse_loss(a.loss);
    a.config.synthesis = a.synth.params();
    const TrainResult result = train(manifest, a.root, provider, projector, a.config);

    save_params(a.out, result.params);
    const fs::path log_path = a.log.empty() ? fs::path(a.out).replace_extension(".csv") : fs::path(a.log);
    write_text(log_path, result.log.to_csv(a.config));

    out << "trained " << a.config.iterations << " iterations";
    if (!result.log.losses.empty()) out << ", final loss " << format_double(result.log.losses.back());
    out << "\ncheckpoint written to " << a.out << "\nlog written to " << log_path.string() << "\n";
    return kExitOk;
}

struct ScoreArgs {
    std::string ckpt;
    std::string provider = kDefaultProvider;
    std::string images;
    std::string layout = "mvtec";
    std::string category;
    int topk = 0;
    int image_size = 0;
    double smooth = 0.0;
    bool png = false;
    std::string out;
};

struct ScoreJob {
    std::string id;
    int label = 0;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
    const Layout layout = parse_layout(a.layout);
    const int k = a.topk > 0 ? a.topk : default_top_k(layout);
    const ProjectorParams params = load_params(a.ckpt);
    const EmbeddingProvider provider(parse_provider_spec(a.provider));
    const int size = a.image_size > 0 ? a.image_size : infer_image_size(params, provider);

    const DatasetIndex index = scan_dataset(a.images, layout);
    std::vector<ScoreJob> jobs;
    for (const auto& category : index.categories) {
        if (!a.category.empty() && category.name != a.category) continue;
        for (const auto& id : category.test_normal) jobs.push_back({id, 0});
        for (const auto& entry : category.test_anomalous) jobs.push_back({entry.image, 1});
    }
    if (jobs.empty()) fail(ErrorKind::InvalidArgument, "no test images found under " + a.images);
    std::sort(jobs.begin(), jobs.end(), [](const ScoreJob& x, const ScoreJob& y) { return x.id < y.id; });

    const fs::path out_dir(a.out);
    for (const auto& job : jobs) {
        fs::create_directories((out_dir / "heatmaps" / job.id).parent_path());
        if (a.png) fs::create_directories((out_dir / "heatmaps_png" / job.id).parent_path());
    }
    std::vector<double> scores(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Image pixels = load_rgb(index.resolve(jobs[i].id), size);
        const ScoreResult result = score_image(params, provider, pixels, k, jobs[i].id, a.smooth);
        scores[i] = result.score.value;
        const Image& h = result.heatmap;
        const std::uint32_t dims[2] = {static_cast<std::uint32_t>(h.height), static_cast<std::uint32_t>(h.width)};
        write_ftns_file(out_dir / "heatmaps" / with_suffix(jobs[i].id, ".ftns"), dims, h.values);
        if (a.png) {
            write_png_gray16(out_dir / "heatmaps_png" / with_suffix(jobs[i].id, ".png"), h.height, h.width,
                             heatmap_to_u16(h));
        }
    });

    std::string csv = "image_id,label,score\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        csv += jobs[i].id + ',' + std::to_string(jobs[i].label) + ',' + format_double(scores[i]) + '\n';
    }
    write_text(out_dir / "scores.csv", csv);
    out << "scored " << jobs.size() << " images (K=" << k << ", size=" << size << ")\n";
    out << "scores written to " << (out_dir / "scores.csv").string() << "\n";
    return kExitOk;
}

struct ScoreRow {
    std::string id;
    int label = 0;
    double score = 0.0;
};

std::vector<ScoreRow> read_scores(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("image_id,label,score", 0) != 0) {
        fail(ErrorKind::Format, "not a score CSV (expected header image_id,label,score): " + path.string());
    }
    std::vector<ScoreRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto last = line.rfind(',');
        const auto middle = last == std::string::npos ? std::string::npos : line.rfind(',', last - 1);
        if (middle == std::string::npos) {
            fail(ErrorKind::Format, "malformed score row at line " + std::to_string(line_no));
        }
        ScoreRow row;
        row.id = line.substr(0, middle);
        try {
            row.label = std::stoi(line.substr(middle + 1, last - middle - 1));
            row.score = std::stod(line.substr(last + 1));
        } catch (const std::exception&) {
            fail(ErrorKind::Format, "malformed score row at line " + std::to_string(line_no));
        }
        if (row.label != 0 && row.label != 1) {
            fail(ErrorKind::Format, "label must be 0 or 1 at line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::Format, "score CSV has no rows: " + path.string());
    return rows;
}

struct EvalArgs {
    std::string scores;
    std::string heatmaps;
    std::string gt;
    std::string layout = "mvtec";
    double fpr_cap = 0.3;
    int thresholds = 200;
    std::string out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    if (!(a.fpr_cap > 0.0 && a.fpr_cap <= 1.0)) fail(ErrorKind::InvalidArgument, "--fpr-cap must lie in (0, 1]");
    if (a.thresholds < 2) fail(ErrorKind::InvalidArgument, "--thresholds must be at least 2");
    const std::vector<ScoreRow> rows = read_scores(a.scores);
    const DatasetIndex index = scan_dataset(a.gt, parse_layout(a.layout));
    std::map<std::string, std::string> masks;
    for (const auto& category : index.categories) {
        for (const auto& entry : category.test_anomalous) masks[entry.image] = entry.mask;
    }

    std::vector<EvaluationItem> items(rows.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const ScoreRow& row = rows[i];
        const FtnsTensor tensor = read_ftns_file(fs::path(a.heatmaps) / with_suffix(row.id, ".ftns"));
        if (tensor.dims.size() != 2) fail(ErrorKind::ShapeMismatch, "heatmap must be rank 2: " + row.id);
        EvaluationItem& item = items[i];
        item.category = category_of(row.id);
        item.image_score = row.score;
        item.label = row.label;
        item.heatmap = Image(static_cast<int>(tensor.dims[0]), static_cast<int>(tensor.dims[1]), 1);
        item.heatmap.values = tensor.values;
        const int h = item.heatmap.height;
        const int w = item.heatmap.width;
        if (row.label == 1) {
            const auto found = masks.find(row.id);
            if (found == masks.end()) fail(ErrorKind::InvalidArgument, "no ground-truth mask for " + row.id);
            if (h != w) fail(ErrorKind::ShapeMismatch, "heatmap must be square to match masks: " + row.id);
            item.mask = load_mask(index.resolve(found->second), h);
        } else {
            item.mask = BinaryMask(h, w);
        }
    });

    const MetricReport report = evaluate(items, a.fpr_cap, a.thresholds);
    const fs::path out_dir(a.out);
    write_text(out_dir / "report.csv", report.to_csv());
    write_text(out_dir / "report.json", report.to_json());
    out << report.to_csv();
    out << "report written to " << out_dir.string() << "\n";
    return kExitOk;
}

struct AnalyzeArgs {
    std::string image;
    std::string provider = kDefaultProvider;
    std::string ratios = default_ratios();
    std::uint64_t seed = 0;
    int image_size = 512;
    std::string out;
    std::string plot;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const std::vector<double> ratios = parse_ratios(a.ratios);
    const EmbeddingProvider provider(parse_provider_spec(a.provider));
    const Image image = load_rgb(a.image, a.image_size);
    const DistanceSeries series = distance_vs_area(image, provider, ratios, a.seed);
    write_text(a.out, distance_series_csv(series));
    if (!a.plot.empty()) {
        constexpr int kPlotSize = 400;
        const fs::path plot(a.plot);
        if (plot.has_parent_path()) fs::create_directories(plot.parent_path());
        write_png(plot, kPlotSize, kPlotSize, 3, render_scatter(series, kPlotSize, kPlotSize));
    }
    if (series.size() >= 3) {
        try {
            out << "spearman_rho=" << format_double(spearman(series)) << "\n";
        } catch (const Error& e) {
            out << "spearman_rho=undefined (" << e.what() << ")\n";
        }
    }
    out << "series written to " << a.out << "\n";
    return kExitOk;
}

struct SynthArgs {
    std::string image;
    std::uint64_t seed = 0;
    int image_size = 0;
    SynthFlags synth;
    std::string out;
};

json rect_json(const Rect& r) { return json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}; }

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    const Image image = a.image_size > 0 ? load_rgb(a.image, a.image_size) : from_raw(decode_image(a.image));
    const SynthesisParams params = a.synth.params();
    const ForegroundMask foreground = binarize_foreground(image);
    SplitMix64 rng(a.seed);
    const SynthesisResult result = synthesize_anomaly(image, foreground, params, rng);

    const fs::path out_dir(a.out);
    fs::create_directories(out_dir);
    write_png(out_dir / "synth.png", image.height, image.width, 3, to_bytes(result.image));
    write_png(out_dir / "mask.png", image.height, image.width, 1, to_bytes(result.anomaly_mask));
    write_png(out_dir / "foreground.png", image.height, image.width, 1, to_bytes(foreground.mask));
    json geometry;
    geometry["seed"] = a.seed;
    geometry["height"] = image.height;
    geometry["width"] = image.width;
    geometry["src_rect"] = rect_json(result.src_rect);
    geometry["dst_rect"] = rect_json(result.dst_rect);
    geometry["quarter_turns"] = result.quarter_turns;
    geometry["best_effort"] = result.best_effort;
    geometry["foreground_fallback"] = foreground.fallback;
    geometry["mask_pixels"] = result.anomaly_mask.count();
    write_text(out_dir / "geometry.json", geometry.dump(2) + "\n");
    out << "synthesized anomaly written to " << out_dir.string() << "\n";
    return kExitOk;
}

struct InspectArgs {
    std::string ckpt;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
    const json header = json::parse(read_checkpoint_header(a.ckpt));
    const ProjectorParams params = load_params(a.ckpt);
    for (const char* key : {"format", "depth", "dim", "heads", "mlp_ratio", "use_pos_embed", "init_seed", "tokens"}) {
        out << key << ": " << header.at(key).dump() << "\n";
    }
    out << "parameters: " << params.parameter_count() << "\n";
    for (const auto& t : params.tensors) {
        out << "  " << t.name << " [";
        for (std::size_t i = 0; i < t.shape.size(); ++i) out << (i ? ", " : "") << t.shape[i];
        out << "]\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Few-shot anomaly detection with a feature-manifold projector"};
    app.name("foundad");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw a seeded few-shot manifest from a dataset tree");
    sample_cmd->add_option("--root", sample.root, "Dataset root")->required()->check(CLI::ExistingDirectory);
    sample_cmd->add_option("--layout", sample.layout, "Directory layout: mvtec or visa")->capture_default_str();
    sample_cmd->add_option("--k", sample.k, "Normal images per category")->capture_default_str();
    sample_cmd->add_option("--seed", sample.seed, "Sampling seed")->capture_default_str();
    sample_cmd->add_option("--out", sample.out, "Manifest JSON path")->required();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train the projector on a few-shot manifest");
    train_cmd->add_option("--manifest", train_args.manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--root", train_args.root, "Dataset root the manifest ids are relative to")
        ->required()
        ->check(CLI::ExistingDirectory);
    train_cmd->add_option("--provider", train_args.provider, "Embedding provider")->capture_default_str();
    train_cmd->add_option("--depth", train_args.depth, "Projector blocks")->capture_default_str();
    train_cmd->add_option("--heads", train_args.heads, "Attention heads (0: max(1, dim/64))")->capture_default_str();
    train_cmd->add_option("--mlp-ratio", train_args.mlp_ratio, "MLP hidden width / dim (0 disables the MLP)")
        ->capture_default_str();
    train_cmd->add_flag("--no-pos-embed", train_args.no_pos_embed, "Disable the learned positional table");
    train_cmd->add_option("--lr", train_args.config.lr, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--wd", train_args.config.weight_decay, "Weight decay (L2 added to the gradient)")
        ->capture_default_str();
    train_cmd->add_option("--batch", train_args.config.batch_size, "Images per iteration")->capture_default_str();
    train_cmd->add_option("--sigma", train_args.config.sigma, "Probability of keeping an image unmodified")
        ->capture_default_str();
    train_cmd->add_option("--iters", train_args.config.iterations, "Training iterations")->capture_default_str();
    train_cmd->add_option("--image-size", train_args.config.image_size, "Square processing size in pixels")
        ->capture_default_str();
    train_cmd->add_option("--data-seed", train_args.config.data_seed, "Seed for batches and synthesis")
        ->capture_default_str();
    train_cmd->add_option("--init-seed", train_args.config.init_seed, "Seed for projector initialization")
        ->capture_default_str();
    train_cmd->add_option("--loss", train_args.loss, "Loss normalization: element_mean or patch_sum")
        ->capture_default_str();
    train_args.synth.add_to(*train_cmd);
    train_cmd->add_option("--out", train_args.out, "Checkpoint path")->required();
    train_cmd->add_option("--log", train_args.log, "Training log CSV (default: checkpoint path with .csv)");

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "Score the test split of a dataset tree");
    score_cmd->add_option("--ckpt", score.ckpt, "Projector checkpoint")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--provider", score.provider, "Embedding provider")->capture_default_str();
    score_cmd->add_option("--images", score.images, "Dataset root holding the test images")
        ->required()
        ->check(CLI::ExistingDirectory);
    score_cmd->add_option("--layout", score.layout, "Directory layout: mvtec or visa")->capture_default_str();
    score_cmd->add_option("--category", score.category, "Score only this category");
    score_cmd->add_option("--topk", score.topk, "Top-K patches per image score (0: 10 for mvtec, 6 for visa)")
        ->capture_default_str();
    score_cmd->add_option("--image-size", score.image_size, "Processing size (0: inferred from the checkpoint)")
        ->capture_default_str();
    score_cmd->add_option("--smooth", score.smooth, "Gaussian sigma for heatmaps (0: off)")->capture_default_str();
    score_cmd->add_flag("--png", score.png, "Also export min-max scaled 16-bit PNG heatmaps");
    score_cmd->add_option("--out", score.out, "Output directory")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Compute image and pixel metrics from scored outputs");
    eval_cmd->add_option("--scores", eval.scores, "Score CSV from `score`")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--heatmaps", eval.heatmaps, "Heatmap directory from `score`")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--gt", eval.gt, "Dataset root holding the ground-truth masks")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--layout", eval.layout, "Directory layout: mvtec or visa")->capture_default_str();
    eval_cmd->add_option("--fpr-cap", eval.fpr_cap, "FPR integration limit for PRO")->capture_default_str();
    eval_cmd->add_option("--thresholds", eval.thresholds, "Threshold count for the PRO sweep")->capture_default_str();
    eval_cmd->add_option("--out", eval.out, "Report directory")->required();

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Feature distance versus synthesized anomaly area");
    analyze_cmd->add_option("--image", analyze.image, "Input image")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--provider", analyze.provider, "Embedding provider")->capture_default_str();
    analyze_cmd->add_option("--ratios", analyze.ratios, "Comma-separated area ratios")->capture_default_str();
    analyze_cmd->add_option("--seed", analyze.seed, "Seed for the pasted patches")->capture_default_str();
    analyze_cmd->add_option("--image-size", analyze.image_size, "Square processing size")->capture_default_str();
    analyze_cmd->add_option("--out", analyze.out, "Distance series CSV")->required();
    analyze_cmd->add_option("--plot", analyze.plot, "Optional scatter plot PNG");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write one synthesized anomaly for inspection");
    synth_cmd->add_option("--image", synth.image, "Input image")->required()->check(CLI::ExistingFile);
    synth_cmd->add_option("--seed", synth.seed, "Synthesis seed")->capture_default_str();
    synth_cmd->add_option("--image-size", synth.image_size, "Square processing size (0: native)")
        ->capture_default_str();
    synth.synth.add_to(*synth_cmd);
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Print a checkpoint's configuration and tensor shapes");
    inspect_cmd->add_option("--ckpt", inspect.ckpt, "Projector checkpoint")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (sample_cmd->parsed()) return cmd_sample(sample, out);
        if (train_cmd->parsed()) return cmd_train(train_args, out);
        if (score_cmd->parsed()) return cmd_score(score, out);
        if (eval_cmd->parsed()) return cmd_eval(eval, out);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze, out);
        if (synth_cmd->parsed()) return cmd_synth(synth, out);
        if (inspect_cmd->parsed()) return cmd_inspect(inspect, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace foundad::cli
