#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "cli.hpp"
#include "foundad/analysis.hpp"
#include "foundad/dataset.hpp"
#include "foundad/error.hpp"
#include "foundad/inference.hpp"
#include "foundad/metrics.hpp"
#include "foundad/projector.hpp"
#include "foundad/synthesis.hpp"
#include "foundad/tensor_io.hpp"
#include "foundad/training.hpp"

namespace py = pybind11;
using namespace foundad;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Image to_image(const FloatArray& array) {
    if (array.ndim() != 2 && array.ndim() != 3) throw py::value_error("image must be HxW or HxWxC");
    const int channels = array.ndim() == 3 ? static_cast<int>(array.shape(2)) : 1;
    Image image(static_cast<int>(array.shape(0)), static_cast<int>(array.shape(1)), channels);
    std::memcpy(image.values.data(), array.data(), image.values.size() * sizeof(float));
    return image;
}

FloatArray from_image(const Image& image) {
    FloatArray array({image.height, image.width, image.channels});
    std::memcpy(array.mutable_data(), image.values.data(), image.values.size() * sizeof(float));
    return array;
}

FloatArray from_plane(const Image& image) {
    FloatArray array({image.height, image.width});
    std::memcpy(array.mutable_data(), image.values.data(), image.values.size() * sizeof(float));
    return array;
}

BinaryMask to_mask(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& array) {
    if (array.ndim() != 2) throw py::value_error("mask must be HxW");
    BinaryMask mask(static_cast<int>(array.shape(0)), static_cast<int>(array.shape(1)));
    const auto* data = array.data();
    for (std::size_t i = 0; i < mask.values.size(); ++i) mask.values[i] = data[i] ? 1 : 0;
    return mask;
}

py::array_t<std::uint8_t> from_mask(const BinaryMask& mask) {
    py::array_t<std::uint8_t> array({mask.height, mask.width});
    std::memcpy(array.mutable_data(), mask.values.data(), mask.values.size());
    return array;
}

FloatArray from_grid(const PatchGrid& grid) {
    FloatArray array({grid.rows, grid.cols, grid.dim});
    std::memcpy(array.mutable_data(), grid.values.data(), grid.values.size() * sizeof(float));
    return array;
}

PatchGrid to_grid(const FloatArray& array) {
    if (array.ndim() != 3) throw py::value_error("patch grid must be rows x cols x dim");
    PatchGrid grid(static_cast<int>(array.shape(0)), static_cast<int>(array.shape(1)), static_cast<int>(array.shape(2)));
    std::memcpy(grid.values.data(), array.data(), grid.values.size() * sizeof(float));
    return grid;
}

ProInput to_pro_input(const std::vector<FloatArray>& heatmaps,
                      const std::vector<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& masks) {
    ProInput input;
    for (const auto& h : heatmaps) input.heatmaps.push_back(to_image(h));
    for (const auto& m : masks) input.masks.push_back(to_mask(m));
    return input;
}

py::dict rect_dict(const Rect& r) {
    py::dict d;
    d["x"] = r.x;
    d["y"] = r.y;
    d["width"] = r.width;
    d["height"] = r.height;
    return d;
}

}  // namespace

PYBIND11_MODULE(_foundad, m) {
    m.doc() = "Few-shot anomaly detection with a feature-manifold projector";

    static py::exception<Error> error_type(m, "FoundadError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InvalidArgument) {
                PyErr_SetString(PyExc_ValueError, e.what());
            } else {
                py::set_error(error_type, e.what());
            }
        }
    });

    py::enum_<Layout>(m, "Layout").value("MVTEC", Layout::MVTec).value("VISA", Layout::VisA);
    m.def("default_top_k", &default_top_k, py::arg("layout"));

    m.def(
        "sample_manifest",
        [](const std::filesystem::path& root, const std::string& layout, int k, std::uint64_t seed) {
            return sample_few_shot(scan_dataset(root, parse_layout(layout)), k, seed).to_json();
        },
        py::arg("root"), py::arg("layout") = "mvtec", py::arg("k") = 1, py::arg("seed") = 0,
        "Few-shot manifest JSON for a dataset tree");

    m.def(
        "toy_encode",
        [](const FloatArray& image, int dim, int patch, std::uint64_t seed) {
            return from_grid(toy_encode(to_image(image), dim, patch, seed));
        },
        py::arg("image"), py::arg("dim") = 64, py::arg("patch") = 16, py::arg("seed") = 7,
        "Frozen random-projection patch embeddings, shape (rows, cols, dim)");

    py::class_<ProjectorConfig>(m, "ProjectorConfig")
        .def(py::init<>())
        .def_readwrite("depth", &ProjectorConfig::depth)
        .def_readwrite("dim", &ProjectorConfig::dim)
        .def_readwrite("heads", &ProjectorConfig::heads)
        .def_readwrite("mlp_ratio", &ProjectorConfig::mlp_ratio)
        .def_readwrite("use_pos_embed", &ProjectorConfig::use_pos_embed)
        .def_readwrite("init_seed", &ProjectorConfig::init_seed);

    py::class_<ProjectorParams>(m, "Projector")
        .def_static("init", &init_projector, py::arg("config"), py::arg("tokens"))
        .def_static("load", &load_params, py::arg("path"))
        .def("save", [](const ProjectorParams& p, const std::filesystem::path& path) { save_params(path, p); },
             py::arg("path"))
        .def_readonly("config", &ProjectorParams::config)
        .def_readonly("tokens", &ProjectorParams::tokens)
        .def_property_readonly("parameter_count", &ProjectorParams::parameter_count)
        .def("forward", [](const ProjectorParams& p, const FloatArray& grid) { return from_grid(forward(p, to_grid(grid))); },
             py::arg("grid"))
        .def("tensor_names", [](const ProjectorParams& p) {
            std::vector<std::string> names;
            for (const auto& t : p.tensors) names.push_back(t.name);
            return names;
        });

    m.def(
        "train",
        [](const std::vector<FloatArray>& images, const std::string& provider, const ProjectorConfig& projector,
           int iterations, double lr, double weight_decay, int batch_size, double sigma, std::uint64_t data_seed,
           std::uint64_t init_seed, const std::string& loss) {
            std::vector<TrainingImage> pool;
            for (std::size_t i = 0; i < images.size(); ++i) pool.push_back({std::to_string(i), to_image(images[i])});
            if (pool.empty()) throw py::value_error("no training images");
            TrainConfig config;
            config.iterations = iterations;
            config.lr = lr;
            config.weight_decay = weight_decay;
            config.batch_size = batch_size;
            config.sigma = sigma;
            config.data_seed = data_seed;
            config.init_seed = init_seed;
            config.image_size = pool.front().pixels.height;
            if (loss == "patch_sum") {
                config.loss = LossNormalization::PatchSum;
            } else if (loss != "element_mean") {
                throw py::value_error("loss must be element_mean or patch_sum");
            }
            TrainResult result;
            {
                py::gil_scoped_release release;
                result = train(pool, EmbeddingProvider(parse_provider_spec(provider)), projector, config);
            }
            return py::make_tuple(result.params, result.log.losses);
        },
        py::arg("images"), py::arg("provider") = "toy:dim=64,patch=16,seed=7", py::arg("projector") = ProjectorConfig{},
        py::arg("iterations") = 1000, py::arg("lr") = 1e-3, py::arg("weight_decay") = 1e-4, py::arg("batch_size") = 8,
        py::arg("sigma") = 0.5, py::arg("data_seed") = 0, py::arg("init_seed") = 0, py::arg("loss") = "element_mean",
        "Train a projector on square RGB images in [0, 1]; returns (projector, losses)");

    m.def(
        "score_image",
        [](const ProjectorParams& params, const std::string& provider, const FloatArray& image, int k, double smooth) {
            const ScoreResult r =
                score_image(params, EmbeddingProvider(parse_provider_spec(provider)), to_image(image), k, {}, smooth);
            return py::make_tuple(r.score.value, from_plane(r.heatmap));
        },
        py::arg("projector"), py::arg("provider"), py::arg("image"), py::arg("k") = 10, py::arg("smooth") = 0.0,
        "(image score, heatmap at the image resolution)");

    m.def(
        "image_score",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& scores, int k) {
            ScoreMap map;
            map.rows = 1;
            map.cols = static_cast<int>(scores.size());
            map.values.assign(scores.data(), scores.data() + scores.size());
            return image_score(map, k).value;
        },
        py::arg("patch_scores"), py::arg("k"), "Mean of the K largest patch scores");

    m.def(
        "auroc", [](const std::vector<double>& s, const std::vector<int>& l) { return auroc(ScoredSet{s, l}); },
        py::arg("scores"), py::arg("labels"));
    m.def(
        "aupr", [](const std::vector<double>& s, const std::vector<int>& l) { return aupr(ScoredSet{s, l}); },
        py::arg("scores"), py::arg("labels"));
    m.def(
        "pixel_auroc",
        [](const std::vector<FloatArray>& h, const std::vector<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& masks) {
            return pixel_auroc(to_pro_input(h, masks));
        },
        py::arg("heatmaps"), py::arg("masks"));
    m.def(
        "pro",
        [](const std::vector<FloatArray>& h, const std::vector<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& masks,
           double fpr_cap, int thresholds, bool exact) {
            return pro(to_pro_input(h, masks), fpr_cap, thresholds, exact ? ThresholdMode::Exact : ThresholdMode::Linear);
        },
        py::arg("heatmaps"), py::arg("masks"), py::arg("fpr_cap") = 0.3, py::arg("thresholds") = 200,
        py::arg("exact") = false, "Normalized PRO area up to fpr_cap");

    m.def(
        "synthesize_anomaly",
        [](const FloatArray& image, std::uint64_t seed, bool rotate) {
            const Image input = to_image(image);
            SynthesisParams params;
            params.rotate = rotate;
            SplitMix64 rng(seed);
            const SynthesisResult r = synthesize_anomaly(input, binarize_foreground(input), params, rng);
            py::dict geometry;
            geometry["src_rect"] = rect_dict(r.src_rect);
            geometry["dst_rect"] = rect_dict(r.dst_rect);
            geometry["quarter_turns"] = r.quarter_turns;
            geometry["best_effort"] = r.best_effort;
            return py::make_tuple(from_image(r.image), from_mask(r.anomaly_mask), geometry);
        },
        py::arg("image"), py::arg("seed") = 0, py::arg("rotate") = false, "(image, anomaly mask, geometry)");

    m.def(
        "binarize_foreground", [](const FloatArray& image) { return from_mask(binarize_foreground(to_image(image)).mask); },
        py::arg("image"));

    m.def(
        "distance_vs_area",
        [](const FloatArray& image, const std::string& provider, const std::vector<double>& ratios, std::uint64_t seed) {
            std::vector<std::pair<long long, double>> out;
            for (const auto& p : distance_vs_area(to_image(image), EmbeddingProvider(parse_provider_spec(provider)), ratios, seed)) {
                out.emplace_back(p.pixel_count, p.distance);
            }
            return out;
        },
        py::arg("image"), py::arg("provider"), py::arg("ratios"), py::arg("seed") = 0,
        "[(anomalous pixel count, feature distance)]");
    m.def(
        "spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); },
        py::arg("x"), py::arg("y"));

    m.def(
        "write_ftns",
        [](const std::filesystem::path& path, const FloatArray& array) {
            std::vector<std::uint32_t> dims(array.shape(), array.shape() + array.ndim());
            write_ftns_file(path, dims, std::span<const float>(array.data(), static_cast<std::size_t>(array.size())));
        },
        py::arg("path"), py::arg("array"));
    m.def(
        "read_ftns",
        [](const std::filesystem::path& path) {
            const FtnsTensor t = read_ftns_file(path);
            std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
            FloatArray array(shape);
            std::memcpy(array.mutable_data(), t.values.data(), t.values.size() * sizeof(float));
            return array;
        },
        py::arg("path"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line in-process; returns (exit code, stdout, stderr)");
}
