#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "ulr/evaluation.hpp"
#include "ulr/geometry.hpp"
#include "ulr/io.hpp"
#include "ulr/refinement.hpp"

namespace py = pybind11;
using namespace ulr;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a, const char* what) {
    if (a.ndim() != 2) {
        throw py::value_error(std::string(what) + " must be a 2-D array");
    }
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<double> to_vector(const DoubleArray& a, const char* what) {
    if (a.ndim() != 1) {
        throw py::value_error(std::string(what) + " must be a 1-D array");
    }
    return {a.data(), a.data() + a.size()};
}

Labels to_labels(const LabelArray& a, const char* what) {
    if (a.ndim() != 1) {
        throw py::value_error(std::string(what) + " must be a 1-D array");
    }
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> from_matrix(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

py::array_t<Label> from_labels(const Labels& labels) {
    py::array_t<Label> out(static_cast<py::ssize_t>(labels.size()));
    std::copy(labels.begin(), labels.end(), out.mutable_data());
    return out;
}

py::array_t<Label> stack_labels(const std::vector<Labels>& rows) {
    const std::size_t n = rows.empty() ? 0 : rows.front().size();
    py::array_t<Label> out({rows.size(), n});
    Label* dst = out.mutable_data();
    for (const auto& row : rows) dst = std::copy(row.begin(), row.end(), dst);
    return out;
}

py::dict to_dict(const RefinementResult& r) {
    py::dict d;
    d["predictions_per_iter"] = stack_labels(r.predictions_per_iter);
    d["objective_per_iter"] = py::array_t<double>(static_cast<py::ssize_t>(r.objective_per_iter.size()),
                                                  r.objective_per_iter.data());
    d["selected_iter"] = r.selected_iter;
    d["final_predictions"] = from_labels(r.final_predictions);
    d["final_centroids"] = from_matrix(r.final_centroids);
    d["final_distances"] = from_matrix(r.final_distances);
    d["converged"] = r.converged;
    d["iterations_run"] = r.iterations_run;
    return d;
}

RefinementConfig make_config(RefinementConfig config, const std::string& metric, std::size_t max_iters,
                             const std::string& early_stopping, bool renormalize_centroids) {
    config.metric = parse_metric(metric);
    config.max_iters = max_iters;
    config.early_stopping = parse_early_stopping(early_stopping);
    config.renormalize_centroids = renormalize_centroids;
    return config;
}

}  // namespace

PYBIND11_MODULE(_ulr, m) {
    m.doc() = "Unsupervised label refinement for dataless text classification";

    py::register_exception<Error>(m, "UlrError", PyExc_ValueError);

    m.def(
        "refine_dual",
        [](const DoubleArray& docs, const DoubleArray& categories, const std::string& metric, std::size_t max_iters,
           double w_mean, double w_category, const std::string& early_stopping, bool renormalize_centroids,
           std::optional<DoubleArray> extra_categories, std::optional<DoubleArray> extra_texts) {
            RefinementConfig config =
                make_config(RefinementConfig::dual_defaults(), metric, max_iters, early_stopping, renormalize_centroids);
            config.weights = {w_mean, 0.0, w_category};
            std::optional<AugmentedInputs> aug;
            const std::size_t dim = docs.ndim() == 2 ? static_cast<std::size_t>(docs.shape(1)) : 0;
            if (extra_categories || extra_texts) {
                aug.emplace();
                aug->extra_categories =
                    extra_categories ? to_matrix(*extra_categories, "extra_categories") : Matrix(0, dim);
                aug->extra_texts = extra_texts ? to_matrix(*extra_texts, "extra_texts") : Matrix(0, dim);
                config.n_augmented_categories = aug->extra_categories.rows();
                config.n_augmented_texts = aug->extra_texts.rows();
            }
            const EmbeddingMatrix d(to_matrix(docs, "docs"));
            const EmbeddingMatrix c(to_matrix(categories, "categories"));
            return to_dict(refine_dual(d, c, config, aug));
        },
        py::arg("docs"), py::arg("categories"), py::arg("metric") = "cosine", py::arg("max_iters") = 100,
        py::arg("w_mean") = 0.5, py::arg("w_category") = 0.5, py::arg("early_stopping") = "min-objective",
        py::arg("renormalize_centroids") = true, py::arg("extra_categories") = py::none(),
        py::arg("extra_texts") = py::none(),
        "Interpolated k-means starting from the category embeddings.");

    m.def(
        "refine_fewshot",
        [](const DoubleArray& docs, const DoubleArray& categories, const DoubleArray& anchor_docs,
           const LabelArray& anchor_labels, const std::string& metric, std::size_t max_iters, double w_mean,
           double w_anchor, double w_category, const std::string& early_stopping, bool renormalize_centroids) {
            RefinementConfig config = make_config(RefinementConfig::fewshot_defaults(), metric, max_iters,
                                                  early_stopping, renormalize_centroids);
            config.weights = {w_mean, w_anchor, w_category};
            const EmbeddingMatrix d(to_matrix(docs, "docs"));
            const EmbeddingMatrix c(to_matrix(categories, "categories"));
            const LabeledAnchors anchors(EmbeddingMatrix(to_matrix(anchor_docs, "anchor_docs")),
                                         to_labels(anchor_labels, "anchor_labels"), c.rows());
            return to_dict(refine_fewshot(d, c, anchors, config));
        },
        py::arg("docs"), py::arg("categories"), py::arg("anchor_docs"), py::arg("anchor_labels"),
        py::arg("metric") = "cosine", py::arg("max_iters") = 100, py::arg("w_mean") = 0.25,
        py::arg("w_anchor") = 0.25, py::arg("w_category") = 0.5, py::arg("early_stopping") = "min-objective",
        py::arg("renormalize_centroids") = true,
        "Interpolated k-means with labeled anchors in every centroid update.");

    m.def(
        "refine_single",
        [](const DoubleArray& scores, std::size_t max_iters, const std::string& early_stopping) {
            RefinementConfig config = RefinementConfig::single_defaults();
            config.max_iters = max_iters;
            config.early_stopping = parse_early_stopping(early_stopping);
            return to_dict(refine_single(ScoreMatrix(to_matrix(scores, "scores")), config));
        },
        py::arg("scores"), py::arg("max_iters") = 100, py::arg("early_stopping") = "last-iteration",
        "Jensen-Shannon k-means over softmax(scores), higher scores better.");

    m.def(
        "cluster_random_init",
        [](const DoubleArray& docs, std::size_t k, unsigned long long seed, const std::string& metric,
           std::size_t max_iters) {
            const auto r = cluster_random_init(EmbeddingMatrix(to_matrix(docs, "docs")), k, seed,
                                               parse_metric(metric), max_iters);
            py::dict d;
            d["assignments"] = from_labels(r.assignments);
            d["centroids"] = from_matrix(r.centroids);
            d["initial_indices"] = r.initial_indices;
            d["assignments_per_iter"] = stack_labels(r.assignments_per_iter);
            d["objective_per_iter"] = r.objective_per_iter;
            d["iterations_run"] = r.iterations_run;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("docs"), py::arg("k"), py::arg("seed") = 0, py::arg("metric") = "squared-l2",
        py::arg("max_iters") = 100, "Lloyd's k-means from k seeded random documents.");

    m.def(
        "accuracy",
        [](const LabelArray& preds, const LabelArray& gold) {
            return accuracy(to_labels(preds, "predictions"), to_labels(gold, "gold"));
        },
        py::arg("predictions"), py::arg("gold"));

    m.def(
        "one_to_one_accuracy",
        [](const LabelArray& preds, const LabelArray& gold, std::size_t k) {
            const auto r = one_to_one_accuracy(to_labels(preds, "predictions"), to_labels(gold, "gold"), k);
            return py::make_tuple(r.accuracy, from_labels(r.mapping));
        },
        py::arg("predictions"), py::arg("gold"), py::arg("k"),
        "Best accuracy over cluster-to-category bijections; returns (accuracy, mapping).");

    m.def(
        "ensemble",
        [](const std::vector<DoubleArray>& runs, const std::string& polarity) {
            std::vector<ScoreMatrix> matrices;
            for (const auto& run : runs) matrices.emplace_back(to_matrix(run, "run"), parse_polarity(polarity));
            return from_labels(ensemble(matrices));
        },
        py::arg("runs"), py::arg("polarity") = "lower",
        "Argmin (lower) or argmax (higher) of the summed score matrices.");

    m.def(
        "js_divergence",
        [](const DoubleArray& p, const DoubleArray& q) { return js_divergence(to_vector(p, "p"), to_vector(q, "q")); },
        py::arg("p"), py::arg("q"));
    m.def(
        "kl_divergence",
        [](const DoubleArray& p, const DoubleArray& q) { return kl_divergence(to_vector(p, "p"), to_vector(q, "q")); },
        py::arg("p"), py::arg("q"));

    m.def(
        "load_embeddings",
        [](const std::filesystem::path& path) {
            const auto e = load_embeddings(path);
            return py::make_tuple(e.ids(), from_matrix(e.values()));
        },
        py::arg("path"), "Returns (ids, matrix).");
    m.def(
        "write_embeddings",
        [](const std::filesystem::path& path, const DoubleArray& values, std::vector<std::string> ids) {
            write_embeddings(EmbeddingMatrix(to_matrix(values, "values"), std::move(ids)), path);
        },
        py::arg("path"), py::arg("values"), py::arg("ids") = std::vector<std::string>{});
    m.def(
        "load_score_matrix",
        [](const std::filesystem::path& path) {
            const auto s = load_score_matrix(path);
            return py::make_tuple(from_matrix(s.scores()), std::string(to_string(s.polarity())));
        },
        py::arg("path"), "Returns (scores, polarity).");
    m.def(
        "write_score_matrix",
        [](const std::filesystem::path& path, const DoubleArray& scores, const std::string& polarity) {
            write_score_matrix(ScoreMatrix(to_matrix(scores, "scores"), parse_polarity(polarity)), path);
        },
        py::arg("path"), py::arg("scores"), py::arg("polarity") = "higher");
}
