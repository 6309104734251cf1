#include "ulr/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "ulr/geometry.hpp"

namespace ulr {

LabeledAnchors::LabeledAnchors(const EmbeddingMatrix& anchor_docs, const Labels& labels, std::size_t k)
    : docs_(anchor_docs.values()), labels_(labels), members_(k), centroids_(k, anchor_docs.dim()) {
    if (labels_.size() != docs_.rows()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(labels_.size()) + " anchor labels for " +
                                                   std::to_string(docs_.rows()) + " anchor documents");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= k) {
            throw Error(ErrorCode::LabelOutOfRange, "anchor label " + std::to_string(labels_[i]), i);
        }
        members_[static_cast<std::size_t>(labels_[i])].push_back(i);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (members_[c].empty()) {
            throw Error(ErrorCode::InvalidArgument, "category has no anchors", c);
        }
        const Vector mean = cluster_mean(docs_, members_[c]);
        std::copy(mean.begin(), mean.end(), centroids_.row(c).begin());
    }
}

LabeledAnchors LabeledAnchors::normalized() const {
    return LabeledAnchors(EmbeddingMatrix(l2_normalize_rows(docs_)), labels_, k());
}

Labels argmin_rows(const Matrix& m, std::size_t k) {
    Labels out(m.rows(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (row[c] < row[best]) {
                best = c;
            }
        }
        out[i] = static_cast<Label>(best);
    }
    return out;
}

Labels argmax_rows(const Matrix& m, std::size_t k) {
    Labels out(m.rows(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (row[c] > row[best]) {
                best = c;
            }
        }
        out[i] = static_cast<Label>(best);
    }
    return out;
}

Assignment assign(const Matrix& docs, const Matrix& centroids, Metric metric) {
    if (centroids.rows() == 0) {
        throw Error(ErrorCode::EmptyInput, "no centroids to assign to");
    }
    if (docs.cols() != centroids.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "documents have dim " + std::to_string(docs.cols()) +
                                                      ", centroids have dim " + std::to_string(centroids.cols()));
    }
    Assignment out;
    out.distances = Matrix(docs.rows(), centroids.rows());
    for (std::size_t t = 0; t < docs.rows(); ++t) {
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            out.distances(t, c) = distance(metric, docs.row(t), centroids.row(c));
        }
    }
    out.predictions = argmin_rows(out.distances, centroids.rows());
    for (std::size_t t = 0; t < docs.rows(); ++t) {
        out.objective += out.distances(t, static_cast<std::size_t>(out.predictions[t]));
    }
    return out;
}

Assignment assign(const EmbeddingMatrix& docs, const EmbeddingMatrix& centroids, Metric metric) {
    return assign(docs.values(), centroids.values(), metric);
}

namespace {

std::vector<std::vector<std::size_t>> group_members(const Labels& predictions, std::size_t n_clusters) {
    std::vector<std::vector<std::size_t>> members(n_clusters);
    for (std::size_t t = 0; t < predictions.size(); ++t) {
        const auto c = predictions[t];
        if (c < 0 || static_cast<std::size_t>(c) >= n_clusters) {
            throw Error(ErrorCode::LabelOutOfRange, "prediction " + std::to_string(c), t);
        }
        members[static_cast<std::size_t>(c)].push_back(t);
    }
    return members;
}

}  // namespace

Matrix update_centroids(const Matrix& docs, const Labels& predictions, const Matrix& initial_categories,
                        const Matrix* anchor_centroids, const CentroidWeights& weights) {
    if (!(weights.mean >= 0.0 && weights.anchor >= 0.0 && weights.category >= 0.0) ||
        std::abs(weights.mean + weights.anchor + weights.category - 1.0) > 1e-12) {
        throw Error(ErrorCode::WeightMismatch, "centroid weights must be nonnegative and sum to 1");
    }
    if ((anchor_centroids != nullptr) != (weights.anchor > 0.0)) {
        throw Error(ErrorCode::WeightMismatch, "anchor centroids must be supplied exactly when w_anchor > 0");
    }
    if (predictions.size() != docs.rows()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                                   std::to_string(docs.rows()) + " documents");
    }
    if (docs.cols() != initial_categories.cols() ||
        (anchor_centroids != nullptr && anchor_centroids->cols() != initial_categories.cols())) {
        throw Error(ErrorCode::DimensionMismatch, "centroid update inputs disagree on dimensionality");
    }
    const std::size_t n_clusters = initial_categories.rows();
    const auto members = group_members(predictions, n_clusters);

    Matrix out(n_clusters, initial_categories.cols());
    for (std::size_t c = 0; c < n_clusters; ++c) {
        auto centroid = out.row(c);
        const auto category = initial_categories.row(c);
        const bool has_anchor = anchor_centroids != nullptr && c < anchor_centroids->rows();
        if (members[c].empty()) {
            const double on_category = weights.mean + weights.category;
            for (std::size_t j = 0; j < centroid.size(); ++j) {
                centroid[j] = on_category * category[j];
            }
        } else {
            const Vector mean = cluster_mean(docs, members[c]);
            for (std::size_t j = 0; j < centroid.size(); ++j) {
                centroid[j] = weights.mean * mean[j] + weights.category * category[j];
            }
        }
        if (has_anchor) {
            const auto anchor = anchor_centroids->row(c);
            for (std::size_t j = 0; j < centroid.size(); ++j) {
                centroid[j] += weights.anchor * anchor[j];
            }
        }
    }
    return out;
}

namespace {

struct InterpolatedProblem {
    Matrix points;  // evaluation documents, then augmented texts
    std::size_t n_eval = 0;
    Matrix initial;  // real categories, then augmented categories
    std::size_t k_real = 0;
    const Matrix* anchor_centroids = nullptr;
};

// Under cosine distance a centroid only matters up to scale; keep it on the
// unit sphere when asked, and fall back to its category embedding if the
// interpolation cancelled out to zero.
void project_centroids(Matrix& centroids, const Matrix& initial, bool renormalize) {
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        auto row = centroids.row(c);
        const double norm = l2_norm(row);
        if (norm == 0.0) {
            const auto fallback = initial.row(c);
            std::copy(fallback.begin(), fallback.end(), row.begin());
        } else if (renormalize) {
            for (double& x : row) {
                x /= norm;
            }
        }
    }
}

RefinementResult run_interpolated(const InterpolatedProblem& problem, const RefinementConfig& config) {
    RefinementResult result;
    Matrix centroids = problem.initial;
    Labels previous;
    double best = std::numeric_limits<double>::infinity();

    for (std::size_t it = 0; it < config.max_iters; ++it) {
        Assignment current = assign(problem.points, centroids, config.metric);
        Matrix eval_distances = current.distances.slice_rows(0, problem.n_eval).leading_cols(problem.k_real);
        result.predictions_per_iter.push_back(argmin_rows(eval_distances, problem.k_real));
        result.objective_per_iter.push_back(current.objective);
        result.iterations_run = it + 1;

        const bool select = config.early_stopping == EarlyStopping::LastIteration || it == 0 ||
                            current.objective < best;
        if (select) {
            best = std::min(best, current.objective);
            result.selected_iter = it;
            result.final_centroids = centroids;
            result.final_distances = std::move(eval_distances);
        }

        if (current.predictions == previous) {
            result.converged = true;
            break;
        }
        previous = std::move(current.predictions);
        centroids = update_centroids(problem.points, previous, problem.initial, problem.anchor_centroids,
                                     config.weights);
        if (config.metric == Metric::CosineDistance) {
            project_centroids(centroids, problem.initial, config.renormalize_centroids);
        }
    }
    result.final_predictions = result.predictions_per_iter[result.selected_iter];
    return result;
}

void require_dim(const Matrix& m, std::size_t dim, const char* what) {
    if (m.rows() > 0 && m.cols() != dim) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " have dim " + std::to_string(m.cols()) +
                                                      ", expected " + std::to_string(dim));
    }
    for (double x : m.values()) {
        if (!std::isfinite(x)) {
            throw Error(ErrorCode::NonFinite, std::string(what) + " contain a non-finite entry");
        }
    }
}

Matrix prepare(const Matrix& m, Metric metric) {
    if (m.rows() == 0 || metric != Metric::CosineDistance) {
        return m;
    }
    return l2_normalize_rows(m);
}

}  // namespace

RefinementResult refine_dual(const EmbeddingMatrix& docs, const EmbeddingMatrix& categories,
                             const RefinementConfig& config, const std::optional<AugmentedInputs>& augmented) {
    config.validate();
    if (config.weights.anchor > 0.0) {
        throw Error(ErrorCode::WeightMismatch, "w_anchor > 0 requires anchors; use refine_fewshot");
    }
    require_dim(categories.values(), docs.dim(), "categories");

    InterpolatedProblem problem;
    problem.n_eval = docs.rows();
    problem.k_real = categories.rows();
    problem.points = prepare(docs.values(), config.metric);
    problem.initial = prepare(categories.values(), config.metric);
    if (augmented) {
        require_dim(augmented->extra_categories, docs.dim(), "augmented categories");
        require_dim(augmented->extra_texts, docs.dim(), "augmented texts");
        problem.points = stack_rows(problem.points, prepare(augmented->extra_texts, config.metric));
        problem.initial = stack_rows(problem.initial, prepare(augmented->extra_categories, config.metric));
    }
    return run_interpolated(problem, config);
}

RefinementResult refine_fewshot(const EmbeddingMatrix& docs, const EmbeddingMatrix& categories,
                                const LabeledAnchors& anchors, const RefinementConfig& config) {
    config.validate();
    require_dim(categories.values(), docs.dim(), "categories");
    require_dim(anchors.anchor_docs(), docs.dim(), "anchors");
    if (anchors.k() != categories.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "anchors cover " + std::to_string(anchors.k()) +
                                                      " categories, expected " + std::to_string(categories.rows()));
    }
    const LabeledAnchors prepared = config.metric == Metric::CosineDistance ? anchors.normalized() : anchors;

    InterpolatedProblem problem;
    problem.n_eval = docs.rows();
    problem.k_real = categories.rows();
    problem.points = prepare(docs.values(), config.metric);
    problem.initial = prepare(categories.values(), config.metric);
    problem.anchor_centroids = &prepared.anchor_centroids();
    return run_interpolated(problem, config);
}

RefinementResult refine_single(const ScoreMatrix& scores, const RefinementConfig& config) {
    if (scores.polarity() != Polarity::HigherBetter) {
        throw Error(ErrorCode::InvalidArgument, "single-encoder refinement needs higher-is-better scores");
    }
    if (config.max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
    }
    const ProbabilityMatrix probs = row_softmax(scores);
    const Matrix& points = probs.probs();
    const std::size_t k = scores.k();

    Matrix centroids(k, k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        centroids(c, c) = 1.0;
    }

    RefinementResult result;
    Labels previous;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < config.max_iters; ++it) {
        Matrix distances(points.rows(), k);
        for (std::size_t t = 0; t < points.rows(); ++t) {
            for (std::size_t c = 0; c < k; ++c) {
                distances(t, c) = js_divergence(points.row(t), centroids.row(c));
            }
        }
        Labels predictions = argmin_rows(distances, k);
        double objective = 0.0;
        for (std::size_t t = 0; t < points.rows(); ++t) {
            objective += distances(t, static_cast<std::size_t>(predictions[t]));
        }
        result.predictions_per_iter.push_back(predictions);
        result.objective_per_iter.push_back(objective);
        result.iterations_run = it + 1;

        const bool select = config.early_stopping == EarlyStopping::LastIteration || it == 0 || objective < best;
        if (select) {
            best = std::min(best, objective);
            result.selected_iter = it;
            result.final_centroids = centroids;
            result.final_distances = std::move(distances);
        }

        if (predictions == previous) {
            result.converged = true;
            break;
        }
        const auto members = group_members(predictions, k);
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) {
                continue;  // frozen
            }
            const Vector mean = cluster_mean(points, members[c]);
            std::copy(mean.begin(), mean.end(), centroids.row(c).begin());
        }
        previous = std::move(predictions);
    }
    result.final_predictions = result.predictions_per_iter[result.selected_iter];
    return result;
}

ClusteringResult cluster_random_init(const EmbeddingMatrix& docs, std::size_t k, unsigned long long seed,
                                     Metric metric, std::size_t max_iters) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "k must be positive");
    }
    if (k > docs.rows()) {
        throw Error(ErrorCode::KTooLarge,
                    "k = " + std::to_string(k) + " exceeds " + std::to_string(docs.rows()) + " documents");
    }
    if (max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
    }
    const Matrix points = prepare(docs.values(), metric);
    const std::size_t n = points.rows();

    ClusteringResult result;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::sample(all.begin(), all.end(), std::back_inserter(result.initial_indices), k, rng);

    Matrix centroids(k, points.cols());
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = points.row(result.initial_indices[c]);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }

    Labels previous;
    for (std::size_t it = 0; it < max_iters; ++it) {
        Assignment current = assign(points, centroids, metric);
        result.assignments_per_iter.push_back(current.predictions);
        result.objective_per_iter.push_back(current.objective);
        result.iterations_run = it + 1;
        result.centroids = centroids;
        if (current.predictions == previous) {
            result.converged = true;
            break;
        }

        const auto members = group_members(current.predictions, k);
        std::vector<double> own_distance(n);
        for (std::size_t t = 0; t < n; ++t) {
            own_distance[t] = current.distances(t, static_cast<std::size_t>(current.predictions[t]));
        }
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            auto centroid = centroids.row(c);
            if (members[c].empty()) {
                std::size_t far = n;
                for (std::size_t t = 0; t < n; ++t) {
                    if (!taken[t] && (far == n || own_distance[t] > own_distance[far])) {
                        far = t;
                    }
                }
                taken[far] = true;
                const auto src = points.row(far);
                std::copy(src.begin(), src.end(), centroid.begin());
                continue;
            }
            Vector mean = cluster_mean(points, members[c]);
            if (metric == Metric::CosineDistance) {
                const double norm = l2_norm(mean);
                if (norm == 0.0) {
                    continue;  // antipodal members; keep the previous direction
                }
                for (double& x : mean) {
                    x /= norm;
                }
            }
            std::copy(mean.begin(), mean.end(), centroid.begin());
        }
        previous = std::move(current.predictions);
    }
    result.assignments = result.assignments_per_iter.back();
    return result;
}

}  // namespace ulr
