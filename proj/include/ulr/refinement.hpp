#pragma once

#include <optional>
#include <vector>

#include "ulr/types.hpp"

namespace ulr {

/// Few-shot anchors: labeled documents pinned to their category's cluster.
///
/// The per-category anchor means r_c^l are computed once at construction and
/// never change during refinement. Every category must own at least one anchor.
class LabeledAnchors {
public:
    LabeledAnchors(const EmbeddingMatrix& anchor_docs, const Labels& labels, std::size_t k);

    std::size_t k() const noexcept { return members_.size(); }
    const Matrix& anchor_docs() const noexcept { return docs_; }
    const Labels& labels() const noexcept { return labels_; }
    const std::vector<std::vector<std::size_t>>& members() const noexcept { return members_; }
    const Matrix& anchor_centroids() const noexcept { return centroids_; }

    // Same anchors with every row scaled to unit length (cosine metric).
    LabeledAnchors normalized() const;

private:
    Matrix docs_;
    Labels labels_;
    std::vector<std::vector<std::size_t>> members_;
    Matrix centroids_;
};

// Extra centroids and clustering-only documents for the dual path. Either
// matrix may have zero rows.
struct AugmentedInputs {
    Matrix extra_categories;
    Matrix extra_texts;
};

struct Assignment {
    Labels predictions;
    Matrix distances;  // n x K
    double objective = 0.0;
};

// Nearest centroid per document, lowest index on ties. The objective is the
// sum of each document's distance to its assigned centroid.
Assignment assign(const Matrix& docs, const Matrix& centroids, Metric metric);
Assignment assign(const EmbeddingMatrix& docs, const EmbeddingMatrix& centroids, Metric metric);

// Interpolated centroid update
//   r_c = w_mean * mean(docs assigned to c) + w_anchor * r_c^l + w_category * enc(c)
// An empty cluster gets (w_mean + w_category) * enc(c) + w_anchor * r_c^l.
// Rows of `initial_categories` beyond anchor_centroids->rows() (augmented
// categories) take no anchor term. Throws WeightMismatch when the weights do not
// sum to 1 or when anchors are supplied iff w_anchor > 0 does not hold.
Matrix update_centroids(const Matrix& docs, const Labels& predictions, const Matrix& initial_categories,
                        const Matrix* anchor_centroids, const CentroidWeights& weights);

// Unsupervised label refinement for dual encoders: k-means over document
// embeddings with centroids initialized at (and interpolated toward) the
// category embeddings. Early stopping follows config.early_stopping.
RefinementResult refine_dual(const EmbeddingMatrix& docs, const EmbeddingMatrix& categories,
                             const RefinementConfig& config,
                             const std::optional<AugmentedInputs>& augmented = std::nullopt);

// k-means over softmax distributions with Jensen-Shannon distance, centroids
// starting one-hot and updated by plain means. Scores must be HigherBetter.
RefinementResult refine_single(const ScoreMatrix& scores, const RefinementConfig& config);

// refine_dual with labeled anchors joining every centroid update through r_c^l.
RefinementResult refine_fewshot(const EmbeddingMatrix& docs, const EmbeddingMatrix& categories,
                                const LabeledAnchors& anchors, const RefinementConfig& config);

struct ClusteringResult {
    Labels assignments;
    Matrix centroids;
    std::vector<std::size_t> initial_indices;
    std::vector<Labels> assignments_per_iter;
    std::vector<double> objective_per_iter;
    std::size_t iterations_run = 0;
    bool converged = false;
};

// Plain Lloyd iterations from k distinct documents drawn by a seeded generator.
// Empty clusters are reseeded at the document farthest from its centroid.
ClusteringResult cluster_random_init(const EmbeddingMatrix& docs, std::size_t k, unsigned long long seed,
                                     Metric metric, std::size_t max_iters = 100);

// Index of the row-wise extremum (lowest index on ties) over the first `k` columns.
Labels argmin_rows(const Matrix& m, std::size_t k);
Labels argmax_rows(const Matrix& m, std::size_t k);

}  // namespace ulr
