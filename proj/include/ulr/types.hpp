#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulr/error.hpp"

namespace ulr {

using Label = int;
using Labels = std::vector<Label>;

// Dense row-major matrix of doubles. The compute path is 64-bit throughout.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    const std::vector<double>& values() const noexcept { return values_; }

    // Rows [first, first + count) as a new matrix.
    Matrix slice_rows(std::size_t first, std::size_t count) const;
    // Columns [0, count) as a new matrix.
    Matrix leading_cols(std::size_t count) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// Vertical concatenation; column counts must agree.
Matrix stack_rows(const Matrix& top, const Matrix& bottom);

/// Row-per-item dense vectors for documents or categories.
///
/// Invariants: rows >= 1, dim >= 1, all entries finite, ids (when present)
/// unique and one per row. Rows are addressed by position; ids are metadata.
class EmbeddingMatrix {
public:
    explicit EmbeddingMatrix(Matrix values, std::vector<std::string> ids = {});

    static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t dim() const noexcept { return values_.cols(); }
    std::span<const double> row(std::size_t i) const { return values_.row(i); }
    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    bool has_ids() const noexcept { return !ids_.empty(); }

    bool operator==(const EmbeddingMatrix&) const = default;

private:
    Matrix values_;
    std::vector<std::string> ids_;
};

// Ordered category descriptions; the order is the category index everywhere.
class CategorySet {
public:
    explicit CategorySet(std::vector<std::string> names);

    std::size_t k() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(std::size_t c) const { return names_.at(c); }

    bool operator==(const CategorySet&) const = default;

private:
    std::vector<std::string> names_;
};

enum class Polarity { HigherBetter, LowerBetter };

// Documents x categories relevance scores.
class ScoreMatrix {
public:
    ScoreMatrix(Matrix scores, Polarity polarity = Polarity::HigherBetter);

    std::size_t n_docs() const noexcept { return scores_.rows(); }
    std::size_t k() const noexcept { return scores_.cols(); }
    const Matrix& scores() const noexcept { return scores_; }
    Polarity polarity() const noexcept { return polarity_; }

    bool operator==(const ScoreMatrix&) const = default;

private:
    Matrix scores_;
    Polarity polarity_;
};

// Row-stochastic matrix: entries in [0,1], rows sum to 1 within 1e-9.
class ProbabilityMatrix {
public:
    explicit ProbabilityMatrix(Matrix probs);

    std::size_t n_docs() const noexcept { return probs_.rows(); }
    std::size_t k() const noexcept { return probs_.cols(); }
    std::span<const double> row(std::size_t i) const { return probs_.row(i); }
    const Matrix& probs() const noexcept { return probs_; }

private:
    Matrix probs_;
};

enum class Metric { CosineDistance, SquaredL2 };
enum class EarlyStopping { MinObjective, LastIteration };

// Interpolation weights of the centroid update:
//   r_c = mean * (assigned docs) + anchor * r_c^l + category * enc(c)
struct CentroidWeights {
    double mean = 0.5;
    double anchor = 0.0;
    double category = 0.5;

    bool operator==(const CentroidWeights&) const = default;
};

struct RefinementConfig {
    Metric metric = Metric::CosineDistance;
    std::size_t max_iters = 100;
    CentroidWeights weights{};
    EarlyStopping early_stopping = EarlyStopping::MinObjective;
    unsigned long long seed = 0;
    // Under cosine, re-project updated centroids onto the unit sphere.
    bool renormalize_centroids = true;
    std::size_t n_augmented_categories = 0;
    std::size_t n_augmented_texts = 0;

    static RefinementConfig dual_defaults();
    static RefinementConfig fewshot_defaults();
    static RefinementConfig single_defaults();

    // Throws WeightMismatch / InvalidArgument.
    void validate() const;

    bool operator==(const RefinementConfig&) const = default;
};

struct RefinementResult {
    std::vector<Labels> predictions_per_iter;
    std::vector<double> objective_per_iter;
    std::size_t selected_iter = 0;
    Labels final_predictions;
    // Embedding centroids (dual / few-shot) or distributions (single) entering
    // the selected iteration.
    Matrix final_centroids;
    // Distances of each evaluation document to the k real categories at the
    // selected iteration. Lower is better; input to label ensembles.
    Matrix final_distances;
    bool converged = false;
    std::size_t iterations_run = 0;

    bool operator==(const RefinementResult&) const = default;
};

class GoldLabels {
public:
    GoldLabels(Labels labels, std::size_t k);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t k() const noexcept { return k_; }
    const Labels& labels() const noexcept { return labels_; }
    Label operator[](std::size_t i) const { return labels_[i]; }

private:
    Labels labels_;
    std::size_t k_;
};

struct Dataset {
    EmbeddingMatrix docs;
    EmbeddingMatrix categories;
    std::optional<GoldLabels> gold;
};

// Checks shapes and label ranges, reporting the first violation.
Dataset validate_dataset(EmbeddingMatrix docs, EmbeddingMatrix categories,
                         std::optional<Labels> gold = std::nullopt);

std::string_view to_string(Metric metric);
std::string_view to_string(EarlyStopping mode);
std::string_view to_string(Polarity polarity);
Metric parse_metric(std::string_view text);
EarlyStopping parse_early_stopping(std::string_view text);
Polarity parse_polarity(std::string_view text);

}  // namespace ulr
