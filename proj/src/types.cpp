#include "ulr/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ulr {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw Error(ErrorCode::ShapeMismatch, "matrix storage has " + std::to_string(values_.size()) +
                                                  " values, expected " + std::to_string(rows * cols));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw Error(ErrorCode::RaggedRows, "row length " + std::to_string(rows[i].size()) +
                                                   " differs from " + std::to_string(cols), i);
        }
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return Matrix(rows.size(), cols, std::move(values));
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
    std::vector<double> out(values_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                            values_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_));
    return Matrix(count, cols_, std::move(out));
}

Matrix Matrix::leading_cols(std::size_t count) const {
    Matrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::copy_n(row(i).begin(), count, out.row(i).begin());
    }
    return out;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
    if (bottom.rows() == 0) {
        return top;
    }
    if (top.rows() == 0) {
        return bottom;
    }
    if (top.cols() != bottom.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "cannot stack " + std::to_string(top.cols()) +
                                                      "-column rows onto " + std::to_string(bottom.cols()));
    }
    std::vector<double> values = top.values();
    values.insert(values.end(), bottom.values().begin(), bottom.values().end());
    return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(values));
}

EmbeddingMatrix::EmbeddingMatrix(Matrix values, std::vector<std::string> ids)
    : values_(std::move(values)), ids_(std::move(ids)) {
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw Error(ErrorCode::EmptyInput, "embedding matrix needs at least one row and one column");
    }
    for (std::size_t i = 0; i < values_.rows(); ++i) {
        for (double x : values_.row(i)) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::NonFinite, "non-finite embedding entry", i);
            }
        }
    }
    if (!ids_.empty()) {
        if (ids_.size() != values_.rows()) {
            throw Error(ErrorCode::LengthMismatch, std::to_string(ids_.size()) + " ids for " +
                                                       std::to_string(values_.rows()) + " rows");
        }
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            if (!seen.insert(ids_[i]).second) {
                throw Error(ErrorCode::DuplicateId, "duplicate id '" + ids_[i] + "'", i);
            }
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    return EmbeddingMatrix(Matrix::from_rows(rows));
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

CategorySet::CategorySet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) {
        throw Error(ErrorCode::EmptyInput, "need at least 2 categories, got " + std::to_string(names_.size()));
    }
    for (std::size_t c = 0; c < names_.size(); ++c) {
        names_[c] = trim(names_[c]);
        if (names_[c].empty()) {
            throw Error(ErrorCode::EmptyInput, "blank category name", c);
        }
    }
}

ScoreMatrix::ScoreMatrix(Matrix scores, Polarity polarity) : scores_(std::move(scores)), polarity_(polarity) {
    if (scores_.empty()) {
        throw Error(ErrorCode::EmptyInput, "score matrix has no entries");
    }
    for (std::size_t i = 0; i < scores_.rows(); ++i) {
        for (double x : scores_.row(i)) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::NonFinite, "non-finite score", i);
            }
        }
    }
}

ProbabilityMatrix::ProbabilityMatrix(Matrix probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw Error(ErrorCode::EmptyInput, "probability matrix has no entries");
    }
    for (std::size_t i = 0; i < probs_.rows(); ++i) {
        double total = 0.0;
        for (double p : probs_.row(i)) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw Error(ErrorCode::InvalidArgument, "probability outside [0,1]", i);
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "row sums to " + std::to_string(total), i);
        }
    }
}

RefinementConfig RefinementConfig::dual_defaults() {
    return RefinementConfig{};
}

RefinementConfig RefinementConfig::fewshot_defaults() {
    RefinementConfig config;
    config.weights = {0.25, 0.25, 0.5};
    return config;
}

RefinementConfig RefinementConfig::single_defaults() {
    RefinementConfig config;
    config.weights = {1.0, 0.0, 0.0};
    config.early_stopping = EarlyStopping::LastIteration;
    return config;
}

void RefinementConfig::validate() const {
    const auto& w = weights;
    if (!(w.mean >= 0.0 && w.anchor >= 0.0 && w.category >= 0.0)) {
        throw Error(ErrorCode::WeightMismatch, "centroid weights must be nonnegative");
    }
    if (std::abs(w.mean + w.anchor + w.category - 1.0) > 1e-12) {
        throw Error(ErrorCode::WeightMismatch, "centroid weights must sum to 1");
    }
    if (max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
    }
}

GoldLabels::GoldLabels(Labels labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= k_) {
            throw Error(ErrorCode::LabelOutOfRange,
                        "label " + std::to_string(labels_[i]) + " not in [0," + std::to_string(k_) + ")", i);
        }
    }
}

Dataset validate_dataset(EmbeddingMatrix docs, EmbeddingMatrix categories, std::optional<Labels> gold) {
    if (docs.dim() != categories.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "documents have dim " + std::to_string(docs.dim()) +
                                                      ", categories have dim " + std::to_string(categories.dim()));
    }
    if (categories.rows() < 2) {
        throw Error(ErrorCode::EmptyInput, "need at least 2 categories");
    }
    std::optional<GoldLabels> checked;
    if (gold) {
        if (gold->size() != docs.rows()) {
            throw Error(ErrorCode::DimensionMismatch, std::to_string(gold->size()) + " gold labels for " +
                                                          std::to_string(docs.rows()) + " documents");
        }
        checked.emplace(std::move(*gold), categories.rows());
    }
    return Dataset{std::move(docs), std::move(categories), std::move(checked)};
}

std::string_view to_string(Metric metric) {
    return metric == Metric::CosineDistance ? "cosine" : "squared-l2";
}

std::string_view to_string(EarlyStopping mode) {
    return mode == EarlyStopping::MinObjective ? "min-objective" : "last-iteration";
}

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::HigherBetter ? "higher" : "lower";
}

Metric parse_metric(std::string_view text) {
    if (text == "cosine") return Metric::CosineDistance;
    if (text == "squared-l2" || text == "l2") return Metric::SquaredL2;
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

EarlyStopping parse_early_stopping(std::string_view text) {
    if (text == "min-objective") return EarlyStopping::MinObjective;
    if (text == "last-iteration") return EarlyStopping::LastIteration;
    throw Error(ErrorCode::InvalidArgument, "unknown early-stopping mode '" + std::string(text) + "'");
}

Polarity parse_polarity(std::string_view text) {
    if (text == "higher") return Polarity::HigherBetter;
    if (text == "lower") return Polarity::LowerBetter;
    throw Error(ErrorCode::InvalidArgument, "unknown polarity '" + std::string(text) + "'");
}

}  // namespace ulr
