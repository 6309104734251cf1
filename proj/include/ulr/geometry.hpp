#pragma once

#include <span>
#include <vector>

#include "ulr/types.hpp"

namespace ulr {

using Vector = std::vector<double>;

// Scales every row to unit L2 norm. Throws ZeroVector(row) on an all-zero row.
EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m);
Matrix l2_normalize_rows(const Matrix& m);

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> u);

// 1 - cos(u, v), in [0, 2].
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Sum of squared coordinate gaps; no square root.
double squared_l2_distance(std::span<const double> u, std::span<const double> v);

double distance(Metric metric, std::span<const double> u, std::span<const double> v);

// Max-shifted softmax per row. Polarity is ignored; callers pass HigherBetter scores.
ProbabilityMatrix row_softmax(const ScoreMatrix& s);

// Natural-log KL(p || q) with 0 ln 0 = 0. Throws InfiniteDivergence when p has
// mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Natural-log Jensen-Shannon divergence; finite, symmetric, in [0, ln 2].
double js_divergence(std::span<const double> p, std::span<const double> q);

// Componentwise mean of the selected rows. Throws EmptyCluster on an empty set.
Vector cluster_mean(const Matrix& m, std::span<const std::size_t> member_indices);
Vector cluster_mean(const EmbeddingMatrix& m, std::span<const std::size_t> member_indices);

}  // namespace ulr
