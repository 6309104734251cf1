#include "ulr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ulr {

namespace {

void require_same_dim(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "vectors of length " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    }
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
    require_same_dim(u, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sum += u[i] * v[i];
    }
    return sum;
}

double l2_norm(std::span<const double> u) {
    double sum = 0.0;
    for (double x : u) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

Matrix l2_normalize_rows(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        const double norm = l2_norm(row);
        if (norm == 0.0) {
            throw Error(ErrorCode::ZeroVector, "cannot normalize an all-zero row", i);
        }
        for (double& x : row) {
            x /= norm;
        }
    }
    return out;
}

EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m) {
    return EmbeddingMatrix(l2_normalize_rows(m.values()), m.ids());
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    require_same_dim(u, v);
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cosine distance of a zero vector");
    }
    const double cosine = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    return 1.0 - cosine;
}

double squared_l2_distance(std::span<const double> u, std::span<const double> v) {
    require_same_dim(u, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double gap = u[i] - v[i];
        sum += gap * gap;
    }
    return sum;
}

double distance(Metric metric, std::span<const double> u, std::span<const double> v) {
    return metric == Metric::CosineDistance ? cosine_distance(u, v) : squared_l2_distance(u, v);
}

ProbabilityMatrix row_softmax(const ScoreMatrix& s) {
    const Matrix& scores = s.scores();
    Matrix probs(scores.rows(), scores.cols());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const auto in = scores.row(i);
        auto out = probs.row(i);
        const double top = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) {
            out[c] = std::exp(in[c] - top);
            total += out[c];
        }
        for (double& p : out) {
            p /= total;
        }
    }
    return ProbabilityMatrix(std::move(probs));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    require_same_dim(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) {
            continue;
        }
        if (q[i] == 0.0) {
            throw Error(ErrorCode::InfiniteDivergence, "p has mass where q has none", i);
        }
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(sum, 0.0);
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
    require_same_dim(p, q);
    // Accumulate both halves term by term in one order-symmetric expression so
    // that js(p, q) and js(q, p) round identically.
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        double term_p = 0.0;
        double term_q = 0.0;
        if (p[i] > 0.0) {
            term_p = p[i] * std::log(p[i] / m);
        }
        if (q[i] > 0.0) {
            term_q = q[i] * std::log(q[i] / m);
        }
        sum += term_p + term_q;
    }
    return std::clamp(0.5 * sum, 0.0, std::log(2.0));
}

Vector cluster_mean(const Matrix& m, std::span<const std::size_t> member_indices) {
    if (member_indices.empty()) {
        throw Error(ErrorCode::EmptyCluster, "mean of an empty member set");
    }
    Vector mean(m.cols(), 0.0);
    for (std::size_t idx : member_indices) {
        if (idx >= m.rows()) {
            throw Error(ErrorCode::InvalidArgument, "member index out of range", idx);
        }
        const auto row = m.row(idx);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += row[j];
        }
    }
    const double count = static_cast<double>(member_indices.size());
    for (double& x : mean) {
        x /= count;
    }
    return mean;
}

Vector cluster_mean(const EmbeddingMatrix& m, std::span<const std::size_t> member_indices) {
    return cluster_mean(m.values(), member_indices);
}

}  // namespace ulr
