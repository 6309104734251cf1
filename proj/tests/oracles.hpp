#pragma once

// Test-only reference implementations. Written directly from the textbook
// definitions with nested loops over std::vector; they share no code with the
// library paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;
using Assign = std::vector<int>;

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

inline double cos_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline Points unit_rows(Points pts) {
    for (auto& p : pts) {
        double n = 0.0;
        for (double x : p) n += x * x;
        n = std::sqrt(n);
        for (double& x : p) x /= n;
    }
    return pts;
}

inline Assign nearest(const Points& pts, const Points& cents, bool cosine, double* objective = nullptr) {
    Assign out(pts.size());
    double total = 0.0;
    for (std::size_t t = 0; t < pts.size(); ++t) {
        int best = 0;
        double best_d = cosine ? cos_dist(pts[t], cents[0]) : sq_dist(pts[t], cents[0]);
        for (std::size_t c = 1; c < cents.size(); ++c) {
            const double d = cosine ? cos_dist(pts[t], cents[c]) : sq_dist(pts[t], cents[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        out[t] = best;
        total += best_d;
    }
    if (objective) *objective = total;
    return out;
}

struct Trace {
    std::vector<Assign> assignments;
    std::vector<double> objectives;
};

// Replay of the interpolated k-means loop: assign, record, stop when the
// assignment repeats, then r_c = w_mean*mean + w_cat*enc(c) (empty cluster:
// (w_mean + w_cat)*enc(c)). Under cosine the inputs are unit-normalized and
// centroids are re-projected after each update.
inline Trace interpolated_kmeans(Points docs, Points cats, double w_mean, double w_cat, bool cosine,
                                 std::size_t max_iters) {
    if (cosine) {
        docs = unit_rows(docs);
        cats = unit_rows(cats);
    }
    Trace trace;
    Points cents = cats;
    Assign prev;
    for (std::size_t it = 0; it < max_iters; ++it) {
        double obj = 0.0;
        Assign a = nearest(docs, cents, cosine, &obj);
        trace.assignments.push_back(a);
        trace.objectives.push_back(obj);
        if (a == prev) break;
        for (std::size_t c = 0; c < cats.size(); ++c) {
            std::vector<double> sum(cats[c].size(), 0.0);
            int count = 0;
            for (std::size_t t = 0; t < docs.size(); ++t) {
                if (a[t] == static_cast<int>(c)) {
                    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += docs[t][j];
                    ++count;
                }
            }
            for (std::size_t j = 0; j < sum.size(); ++j) {
                cents[c][j] = count == 0 ? (w_mean + w_cat) * cats[c][j]
                                         : w_mean * (sum[j] / count) + w_cat * cats[c][j];
            }
            if (cosine) {
                double n = 0.0;
                for (double x : cents[c]) n += x * x;
                n = std::sqrt(n);
                if (n == 0.0) {
                    cents[c] = cats[c];
                } else {
                    for (double& x : cents[c]) x /= n;
                }
            }
        }
        prev = a;
    }
    return trace;
}

// Textbook Lloyd iterations from given initial centroids. Empty clusters jump
// to the not-yet-taken point farthest from its own centroid.
inline Trace lloyd(const Points& pts, Points cents, std::size_t max_iters) {
    Trace trace;
    Assign prev;
    for (std::size_t it = 0; it < max_iters; ++it) {
        double obj = 0.0;
        Assign a = nearest(pts, cents, false, &obj);
        trace.assignments.push_back(a);
        trace.objectives.push_back(obj);
        if (a == prev) break;
        std::vector<double> own(pts.size());
        for (std::size_t t = 0; t < pts.size(); ++t) own[t] = sq_dist(pts[t], cents[static_cast<std::size_t>(a[t])]);
        std::vector<bool> taken(pts.size(), false);
        for (std::size_t c = 0; c < cents.size(); ++c) {
            std::vector<double> sum(pts[0].size(), 0.0);
            int count = 0;
            for (std::size_t t = 0; t < pts.size(); ++t) {
                if (a[t] == static_cast<int>(c)) {
                    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += pts[t][j];
                    ++count;
                }
            }
            if (count == 0) {
                int far = -1;
                for (std::size_t t = 0; t < pts.size(); ++t) {
                    if (!taken[t] && (far < 0 || own[t] > own[static_cast<std::size_t>(far)])) far = static_cast<int>(t);
                }
                taken[static_cast<std::size_t>(far)] = true;
                cents[c] = pts[static_cast<std::size_t>(far)];
            } else {
                for (std::size_t j = 0; j < sum.size(); ++j) cents[c][j] = sum[j] / count;
            }
        }
        prev = a;
    }
    return trace;
}

// Best accuracy over all k! relabelings of the predictions.
inline double brute_force_one_to_one(const Assign& preds, const Assign& gold, int k) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            hits += perm[static_cast<std::size_t>(preds[i])] == gold[i] ? 1 : 0;
        }
        best = std::max(best, static_cast<double>(hits) / static_cast<double>(preds.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// JS as the average of the two KL divergences to the midpoint.
inline double js_reference(const std::vector<double>& p, const std::vector<double>& q) {
    double kl_pm = 0.0, kl_qm = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = (p[i] + q[i]) / 2.0;
        if (p[i] > 0) kl_pm += p[i] * std::log(p[i] / m);
        if (q[i] > 0) kl_qm += q[i] * std::log(q[i] / m);
    }
    return 0.5 * kl_pm + 0.5 * kl_qm;
}

inline Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, double spread = 1.0) {
    std::normal_distribution<double> g(0.0, spread);
    Points pts(n, std::vector<double>(d));
    for (auto& p : pts)
        for (double& x : p) x = g(rng);
    return pts;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t k, bool sparse) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(k);
    double total = 0.0;
    for (double& x : p) {
        x = (sparse && u(rng) < 0.3) ? 0.0 : u(rng);
        total += x;
    }
    if (total == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (double& x : p) x /= total;
    return p;
}

}  // namespace oracle
