#include "ulr/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

namespace ulr {

double accuracy(const Labels& predictions, const Labels& gold) {
    if (predictions.size() != gold.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                                   std::to_string(gold.size()) + " gold labels");
    }
    if (gold.empty()) {
        throw Error(ErrorCode::EmptyInput, "accuracy of an empty label vector");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        hits += predictions[i] == gold[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double accuracy(const Labels& predictions, const GoldLabels& gold) {
    return accuracy(predictions, gold.labels());
}

std::vector<std::size_t> max_weight_assignment(const Matrix& weights) {
    const std::size_t n = weights.rows();
    if (weights.cols() != n) {
        throw Error(ErrorCode::ShapeMismatch, "assignment matrix must be square");
    }
    if (n == 0) {
        return {};
    }
    const double top = *std::max_element(weights.values().begin(), weights.values().end());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Shortest augmenting path with potentials, 1-based with column 0 as sentinel.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<double> min_slack(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cost = (top - weights(i0 - 1, j - 1)) - u[i0] - v[j];
                if (cost < min_slack[j]) {
                    min_slack[j] = cost;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) {
        row_to_col[owner[j] - 1] = j - 1;
    }
    return row_to_col;
}

OneToOneResult one_to_one_accuracy(const Labels& predictions, const Labels& gold, std::size_t k) {
    if (predictions.size() != gold.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                                   std::to_string(gold.size()) + " gold labels");
    }
    Matrix coincidence(k, k, 0.0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predictions[i] < 0 || static_cast<std::size_t>(predictions[i]) >= k) {
            throw Error(ErrorCode::LabelOutOfRange, "prediction " + std::to_string(predictions[i]), i);
        }
        if (gold[i] < 0 || static_cast<std::size_t>(gold[i]) >= k) {
            throw Error(ErrorCode::LabelOutOfRange, "gold label " + std::to_string(gold[i]), i);
        }
        coincidence(static_cast<std::size_t>(predictions[i]), static_cast<std::size_t>(gold[i])) += 1.0;
    }
    const auto match = max_weight_assignment(coincidence);

    OneToOneResult out;
    out.mapping.resize(k);
    Labels mapped(predictions.size());
    for (std::size_t c = 0; c < k; ++c) {
        out.mapping[c] = static_cast<Label>(match[c]);
    }
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        mapped[i] = out.mapping[static_cast<std::size_t>(predictions[i])];
    }
    out.accuracy = accuracy(mapped, gold);
    return out;
}

Labels ensemble(std::span<const ScoreMatrix> runs) {
    if (runs.empty()) {
        throw Error(ErrorCode::EmptyInput, "ensemble of zero runs");
    }
    const ScoreMatrix& first = runs.front();
    Matrix total(first.n_docs(), first.k(), 0.0);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const ScoreMatrix& run = runs[r];
        if (run.n_docs() != first.n_docs() || run.k() != first.k()) {
            throw Error(ErrorCode::ShapeMismatch, "run shape differs from the first run", r);
        }
        if (run.polarity() != first.polarity()) {
            throw Error(ErrorCode::MixedPolarity, "run polarity differs from the first run", r);
        }
        const auto& values = run.scores().values();
        for (std::size_t i = 0; i < total.rows(); ++i) {
            for (std::size_t c = 0; c < total.cols(); ++c) {
                total(i, c) += values[i * total.cols() + c];
            }
        }
    }
    return first.polarity() == Polarity::LowerBetter ? argmin_rows(total, total.cols())
                                                     : argmax_rows(total, total.cols());
}

namespace {

std::size_t checked_product(const std::vector<std::vector<std::string>>& pools) {
    std::size_t total = 1;
    for (std::size_t c = 0; c < pools.size(); ++c) {
        if (pools[c].empty()) {
            throw Error(ErrorCode::EmptyInput, "empty synonym pool", c);
        }
        if (total > std::numeric_limits<std::size_t>::max() / pools[c].size()) {
            throw Error(ErrorCode::InvalidArgument, "too many label-set combinations to enumerate");
        }
        total *= pools[c].size();
    }
    return total;
}

std::vector<std::string> decode_combination(const std::vector<std::vector<std::string>>& pools, std::size_t index) {
    std::vector<std::string> names(pools.size());
    for (std::size_t c = pools.size(); c-- > 0;) {
        names[c] = pools[c][index % pools[c].size()];
        index /= pools[c].size();
    }
    return names;
}

}  // namespace

std::vector<CategorySet> generate_label_sets(const SweepSpec& spec) {
    const std::size_t n_explicit = spec.label_sets.size();
    const std::size_t n_combos = spec.synonym_pools.empty() ? 0 : checked_product(spec.synonym_pools);
    const std::size_t total = n_explicit + n_combos;
    if (total == 0) {
        throw Error(ErrorCode::EmptyInput, "sweep has no label sets");
    }

    std::vector<std::size_t> candidates(total);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    if (spec.sample_count > 0 && spec.sample_count < total) {
        std::mt19937_64 rng(spec.seed);
        std::sample(candidates.begin(), candidates.end(), std::back_inserter(chosen), spec.sample_count, rng);
    } else {
        chosen = std::move(candidates);
    }

    std::vector<CategorySet> sets;
    sets.reserve(chosen.size());
    for (std::size_t index : chosen) {
        sets.emplace_back(index < n_explicit ? spec.label_sets[index]
                                             : decode_combination(spec.synonym_pools, index - n_explicit));
        if (sets.back().k() != sets.front().k()) {
            throw Error(ErrorCode::DimensionMismatch, "label sets disagree on the number of categories", index);
        }
    }
    return sets;
}

std::vector<std::pair<double, double>> EvaluationReport::scatter() const {
    std::vector<std::pair<double, double>> points;
    points.reserve(runs.size());
    for (const auto& run : runs) {
        points.emplace_back(run.accuracy_before, run.accuracy_after - run.accuracy_before);
    }
    return points;
}

EvaluationReport summarize_runs(std::vector<SweepRun> runs) {
    std::sort(runs.begin(), runs.end(), [](const SweepRun& a, const SweepRun& b) { return a.run_id < b.run_id; });
    EvaluationReport report;
    report.runs = std::move(runs);
    if (report.runs.empty()) {
        return report;
    }
    double before = 0.0;
    double after = 0.0;
    for (const auto& run : report.runs) {
        before += run.accuracy_before;
        after += run.accuracy_after;
        report.improved_count += run.improved ? 1 : 0;
    }
    const auto count = static_cast<double>(report.runs.size());
    report.mean_accuracy_before = before / count;
    report.mean_accuracy_after = after / count;
    report.fraction_improved = static_cast<double>(report.improved_count) / count;
    return report;
}

EvaluationReport run_sweep(const EmbeddingMatrix& docs, const GoldLabels& gold, const SweepSpec& spec,
                           const RefinementConfig& config, const CategoryEncoder& encoder, std::size_t jobs) {
    if (gold.size() != docs.rows()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(gold.size()) + " gold labels for " +
                                                   std::to_string(docs.rows()) + " documents");
    }
    const std::vector<CategorySet> sets = generate_label_sets(spec);
    if (sets.front().k() != gold.k()) {
        throw Error(ErrorCode::DimensionMismatch, "label sets have " + std::to_string(sets.front().k()) +
                                                      " categories, gold labels expect " + std::to_string(gold.k()));
    }

    std::vector<SweepRun> runs(sets.size());
    std::vector<std::exception_ptr> failures(sets.size());
    auto evaluate = [&](std::size_t r) {
        const CategorySet& names = sets[r];
        const EmbeddingMatrix categories = encoder(names);
        const RefinementResult refined = refine_dual(docs, categories, config);

        SweepRun& run = runs[r];
        run.run_id = r;
        run.label_names = names.names();
        // Iteration 0 scores documents against the untouched category
        // embeddings: the un-refined baseline classifier.
        run.accuracy_before = accuracy(refined.predictions_per_iter.front(), gold);
        run.accuracy_after = accuracy(refined.final_predictions, gold);
        run.improved = run.accuracy_after > run.accuracy_before;
        run.duplicate_names = std::set<std::string>(names.names().begin(), names.names().end()).size() != names.k();
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < sets.size(); r = next++) {
            try {
                evaluate(r);
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, sets.size());
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return summarize_runs(std::move(runs));
}

}  // namespace ulr
