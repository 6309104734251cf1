#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ulr/refinement.hpp"
#include "ulr/types.hpp"

namespace ulr {

double accuracy(const Labels& predictions, const Labels& gold);
double accuracy(const Labels& predictions, const GoldLabels& gold);

struct OneToOneResult {
    double accuracy = 0.0;
    // mapping[cluster] = category
    std::vector<Label> mapping;
};

// Accuracy under the cluster->category bijection that maximizes agreement,
// found by optimal assignment on the k x k coincidence counts.
OneToOneResult one_to_one_accuracy(const Labels& predictions, const Labels& gold, std::size_t k);

// Maximum-weight perfect matching on a square matrix (Hungarian method).
// Returns row -> column.
std::vector<std::size_t> max_weight_assignment(const Matrix& weights);

// Sums the runs elementwise and takes the per-row arg-extremum implied by
// their shared polarity (lowest index on ties).
Labels ensemble(std::span<const ScoreMatrix> runs);

struct SweepSpec {
    // Explicit label-name sets, used as given.
    std::vector<std::vector<std::string>> label_sets;
    // Per-category synonym pools; their cartesian product is enumerated in
    // lexicographic order of synonym indices (last category varies fastest).
    std::vector<std::vector<std::string>> synonym_pools;
    // When nonzero and smaller than the number of candidates, that many are
    // drawn without replacement (enumeration order kept).
    std::size_t sample_count = 0;
    unsigned long long seed = 0;
};

std::vector<CategorySet> generate_label_sets(const SweepSpec& spec);

using CategoryEncoder = std::function<EmbeddingMatrix(const CategorySet&)>;

struct SweepRun {
    std::size_t run_id = 0;
    std::vector<std::string> label_names;
    double accuracy_before = 0.0;
    double accuracy_after = 0.0;
    bool improved = false;
    bool duplicate_names = false;
};

struct EvaluationReport {
    std::vector<SweepRun> runs;
    double mean_accuracy_before = 0.0;
    double mean_accuracy_after = 0.0;
    std::size_t improved_count = 0;
    double fraction_improved = 0.0;

    std::size_t run_count() const noexcept { return runs.size(); }
    // (initial accuracy, gain) per run, for scatter plots.
    std::vector<std::pair<double, double>> scatter() const;
};

// Aggregates per-run numbers; keeps runs ordered by run_id.
EvaluationReport summarize_runs(std::vector<SweepRun> runs);

// For every generated label set: encode the categories, score the un-refined
// nearest-category classifier, run refine_dual, record both accuracies.
// Runs fan out over `jobs` worker threads; the report does not depend on it.
EvaluationReport run_sweep(const EmbeddingMatrix& docs, const GoldLabels& gold, const SweepSpec& spec,
                           const RefinementConfig& config, const CategoryEncoder& encoder, std::size_t jobs = 1);

}  // namespace ulr
