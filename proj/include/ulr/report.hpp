#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ulr/evaluation.hpp"
#include "ulr/types.hpp"

namespace ulr {

// A refinement run with enough context to reproduce and audit it.
struct RefinementReport {
    std::string algorithm;
    RefinementConfig config;
    RefinementResult result;
    // Category names in index order; predicted names in the predictions table
    // come from here.
    std::vector<std::string> category_names;
    std::optional<double> accuracy;
    std::optional<double> one_to_one_accuracy;

    bool operator==(const RefinementReport&) const = default;
};

// Predictions produced without a refinement trace (ensemble, eval,
// cluster-random). `fields` are echoed verbatim, in order, as "key value" lines.
struct PredictionReport {
    std::string algorithm;
    std::vector<std::pair<std::string, std::string>> fields;
    std::vector<std::string> category_names;
    Labels predictions;
    std::optional<double> accuracy;
    std::optional<double> one_to_one_accuracy;
    std::vector<Label> one_to_one_mapping;

    bool operator==(const PredictionReport&) const = default;
};

// Report layout: a "ulr-report 1" magic line, then "key value" lines in a
// fixed order, then matrix/table blocks introduced by "name rows [cols]".
// Doubles use the shortest round-trip decimal form, so reading a report
// back reproduces the in-memory values exactly.
std::string format_report(const RefinementReport& report);
std::string format_report(const PredictionReport& report);
std::string format_report(const EvaluationReport& report, const std::string& algorithm,
                          const RefinementConfig& config);

void write_report(const RefinementReport& report, const std::filesystem::path& path);
void write_report(const PredictionReport& report, const std::filesystem::path& path);
void write_report(const EvaluationReport& report, const std::string& algorithm, const RefinementConfig& config,
                  const std::filesystem::path& path);

RefinementReport parse_refinement_report(const std::string& text);
RefinementReport read_refinement_report(const std::filesystem::path& path);

// "run_id<TAB>initial_accuracy<TAB>gain" rows under a header line.
std::string format_scatter(const EvaluationReport& report);
void write_scatter(const EvaluationReport& report, const std::filesystem::path& path);

}  // namespace ulr
