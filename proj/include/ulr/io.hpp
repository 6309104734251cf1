#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ulr/geometry.hpp"
#include "ulr/types.hpp"

namespace ulr {

/// Token -> vector lookup for the word-averaging encoder.
class WordVectorTable {
public:
    WordVectorTable(std::size_t dim, bool lowercase);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return index_.size(); }
    bool lowercase() const noexcept { return lowercase_; }

    // Returns false (and keeps the existing vector) when the token is already present.
    bool insert(std::string token, std::span<const double> vector);
    std::optional<std::span<const double>> find(std::string_view token) const;

    // Applies the table's case folding.
    std::string normalize_token(std::string_view token) const;

private:
    std::size_t dim_;
    bool lowercase_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> storage_;
};

struct LoadVectorsOptions {
    bool lowercase = true;
    // Keep only these (already case-folded) tokens; lines for other tokens are
    // skipped without parsing their numbers.
    const std::unordered_set<std::string>* vocabulary = nullptr;
    // Skip malformed lines instead of failing; the count is reported back.
    bool skip_malformed = false;
    std::size_t* skipped_lines = nullptr;
};

// word2vec text format: optional "count dim" header, then "token v1 ... vdim".
// Duplicate tokens keep their first occurrence. Errors carry 1-based line numbers.
WordVectorTable load_vectors(const std::filesystem::path& path, const LoadVectorsOptions& options = {});

// Mean of the in-vocabulary token vectors of a whitespace-tokenized text.
// Throws AllOOV when no token is known.
Vector encode_average(std::string_view text, const WordVectorTable& table);

EmbeddingMatrix encode_texts(std::span<const std::string> texts, const WordVectorTable& table);

// Same text format as load_vectors, but every row is kept positionally and the
// first column becomes the row id (duplicates rejected).
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

// Tab-separated reals, one document per row, optional "#polarity=higher|lower" header.
ScoreMatrix load_score_matrix(const std::filesystem::path& path);
void write_score_matrix(const ScoreMatrix& scores, const std::filesystem::path& path);

// Non-empty lines of a UTF-8 text file, trailing whitespace stripped.
std::vector<std::string> load_lines(const std::filesystem::path& path);

// One label per line: either a category index or an exact category name.
Labels load_labels(const std::filesystem::path& path, const std::vector<std::string>& category_names,
                   std::size_t k);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
// Full-token decimal parse; rejects NaN/Inf literals.
std::optional<double> parse_double(std::string_view token);

/// Dataset manifest: key=value lines naming the input files.
///
/// Recognized keys: docs, cats, cat_vectors, vectors, gold, anchors,
/// anchor_labels, aug_cats, aug_text, scores. Relative paths resolve against
/// the manifest's directory. '#' starts a comment line.
class Manifest {
public:
    static Manifest load(const std::filesystem::path& path);
    static Manifest parse(std::string_view text, const std::filesystem::path& base_dir);

    bool has(const std::string& key) const { return entries_.contains(key); }
    std::optional<std::filesystem::path> get(const std::string& key) const;
    // Throws InvalidArgument naming the missing key.
    std::filesystem::path require(const std::string& key) const;

private:
    std::map<std::string, std::filesystem::path> entries_;
};

}  // namespace ulr
