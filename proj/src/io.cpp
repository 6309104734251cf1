#include "ulr/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ulr {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

std::string_view rstrip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::optional<std::size_t> parse_count(std::string_view token) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size()) {
        return std::nullopt;
    }
    return value;
}

// A first line of exactly two unsigned integers is a "count dim" header.
std::optional<std::size_t> header_dim(const std::vector<std::string_view>& fields) {
    if (fields.size() != 2) {
        return std::nullopt;
    }
    const auto count = parse_count(fields[0]);
    const auto dim = parse_count(fields[1]);
    if (!count || !dim || *dim == 0) {
        return std::nullopt;
    }
    return dim;
}

struct VectorLine {
    std::string_view token;
    std::vector<double> values;
};

// Reads a word2vec-style file line by line, calling `visit(line_no, token, fields)`
// for each data line after dimension checks. `wants` may veto a token before its
// numbers are parsed.
template <typename Wants, typename Visit>
std::size_t scan_vector_file(const std::filesystem::path& path, bool skip_malformed, Wants&& wants,
                             Visit&& visit) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t skipped = 0;
    std::optional<std::size_t> dim;
    std::vector<double> values;
    bool any_line = false;

    auto fail = [&](ErrorCode code, const std::string& message) {
        if (skip_malformed) {
            ++skipped;
            return;
        }
        throw Error(code, message + " in '" + path.string() + "' at line " + std::to_string(line_no), line_no);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        if (!any_line) {
            any_line = true;
            if (const auto hdim = header_dim(fields)) {
                dim = hdim;
                continue;
            }
        }
        if (fields.size() < 2) {
            fail(ErrorCode::ParseError, "expected a token followed by values");
            continue;
        }
        const std::size_t n_values = fields.size() - 1;
        if (dim && n_values != *dim) {
            fail(ErrorCode::InconsistentDim,
                 "expected " + std::to_string(*dim) + " values, found " + std::to_string(n_values));
            continue;
        }
        if (!wants(fields[0])) {
            dim = n_values;
            continue;
        }
        values.clear();
        bool ok = true;
        for (std::size_t j = 1; j < fields.size(); ++j) {
            const auto value = parse_double(fields[j]);
            if (!value) {
                ok = false;
                break;
            }
            values.push_back(*value);
        }
        if (!ok) {
            fail(ErrorCode::ParseError, "malformed or non-finite number");
            continue;
        }
        dim = n_values;
        visit(line_no, fields[0], std::span<const double>(values));
    }
    if (!dim) {
        throw Error(ErrorCode::EmptyInput, "no vectors in '" + path.string() + "'");
    }
    return skipped;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), end);
}

std::optional<double> parse_double(std::string_view token) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() || token.empty() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

WordVectorTable::WordVectorTable(std::size_t dim, bool lowercase) : dim_(dim), lowercase_(lowercase) {
    if (dim_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "word vectors need a positive dimension");
    }
}

std::string WordVectorTable::normalize_token(std::string_view token) const {
    std::string out(token);
    if (lowercase_) {
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    }
    return out;
}

bool WordVectorTable::insert(std::string token, std::span<const double> vector) {
    if (vector.size() != dim_) {
        throw Error(ErrorCode::InconsistentDim, "vector for '" + token + "' has " + std::to_string(vector.size()) +
                                                    " values, table dim is " + std::to_string(dim_));
    }
    token = normalize_token(token);
    const auto [it, inserted] = index_.try_emplace(std::move(token), index_.size());
    if (inserted) {
        storage_.insert(storage_.end(), vector.begin(), vector.end());
    }
    return inserted;
}

std::optional<std::span<const double>> WordVectorTable::find(std::string_view token) const {
    const auto it = index_.find(normalize_token(token));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return std::span<const double>(storage_.data() + it->second * dim_, dim_);
}

WordVectorTable load_vectors(const std::filesystem::path& path, const LoadVectorsOptions& options) {
    std::optional<WordVectorTable> table;
    std::string folded;
    auto wants = [&](std::string_view token) {
        if (options.vocabulary == nullptr) {
            return true;
        }
        folded.assign(token);
        if (options.lowercase) {
            std::transform(folded.begin(), folded.end(), folded.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        }
        return options.vocabulary->contains(folded);
    };
    auto visit = [&](std::size_t, std::string_view token, std::span<const double> values) {
        if (!table) {
            table.emplace(values.size(), options.lowercase);
        }
        table->insert(std::string(token), values);
    };
    const std::size_t skipped = scan_vector_file(path, options.skip_malformed, wants, visit);
    if (options.skipped_lines != nullptr) {
        *options.skipped_lines = skipped;
    }
    if (!table) {
        throw Error(ErrorCode::EmptyInput, "no usable vectors in '" + path.string() + "'");
    }
    return std::move(*table);
}

Vector encode_average(std::string_view text, const WordVectorTable& table) {
    Vector sum(table.dim(), 0.0);
    std::size_t found = 0;
    for (const auto token : split_whitespace(text)) {
        if (const auto vec = table.find(token)) {
            for (std::size_t j = 0; j < sum.size(); ++j) {
                sum[j] += (*vec)[j];
            }
            ++found;
        }
    }
    if (found == 0) {
        throw Error(ErrorCode::AllOOV, "no in-vocabulary token in '" + std::string(text) + "'");
    }
    for (double& x : sum) {
        x /= static_cast<double>(found);
    }
    return sum;
}

EmbeddingMatrix encode_texts(std::span<const std::string> texts, const WordVectorTable& table) {
    std::vector<double> values;
    values.reserve(texts.size() * table.dim());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            const Vector v = encode_average(texts[i], table);
            values.insert(values.end(), v.begin(), v.end());
        } catch (const Error& e) {
            throw Error(e.code(), "text " + std::to_string(i) + " has no in-vocabulary token", i);
        }
    }
    return EmbeddingMatrix(Matrix(texts.size(), table.dim(), std::move(values)));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
    std::vector<std::string> ids;
    std::vector<double> values;
    std::size_t dim = 0;
    auto visit = [&](std::size_t, std::string_view token, std::span<const double> row) {
        dim = row.size();
        ids.emplace_back(token);
        values.insert(values.end(), row.begin(), row.end());
    };
    scan_vector_file(path, false, [](std::string_view) { return true; }, visit);
    if (ids.empty()) {
        throw Error(ErrorCode::EmptyInput, "no vectors in '" + path.string() + "'");
    }
    const std::size_t rows = ids.size();
    return EmbeddingMatrix(Matrix(rows, dim, std::move(values)), std::move(ids));
}

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << m.rows() << ' ' << m.dim() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << (m.has_ids() ? m.ids()[i] : std::to_string(i));
        for (double x : m.row(i)) {
            out << ' ' << format_double(x);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    Polarity polarity = Polarity::HigherBetter;
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = rstrip(line);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '#') {
            constexpr std::string_view key = "#polarity=";
            if (rows == 0 && text.starts_with(key)) {
                try {
                    polarity = parse_polarity(text.substr(key.size()));
                } catch (const Error&) {
                    throw Error(ErrorCode::ParseError, "bad polarity header at line " + std::to_string(line_no),
                                line_no);
                }
                continue;
            }
            throw Error(ErrorCode::ParseError, "unexpected comment at line " + std::to_string(line_no), line_no);
        }
        std::size_t n = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = text.find('\t', start);
            const std::string_view cell = text.substr(start, tab == std::string_view::npos ? tab : tab - start);
            const auto value = parse_double(cell);
            if (!value) {
                throw Error(ErrorCode::ParseError, "malformed or non-finite score at line " + std::to_string(line_no),
                            line_no);
            }
            values.push_back(*value);
            ++n;
            if (tab == std::string_view::npos) {
                break;
            }
            start = tab + 1;
        }
        if (rows == 0) {
            cols = n;
        } else if (n != cols) {
            throw Error(ErrorCode::RaggedRows, "row has " + std::to_string(n) + " columns, expected " +
                                                   std::to_string(cols) + " at line " + std::to_string(line_no),
                        line_no);
        }
        ++rows;
    }
    if (rows == 0) {
        throw Error(ErrorCode::EmptyInput, "no scores in '" + path.string() + "'");
    }
    return ScoreMatrix(Matrix(rows, cols, std::move(values)), polarity);
}

void write_score_matrix(const ScoreMatrix& scores, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "#polarity=" << to_string(scores.polarity()) << '\n';
    for (std::size_t i = 0; i < scores.n_docs(); ++i) {
        const auto row = scores.scores().row(i);
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "\t" : "") << format_double(row[c]);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

std::vector<std::string> load_lines(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto text = rstrip(line);
        if (!text.empty()) {
            lines.emplace_back(text);
        }
    }
    return lines;
}

Labels load_labels(const std::filesystem::path& path, const std::vector<std::string>& category_names,
                   std::size_t k) {
    Labels labels;
    std::size_t position = 0;
    for (const auto& line : load_lines(path)) {
        const std::string_view text = line;
        const auto name = std::find(category_names.begin(), category_names.end(), text);
        if (name != category_names.end()) {
            labels.push_back(static_cast<Label>(name - category_names.begin()));
        } else if (const auto index = parse_count(text)) {
            if (*index >= k) {
                throw Error(ErrorCode::LabelOutOfRange,
                            "label " + std::to_string(*index) + " not in [0," + std::to_string(k) + ")", position);
            }
            labels.push_back(static_cast<Label>(*index));
        } else {
            throw Error(ErrorCode::ParseError, "unknown label '" + line + "'", position);
        }
        ++position;
    }
    return labels;
}

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.parent_path());
}

Manifest Manifest::parse(std::string_view text, const std::filesystem::path& base_dir) {
    static const std::unordered_set<std::string> known = {"docs",    "cats",          "cat_vectors", "vectors",
                                                          "gold",    "anchors",       "anchor_labels",
                                                          "aug_cats", "aug_text",     "scores"};
    Manifest manifest;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto stripped = rstrip(line);
        const auto first = stripped.find_first_not_of(" \t");
        if (first == std::string_view::npos || stripped[first] == '#') {
            continue;
        }
        const auto body = stripped.substr(first);
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) + " lacks '='", line_no);
        }
        std::string key(rstrip(body.substr(0, eq)));
        std::string_view value = body.substr(eq + 1);
        value.remove_prefix(std::min(value.find_first_not_of(" \t"), value.size()));
        if (!known.contains(key)) {
            throw Error(ErrorCode::ParseError, "unknown manifest key '" + key + "'", line_no);
        }
        if (value.empty()) {
            throw Error(ErrorCode::ParseError, "empty value for manifest key '" + key + "'", line_no);
        }
        std::filesystem::path file{std::string(value)};
        if (file.is_relative()) {
            file = base_dir / file;
        }
        manifest.entries_[key] = file;
    }
    return manifest;
}

std::optional<std::filesystem::path> Manifest::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::filesystem::path Manifest::require(const std::string& key) const {
    if (auto path = get(key)) {
        return *path;
    }
    throw Error(ErrorCode::InvalidArgument, "manifest has no '" + key + "=' entry");
}

}  // namespace ulr
