#include "ulr/report.hpp"

#include <fstream>
#include <sstream>

#include "ulr/io.hpp"

namespace ulr {

namespace {

constexpr std::string_view kMagic = "ulr-report 1";

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? " " : "") + format_double(values[i]);
    }
    return out;
}

template <typename Int>
std::string join_ints(const std::vector<Int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? " " : "") + std::to_string(values[i]);
    }
    return out;
}

void put_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << (j ? " " : "") << format_double(row[j]);
        }
        out << '\n';
    }
}

std::string name_of(const std::vector<std::string>& names, Label c) {
    const auto idx = static_cast<std::size_t>(c);
    return idx < names.size() ? names[idx] : std::to_string(c);
}

void put_categories(std::ostream& out, const std::vector<std::string>& names) {
    out << "categories " << names.size() << '\n';
    for (const auto& name : names) {
        out << name << '\n';
    }
}

void put_predictions(std::ostream& out, const Labels& predictions, const std::vector<std::string>& names) {
    out << "predictions " << predictions.size() << '\n';
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        out << i << ' ' << predictions[i] << ' ' << name_of(names, predictions[i]) << '\n';
    }
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

void put_config(std::ostream& out, const RefinementConfig& config) {
    out << "metric " << to_string(config.metric) << '\n';
    out << "max_iters " << config.max_iters << '\n';
    out << "weights " << join_doubles({config.weights.mean, config.weights.anchor, config.weights.category}) << '\n';
    out << "early_stopping " << to_string(config.early_stopping) << '\n';
    out << "seed " << config.seed << '\n';
    out << "renormalize_centroids " << (config.renormalize_centroids ? "true" : "false") << '\n';
    out << "n_augmented_categories " << config.n_augmented_categories << '\n';
    out << "n_augmented_texts " << config.n_augmented_texts << '\n';
}

// Sequential line reader for the report grammar.
class Reader {
public:
    explicit Reader(const std::string& text) : in_(text) {}

    std::string line() {
        std::string out;
        if (!std::getline(in_, out)) {
            fail("unexpected end of report");
        }
        ++line_no_;
        return out;
    }

    // Reads "key rest" and returns rest.
    std::string field(std::string_view key) {
        const std::string text = line();
        if (text.size() < key.size() || text.compare(0, key.size(), key) != 0 ||
            (text.size() > key.size() && text[key.size()] != ' ')) {
            fail("expected '" + std::string(key) + "', found '" + text + "'");
        }
        return text.size() > key.size() ? text.substr(key.size() + 1) : std::string{};
    }

    std::optional<std::string> optional_field(std::string_view key) {
        const auto mark = in_.tellg();
        const auto mark_line = line_no_;
        std::string text;
        if (std::getline(in_, text) && text.size() > key.size() && text.compare(0, key.size(), key) == 0 &&
            text[key.size()] == ' ') {
            ++line_no_;
            return text.substr(key.size() + 1);
        }
        in_.clear();
        in_.seekg(mark);
        line_no_ = mark_line;
        return std::nullopt;
    }

    std::vector<std::string> words(const std::string& text) {
        std::istringstream in(text);
        std::vector<std::string> out;
        for (std::string w; in >> w;) {
            out.push_back(w);
        }
        return out;
    }

    double real(const std::string& token) {
        const auto value = parse_double(token);
        if (!value) {
            fail("bad number '" + token + "'");
        }
        return *value;
    }

    std::vector<double> reals(const std::string& text) {
        std::vector<double> out;
        for (const auto& w : words(text)) {
            out.push_back(real(w));
        }
        return out;
    }

    std::size_t count(const std::string& token) {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(token, &used);
            if (used != token.size()) {
                throw std::invalid_argument(token);
            }
            return static_cast<std::size_t>(value);
        } catch (const std::exception&) {
            fail("bad count '" + token + "'");
        }
        return 0;
    }

    Labels labels(const std::string& text) {
        Labels out;
        for (const auto& w : words(text)) {
            out.push_back(static_cast<Label>(count(w)));
        }
        return out;
    }

    bool boolean(const std::string& text) {
        if (text == "true") return true;
        if (text == "false") return false;
        fail("bad boolean '" + text + "'");
        return false;
    }

    Matrix matrix(std::string_view key) {
        const auto dims = words(field(key));
        if (dims.size() != 2) {
            fail("matrix header needs rows and cols");
        }
        const std::size_t rows = count(dims[0]);
        const std::size_t cols = count(dims[1]);
        std::vector<double> values;
        values.reserve(rows * cols);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto row = reals(line());
            if (row.size() != cols) {
                fail("matrix row has " + std::to_string(row.size()) + " values, expected " + std::to_string(cols));
            }
            values.insert(values.end(), row.begin(), row.end());
        }
        return Matrix(rows, cols, std::move(values));
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorCode::ParseError, "report line " + std::to_string(line_no_) + ": " + message, line_no_);
    }

private:
    std::istringstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace

std::string format_report(const RefinementReport& report) {
    const RefinementResult& r = report.result;
    std::ostringstream out;
    out << kMagic << '\n';
    out << "kind refinement\n";
    out << "algorithm " << report.algorithm << '\n';
    put_config(out, report.config);
    out << "iterations_run " << r.iterations_run << '\n';
    out << "converged " << (r.converged ? "true" : "false") << '\n';
    out << "selected_iter " << r.selected_iter << '\n';
    out << "objective_per_iter " << join_doubles(r.objective_per_iter) << '\n';
    if (report.accuracy) {
        out << "accuracy " << format_double(*report.accuracy) << '\n';
    }
    if (report.one_to_one_accuracy) {
        out << "one_to_one_accuracy " << format_double(*report.one_to_one_accuracy) << '\n';
    }
    put_categories(out, report.category_names);
    const std::size_t n_docs = r.predictions_per_iter.empty() ? 0 : r.predictions_per_iter.front().size();
    out << "predictions_per_iter " << r.predictions_per_iter.size() << ' ' << n_docs << '\n';
    for (const auto& preds : r.predictions_per_iter) {
        out << join_ints(preds) << '\n';
    }
    put_matrix(out, "final_centroids", r.final_centroids);
    put_matrix(out, "final_distances", r.final_distances);
    put_predictions(out, r.final_predictions, report.category_names);
    return out.str();
}

RefinementReport parse_refinement_report(const std::string& text) {
    Reader in(text);
    if (in.line() != kMagic) {
        in.fail("missing report header");
    }
    if (in.field("kind") != "refinement") {
        in.fail("not a refinement report");
    }
    RefinementReport report;
    report.algorithm = in.field("algorithm");

    RefinementConfig& config = report.config;
    try {
        config.metric = parse_metric(in.field("metric"));
        config.max_iters = in.count(in.field("max_iters"));
        const auto w = in.reals(in.field("weights"));
        if (w.size() != 3) {
            in.fail("weights need three values");
        }
        config.weights = {w[0], w[1], w[2]};
        config.early_stopping = parse_early_stopping(in.field("early_stopping"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw;
        }
        in.fail(e.what());
    }
    config.seed = in.count(in.field("seed"));
    config.renormalize_centroids = in.boolean(in.field("renormalize_centroids"));
    config.n_augmented_categories = in.count(in.field("n_augmented_categories"));
    config.n_augmented_texts = in.count(in.field("n_augmented_texts"));

    RefinementResult& r = report.result;
    r.iterations_run = in.count(in.field("iterations_run"));
    r.converged = in.boolean(in.field("converged"));
    r.selected_iter = in.count(in.field("selected_iter"));
    r.objective_per_iter = in.reals(in.field("objective_per_iter"));
    if (auto acc = in.optional_field("accuracy")) {
        report.accuracy = in.real(*acc);
    }
    if (auto acc = in.optional_field("one_to_one_accuracy")) {
        report.one_to_one_accuracy = in.real(*acc);
    }
    const std::size_t k = in.count(in.field("categories"));
    for (std::size_t c = 0; c < k; ++c) {
        report.category_names.push_back(in.line());
    }
    const auto shape = in.words(in.field("predictions_per_iter"));
    if (shape.size() != 2) {
        in.fail("predictions_per_iter needs iteration and document counts");
    }
    const std::size_t iters = in.count(shape[0]);
    const std::size_t n_docs = in.count(shape[1]);
    for (std::size_t it = 0; it < iters; ++it) {
        r.predictions_per_iter.push_back(in.labels(in.line()));
        if (r.predictions_per_iter.back().size() != n_docs) {
            in.fail("prediction row length differs from document count");
        }
    }
    r.final_centroids = in.matrix("final_centroids");
    r.final_distances = in.matrix("final_distances");
    const std::size_t n_final = in.count(in.field("predictions"));
    for (std::size_t i = 0; i < n_final; ++i) {
        const auto cols = in.words(in.line());
        if (cols.size() < 2 || in.count(cols[0]) != i) {
            in.fail("malformed prediction row");
        }
        r.final_predictions.push_back(static_cast<Label>(in.count(cols[1])));
    }
    if (r.iterations_run != r.objective_per_iter.size() || r.iterations_run != r.predictions_per_iter.size() ||
        r.selected_iter >= r.iterations_run || r.final_predictions != r.predictions_per_iter[r.selected_iter]) {
        in.fail("inconsistent refinement trace");
    }
    return report;
}

RefinementReport read_refinement_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_refinement_report(text.str());
}

std::string format_report(const PredictionReport& report) {
    std::ostringstream out;
    out << kMagic << '\n';
    out << "kind predictions\n";
    out << "algorithm " << report.algorithm << '\n';
    for (const auto& [key, value] : report.fields) {
        out << key << ' ' << value << '\n';
    }
    if (report.accuracy) {
        out << "accuracy " << format_double(*report.accuracy) << '\n';
    }
    if (report.one_to_one_accuracy) {
        out << "one_to_one_accuracy " << format_double(*report.one_to_one_accuracy) << '\n';
        out << "one_to_one_mapping " << join_ints(report.one_to_one_mapping) << '\n';
    }
    put_categories(out, report.category_names);
    put_predictions(out, report.predictions, report.category_names);
    return out.str();
}

std::string format_report(const EvaluationReport& report, const std::string& algorithm,
                          const RefinementConfig& config) {
    std::ostringstream out;
    out << kMagic << '\n';
    out << "kind evaluation\n";
    out << "algorithm " << algorithm << '\n';
    put_config(out, config);
    std::size_t duplicates = 0;
    for (const auto& run : report.runs) {
        duplicates += run.duplicate_names ? 1 : 0;
    }
    out << "run_count " << report.run_count() << '\n';
    out << "mean_accuracy_before " << format_double(report.mean_accuracy_before) << '\n';
    out << "mean_accuracy_after " << format_double(report.mean_accuracy_after) << '\n';
    out << "improved_count " << report.improved_count << '\n';
    out << "fraction_improved " << format_double(report.fraction_improved) << '\n';
    out << "duplicate_name_runs " << duplicates << '\n';
    out << "runs " << report.runs.size() << '\n';
    for (const auto& run : report.runs) {
        out << run.run_id << ' ' << format_double(run.accuracy_before) << ' ' << format_double(run.accuracy_after)
            << ' ' << (run.improved ? 1 : 0) << ' ' << (run.duplicate_names ? 1 : 0) << ' ';
        for (std::size_t c = 0; c < run.label_names.size(); ++c) {
            out << (c ? "; " : "") << run.label_names[c];
        }
        out << '\n';
    }
    return out.str();
}

void write_report(const RefinementReport& report, const std::filesystem::path& path) {
    write_text(format_report(report), path);
}

void write_report(const PredictionReport& report, const std::filesystem::path& path) {
    write_text(format_report(report), path);
}

void write_report(const EvaluationReport& report, const std::string& algorithm, const RefinementConfig& config,
                  const std::filesystem::path& path) {
    write_text(format_report(report, algorithm, config), path);
}

std::string format_scatter(const EvaluationReport& report) {
    std::ostringstream out;
    out << "run_id\tinitial_accuracy\tgain\n";
    const auto points = report.scatter();
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << report.runs[i].run_id << '\t' << format_double(points[i].first) << '\t'
            << format_double(points[i].second) << '\n';
    }
    return out.str();
}

void write_scatter(const EvaluationReport& report, const std::filesystem::path& path) {
    write_text(format_scatter(report), path);
}

}  // namespace ulr
