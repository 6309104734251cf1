#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "ulr/io.hpp"
#include "ulr/refinement.hpp"
#include "ulr/report.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ulr;
using testing_support::TempDir;
using testing_support::to_embeddings;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ulr::Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("load_vectors reads word2vec text") {
    TempDir dir("vectors");
    const auto table = load_vectors(dir.write("v.txt", "a 1 0\nb 0 1\n"));
    CHECK(table.size() == 2);
    CHECK(table.dim() == 2);
    CHECK((*table.find("b"))[1] == 1.0);

    const auto with_header = load_vectors(dir.write("h.txt", "2 3\nx 1 2 3\ny 4 5 6\n"));
    CHECK(with_header.dim() == 3);
    CHECK(with_header.size() == 2);
}

TEST_CASE("load_vectors errors carry line numbers") {
    TempDir dir("vectors_err");
    try {
        load_vectors(dir.write("bad.txt", "a 1 0\nb 0 1 2\n"));
        FAIL("expected InconsistentDim");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentDim);
        CHECK(e.index() == std::optional<std::size_t>(2));
    }
    CHECK(code_of([&] { load_vectors(dir.write("empty.txt", "")); }) == ErrorCode::EmptyInput);
    CHECK(code_of([&] { load_vectors(dir.write("nan.txt", "a 1 nan\n")); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_vectors(dir.write("inf.txt", "a inf 1\n")); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_vectors(dir.write("word.txt", "a 1 x\n")); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_vectors(dir.path() / "missing.txt"); }) == ErrorCode::IoError);

    std::size_t skipped = 0;
    LoadVectorsOptions lenient;
    lenient.skip_malformed = true;
    lenient.skipped_lines = &skipped;
    const auto table = load_vectors(dir.write("mixed.txt", "a 1 0\n. . . 1 2\nb 0 1\n"), lenient);
    CHECK(table.size() == 2);
    CHECK(skipped == 1);
}

TEST_CASE("load_vectors keeps the first duplicate and folds case") {
    TempDir dir("vectors_dup");
    const auto table = load_vectors(dir.write("d.txt", "Apple 1 0\napple 0 1\n"));
    CHECK(table.size() == 1);
    CHECK((*table.find("APPLE"))[0] == 1.0);

    LoadVectorsOptions cased;
    cased.lowercase = false;
    const auto exact = load_vectors(dir.path() / "d.txt", cased);
    CHECK(exact.size() == 2);
    CHECK_FALSE(exact.find("APPLE").has_value());
}

TEST_CASE("load_vectors vocabulary filter") {
    TempDir dir("vectors_vocab");
    const std::unordered_set<std::string> vocab{"b"};
    LoadVectorsOptions options;
    options.vocabulary = &vocab;
    const auto table = load_vectors(dir.write("v.txt", "a 1 0\nb 0 1\nc 1 1\n"), options);
    CHECK(table.size() == 1);
    CHECK(table.find("b").has_value());
}

TEST_CASE("parsed vectors re-serialize exactly") {
    TempDir dir("vectors_roundtrip");
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 3.0);
    std::string text;
    std::vector<std::vector<double>> expected;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> row(4);
        text += "w" + std::to_string(i);
        for (double& x : row) {
            x = g(rng);
            text += " " + format_double(x);
        }
        text += "\n";
        expected.push_back(row);
    }
    const auto table = load_vectors(dir.write("r.txt", text));
    for (int i = 0; i < 50; ++i) {
        const auto v = *table.find("w" + std::to_string(i));
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(v[j] == expected[static_cast<std::size_t>(i)][j]);
            CHECK(*parse_double(format_double(v[j])) == v[j]);
        }
    }
}

TEST_CASE("encode_average") {
    WordVectorTable table(2, true);
    table.insert("a", std::vector<double>{1, 0});
    table.insert("b", std::vector<double>{0, 1});
    CHECK(encode_average("a b", table) == Vector{0.5, 0.5});
    CHECK(encode_average("a a", table) == Vector{1, 0});
    CHECK(encode_average("A zzz b", table) == Vector{0.5, 0.5});
    CHECK(code_of([&] { encode_average("zzz", table); }) == ErrorCode::AllOOV);
}

TEST_CASE("encode_average ignores token order") {
    WordVectorTable table(3, true);
    std::mt19937_64 rng(2);
    std::vector<std::string> tokens;
    for (int i = 0; i < 8; ++i) {
        const std::string w = "t" + std::to_string(i);
        // Dyadic entries keep the sum exact in any order.
        table.insert(w, std::vector<double>{(i % 5) / 4.0, (i % 3) / 2.0, -i / 8.0});
        tokens.push_back(w);
    }
    auto join = [](const std::vector<std::string>& ws) {
        std::string s;
        for (const auto& w : ws) s += w + " ";
        return s;
    };
    const Vector base = encode_average(join(tokens), table);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(tokens.begin(), tokens.end(), rng);
        CHECK(encode_average(join(tokens), table) == base);
    }
}

TEST_CASE("load_score_matrix") {
    TempDir dir("scores");
    const auto s = load_score_matrix(dir.write("s.tsv", "1.0\t2.0\n3.0\t0.5\n"));
    CHECK(s.n_docs() == 2);
    CHECK(s.k() == 2);
    CHECK(s.polarity() == Polarity::HigherBetter);
    CHECK(s.scores()(1, 1) == 0.5);

    const auto lower = load_score_matrix(dir.write("l.tsv", "#polarity=lower\n1\t2\n"));
    CHECK(lower.polarity() == Polarity::LowerBetter);

    try {
        load_score_matrix(dir.write("r.tsv", "1\t2\n3\n"));
        FAIL("expected RaggedRows");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RaggedRows);
        CHECK(e.index() == std::optional<std::size_t>(2));
    }
    CHECK(code_of([&] { load_score_matrix(dir.write("p.tsv", "1\tx\n")); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_score_matrix(dir.write("n.tsv", "1\tNaN\n")); }) == ErrorCode::ParseError);

    write_score_matrix(lower, dir.path() / "w.tsv");
    CHECK(load_score_matrix(dir.path() / "w.tsv") == lower);
}

TEST_CASE("embedding files round trip") {
    TempDir dir("embeddings");
    std::mt19937_64 rng(3);
    const auto m = to_embeddings(oracle::random_points(rng, 12, 5));
    write_embeddings(m, dir.path() / "e.vec");
    const auto back = load_embeddings(dir.path() / "e.vec");
    CHECK(back.values() == m.values());
    CHECK(back.ids().front() == "0");
    CHECK(code_of([&] { load_embeddings(dir.write("dup.vec", "a 1\nb 2\na 3\n")); }) == ErrorCode::DuplicateId);
}

TEST_CASE("load_labels accepts indices or names") {
    TempDir dir("labels");
    const std::vector<std::string> names{"world", "science technology"};
    CHECK(load_labels(dir.write("g.txt", "0\nscience technology\n1\n"), names, 2) == Labels{0, 1, 1});
    CHECK(code_of([&] { load_labels(dir.write("bad.txt", "0\n7\n"), names, 2); }) == ErrorCode::LabelOutOfRange);
    CHECK(code_of([&] { load_labels(dir.write("unk.txt", "sports\n"), names, 2); }) == ErrorCode::ParseError);
}

TEST_CASE("Manifest") {
    const auto m = Manifest::parse("# dataset\ndocs = docs.vec\ncats=cats.txt\ngold=/abs/gold.txt\n", "/data/ag");
    CHECK(*m.get("docs") == std::filesystem::path("/data/ag/docs.vec"));
    CHECK(*m.get("gold") == std::filesystem::path("/abs/gold.txt"));
    CHECK_FALSE(m.has("anchors"));
    CHECK_THROWS_AS(m.require("anchors"), Error);
    CHECK(code_of([] { Manifest::parse("documents=x\n", "."); }) == ErrorCode::ParseError);
    CHECK(code_of([] { Manifest::parse("docs\n", "."); }) == ErrorCode::ParseError);
}

TEST_CASE("refinement reports round trip") {
    TempDir dir("report");
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 6; ++trial) {
        const auto docs = to_embeddings(oracle::random_points(rng, 20, 3));
        const auto cats = to_embeddings(oracle::random_points(rng, 3, 3));
        RefinementConfig config = RefinementConfig::dual_defaults();
        config.metric = trial % 2 ? Metric::SquaredL2 : Metric::CosineDistance;
        config.seed = 77;

        RefinementReport report;
        report.algorithm = "refine-dual";
        report.config = config;
        report.result = refine_dual(docs, cats, config);
        report.category_names = {"world", "sports", "science technology"};
        if (trial % 3 == 0) {
            report.accuracy = 0.75;
            report.one_to_one_accuracy = 0.8;
        }
        write_report(report, dir.path() / "r.txt");
        const auto back = read_refinement_report(dir.path() / "r.txt");
        CHECK(back == report);
        if (report.accuracy) {
            CHECK(dir.read("r.txt").find("\naccuracy 0.75\n") != std::string::npos);
        }
    }
}

TEST_CASE("report writer errors") {
    RefinementReport report;
    report.algorithm = "refine-dual";
    CHECK(code_of([&] { write_report(report, "/nonexistent-dir/x/report.txt"); }) == ErrorCode::IoError);
    CHECK(code_of([] { parse_refinement_report("not a report\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("prediction and evaluation reports have stable layouts") {
    PredictionReport p;
    p.algorithm = "ensemble";
    p.fields = {{"runs", "2"}};
    p.category_names = {"world", "sports"};
    p.predictions = {1, 0};
    p.accuracy = 0.5;
    const std::string text = format_report(p);
    CHECK(text == "ulr-report 1\nkind predictions\nalgorithm ensemble\nruns 2\naccuracy 0.5\ncategories 2\n"
                  "world\nsports\npredictions 2\n0 1 sports\n1 0 world\n");

    EvaluationReport e = summarize_runs({SweepRun{1, {"a", "b"}, 0.5, 0.75, true, false},
                                         SweepRun{0, {"a", "a"}, 0.5, 0.25, false, true}});
    const std::string eval = format_report(e, "sweep", RefinementConfig::dual_defaults());
    CHECK(eval.find("run_count 2\n") != std::string::npos);
    CHECK(eval.find("duplicate_name_runs 1\n") != std::string::npos);
    CHECK(eval.find("0 0.5 0.25 0 1 a; a\n1 0.5 0.75 1 0 a; b\n") != std::string::npos);
    CHECK(format_scatter(e) == "run_id\tinitial_accuracy\tgain\n0\t0.5\t-0.25\n1\t0.5\t0.25\n");
}
