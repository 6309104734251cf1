#include <doctest.h>

#include "helpers.hpp"
#include "ulr/cli.hpp"
#include "ulr/report.hpp"

#include <sstream>

using testing_support::TempDir;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = ulr::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Two tight clusters on the axes with category vectors on the same axes.
void write_micro(const TempDir& dir) {
    dir.write("docs.vec", "d0 0 1\nd1 0 0.9\nd2 1 0\nd3 0.9 0\n");
    dir.write("cats.vec", "up 0 0.5\nright 0.5 0\n");
    dir.write("cats.txt", "up\nright\n");
    dir.write("gold.txt", "up\nup\nright\nright\n");
    dir.write("data.manifest", "docs=docs.vec\ncat_vectors=cats.vec\ncats=cats.txt\ngold=gold.txt\n");
}

}  // namespace

TEST_CASE("refine-dual on the micro dataset") {
    TempDir dir("cli_dual");
    write_micro(dir);
    const auto out_path = (dir.path() / "report.txt").string();
    const auto r = run_cli({"refine-dual", "-m", (dir.path() / "data.manifest").string(), "-o", out_path});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto report = ulr::read_refinement_report(out_path);
    CHECK(report.result.final_predictions == ulr::Labels{0, 0, 1, 1});
    REQUIRE(report.accuracy.has_value());
    CHECK(*report.accuracy == 1.0);
    CHECK(report.category_names == std::vector<std::string>{"up", "right"});
}

TEST_CASE("eval of gold predictions scores 1") {
    TempDir dir("cli_eval");
    write_micro(dir);
    const auto r = run_cli({"eval", "-p", (dir.path() / "gold.txt").string(), "-m",
                            (dir.path() / "data.manifest").string(), "-o", (dir.path() / "eval.txt").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const std::string text = dir.read("eval.txt");
    CHECK(text.find("\naccuracy 1\n") != std::string::npos);
    CHECK(text.find("\none_to_one_accuracy 1\n") != std::string::npos);
}

TEST_CASE("eval reads predictions from a refinement report") {
    TempDir dir("cli_eval_report");
    write_micro(dir);
    const auto manifest = (dir.path() / "data.manifest").string();
    REQUIRE(run_cli({"refine-dual", "-m", manifest, "-o", (dir.path() / "r.txt").string()}).code == 0);
    const auto r = run_cli({"eval", "-p", (dir.path() / "r.txt").string(), "-m", manifest, "-o",
                            (dir.path() / "eval.txt").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(dir.read("eval.txt").find("\naccuracy 1\n") != std::string::npos);
}

TEST_CASE("ensemble of two refinement reports") {
    TempDir dir("cli_ensemble");
    write_micro(dir);
    const auto manifest = (dir.path() / "data.manifest").string();
    REQUIRE(run_cli({"refine-dual", "-m", manifest, "-o", (dir.path() / "a.txt").string()}).code == 0);
    REQUIRE(run_cli({"refine-dual", "-m", manifest, "--metric", "squared-l2", "-o", (dir.path() / "b.txt").string()})
                .code == 0);
    const auto r = run_cli({"ensemble", "-i", (dir.path() / "a.txt").string(), "-i", (dir.path() / "b.txt").string(),
                            "-m", manifest, "-o", (dir.path() / "e.txt").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(dir.read("e.txt").find("predictions 4\n0 0 up\n1 0 up\n2 1 right\n3 1 right\n") != std::string::npos);
}

TEST_CASE("encode averages word vectors per line") {
    TempDir dir("cli_encode");
    dir.write("words.vec", "alpha 1 0\nbeta 0 1\n");
    dir.write("texts.txt", "alpha beta\nBeta\n");
    const auto r = run_cli({"encode", "--vectors", (dir.path() / "words.vec").string(), "--input",
                            (dir.path() / "texts.txt").string(), "-o", (dir.path() / "out.vec").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(dir.read("out.vec") == "2 2\n0 0.5 0.5\n1 0 1\n");
}

TEST_CASE("usage and data errors map to exit codes") {
    TempDir dir("cli_errors");
    write_micro(dir);
    const auto manifest = (dir.path() / "data.manifest").string();

    const auto unknown = run_cli({"refine-dual", "-m", manifest, "-o", "x", "--bogus"});
    CHECK(unknown.code == ulr::cli::kExitUsageError);
    CHECK(unknown.err.starts_with("error: "));

    CHECK(run_cli({}).code == ulr::cli::kExitUsageError);
    CHECK(run_cli({"refine-dual", "-m", manifest}).code == ulr::cli::kExitUsageError);

    const auto help = run_cli({"--help"});
    CHECK(help.code == ulr::cli::kExitOk);
    CHECK(help.out.find("refine-dual") != std::string::npos);
    const auto sub_help = run_cli({"refine-dual", "--help"});
    CHECK(sub_help.code == ulr::cli::kExitOk);
    CHECK(sub_help.out.find("--w-category") != std::string::npos);

    const auto missing = run_cli({"refine-dual", "-m", (dir.path() / "nope.manifest").string(), "-o",
                                  (dir.path() / "r.txt").string()});
    CHECK(missing.code == ulr::cli::kExitDataError);

    const auto weights = run_cli({"refine-dual", "-m", manifest, "--w-mean", "0.9", "-o",
                                  (dir.path() / "r.txt").string()});
    CHECK(weights.code == ulr::cli::kExitDataError);
    CHECK(weights.err.find("WeightMismatch") != std::string::npos);

    dir.write("bad_gold.txt", "up\nup\nleft\nright\n");
    dir.write("bad.manifest", "docs=docs.vec\ncat_vectors=cats.vec\ncats=cats.txt\ngold=bad_gold.txt\n");
    CHECK(run_cli({"refine-dual", "-m", (dir.path() / "bad.manifest").string(), "-o",
                   (dir.path() / "r.txt").string()})
              .code == ulr::cli::kExitDataError);
}

TEST_CASE("repeated runs write byte-identical reports") {
    TempDir dir("cli_repeat");
    write_micro(dir);
    const auto manifest = (dir.path() / "data.manifest").string();
    for (const std::string cmd : {"refine-dual", "cluster-random"}) {
        REQUIRE(run_cli({cmd, "-m", manifest, "--seed", "5", "-o", (dir.path() / "1.txt").string()}).code == 0);
        REQUIRE(run_cli({cmd, "-m", manifest, "--seed", "5", "-o", (dir.path() / "2.txt").string()}).code == 0);
        CHECK(dir.read("1.txt") == dir.read("2.txt"));
    }
}
