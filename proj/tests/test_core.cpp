#include <doctest.h>

#include "helpers.hpp"
#include "ulr/types.hpp"

#include <cmath>
#include <limits>

using namespace ulr;
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

TEST_CASE("validate_dataset accepts consistent shapes") {
    auto docs = to_embeddings({{0, 1}, {0, 0.9}, {1, 0}, {0.9, 0}});
    auto cats = to_embeddings({{0, 0.5}, {0.5, 0}});
    const Dataset data = validate_dataset(docs, cats, Labels{0, 0, 1, 1});
    CHECK(data.docs.rows() == 4);
    REQUIRE(data.gold.has_value());
    CHECK(data.gold->labels() == Labels{0, 0, 1, 1});
}

TEST_CASE("validate_dataset reports the first violation") {
    auto docs = to_embeddings({{0, 1}, {0, 0.9}, {1, 0}, {0.9, 0}});

    SUBCASE("dimension mismatch") {
        auto cats = to_embeddings({{0, 0.5, 1}, {0.5, 0, 1}});
        CHECK(code_of([&] { validate_dataset(docs, cats); }) == ErrorCode::DimensionMismatch);
    }
    SUBCASE("label out of range names the position") {
        auto cats = to_embeddings({{0, 0.5}, {0.5, 0}});
        try {
            validate_dataset(docs, cats, Labels{0, 0, 5, 1});
            FAIL("expected LabelOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::LabelOutOfRange);
            REQUIRE(e.index().has_value());
            CHECK(*e.index() == 2);
        }
    }
    SUBCASE("single category") {
        auto cats = to_embeddings({{0, 0.5}});
        CHECK(code_of([&] { validate_dataset(docs, cats); }) == ErrorCode::EmptyInput);
    }
    SUBCASE("gold length") {
        auto cats = to_embeddings({{0, 0.5}, {0.5, 0}});
        CHECK(code_of([&] { validate_dataset(docs, cats, Labels{0, 1}); }) == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("EmbeddingMatrix invariants") {
    CHECK(code_of([] { EmbeddingMatrix(Matrix(0, 3)); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] {
              EmbeddingMatrix(Matrix(1, 2, std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}));
          }) == ErrorCode::NonFinite);
    CHECK(code_of([] { EmbeddingMatrix(Matrix(2, 1, std::vector<double>{1, 2}), {"a", "a"}); }) ==
          ErrorCode::DuplicateId);
    CHECK(code_of([] { EmbeddingMatrix(Matrix(2, 1, std::vector<double>{1, 2}), {"a"}); }) ==
          ErrorCode::LengthMismatch);
    const EmbeddingMatrix ok(Matrix(2, 1, std::vector<double>{1, 2}), {"a", "b"});
    CHECK(ok.has_ids());
    CHECK(ok.row(1)[0] == 2.0);
}

TEST_CASE("CategorySet trims and requires two names") {
    const CategorySet cats({"  world ", "sports"});
    CHECK(cats.name(0) == "world");
    CHECK(cats.k() == 2);
    CHECK(code_of([] { CategorySet({"world"}); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { CategorySet({"world", "   "}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("ProbabilityMatrix rows must be distributions") {
    CHECK_NOTHROW(ProbabilityMatrix(Matrix::from_rows({{0.25, 0.75}, {1.0, 0.0}})));
    CHECK(code_of([] { ProbabilityMatrix(Matrix::from_rows({{0.5, 0.6}})); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ProbabilityMatrix(Matrix::from_rows({{-0.1, 1.1}})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("RefinementConfig defaults and validation") {
    const auto dual = RefinementConfig::dual_defaults();
    CHECK(dual.max_iters == 100);
    CHECK(dual.weights == CentroidWeights{0.5, 0.0, 0.5});
    CHECK(dual.early_stopping == EarlyStopping::MinObjective);

    const auto fewshot = RefinementConfig::fewshot_defaults();
    CHECK(fewshot.weights == CentroidWeights{0.25, 0.25, 0.5});

    const auto single = RefinementConfig::single_defaults();
    CHECK(single.weights == CentroidWeights{1.0, 0.0, 0.0});
    CHECK(single.early_stopping == EarlyStopping::LastIteration);

    RefinementConfig bad = dual;
    bad.weights = {0.5, 0.0, 0.6};
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::WeightMismatch);
    bad = dual;
    bad.max_iters = 0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ScoreMatrix rejects non-finite scores") {
    CHECK(code_of([] {
              ScoreMatrix(Matrix(1, 2, std::vector<double>{1.0, std::numeric_limits<double>::infinity()}));
          }) == ErrorCode::NonFinite);
}

TEST_CASE("enum round trips through their text names") {
    for (auto m : {Metric::CosineDistance, Metric::SquaredL2}) CHECK(parse_metric(to_string(m)) == m);
    for (auto e : {EarlyStopping::MinObjective, EarlyStopping::LastIteration})
        CHECK(parse_early_stopping(to_string(e)) == e);
    for (auto p : {Polarity::HigherBetter, Polarity::LowerBetter}) CHECK(parse_polarity(to_string(p)) == p);
    CHECK(code_of([] { parse_metric("manhattan"); }) == ErrorCode::InvalidArgument);
}
