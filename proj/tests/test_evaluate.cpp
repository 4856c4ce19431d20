#include "doctest.h"

#include "cbc/error.hpp"
#include "cbc/evaluate.hpp"
#include "cbc/pipeline.hpp"
#include "support.hpp"

using namespace cbc;

namespace {

CBCResult fixture_result(double tau = 6) {
    auto spec = testing::fixture_spec();
    spec.feasibility_threshold = tau;
    CBCConfig config;
    config.kmeans.seed = 42;
    config.kmeans.restarts = 10;
    return run_pipeline(testing::table1(), spec, config);
}

}  // namespace

TEST_CASE("scores") {
    const auto& ds = testing::table1();
    const auto uniform = WeightVector::uniform(ds.schema());
    CHECK(score_candidate(ds[*ds.index_of("T103")], ds.schema(), uniform) == doctest::Approx(20.0 / 54).epsilon(1e-15));
    const auto availability = WeightVector::from_map({{"availability", 1.0}}, ds.schema());
    CHECK(score_candidate(ds[*ds.index_of("T104")], ds.schema(), availability) == doctest::Approx(4.0 / 9).epsilon(1e-15));
    const Candidate top{"X", {10, 10, 10, 10, 10, 10}, 10, {}};
    CHECK(score_candidate(top, ds.schema(), uniform) == 1.0);
}

TEST_CASE("weight vectors") {
    CHECK_THROWS_AS(WeightVector({0, 0}), DomainError);
    CHECK_THROWS_AS(WeightVector({1, -1}), DomainError);
    CHECK(WeightVector({1, 3}).normalized() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("ranking on the fixture") {
    const auto& ds = testing::table1();
    const auto report = rank(fixture_result(), ds, WeightVector::uniform(ds.schema()));
    REQUIRE(report.ranking.size() == 6);
    std::vector<std::string> order;
    for (const auto& s : report.ranking) order.push_back(s.id);
    CHECK(order == std::vector<std::string>{"T103", "T101", "T107", "T106", "T105", "T100"});
    CHECK(report.ranking[0].score == doctest::Approx(20.0 / 54));
    std::vector<std::string> excluded;
    for (const auto& [id, v] : report.excluded) {
        excluded.push_back(id);
        CHECK_FALSE(v.empty());
    }
    CHECK(excluded == std::vector<std::string>{"T102", "T104", "T108", "T109"});
    CHECK(report.meta.k == 3);
    CHECK_FALSE(report.aborted);
}

TEST_CASE("empty feasible set gives an empty ranking") {
    const auto& ds = testing::table1();
    const auto report = rank(fixture_result(10), ds, WeightVector::uniform(ds.schema()));
    CHECK(report.ranking.empty());
    CHECK(report.excluded.size() == 10);
    CHECK(report.deadlock.deadlocked());
}

TEST_CASE("ties break by ascending id") {
    const auto ds = parse_dataset("id,a,b,constraints\nB,5,5,9\nA,5,5,9\nC,9,9,9\n");
    ConstraintSpec spec;
    spec.feasibility_threshold = 1;
    CBCConfig config;
    config.kmeans.k = 2;
    const auto report = rank(run_pipeline(ds, spec, config), ds, WeightVector::uniform(ds.schema()));
    REQUIRE(report.ranking.size() == 3);
    CHECK(report.ranking[0].id == "C");
    CHECK(report.ranking[1].id == "A");
    CHECK(report.ranking[2].id == "B");
}

TEST_CASE("aborted results carry only the deadlock") {
    const auto& ds = testing::table1();
    CBCConfig config;
    config.kmeans.k = 3;
    const auto result = run_pipeline(ds, parse_constraint_spec(R"({"min_cluster_size":4})"), config);
    const auto report = rank(result, ds, WeightVector::uniform(ds.schema()));
    CHECK(report.aborted);
    CHECK(report.ranking.empty());
    CHECK(report.micro_clusters.empty());
    CHECK(report.deadlock.deadlocked());
}
