#include "doctest.h"

#include <set>

#include "cbc/constraints.hpp"
#include "cbc/error.hpp"
#include "support.hpp"

using namespace cbc;

namespace {

std::size_t idx(const char* id) { return *testing::table1().index_of(id); }

ConstraintSpec spec_json(const char* json) { return parse_constraint_spec(json); }

std::set<std::string> ids_of(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

bool has_cause(const DeadlockReport& r, CauseKind kind) {
    for (const auto& c : r.causes)
        if (c.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("link components") {
    const auto& ds = testing::table1();
    SUBCASE("transitive closure") {
        const auto links = build_link_components(spec_json(R"({"must_link":[["T100","T101"],["T101","T102"]]})"), ds);
        CHECK(links.size() == 8);
        CHECK(links.components[0] == std::vector<std::size_t>{0, 1, 2});
        CHECK(links.component_of[idx("T102")] == 0);
    }
    SUBCASE("empty spec gives singletons") {
        const auto links = build_link_components(ConstraintSpec{}, ds);
        CHECK(links.size() == 10);
        CHECK(links.lifted_cannot.empty());
    }
    SUBCASE("cannot-link lifted to components") {
        const auto links =
            build_link_components(spec_json(R"({"must_link":[["T103","T107"]],"cannot_link":[["T103","T108"]]})"), ds);
        const auto c103 = links.component_of[idx("T103")];
        const auto c108 = links.component_of[idx("T108")];
        CHECK(links.components[c103] == std::vector<std::size_t>{idx("T103"), idx("T107")});
        CHECK(links.components[c108] == std::vector<std::size_t>{idx("T108")});
        REQUIRE(links.lifted_cannot.size() == 1);
        CHECK(links.conflicting(c103, c108));
        CHECK(links.conflicting(c108, c103));
    }
    SUBCASE("unknown id") {
        CHECK_THROWS_AS(build_link_components(spec_json(R"({"must_link":[["T100","X"]]})"), ds), DomainError);
    }
}

TEST_CASE("object feasibility at tau = 6") {
    const auto& ds = testing::table1();
    ConstraintSpec spec;
    spec.feasibility_threshold = 6;
    const auto ok = object_feasible(ds[idx("T103")], spec, ds);
    CHECK(ok.feasible);
    CHECK(ok.violations.empty());
    const auto bad = object_feasible(ds[idx("T102")], spec, ds);
    CHECK_FALSE(bad.feasible);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].message == "constraints_rating 3 < 6");
    CHECK(bad.violations[0].observed == 3);
    CHECK(bad.violations[0].required == 6);
}

TEST_CASE("feasibility partition") {
    const auto& ds = testing::table1();
    ConstraintSpec spec;
    spec.feasibility_threshold = 6;
    auto part = feasibility_partition(ds, spec);
    CHECK(part.feasible == std::vector<std::string>{"T100", "T101", "T103", "T105", "T106", "T107"});
    std::vector<std::string> infeasible;
    for (const auto& [id, v] : part.infeasible) infeasible.push_back(id);
    CHECK(infeasible == std::vector<std::string>{"T102", "T104", "T108", "T109"});

    spec.feasibility_threshold = 1;
    CHECK(feasibility_partition(ds, spec).feasible.size() == 10);
    spec.feasibility_threshold = 10;
    CHECK(feasibility_partition(ds, spec).feasible.empty());
    CHECK(feasibility_partition(CandidateDataset{}, spec).feasible.empty());
}

TEST_CASE("capability rules gate individual candidates") {
    const auto ds = parse_dataset(
        "id,availability,budget_per_instance,max_instances,constraints\n"
        "A,5,4000,200,8\nB,5,6000,200,8\nC,5,4000,50,8\n");
    auto spec = testing::fixture_spec();
    spec.existential.clear();
    const auto rules = capability_rules(spec, ds);
    REQUIRE(rules.size() == 2);
    const auto part = feasibility_partition(ds, spec);
    CHECK(part.feasible == std::vector<std::string>{"A"});
    REQUIRE(part.infeasible.size() == 2);
    CHECK(part.infeasible[0].second[0].rule == "budget_per_instance <= 5000");
    CHECK(part.infeasible[1].second[0].rule == "max_instances >= 100");
}

TEST_CASE("deadlock detection") {
    const auto& ds = testing::table1();
    SUBCASE("size arithmetic") {
        auto spec = spec_json(R"({"min_cluster_size":4})");
        const auto r = detect_deadlock(spec, ds, 3);
        REQUIRE(r.causes.size() == 1);
        CHECK(r.causes[0].kind == CauseKind::SizeArithmetic);
        CHECK(r.causes[0].numbers == std::vector<double>{3, 4, 10});
        spec = spec_json(R"({"max_cluster_size":3})");
        CHECK(has_cause(detect_deadlock(spec, ds, 3), CauseKind::SizeArithmetic));
        CHECK_FALSE(detect_deadlock(spec, ds, 4).deadlocked());
    }
    SUBCASE("transitive link conflict with witness path") {
        const auto spec =
            spec_json(R"({"must_link":[["T100","T101"],["T101","T102"]],"cannot_link":[["T100","T102"]]})");
        const auto r = detect_deadlock(spec, ds, 3);
        REQUIRE(r.causes.size() == 1);
        const auto& c = r.causes[0];
        CHECK(c.kind == CauseKind::LinkConflict);
        CHECK(c.path == std::vector<std::string>{"T100", "T101", "T102"});
        CHECK(c.cannot_pair == IdPair{"T100", "T102"});
        CHECK(c.stage == "bind");
    }
    SUBCASE("oversize component") {
        const auto spec = spec_json(R"({"must_link":[["T100","T101"],["T101","T102"]],"max_cluster_size":2})");
        const auto r = detect_deadlock(spec, ds, 5);
        REQUIRE(r.causes.size() == 1);
        CHECK(r.causes[0].kind == CauseKind::SizeArithmetic);
        CHECK(ids_of(r.causes[0].ids) == std::set<std::string>{"T100", "T101", "T102"});
    }
    SUBCASE("pigeonhole over cannot-links") {
        const auto spec = spec_json(
            R"({"cannot_link":[["T100","T101"],["T100","T102"],["T100","T103"],["T101","T102"],["T101","T103"],["T102","T103"]]})");
        CHECK(has_cause(detect_deadlock(spec, ds, 3), CauseKind::ClusterPacking));
        CHECK_FALSE(detect_deadlock(spec, ds, 4).deadlocked());
    }
    SUBCASE("packing beyond colouring") {
        // Three pairs of linked candidates cannot fit in two clusters of at most 3.
        const auto small = testing::make_dataset({{1}, {2}, {3}, {4}, {5}, {6}});
        ConstraintSpec spec;
        spec.must_link = {{"C0", "C1"}, {"C2", "C3"}, {"C4", "C5"}};
        spec.max_cluster_size = 3;
        CHECK(has_cause(detect_deadlock(spec, small, 2), CauseKind::ClusterPacking));
        spec.max_cluster_size = 4;
        CHECK_FALSE(detect_deadlock(spec, small, 2).deadlocked());
    }
    SUBCASE("existential rules over table1") {
        auto spec = testing::fixture_spec();
        CHECK_FALSE(detect_deadlock(spec, ds, 3).deadlocked());
        spec.existential[0].min_count = 7;  // only six candidates have availability >= 4
        const auto r = detect_deadlock(spec, ds, 3);
        REQUIRE(r.causes.size() == 1);
        CHECK(r.causes[0].kind == CauseKind::ExistentialUnsatisfiable);
        CHECK(r.causes[0].numbers == std::vector<double>{6, 7});
    }
    SUBCASE("empty feasible set") {
        auto spec = ConstraintSpec{};
        spec.feasibility_threshold = 10;
        const auto r = detect_deadlock(spec, ds, 3);
        REQUIRE(r.causes.size() == 1);
        CHECK(r.causes[0].kind == CauseKind::EmptyFeasibleSet);
    }
    SUBCASE("many components skip the exact packing check") {
        std::vector<std::vector<double>> rows(14, {1.0});
        const auto big = testing::make_dataset(rows);
        const auto r = detect_deadlock(ConstraintSpec{}, big, 2);
        CHECK_FALSE(r.deadlocked());
        CHECK(r.warnings.size() == 1);
    }
}

TEST_CASE("witnesses re-validate") {
    const auto& ds = testing::table1();
    const auto spec = spec_json(R"({"must_link":[["T100","T104"],["T104","T107"],["T107","T109"]],"cannot_link":[["T100","T109"]]})");
    const auto r = detect_deadlock(spec, ds, 2);
    REQUIRE(r.causes.size() == 1);
    const auto& path = r.causes[0].path;
    REQUIRE(path.size() >= 2);
    CHECK(path.front() == r.causes[0].cannot_pair->first);
    CHECK(path.back() == r.causes[0].cannot_pair->second);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto pair = make_pair_unordered(path[i], path[i + 1]);
        CHECK(std::binary_search(spec.must_link.begin(), spec.must_link.end(), pair));
    }
}

TEST_CASE("post-refinement recheck counts feasible members only") {
    const auto& ds = testing::table1();
    auto spec = testing::fixture_spec();
    spec.existential[0].min_count = 5;  // T103, T105, T106, T107 are feasible with availability >= 4
    std::vector<std::size_t> feasible;
    for (const auto& id : feasibility_partition(ds, spec).feasible) feasible.push_back(*ds.index_of(id));
    const auto r = recheck_after_refinement(spec, ds, feasible);
    REQUIRE(r.causes.size() == 1);
    CHECK(r.causes[0].kind == CauseKind::ExistentialUnsatisfiable);
    CHECK(r.causes[0].stage == "post-refinement");
    CHECK(r.causes[0].numbers == std::vector<double>{4, 5});
}

TEST_CASE("assignment violations") {
    const auto& ds = testing::table1();
    const auto spec = spec_json(R"({"must_link":[["T100","T101"]],"cannot_link":[["T102","T103"]],"max_cluster_size":6})");
    const std::vector<std::size_t> good{0, 0, 0, 1, 1, 1, 0, 0, 1, 1};
    CHECK(assignment_violations(spec, ds, good, 2).empty());
    const std::vector<std::size_t> bad{0, 1, 0, 0, 0, 0, 0, 0, 0, 1};
    const auto v = assignment_violations(spec, ds, bad, 2);
    CHECK(v.size() == 3);
}
