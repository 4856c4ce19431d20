#include "doctest.h"

#include <cstdlib>

#include "cbc/evaluate.hpp"
#include "cbc/report.hpp"
#include "support.hpp"

using namespace cbc;

TEST_CASE("rounding to significant digits") {
    CHECK(round_significant(0.56584362139917699) == 0.565843621399);
    CHECK(round_significant(0.0) == 0.0);
    CHECK(round_significant(-1234.56789012345) == -1234.56789012);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("digests depend on content only") {
    const auto& ds = testing::table1();
    CHECK(dataset_digest(ds) == dataset_digest(parse_dataset(serialize_dataset(ds))));
    CBCConfig a, b;
    b.kmeans.seed = 1;
    const auto spec = testing::fixture_spec();
    CHECK(config_digest(spec, a) == config_digest(spec, a));
    CHECK(config_digest(spec, a) != config_digest(spec, b));
}

TEST_CASE("timestamp honours SOURCE_DATE_EPOCH") {
    ::setenv("SOURCE_DATE_EPOCH", "0", 1);
    CHECK(rfc3339_utc_now() == "1970-01-01T00:00:00Z");
    ::unsetenv("SOURCE_DATE_EPOCH");
    CHECK(rfc3339_utc_now().size() == 20);
}

TEST_CASE("report layout and determinism digest") {
    const auto& ds = testing::table1();
    CBCConfig config;
    config.kmeans.seed = 42;
    config.kmeans.restarts = 10;
    const auto spec = testing::fixture_spec();
    RunMetadata meta;
    meta.user_spec = spec.user_spec;
    const auto report = rank(run_pipeline(ds, spec, config), ds, WeightVector::uniform(ds.schema()), meta);
    const auto a = report_to_json(report, "2020-01-01T00:00:00Z");
    const auto b = report_to_json(report, "2021-06-01T12:00:00Z");
    CHECK(a["meta"]["timestamp"] == "2020-01-01T00:00:00Z");
    CHECK(a["meta"]["determinism_digest"] == b["meta"]["determinism_digest"]);
    CHECK(render(strip_timestamp(a)) == render(strip_timestamp(b)));
    CHECK(a["ranking"].size() == 6);
    CHECK(a["excluded"].size() == 4);
    CHECK(a["deadlock"]["deadlocked"] == false);
    CHECK(a["meta"]["user_spec"]["budget_per_instance"] == 5000);
}

TEST_CASE("deadlock JSON carries the witness") {
    DeadlockReport r;
    r.causes.push_back({CauseKind::LinkConflict, "bind", "x", {"A", "B", "C"}, {"A", "B", "C"}, IdPair{"A", "C"}, {}});
    const auto j = deadlock_to_json(r);
    CHECK(j["deadlocked"] == true);
    CHECK(j["causes"][0]["kind"] == "link-conflict");
    CHECK(j["causes"][0]["must_link_path"].size() == 3);
    CHECK(j["causes"][0]["cannot_link"][1] == "C");
}
