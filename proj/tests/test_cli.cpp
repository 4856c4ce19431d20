#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "support.hpp"

using cbc::testing::data_path;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, cbc::cli::Options options = {}) {
    std::ostringstream out, err;
    const int code = cbc::cli::run(args, out, err, options);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::string(CBC_TEST_TMP_DIR) + "/" + name;
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

}  // namespace

TEST_CASE("cluster") {
    const auto r = cli({"cluster", "--data", data_path("table1.csv"), "--k", "3", "--seed", "42"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["assignment"].size() == 10);
    CHECK(j["k"] == 3);

    const auto missing = cli({"cluster", "--data", "/nonexistent.csv", "--k", "2"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot read") != std::string::npos);

    const auto big = cli({"cluster", "--data", data_path("table1.csv"), "--k", "11", "--seed", "1"});
    CHECK(big.code == 1);
    CHECK(big.err.find("k exceeds candidate count") != std::string::npos);

    CHECK(cli({"cluster", "--k", "2"}).code == 1);
    CHECK(cli({}).code == 1);
}

TEST_CASE("evaluate") {
    const auto r = cli({"evaluate", "--data", data_path("table1.csv"), "--constraints", data_path("fixture_spec.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["ranking"].size() == 6);
    CHECK(j["ranking"][0]["id"] == "T103");

    const auto min4 = temp_file("min4.json", R"({"k":3,"min_cluster_size":4})");
    const auto d = cli({"evaluate", "--data", data_path("table1.csv"), "--constraints", min4});
    CHECK(d.code == 2);
    CHECK(nlohmann::json::parse(d.out)["deadlock"]["causes"][0]["kind"] == "size-arithmetic");

    CHECK(cli({"evaluate", "--data", data_path("table1.csv"), "--constraints", "/nonexistent.json"}).code == 1);

    const auto out_path = std::string(CBC_TEST_TMP_DIR) + "/report.json";
    std::remove(out_path.c_str());
    const auto w = temp_file("weights.json", R"({"Availability": 1})");
    CHECK(cli({"evaluate", "--data", data_path("table1.csv"), "--constraints", data_path("fixture_spec.json"),
               "--weights", w, "--out", out_path})
              .code == 0);
    std::ifstream in(out_path);
    const auto report = nlohmann::json::parse(in);
    CHECK(report["ranking"].size() == 6);
}

TEST_CASE("check") {
    CHECK(cli({"check", "--data", data_path("table1.csv"), "--constraints", data_path("fixture_spec.json")}).code == 0);
    const auto conflict = temp_file(
        "conflict.json", R"({"k":3,"must_link":[["T100","T101"],["T101","T102"]],"cannot_link":[["T100","T102"]]})");
    const auto r = cli({"check", "--data", data_path("table1.csv"), "--constraints", conflict});
    CHECK(r.code == 2);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["causes"][0]["must_link_path"] == nlohmann::json::array({"T100", "T101", "T102"}));
    const auto unknown = temp_file("unknown.json", R"({"k":3,"must_link":[["T100","T999"]]})");
    const auto u = cli({"check", "--data", data_path("table1.csv"), "--constraints", unknown});
    CHECK(u.code == 1);
    CHECK(u.err.find("unknown id T999") != std::string::npos);
}

TEST_CASE("verify") {
    const auto r = cli({"verify", "--data", data_path("table1.csv"), "--k", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.737654320988") != std::string::npos);

    std::string csv = "id,a,constraints\n";
    for (int i = 0; i < 13; ++i) csv += "R" + std::to_string(i) + "," + std::to_string(1 + i % 10) + ",5\n";
    const auto big = temp_file("thirteen.csv", csv);
    CHECK(cli({"verify", "--data", big, "--k", "2"}).code == 4);

    const auto spec = data_path("fixture_spec.json");
    CHECK(cli({"verify", "--data", data_path("table1.csv"), "--constraints", spec, "--k", "2"}).code == 0);
    cbc::cli::Options faulty;
    faulty.invert_engine_feasibility = true;
    CHECK(cli({"verify", "--data", data_path("table1.csv"), "--constraints", spec, "--k", "2"}, faulty).code == 5);
}
