#include "fbindex/common.hpp"
#include "fbindex/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace fbindex;

namespace {

ExperimentReport sample() {
    ExperimentReport r;
    r.name = "sample";
    r.input("solution", "hairpin");
    r.input("h", 0.1);
    r.value("lambda1", -0.10804131286568008);
    r.value("third", 1.0 / 3.0);
    r.check("index", 1, 1, Relation::Within, 0, "exact");
    r.check("bound", 11.0, 3 * 3.141592653589793 + 2 * 3.141592653589793 / std::log(100.0), Relation::LessEqual, 0,
            "bound");
    r.note("a note with = signs");
    r.seed = 123456789012345ULL;
    r.tolerance = 1e-6;
    r.runtime_ms = 17;
    r.finalize();
    return r;
}

}  // namespace

TEST_CASE("check relations") {
    CHECK(Check::evaluate(1.0, 1.05, Relation::Within, 0.1));
    CHECK_FALSE(Check::evaluate(1.0, 1.2, Relation::Within, 0.1));
    CHECK(Check::evaluate(1.0, 0.95, Relation::LessEqual, 0.1));
    CHECK(Check::evaluate(1.0, 1.05, Relation::GreaterEqual, 0.1));
    CHECK(Check::evaluate(1.0, 1.0, Relation::LessEqual, 0.0));
    CHECK_FALSE(Check::evaluate(1.0, 1.0, Relation::Less, 0.0));
    CHECK_FALSE(Check::evaluate(1.0, 1.0, Relation::Greater, 0.0));
    CHECK_FALSE(Check::evaluate(std::nan(""), 0.0, Relation::Within, 1e300));
    CHECK_FALSE(Check::evaluate(std::numeric_limits<double>::infinity(), 0.0, Relation::GreaterEqual, 0.0));
    for (auto r : {Relation::Within, Relation::LessEqual, Relation::GreaterEqual, Relation::Less, Relation::Greater}) {
        CHECK(parse_relation(to_string(r)) == r);
    }
    CHECK_THROWS_AS(parse_relation("approx"), ParseError);
}

TEST_CASE("pass means every check passed") {
    ExperimentReport r;
    r.finalize();
    CHECK_FALSE(r.pass);  // no checks, no pass
    r.require("ok", true, "exact");
    r.finalize();
    CHECK(r.pass);
    r.require("bad", false, "exact");
    r.finalize();
    CHECK_FALSE(r.pass);
}

TEST_CASE("JSON round trip is lossless") {
    const ExperimentReport r = sample();
    const ExperimentReport back = report_from_json(to_json(r, true));
    CHECK(to_json(back, true) == to_json(r, true));
    CHECK(back.find_value("third").value() == 1.0 / 3.0);
    CHECK(back.seed == r.seed);
    CHECK(back.runtime_ms == 17);
    // timing stays out of files by default
    CHECK_FALSE(to_json(r).contains("runtime_ms"));
    CHECK(report_from_json(to_json(r)).runtime_ms == 0);
    CHECK_THROWS_AS(report_from_json(nlohmann::json{{"name", "x"}}), ParseError);
}

TEST_CASE("text form") {
    const std::string t = to_text(sample());
    CHECK(t.find("[experiment]\nname = sample\npass = false\n") == 0);
    CHECK(t.find("lambda1 = -0.10804131286568008\n") != std::string::npos);
    CHECK(t.find("index = PASS computed=1 target=1 relation=within tolerance=0 provenance=exact") != std::string::npos);
    CHECK(t.find("bound = FAIL") != std::string::npos);
    CHECK(t.find("seed = 123456789012345\n") != std::string::npos);
    CHECK(t.find("runtime_ms") == std::string::npos);
    CHECK(to_text(sample(), true).find("runtime_ms = 17\n") != std::string::npos);
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("files are written atomically with a JSON sibling") {
    const auto dir = std::filesystem::temp_directory_path() / "fbindex_report_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_reports({sample(), sample()}, path);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
    }
    auto json_path = path;
    json_path += ".json";
    const auto back = read_reports_json(json_path);
    REQUIRE(back.size() == 2);
    CHECK(to_json(back[1]) == to_json(sample()));

    std::ofstream(dir / "broken.json") << "[{\"name\": 1";
    CHECK_THROWS_AS(read_reports_json(dir / "broken.json"), ParseError);
    CHECK_THROWS_AS(read_reports_json(dir / "missing.json"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
