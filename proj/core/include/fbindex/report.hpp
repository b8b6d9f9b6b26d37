#pragma once

// Structured record of one verification experiment, with a line-oriented
// `key = value` text form and a JSON sibling.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fbindex {

enum class Relation {
    Within,        // |computed − target| <= tolerance
    LessEqual,     // computed <= target + tolerance
    GreaterEqual,  // computed >= target − tolerance
    Less,          // computed < target
    Greater,       // computed > target
};

std::string_view to_string(Relation r);
Relation parse_relation(std::string_view s);

struct Check {
    std::string name;
    double computed = 0.0;
    double target = 0.0;
    Relation relation = Relation::Within;
    double tolerance = 0.0;
    std::string provenance;  // where the target comes from: "exact", "oracle", "bound", ...
    bool pass = false;

    static bool evaluate(double computed, double target, Relation relation, double tolerance);
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, double>> computed;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    std::optional<std::uint64_t> seed;
    double tolerance = 0.0;  // headline tolerance of the experiment
    bool pass = false;
    std::int64_t runtime_ms = 0;

    void input(std::string key, std::string value);
    void input(std::string key, double value);
    void value(std::string key, double v);
    // Adds a check and returns its outcome.
    bool check(std::string name, double computed, double target, Relation relation, double tolerance,
               std::string provenance);
    bool require(std::string name, bool condition, std::string provenance);
    void note(std::string text);
    // pass = every check passed (and at least one check exists).
    void finalize();

    std::optional<double> find_value(std::string_view key) const;
};

std::string format_number(double v);

// Wall-clock runtime is left out unless asked for, so identical runs give
// identical files.
std::string to_text(const ExperimentReport& report, bool with_timing = false);
nlohmann::json to_json(const ExperimentReport& report, bool with_timing = false);
ExperimentReport report_from_json(const nlohmann::json& j);

// Writes `<path>` (text, all reports) and `<path>.json` atomically via
// temporary files and rename.
void write_reports(const std::vector<ExperimentReport>& reports, const std::filesystem::path& path,
                   bool with_timing = false);
std::vector<ExperimentReport> read_reports_json(const std::filesystem::path& json_path);

// Writes text to path through a temporary sibling and std::filesystem::rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fbindex
