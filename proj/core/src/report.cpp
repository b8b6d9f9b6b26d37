#include "fbindex/report.hpp"

#include "fbindex/common.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fbindex {

std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::Within: return "within";
        case Relation::LessEqual: return "le";
        case Relation::GreaterEqual: return "ge";
        case Relation::Less: return "lt";
        case Relation::Greater: return "gt";
    }
    return "within";
}

Relation parse_relation(std::string_view s) {
    if (s == "within") return Relation::Within;
    if (s == "le") return Relation::LessEqual;
    if (s == "ge") return Relation::GreaterEqual;
    if (s == "lt") return Relation::Less;
    if (s == "gt") return Relation::Greater;
    throw ParseError("unknown relation '" + std::string(s) + "'", 0);
}

bool Check::evaluate(double computed, double target, Relation relation, double tolerance) {
    if (!std::isfinite(computed)) return false;
    switch (relation) {
        case Relation::Within: return std::abs(computed - target) <= tolerance;
        case Relation::LessEqual: return computed <= target + tolerance;
        case Relation::GreaterEqual: return computed >= target - tolerance;
        case Relation::Less: return computed < target;
        case Relation::Greater: return computed > target;
    }
    return false;
}

void ExperimentReport::input(std::string key, std::string value) { inputs.emplace_back(std::move(key), std::move(value)); }

void ExperimentReport::input(std::string key, double value) { inputs.emplace_back(std::move(key), format_number(value)); }

void ExperimentReport::value(std::string key, double v) { computed.emplace_back(std::move(key), v); }

bool ExperimentReport::check(std::string check_name, double value, double target, Relation relation,
                             double tol, std::string provenance) {
    const bool ok = Check::evaluate(value, target, relation, tol);
    checks.push_back({std::move(check_name), value, target, relation, tol, std::move(provenance), ok});
    return ok;
}

bool ExperimentReport::require(std::string check_name, bool condition, std::string provenance) {
    return check(std::move(check_name), condition ? 1.0 : 0.0, 1.0, Relation::Within, 0.0, std::move(provenance));
}

void ExperimentReport::note(std::string text) { notes.push_back(std::move(text)); }

void ExperimentReport::finalize() {
    pass = !checks.empty();
    for (const auto& c : checks) pass = pass && c.pass;
}

std::optional<double> ExperimentReport::find_value(std::string_view key) const {
    for (const auto& [k, v] : computed) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_text(const ExperimentReport& r, bool with_timing) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "name = " << r.name << '\n';
    os << "pass = " << (r.pass ? "true" : "false") << '\n';
    os << "tolerance = " << format_number(r.tolerance) << '\n';
    if (with_timing) os << "runtime_ms = " << r.runtime_ms << '\n';
    if (r.seed) os << "seed = " << *r.seed << '\n';
    os << "[inputs]\n";
    for (const auto& [k, v] : r.inputs) os << k << " = " << v << '\n';
    os << "[computed]\n";
    for (const auto& [k, v] : r.computed) os << k << " = " << format_number(v) << '\n';
    os << "[checks]\n";
    for (const auto& c : r.checks) {
        os << c.name << " = " << (c.pass ? "PASS" : "FAIL") << " computed=" << format_number(c.computed)
           << " target=" << format_number(c.target) << " relation=" << to_string(c.relation)
           << " tolerance=" << format_number(c.tolerance) << " provenance=" << c.provenance << '\n';
    }
    if (!r.notes.empty()) {
        os << "[notes]\n";
        for (const auto& n : r.notes) os << "note = " << n << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const ExperimentReport& r, bool with_timing) {
    nlohmann::json j;
    j["name"] = r.name;
    j["pass"] = r.pass;
    j["tolerance"] = r.tolerance;
    if (with_timing) j["runtime_ms"] = r.runtime_ms;
    if (r.seed) j["seed"] = *r.seed;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [k, v] : r.inputs) j["inputs"].push_back({{"key", k}, {"value", v}});
    j["computed"] = nlohmann::json::array();
    for (const auto& [k, v] : r.computed) j["computed"].push_back({{"key", k}, {"value", v}});
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"computed", c.computed},
                               {"target", c.target},
                               {"relation", std::string(to_string(c.relation))},
                               {"tolerance", c.tolerance},
                               {"provenance", c.provenance},
                               {"pass", c.pass}});
    }
    j["notes"] = r.notes;
    return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    try {
        ExperimentReport r;
        r.name = j.at("name").get<std::string>();
        r.pass = j.at("pass").get<bool>();
        r.tolerance = j.at("tolerance").get<double>();
        r.runtime_ms = j.value("runtime_ms", std::int64_t{0});
        if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("inputs")) r.inputs.emplace_back(e.at("key"), e.at("value"));
        for (const auto& e : j.at("computed")) r.computed.emplace_back(e.at("key"), e.at("value").get<double>());
        for (const auto& c : j.at("checks")) {
            r.checks.push_back({c.at("name"), c.at("computed").get<double>(), c.at("target").get<double>(),
                                parse_relation(c.at("relation").get<std::string>()), c.at("tolerance").get<double>(),
                                c.at("provenance"), c.at("pass").get<bool>()});
        }
        r.notes = j.at("notes").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what(), 0);
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << contents;
        os.flush();
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_reports(const std::vector<ExperimentReport>& reports, const std::filesystem::path& path,
                   bool with_timing) {
    std::string text;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        text += to_text(r, with_timing);
        text += '\n';
        arr.push_back(to_json(r, with_timing));
    }
    write_file_atomic(path, text);
    auto json_path = path;
    json_path += ".json";
    write_file_atomic(json_path, arr.dump(2) + "\n");
}

std::vector<ExperimentReport> read_reports_json(const std::filesystem::path& json_path) {
    std::ifstream is(json_path);
    if (!is) throw std::runtime_error("cannot open " + json_path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what(), 0);
    }
    std::vector<ExperimentReport> out;
    for (const auto& e : j) out.push_back(report_from_json(e));
    return out;
}

}  // namespace fbindex
