#pragma once

// The acceptance suite shared by the test binary and `fbindex verify`.

#include "fbindex/report.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fbindex {

struct Criterion {
    int id = 0;
    std::string title;
    double budget_seconds = 0.0;
    std::function<std::vector<ExperimentReport>()> run;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::vector<ExperimentReport> reports;
    std::string error;  // set when the run threw
};

// Seed of the random fields in the trace-inequality criterion.
inline constexpr std::uint64_t kDefaultTraceSeed = 20240601;

std::vector<Criterion> acceptance_criteria(std::uint64_t trace_seed = kDefaultTraceSeed);

// Worker count: FBINDEX_THREADS if set (>= 1), else the hardware concurrency.
int thread_cap();

// Runs the selected criteria (all when `ids` is empty) on up to `threads`
// workers; results come back in id order.
std::vector<CriterionResult> run_acceptance(std::span<const int> ids, int threads,
                                            std::uint64_t trace_seed = kDefaultTraceSeed);

// "criterion 3 PASS 1.23s/60s hairpin index ..." — one line per criterion.
std::string summary_line(const CriterionResult& result);

}  // namespace fbindex
