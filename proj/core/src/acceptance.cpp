#include "fbindex/acceptance.hpp"

#include "fbindex/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace fbindex {

namespace {

// The core collar is expected to fail; the report records that it did.
ExperimentReport expect_stability_violation(const JacobiCollar& c) {
    ExperimentReport r;
    r.name = "jacobi_core_collar/" + std::string(to_string(c.kind));
    r.input("lo", c.lo);
    r.input("hi", c.hi);
    const auto t0 = std::chrono::steady_clock::now();
    bool raised = false;
    try {
        jacobi_field_positivity(c);
    } catch (const StabilityViolation& e) {
        raised = true;
        r.note(e.what());
    }
    r.require("stability_violation_raised", raised, "instability core inside the collar");
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    r.finalize();
    return r;
}

}  // namespace

std::vector<Criterion> acceptance_criteria(std::uint64_t trace_seed) {
    const double e = std::exp(1.0);
    return {
        {1, "disk form Q0 has index 1", 10.0,
         [] {
             const int levels[] = {8, 16, 32};
             return std::vector{disk_index(levels)};
         }},
        {2, "index 1 for the disk complement, 0 for the plane; critical radius e", 60.0,
         [e] {
             const double radii[] = {2.0, 2.5, e, 3.0, 4.0, 8.0};
             const double sides[] = {1.0, 2.0, 4.0, 8.0};
             return std::vector{index_vs_truncation(SolutionKind::DiskComplement, radii, 1.0 / 8.0),
                                index_vs_truncation(SolutionKind::Plane, sides, 0.25), critical_radius_bracket()};
         }},
        {3, "hairpin index 1", 60.0,
         [] {
             const double cuts[] = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0};
             return std::vector{index_vs_truncation(SolutionKind::Hairpin, cuts, kPi / 16.0)};
         }},
        {4, "conformal equivalence Q = Q0", 10.0,
         [] {
             std::vector<ExperimentReport> out;
             for (auto kind : {SolutionKind::DiskComplement, SolutionKind::Hairpin}) {
                 out.push_back(conformal_equivalence(kind, default_test_functions(kind)));
             }
             return out;
         }},
        {5, "total curvature 2*pi and the logarithmic cutoff bound", 5.0,
         [] {
             const double radii[] = {10.0, 100.0, 1000.0};
             return std::vector{curvature_cutoff_bound(SolutionKind::DiskComplement, 2.0, radii),
                                curvature_cutoff_bound(SolutionKind::Hairpin, 2.0, radii)};
         }},
        {6, "sign of the first eigenfunction, strict eigenvalue monotonicity", 30.0,
         [] {
             const int plane[] = {4, 6, 8, 10, 12};
             const int annulus[] = {5, 10, 15, 20, 25};
             const int hairpin[] = {4, 8, 12, 16, 20};
             return std::vector{eigenvalue_monotonicity(SolutionKind::Plane, plane, 0.25),
                                eigenvalue_monotonicity(SolutionKind::DiskComplement, annulus, 0.2),
                                eigenvalue_monotonicity(SolutionKind::Hairpin, hairpin, kPi / 16.0)};
         }},
        {7, "P1 convergence of lambda_1(Q0) against the Bessel root", 60.0,
         [] {
             const int levels[] = {8, 16, 32};
             return std::vector{fem_convergence(levels)};
         }},
        {8, "trace inequality with O(h) slack", 10.0,
         [trace_seed] {
             return std::vector{
                 trace_inequality(truncation_mesh(SolutionKind::DiskComplement, 4.0, 0.25), "annulus_R4", 100, trace_seed),
                 trace_inequality(truncation_mesh(SolutionKind::Hairpin, 3.0, kPi / 16.0), "hairpin_S3", 100, trace_seed),
                 trace_inequality(truncation_mesh(SolutionKind::Plane, 2.0, 0.125), "plane_L2", 100, trace_seed)};
         }},
        {9, "positive Jacobi field on stable collars", 20.0,
         [] {
             return std::vector{
                 jacobi_field_positivity({SolutionKind::Hairpin, 1.5, 4.0, 40, 16}),
                 jacobi_field_positivity({SolutionKind::DiskComplement, 2.0, 8.0, 24, 64}),
                 expect_stability_violation({SolutionKind::Hairpin, -4.0, 4.0, 80, 16})};
         }},
    };
}

int thread_cap() {
    if (const char* env = std::getenv("FBINDEX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids, int threads, std::uint64_t trace_seed) {
    std::vector<Criterion> selected;
    for (auto& c : acceptance_criteria(trace_seed)) {
        if (ids.empty() || std::find(ids.begin(), ids.end(), c.id) != ids.end()) selected.push_back(std::move(c));
    }
    for (int id : ids) {
        if (std::none_of(selected.begin(), selected.end(), [id](const Criterion& c) { return c.id == id; })) {
            throw ArgumentError("unknown acceptance criterion " + std::to_string(id));
        }
    }
    std::vector<CriterionResult> results(selected.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < selected.size(); i = next++) {
            const Criterion& c = selected[i];
            CriterionResult& out = results[i];
            out.id = c.id;
            out.title = c.title;
            out.budget_seconds = c.budget_seconds;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                out.reports = c.run();
            } catch (const std::exception& ex) {
                out.error = ex.what();
            }
            out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.pass = out.error.empty() && !out.reports.empty() && out.seconds <= out.budget_seconds &&
                       std::all_of(out.reports.begin(), out.reports.end(), [](const auto& r) { return r.pass; });
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(selected.size())));
    {
        std::vector<std::jthread> pool;
        for (int i = 1; i < n; ++i) pool.emplace_back(worker);
        worker();
    }
    return results;
}

std::string summary_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %d %s %.2fs/%.0fs ", r.id, r.pass ? "PASS" : "FAIL", r.seconds,
                  r.budget_seconds);
    std::string line = head + r.title;
    if (!r.error.empty()) line += " [error: " + r.error + "]";
    if (r.seconds > r.budget_seconds) line += " [over time budget]";
    for (const auto& rep : r.reports) {
        if (rep.pass) continue;
        for (const auto& c : rep.checks) {
            if (!c.pass) line += " [" + rep.name + ": " + c.name + "]";
        }
    }
    return line;
}

}  // namespace fbindex
