#include "fbindex/cli.hpp"

#include "fbindex/acceptance.hpp"
#include "fbindex/disk_oracle.hpp"
#include "fbindex/experiments.hpp"
#include "fbindex/fem.hpp"
#include "fbindex/mesh.hpp"
#include "fbindex/report.hpp"
#include "fbindex/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace fbindex::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCommands[] = {"index", "oracle", "verify", "mesh", "dump-matrices"};

constexpr const char* kFooter = R"(Commands:
  index          discrete Morse index (inertia of K) of one truncated solution
  oracle         mesh-free negative spectrum of the disk form Q0 (needs --disk)
  verify         acceptance criteria: --all, or criterion ids 1..9
  mesh           write a truncation mesh (--out, else standard output)
  dump-matrices  write K, M and the free-dof map in coordinate form to --out.*

Geometry defaults: disk-complement R=4 nr=32 ntheta=128; hairpin S=3 nt=16
ns=2*ceil(S*nt/pi); plane L=--radius=4, n=--nr=16. --nrings selects the Q0 disk.

Exit codes: 0 pass, 1 experiment failure, 2 argument error, 3 numerical error.
Environment: FBINDEX_THREADS caps the verify worker count.)";

struct RunConfig {
    std::string command;
    std::string solution;
    double radius = 4.0;
    double strip_cut = 3.0;
    int nr = 0;
    int ntheta = 128;
    int ns = 0;
    int nt = 16;
    int nrings = 0;
    double zero_tol = kDefaultZeroTol;
    std::uint64_t seed = kDefaultTraceSeed;
    std::string out;
    bool json = false;
    bool all = false;
    bool disk = false;
    std::vector<int> criteria;

    std::set<std::string> given;  // long flag names present on the command line
    bool has(const std::string& flag) const { return given.count(flag) > 0; }
};

const std::set<std::string>& allowed_flags(const std::string& command) {
    static const std::set<std::string> geometry{"solution", "radius", "strip-cut", "nr", "ntheta", "ns", "nt"};
    static const std::map<std::string, std::set<std::string>> table = [] {
        std::map<std::string, std::set<std::string>> t;
        t["index"] = geometry;
        t["index"].insert({"zero-tol", "out", "json"});
        t["oracle"] = {"disk", "out", "json"};
        t["verify"] = {"all", "seed", "out", "json"};
        t["mesh"] = geometry;
        t["mesh"].insert({"nrings", "out", "json"});
        t["dump-matrices"] = t["mesh"];
        return t;
    }();
    return table.at(command);
}

void check_applicable(const RunConfig& c) {
    const auto& ok = allowed_flags(c.command);
    for (const auto& f : c.given) {
        if (!ok.count(f)) throw ArgumentError("--" + f + " does not apply to '" + c.command + "'");
    }
    if (!c.criteria.empty() && c.command != "verify") {
        throw ArgumentError("positional arguments are only accepted by 'verify'");
    }
    if (!c.out.empty()) {
        const auto parent = std::filesystem::path(c.out).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent)) {
            throw ArgumentError("--out: directory " + parent.string() + " does not exist");
        }
    }
}

struct Geometry {
    TriMesh mesh;
    std::optional<SolutionKind> kind;  // empty for the Q0 disk
    Json params = Json::object();
    std::string label;
};

void forbid(const RunConfig& c, std::initializer_list<const char*> flags, const std::string& why) {
    for (const char* f : flags) {
        if (c.has(f)) throw ArgumentError("--" + std::string(f) + " does not apply to " + why);
    }
}

void require_positive(double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string("--") + flag + " must be positive");
}

Geometry build_geometry(const RunConfig& c) {
    Geometry g;
    if (c.has("nrings")) {
        forbid(c, {"solution", "radius", "strip-cut", "nr", "ntheta", "ns", "nt"}, "the Q0 disk (--nrings)");
        if (c.nrings < 1) throw ArgumentError("--nrings must be >= 1");
        g.mesh = disk_mesh(c.nrings);
        g.params = {{"nrings", c.nrings}};
        g.label = "disk";
        return g;
    }
    if (!c.has("solution")) throw ArgumentError("--solution is required (or --nrings for the Q0 disk)");
    const SolutionKind kind = parse_solution_kind(c.solution);
    g.kind = kind;
    g.label = c.solution;
    switch (kind) {
        case SolutionKind::DiskComplement: {
            forbid(c, {"strip-cut", "ns", "nt"}, "disk-complement");
            const int nr = c.has("nr") ? c.nr : 32;
            if (!(c.radius > 1.0)) throw ArgumentError("--radius must exceed 1 for disk-complement");
            if (nr < 1 || c.ntheta < 3) throw ArgumentError("--nr must be >= 1 and --ntheta >= 3");
            g.mesh = annulus_mesh(c.radius, nr, c.ntheta);
            g.params = {{"radius", c.radius}, {"nr", nr}, {"ntheta", c.ntheta}};
            break;
        }
        case SolutionKind::Hairpin: {
            forbid(c, {"radius", "nr", "ntheta"}, "hairpin");
            require_positive(c.strip_cut, "strip-cut");
            if (c.nt < 2) throw ArgumentError("--nt must be >= 2");
            const int ns = c.has("ns") ? c.ns : 2 * static_cast<int>(std::ceil(c.strip_cut * c.nt / kPi));
            if (ns < 1) throw ArgumentError("--ns must be >= 1");
            g.mesh = hairpin_mesh(c.strip_cut, ns, c.nt);
            g.params = {{"strip_cut", c.strip_cut}, {"ns", ns}, {"nt", c.nt}};
            break;
        }
        case SolutionKind::Plane: {
            forbid(c, {"strip-cut", "ntheta", "ns", "nt"}, "plane");
            require_positive(c.radius, "radius");
            const int n = c.has("nr") ? c.nr : 16;
            if (n < 1) throw ArgumentError("--nr must be >= 1");
            g.mesh = plane_mesh(c.radius, n);
            g.params = {{"side", c.radius}, {"n", n}};
            break;
        }
    }
    return g;
}

// Text mode prints `key=value` lines, JSON mode one object.
void emit(std::ostream& out, const RunConfig& c, const Json& fields) {
    if (c.json) {
        out << fields.dump(2) << '\n';
        return;
    }
    for (const auto& [k, v] : fields.items()) {
        if (v.is_number_float()) {
            out << k << '=' << format_number(v.get<double>()) << '\n';
        } else if (v.is_string()) {
            out << k << '=' << v.get<std::string>() << '\n';
        } else {
            out << k << '=' << v.dump() << '\n';
        }
    }
}

void maybe_write(const RunConfig& c, const std::vector<ExperimentReport>& reports) {
    if (!c.out.empty()) write_reports(reports, c.out);
}

int cmd_index(const RunConfig& c, std::ostream& out) {
    if (!(c.zero_tol >= 0.0)) throw ArgumentError("--zero-tol must be nonnegative");
    const auto t0 = std::chrono::steady_clock::now();
    const Geometry g = build_geometry(c);
    const AssembledForms forms = assemble(g.mesh);
    const Inertia in = morse_index(forms, c.zero_tol);
    const double lambda1 = lowest_eigenvalue(forms, 1e-10);

    ExperimentReport r;
    r.name = "index/" + g.label;
    r.input("solution", g.label);
    for (const auto& [k, v] : g.params.items()) r.input(k, v.is_number_integer() ? v.dump() : format_number(v.get<double>()));
    r.input("zero_tol", c.zero_tol);
    r.value("dofs", forms.dimension());
    r.value("negative", in.negative);
    r.value("zero", in.zero);
    r.value("positive", in.positive);
    r.value("lambda1", lambda1);
    // Any truncation of a solution of index i has discrete index at most i.
    const int terminal = *g.kind == SolutionKind::Plane ? 0 : 1;
    r.check("index_at_most_terminal", in.negative, terminal, Relation::LessEqual, 0.0, "domain monotonicity");
    r.check("lambda1_sign_matches_inertia", (lambda1 < 0.0) == (in.negative > 0) ? 1.0 : 0.0, 1.0, Relation::Within,
            0.0, "Sylvester");
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    r.finalize();
    maybe_write(c, {r});

    Json j;
    j["solution"] = g.label;
    for (const auto& [k, v] : g.params.items()) j[k] = v;
    j["dofs"] = forms.dimension();
    j["negative"] = in.negative;
    j["zero"] = in.zero;
    j["positive"] = in.positive;
    j["lambda1"] = lambda1;
    j["index"] = in.negative;
    emit(out, c, j);
    return r.pass ? kExitPass : kExitFailure;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
    if (!c.disk) throw ArgumentError("oracle needs --disk (the only mesh-free spectrum available)");
    const auto t0 = std::chrono::steady_clock::now();
    const auto neg = negative_eigenvalues_q0();
    int index = 0;
    for (const auto& e : neg) index += e.multiplicity;

    ExperimentReport r;
    r.name = "oracle/disk";
    Json j;
    Json list = Json::array();
    for (const auto& e : neg) {
        const std::string key = "lambda[k=" + std::to_string(e.k) + "]";
        r.value(key, e.lambda);
        r.value("multiplicity[k=" + std::to_string(e.k) + "]", e.multiplicity);
        list.push_back({{"k", e.k}, {"lambda", e.lambda}, {"multiplicity", e.multiplicity}});
    }
    r.value("index", index);
    r.check("index", index, 1.0, Relation::Within, 0.0, "Bessel secular equation, modes k <= 50");
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    r.finalize();
    maybe_write(c, {r});

    if (c.json) {
        j["negative_eigenvalues"] = list;
        j["index"] = index;
        emit(out, c, j);
    } else {
        for (const auto& e : neg) {
            out << "lambda=" << format_number(e.lambda) << " k=" << e.k << " multiplicity=" << e.multiplicity << '\n';
        }
        out << "index=" << index << '\n';
    }
    return r.pass ? kExitPass : kExitFailure;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    if (c.all == !c.criteria.empty()) throw ArgumentError("verify needs either --all or criterion ids");
    for (int id : c.criteria) {
        if (id < 1 || id > 9) throw ArgumentError("criterion ids run from 1 to 9");
    }
    const auto results = run_acceptance(c.criteria, thread_cap(), c.seed);
    std::vector<ExperimentReport> reports;
    bool pass = true;
    Json list = Json::array();
    for (const auto& res : results) {
        pass = pass && res.pass;
        reports.insert(reports.end(), res.reports.begin(), res.reports.end());
        if (c.json) {
            list.push_back({{"id", res.id},
                            {"title", res.title},
                            {"pass", res.pass},
                            {"seconds", res.seconds},
                            {"budget_seconds", res.budget_seconds},
                            {"error", res.error}});
        } else {
            out << summary_line(res) << '\n';
        }
    }
    maybe_write(c, reports);
    const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    if (c.json) {
        Json j;
        j["criteria"] = list;
        j["passed"] = passed;
        j["total"] = results.size();
        j["pass"] = pass;
        out << j.dump(2) << '\n';
    } else {
        out << "verify=" << (pass ? "PASS" : "FAIL") << ' ' << passed << '/' << results.size() << '\n';
    }
    return pass ? kExitPass : kExitFailure;
}

Json mesh_summary(const Geometry& g) {
    Json j;
    j["solution"] = g.label;
    for (const auto& [k, v] : g.params.items()) j[k] = v;
    j["vertices"] = g.mesh.vertex_count();
    j["triangles"] = g.mesh.triangle_count();
    j["free_edges"] = count_edges(g.mesh, EdgeTag::Free);
    j["dirichlet_edges"] = count_edges(g.mesh, EdgeTag::Dirichlet);
    j["min_angle_deg"] = min_angle_degrees(g.mesh);
    return j;
}

int cmd_mesh(const RunConfig& c, std::ostream& out) {
    const Geometry g = build_geometry(c);
    validate(g.mesh);
    if (c.out.empty()) {
        write_mesh(out, g.mesh);
        return kExitPass;
    }
    std::ostringstream os;
    write_mesh(os, g.mesh);
    write_file_atomic(c.out, os.str());
    Json j = mesh_summary(g);
    j["out"] = c.out;
    emit(out, c, j);
    return kExitPass;
}

int cmd_dump(const RunConfig& c, std::ostream& out) {
    if (c.out.empty()) throw ArgumentError("dump-matrices needs --out PREFIX");
    const Geometry g = build_geometry(c);
    const AssembledForms forms = assemble(g.mesh);
    auto dump = [&](const std::string& suffix, auto&& writer) {
        std::ostringstream os;
        writer(os);
        const std::string path = c.out + suffix;
        write_file_atomic(path, os.str());
        return path;
    };
    Json j = mesh_summary(g);
    j["dofs"] = forms.dimension();
    j["K"] = dump(".K.txt", [&](std::ostream& os) { write_coordinate(os, forms.K); });
    j["M"] = dump(".M.txt", [&](std::ostream& os) { write_coordinate(os, forms.M_free); });
    j["dofs_map"] = dump(".dofs.txt", [&](std::ostream& os) {
        for (std::size_t i = 0; i < forms.free_dofs.size(); ++i) os << i << ' ' << forms.free_dofs[i] << '\n';
    });
    emit(out, c, j);
    return kExitPass;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Morse index laboratory for one-phase free boundary solutions", "fbindex"};
    app.footer(kFooter);
    app.add_option("command", c.command, "index | oracle | verify | mesh | dump-matrices")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands), std::end(kCommands))));
    app.add_option("criteria", c.criteria, "verify: criterion ids (1-9)");
    app.add_option("--solution", c.solution, "plane | disk-complement | hairpin")
        ->check(CLI::IsMember({"plane", "disk-complement", "hairpin"}));
    app.add_option("--radius", c.radius, "outer radius R (disk-complement), side L (plane)");
    app.add_option("--strip-cut", c.strip_cut, "hairpin strip cut S, |Re w| <= S");
    app.add_option("--nr", c.nr, "radial layers (disk-complement), grid n (plane)");
    app.add_option("--ntheta", c.ntheta, "angular sectors (disk-complement)");
    app.add_option("--ns", c.ns, "hairpin cells along the strip");
    app.add_option("--nt", c.nt, "hairpin cells across the strip");
    app.add_option("--nrings", c.nrings, "Q0 disk mesh with this many rings (mesh, dump-matrices)");
    app.add_option("--zero-tol", c.zero_tol, "relative zero window, |lambda| < tol*||K||_inf");
    app.add_option("--seed", c.seed, "seed for the random trace-inequality fields (verify)");
    app.add_option("--out", c.out, "report path (+ .json sibling), mesh file, or matrix prefix");
    app.add_flag("--json", c.json, "machine-readable standard output");
    app.add_flag("--all", c.all, "verify: every acceptance criterion");
    app.add_flag("--disk", c.disk, "oracle: the disk form Q0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->count() > 0 && !opt->get_lnames().empty() && !opt->get_positional()) {
            c.given.insert(opt->get_lnames().front());
        }
    }

    try {
        check_applicable(c);
        if (c.command == "index") return cmd_index(c, out);
        if (c.command == "oracle") return cmd_oracle(c, out);
        if (c.command == "verify") return cmd_verify(c, out);
        if (c.command == "mesh") return cmd_mesh(c, out);
        return cmd_dump(c, out);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"fbindex"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fbindex::cli
