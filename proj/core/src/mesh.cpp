#include "fbindex/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace fbindex {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key_of(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_area(const TriMesh& m, const std::array<int, 3>& t) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    return 0.5 * cross(b - a, c - a);
}

// Boundary edges of a triangle set, oriented as they occur in their
// (counterclockwise) triangle, in first-seen order.
std::vector<std::array<int, 2>> collect_boundary(const std::vector<std::array<int, 3>>& triangles) {
    std::map<EdgeKey, int> count;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) ++count[key_of(t[e], t[(e + 1) % 3])];
    }
    std::vector<std::array<int, 2>> out;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            if (count[key_of(a, b)] == 1) out.push_back({a, b});
        }
    }
    return out;
}

void orient_ccw(TriMesh& m) {
    for (auto& t : m.triangles) {
        if (signed_area(m, t) < 0.0) std::swap(t[1], t[2]);
    }
}

// Rectangular (n1+1) x (n2+1) grid of parameter nodes, vertex id i*(n2+1)+j,
// each cell split along its (i,j)-(i+1,j+1) diagonal. `periodic2` wraps j.
std::vector<std::array<int, 3>> grid_triangles(int n1, int n2, bool periodic2) {
    const int stride = periodic2 ? n2 : n2 + 1;
    auto id = [&](int i, int j) { return i * stride + (periodic2 ? j % n2 : j); };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * n1 * n2));
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return tris;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(EdgeTag tag) { return tag == EdgeTag::Free ? "FREE" : "DIRICHLET"; }

FreeBoundaryProjector projector_for(SolutionKind kind) {
    switch (kind) {
        case SolutionKind::Plane:
            return [](Vec2 a, Vec2 b) { return BoundarySnap{{0.0, 0.5 * (a.y + b.y)}, 0.0}; };
        case SolutionKind::DiskComplement:
            return [](Vec2 a, Vec2 b) {
                const Vec2 m = (a + b) * 0.5;
                const double r = norm(m);
                return BoundarySnap{m * (1.0 / r), 1.0};
            };
        case SolutionKind::Hairpin:
            // on the catenaries x equals the boundary parameter s
            return [](Vec2 a, Vec2 b) {
                const double s = 0.5 * (a.x + b.x);
                const int branch = (a.y + b.y) > 0.0 ? 0 : 1;
                const BoundaryPoint p = boundary_param(SolutionKind::Hairpin, branch, s);
                return BoundarySnap{p.point, p.mean_curvature};
            };
    }
    throw ArgumentError("unknown solution kind");
}

TriMesh annulus_mesh(double R, int n_r, int n_theta) {
    if (!(R > 1.0)) throw ArgumentError("annulus_mesh: R must exceed 1");
    return annulus_mesh(1.0, R, n_r, n_theta, EdgeTag::Free);
}

TriMesh annulus_mesh(double r_in, double r_out, int n_r, int n_theta, EdgeTag inner) {
    if (!(r_in > 0.0) || !(r_out > r_in)) throw ArgumentError("annulus_mesh: need 0 < r_in < r_out");
    if (n_r < 2) throw ArgumentError("annulus_mesh: n_r must be at least 2");
    if (n_theta < 8) throw ArgumentError("annulus_mesh: n_theta must be at least 8");
    if (inner == EdgeTag::Free && r_in != 1.0) {
        throw ArgumentError("annulus_mesh: a FREE inner circle must be the unit circle");
    }
    TriMesh m;
    m.vertices.reserve(static_cast<std::size_t>((n_r + 1) * n_theta));
    const double dr = (r_out - r_in) / n_r;
    for (int i = 0; i <= n_r; ++i) {
        const double r = i == n_r ? r_out : r_in + i * dr;
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * kPi * j / n_theta;
            m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    m.triangles = grid_triangles(n_r, n_theta, true);
    orient_ccw(m);
    for (const auto& e : collect_boundary(m.triangles)) {
        const bool on_inner = e[0] < n_theta;
        const EdgeTag tag = on_inner ? inner : EdgeTag::Dirichlet;
        const double h = tag == EdgeTag::Free ? 1.0 : 0.0;
        m.boundary_edges.push_back({e, tag, {h, h}});
    }
    return m;
}

TriMesh disk_mesh(int n_rings) {
    if (n_rings < 1) throw ArgumentError("disk_mesh: n_rings must be at least 1");
    TriMesh m;
    m.vertices.push_back({0.0, 0.0});
    std::vector<int> ring_start{0};
    for (int k = 1; k <= n_rings; ++k) {
        ring_start.push_back(m.vertex_count());
        const double r = static_cast<double>(k) / n_rings;
        const int n = 8 * k;
        for (int j = 0; j < n; ++j) {
            const double th = 2.0 * kPi * j / n;
            m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    for (int k = 1; k <= n_rings; ++k) {
        const int n = 8 * k;
        const int m_in = k == 1 ? 1 : 8 * (k - 1);
        auto outer = [&](int j) { return ring_start[k] + j % n; };
        auto inner = [&](int i) { return k == 1 ? 0 : ring_start[k - 1] + i % m_in; };
        if (k == 1) {
            for (int j = 0; j < n; ++j) m.triangles.push_back({0, outer(j), outer(j + 1)});
            continue;
        }
        // zipper between rings; compares angles (i+1)/m_in and (j+1)/n exactly
        int i = 0, j = 0;
        while (i < m_in || j < n) {
            const long long next_in = static_cast<long long>(i + 1) * n;
            const long long next_out = static_cast<long long>(j + 1) * m_in;
            if (j < n && (i == m_in || next_out <= next_in)) {
                m.triangles.push_back({inner(i), outer(j), outer(j + 1)});
                ++j;
            } else {
                m.triangles.push_back({inner(i), outer(j), inner(i + 1)});
                ++i;
            }
        }
    }
    orient_ccw(m);
    for (const auto& e : collect_boundary(m.triangles)) {
        m.boundary_edges.push_back({e, EdgeTag::Free, {1.0, 1.0}});
    }
    return m;
}

TriMesh hairpin_strip_mesh(double s_lo, double s_hi, int n_s, int n_t) {
    if (!(s_hi > s_lo)) throw ArgumentError("hairpin_strip_mesh: need s_lo < s_hi");
    if (std::abs(s_lo) > kMaxStripReal || std::abs(s_hi) > kMaxStripReal) {
        throw ArgumentError("hairpin_strip_mesh: strip cuts must satisfy |s| <= 25");
    }
    if (n_s < 1 || n_t < 1) throw ArgumentError("hairpin_strip_mesh: n_s and n_t must be positive");
    TriMesh m;
    const double ds = (s_hi - s_lo) / n_s;
    const double dt = kPi / n_t;
    std::vector<double> s_of_vertex;
    for (int i = 0; i <= n_s; ++i) {
        const double s = i == n_s ? s_hi : s_lo + i * ds;
        for (int j = 0; j <= n_t; ++j) {
            if (j == 0 || j == n_t) {
                m.vertices.push_back(boundary_param(SolutionKind::Hairpin, j == n_t ? 0 : 1, s).point);
            } else {
                const double t = -kHalfPi + j * dt;
                m.vertices.push_back(to_vec(strip_map({s, t}).z));
            }
            s_of_vertex.push_back(s);
        }
    }
    m.triangles = grid_triangles(n_s, n_t, false);
    orient_ccw(m);
    const int stride = n_t + 1;
    for (const auto& e : collect_boundary(m.triangles)) {
        const int j0 = e[0] % stride, j1 = e[1] % stride;
        const bool free = (j0 == j1) && (j0 == 0 || j0 == n_t);
        if (free) {
            const double h0 = 1.0 / std::pow(std::cosh(s_of_vertex[e[0]]), 2);
            const double h1 = 1.0 / std::pow(std::cosh(s_of_vertex[e[1]]), 2);
            m.boundary_edges.push_back({e, EdgeTag::Free, {h0, h1}});
        } else {
            m.boundary_edges.push_back({e, EdgeTag::Dirichlet, {0.0, 0.0}});
        }
    }
    return m;
}

TriMesh hairpin_mesh(double S, int n_s, int n_t) {
    if (!(S > 0.0) || S > kMaxStripReal) throw ArgumentError("hairpin_mesh: S must lie in (0, 25]");
    return hairpin_strip_mesh(-S, S, n_s, n_t);
}

TriMesh plane_mesh(double L, int n) {
    if (!(L > 0.0)) throw ArgumentError("plane_mesh: L must be positive");
    if (n < 1) throw ArgumentError("plane_mesh: n must be positive");
    TriMesh m;
    const double h = L / n;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= 2 * n; ++j) m.vertices.push_back({i * h, -L + j * h});
    }
    m.triangles = grid_triangles(n, 2 * n, false);
    orient_ccw(m);
    const int stride = 2 * n + 1;
    for (const auto& e : collect_boundary(m.triangles)) {
        const bool free = e[0] < stride && e[1] < stride;
        m.boundary_edges.push_back({e, free ? EdgeTag::Free : EdgeTag::Dirichlet, {0.0, 0.0}});
    }
    return m;
}

TriMesh refine(const TriMesh& mesh, const FreeBoundaryProjector& projector) {
    TriMesh out;
    out.vertices = mesh.vertices;
    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto [it, inserted] = midpoint.try_emplace(key_of(a, b), out.vertex_count());
        if (inserted) out.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
        return it->second;
    };
    out.triangles.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    for (const auto& e : mesh.boundary_edges) {
        const int m = midpoint.at(key_of(e.v[0], e.v[1]));
        double hm = 0.0;
        if (e.tag == EdgeTag::Free) {
            const BoundarySnap snap = projector(mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
            out.vertices[m] = snap.point;
            hm = snap.mean_curvature;
        }
        out.boundary_edges.push_back({{e.v[0], m}, e.tag, {e.h[0], hm}});
        out.boundary_edges.push_back({{m, e.v[1]}, e.tag, {hm, e.h[1]}});
    }
    return out;
}

void validate(const TriMesh& mesh) {
    const int nv = mesh.vertex_count();
    std::map<EdgeKey, std::vector<std::array<int, 2>>> uses;
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        for (int v : t) {
            if (v < 0 || v >= nv) throw ArgumentError("triangle " + std::to_string(ti) + " has an out-of-range vertex");
        }
        if (!(signed_area(mesh, t) > 0.0)) {
            throw ArgumentError("triangle " + std::to_string(ti) + " is not counterclockwise");
        }
        for (int e = 0; e < 3; ++e) uses[key_of(t[e], t[(e + 1) % 3])].push_back({t[e], t[(e + 1) % 3]});
    }
    std::map<EdgeKey, int> tagged;
    for (std::size_t bi = 0; bi < mesh.boundary_edges.size(); ++bi) {
        const auto& be = mesh.boundary_edges[bi];
        const auto it = uses.find(key_of(be.v[0], be.v[1]));
        if (it == uses.end() || it->second.size() != 1) {
            throw ArgumentError("boundary edge " + std::to_string(bi) + " does not belong to exactly one triangle");
        }
        if (it->second.front() != be.v) {
            throw ArgumentError("boundary edge " + std::to_string(bi) + " is not oriented with its triangle");
        }
        if (be.tag == EdgeTag::Dirichlet && (be.h[0] != 0.0 || be.h[1] != 0.0)) {
            throw ArgumentError("DIRICHLET edge " + std::to_string(bi) + " carries nonzero curvature");
        }
        if (++tagged[key_of(be.v[0], be.v[1])] > 1) {
            throw ArgumentError("boundary edge " + std::to_string(bi) + " is tagged twice");
        }
    }
    for (const auto& [k, list] : uses) {
        if (list.size() > 2) throw ArgumentError("edge shared by more than two triangles");
        if (list.size() == 1 && !tagged.contains(k)) throw ArgumentError("untagged boundary edge");
        if (list.size() == 2 && list[0] == list[1]) throw ArgumentError("inconsistent triangle orientation");
    }
}

double min_angle_degrees(const TriMesh& mesh) {
    double best = 180.0;
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = mesh.vertices[t[k]];
            const Vec2 a = mesh.vertices[t[(k + 1) % 3]] - p, b = mesh.vertices[t[(k + 2) % 3]] - p;
            const double ang = std::atan2(std::abs(cross(a, b)), dot(a, b));
            best = std::min(best, ang * 180.0 / kPi);
        }
    }
    return best;
}

double total_area(const TriMesh& mesh) {
    double a = 0.0;
    for (const auto& t : mesh.triangles) a += signed_area(mesh, t);
    return a;
}

double boundary_length(const TriMesh& mesh, EdgeTag tag) {
    double len = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag == tag) len += norm(mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]]);
    }
    return len;
}

int edge_count(const TriMesh& mesh) {
    std::map<EdgeKey, int> edges;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) edges[key_of(t[e], t[(e + 1) % 3])] = 1;
    }
    return static_cast<int>(edges.size());
}

int euler_characteristic(const TriMesh& mesh) {
    return mesh.vertex_count() - edge_count(mesh) + mesh.triangle_count();
}

int count_edges(const TriMesh& mesh, EdgeTag tag) {
    return static_cast<int>(std::count_if(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                                          [tag](const BoundaryEdge& e) { return e.tag == tag; }));
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
    os << "fbmesh 1\n";
    for (const Vec2& v : mesh.vertices) os << "v " << format_double(v.x) << ' ' << format_double(v.y) << '\n';
    for (const auto& t : mesh.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges) {
        os << "e " << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.tag) << ' ' << format_double(e.h[0]) << ' '
           << format_double(e.h[1]) << '\n';
    }
}

TriMesh read_mesh(std::istream& is) {
    TriMesh m;
    std::string line;
    int lineno = 0;
    bool header = false;
    enum class Section { Vertices, Triangles, Edges } section = Section::Vertices;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& msg) -> ParseError { return ParseError(msg, lineno); };
        auto expect_end = [&] {
            std::string rest;
            if (ls >> rest) throw fail("trailing token '" + rest + "'");
        };
        if (!header) {
            int version = 0;
            if (kw != "fbmesh" || !(ls >> version) || version != 1) throw fail("expected header 'fbmesh 1'");
            expect_end();
            header = true;
            continue;
        }
        if (kw == "v") {
            if (section != Section::Vertices) throw fail("vertex record after triangles or edges");
            Vec2 p;
            if (!(ls >> p.x >> p.y)) throw fail("malformed vertex record");
            expect_end();
            m.vertices.push_back(p);
        } else if (kw == "t") {
            if (section == Section::Edges) throw fail("triangle record after edges");
            section = Section::Triangles;
            std::array<int, 3> t{};
            if (!(ls >> t[0] >> t[1] >> t[2])) throw fail("malformed triangle record");
            expect_end();
            for (int v : t) {
                if (v < 0 || v >= m.vertex_count()) throw fail("triangle vertex index out of range");
            }
            if (!(signed_area(m, t) > 0.0)) throw fail("triangle is not counterclockwise");
            m.triangles.push_back(t);
        } else if (kw == "e") {
            section = Section::Edges;
            BoundaryEdge e;
            std::string tag;
            if (!(ls >> e.v[0] >> e.v[1] >> tag >> e.h[0] >> e.h[1])) throw fail("malformed edge record");
            expect_end();
            if (tag == "FREE") {
                e.tag = EdgeTag::Free;
            } else if (tag == "DIRICHLET") {
                e.tag = EdgeTag::Dirichlet;
            } else {
                throw fail("unknown edge tag '" + tag + "'");
            }
            for (int v : e.v) {
                if (v < 0 || v >= m.vertex_count()) throw fail("edge vertex index out of range");
            }
            m.boundary_edges.push_back(e);
        } else {
            throw fail("unknown record '" + kw + "'");
        }
    }
    if (!header) throw ParseError("missing header 'fbmesh 1'", lineno);
    try {
        validate(m);
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("invalid mesh: ") + e.what(), 0);
    }
    return m;
}

void store(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_mesh(os, mesh);
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

TriMesh load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_mesh(is);
}

}  // namespace fbindex
