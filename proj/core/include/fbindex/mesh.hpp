#pragma once

// Structured triangulations of truncated positive phases.
//
// Boundary edges carry a tag: FREE edges lie on the free boundary and carry
// the Robin weight H at both endpoints; DIRICHLET edges are artificial
// truncation cuts where test functions vanish.
//
// File format (one record per line, whitespace separated, 0-based indices):
//
//   fbmesh 1
//   v x y
//   t i j k            counterclockwise
//   e i j TAG h_i h_j  TAG in {FREE, DIRICHLET}

#include "fbindex/common.hpp"
#include "fbindex/solutions.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace fbindex {

enum class EdgeTag { Free, Dirichlet };

std::string_view to_string(EdgeTag tag);

struct BoundaryEdge {
    std::array<int, 2> v{};      // oriented with the owning triangle on the left
    EdgeTag tag = EdgeTag::Dirichlet;
    std::array<double, 2> h{};   // mean curvature at v[0], v[1]; zero on DIRICHLET
};

struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
};

// Snaps the midpoint of a FREE edge to the exact free boundary and returns
// the point together with the exact mean curvature there.
struct BoundarySnap {
    Vec2 point;
    double mean_curvature = 0.0;
};
using FreeBoundaryProjector = std::function<BoundarySnap(Vec2 a, Vec2 b)>;

// Exact projector for the free boundary of `kind` (the unit circle serves
// both DiskComplement and the Q0 disk).
FreeBoundaryProjector projector_for(SolutionKind kind);

// ---------------------------------------------------------------------------
// Generators. All are deterministic.

// {1 <= |z| <= R} with n_r uniform radial layers and n_theta angular
// sectors. r = 1 is FREE (H = 1), r = R is DIRICHLET.
TriMesh annulus_mesh(double R, int n_r, int n_theta);

// {r_in <= |z| <= r_out}. `inner` selects the tag on r = r_in; the outer
// circle is always DIRICHLET. FREE inner edges require r_in = 1.
TriMesh annulus_mesh(double r_in, double r_out, int n_r, int n_theta, EdgeTag inner);

// Unit disk: a center vertex and n_rings concentric rings, ring k at
// radius k/n_rings holding 8k vertices. Boundary is FREE with H = 1.
// Vertex count 1 + 4·n(n+1), triangle count 8n².
TriMesh disk_mesh(int n_rings);

// Hairpin truncation: strip rectangle [-S, S] x [-π/2, π/2] gridded n_s x n_t
// and mapped through Φ. Im w = ±π/2 is FREE, Re w = ±S is DIRICHLET.
TriMesh hairpin_mesh(double S, int n_s, int n_t);

// Hairpin arm between strip cuts Re w = s_lo and Re w = s_hi (both DIRICHLET).
TriMesh hairpin_strip_mesh(double s_lo, double s_hi, int n_s, int n_t);

// Plane truncation: rectangle [0, L] x [-L, L] on an n x 2n grid. The
// segment x = 0 is FREE with H = 0; the other three sides are DIRICHLET.
TriMesh plane_mesh(double L, int n);

// Uniform red refinement. FREE-edge midpoints are snapped by `projector`
// and receive its exact curvature; tags are inherited.
TriMesh refine(const TriMesh& mesh, const FreeBoundaryProjector& projector);

// ---------------------------------------------------------------------------
// Diagnostics.

// Throws ArgumentError describing the first violated structural invariant
// (index range, orientation, boundary consistency, DIRICHLET curvature).
void validate(const TriMesh& mesh);

double min_angle_degrees(const TriMesh& mesh);
double total_area(const TriMesh& mesh);
double boundary_length(const TriMesh& mesh, EdgeTag tag);
int edge_count(const TriMesh& mesh);
// V - E + F with F counting triangles only.
int euler_characteristic(const TriMesh& mesh);
int count_edges(const TriMesh& mesh, EdgeTag tag);

// ---------------------------------------------------------------------------
// I/O.

void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);
void store(const TriMesh& mesh, const std::filesystem::path& path);
TriMesh load(const std::filesystem::path& path);

}  // namespace fbindex
