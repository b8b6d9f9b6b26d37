#pragma once

// P1 finite elements for the second-variation form
//
//   Q(φ, φ) = ∫ |∇φ|² dx − ∫_FREE H φ² dℋ¹,   φ = 0 on DIRICHLET edges.
//
// All element integrals are exact for P1 data; H is interpolated linearly
// along each FREE edge from its endpoint values.

#include "fbindex/envelope.hpp"
#include "fbindex/mesh.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace fbindex {

struct AssembledForms {
    SparseMatrix stiffness;  // A_ij = ∫ ∇φ_i·∇φ_j, all vertices
    SparseMatrix mass;       // M_ij = ∫ φ_i φ_j, all vertices
    SparseMatrix robin;      // B_ij = ∫_FREE H φ_i φ_j, all vertices

    std::vector<int> free_dofs;      // vertex id of each unconstrained dof
    std::vector<int> dof_of_vertex;  // dof index, or -1 on DIRICHLET vertices

    SparseMatrix K;       // (A − B) restricted to free_dofs
    SparseMatrix M_free;  // M restricted to free_dofs

    int dimension() const { return static_cast<int>(free_dofs.size()); }

    std::vector<double> restrict_to_free(std::span<const double> per_vertex) const;
    std::vector<double> extend_from_free(std::span<const double> per_dof, double fill = 0.0) const;
};

Eigen::Matrix3d element_stiffness(Vec2 a, Vec2 b, Vec2 c);
Eigen::Matrix3d element_mass(Vec2 a, Vec2 b, Vec2 c);
// ∫ (linear H) φ_i φ_j over an edge of length ℓ with endpoint weights h1, h2:
// (ℓ/12)·[[3h1+h2, h1+h2], [h1+h2, h1+3h2]].
Eigen::Matrix2d robin_edge_matrix(double length, double h1, double h2);

// Throws NumericalError on a triangle with area below 1e-14.
AssembledForms assemble(const TriMesh& mesh);

// Unit-weight boundary mass ∫_tag φ_i φ_j over edges with the given tag.
SparseMatrix assemble_trace_mass(const TriMesh& mesh, EdgeTag tag = EdgeTag::Free);

// Vertices touching a DIRICHLET edge.
std::vector<char> dirichlet_vertices(const TriMesh& mesh);

struct PoissonRobinSolution {
    std::vector<double> values;  // per vertex, Dirichlet data on constrained vertices
    double relative_residual = 0.0;
};

// Solves the weak problem Q(v, ψ) = ∫ f ψ for all admissible ψ, with
// v = dirichlet_data on DIRICHLET vertices. `load` and `dirichlet_data`
// are per vertex (the latter is read only on constrained vertices); the
// load integral uses the consistent mass matrix.
//
// Throws StabilityViolation when K is not positive definite, which is the
// discrete statement that λ₁ <= 0 on the subdomain.
PoissonRobinSolution solve_poisson_robin(const TriMesh& mesh, const AssembledForms& forms,
                                         std::span<const double> load, std::span<const double> dirichlet_data);

// Row-sum (infinity) norm.
double inf_norm(const SparseMatrix& a);

// Coordinate dump: one `i j value` triplet per line, 0-based, sorted by (i, j).
void write_coordinate(std::ostream& os, const SparseMatrix& a);

}  // namespace fbindex
