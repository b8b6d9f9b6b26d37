#include "fbindex/fem.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

namespace fbindex {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int n, const Triplets& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

SparseMatrix restrict_matrix(const SparseMatrix& a, const std::vector<int>& dof_of_vertex, int n_free) {
    Triplets t;
    for (int col = 0; col < a.outerSize(); ++col) {
        const int jc = dof_of_vertex[col];
        if (jc < 0) continue;
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const int ir = dof_of_vertex[it.row()];
            if (ir >= 0) t.emplace_back(ir, jc, it.value());
        }
    }
    return from_triplets(n_free, t);
}

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

std::vector<double> AssembledForms::restrict_to_free(std::span<const double> per_vertex) const {
    if (per_vertex.size() != dof_of_vertex.size()) throw ArgumentError("restrict_to_free: size mismatch");
    std::vector<double> out(free_dofs.size());
    for (std::size_t d = 0; d < free_dofs.size(); ++d) out[d] = per_vertex[free_dofs[d]];
    return out;
}

std::vector<double> AssembledForms::extend_from_free(std::span<const double> per_dof, double fill) const {
    if (per_dof.size() != free_dofs.size()) throw ArgumentError("extend_from_free: size mismatch");
    std::vector<double> out(dof_of_vertex.size(), fill);
    for (std::size_t d = 0; d < free_dofs.size(); ++d) out[free_dofs[d]] = per_dof[d];
    return out;
}

Eigen::Matrix3d element_stiffness(Vec2 a, Vec2 b, Vec2 c) {
    const double area = triangle_area(a, b, c);
    // ∇λ_i = rot90(opposite edge) / (2·area)
    const std::array<Vec2, 3> e{c - b, a - c, b - a};
    Eigen::Matrix3d k;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) k(i, j) = dot(e[i], e[j]) / (4.0 * area);
    }
    return k;
}

Eigen::Matrix3d element_mass(Vec2 a, Vec2 b, Vec2 c) {
    const double area = triangle_area(a, b, c);
    Eigen::Matrix3d m = Eigen::Matrix3d::Constant(area / 12.0);
    m.diagonal().setConstant(area / 6.0);
    return m;
}

Eigen::Matrix2d robin_edge_matrix(double length, double h1, double h2) {
    Eigen::Matrix2d m;
    m << 3.0 * h1 + h2, h1 + h2, h1 + h2, h1 + 3.0 * h2;
    return m * (length / 12.0);
}

std::vector<char> dirichlet_vertices(const TriMesh& mesh) {
    std::vector<char> fixed(mesh.vertices.size(), 0);
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag == EdgeTag::Dirichlet) fixed[e.v[0]] = fixed[e.v[1]] = 1;
    }
    return fixed;
}

AssembledForms assemble(const TriMesh& mesh) {
    const int n = mesh.vertex_count();
    Triplets ta, tm, tb;
    ta.reserve(mesh.triangles.size() * 9);
    tm.reserve(mesh.triangles.size() * 9);
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        const Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        if (triangle_area(a, b, c) < 1e-14) {
            throw NumericalError("assembly error: degenerate triangle " + std::to_string(ti));
        }
        const Eigen::Matrix3d ke = element_stiffness(a, b, c);
        const Eigen::Matrix3d me = element_mass(a, b, c);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ta.emplace_back(t[i], t[j], ke(i, j));
                tm.emplace_back(t[i], t[j], me(i, j));
            }
        }
    }
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag != EdgeTag::Free) continue;
        const double len = norm(mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]]);
        const Eigen::Matrix2d be = robin_edge_matrix(len, e.h[0], e.h[1]);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) tb.emplace_back(e.v[i], e.v[j], be(i, j));
        }
    }

    AssembledForms f;
    f.stiffness = from_triplets(n, ta);
    f.mass = from_triplets(n, tm);
    f.robin = from_triplets(n, tb);

    const std::vector<char> fixed = dirichlet_vertices(mesh);
    f.dof_of_vertex.assign(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        if (!fixed[v]) {
            f.dof_of_vertex[v] = static_cast<int>(f.free_dofs.size());
            f.free_dofs.push_back(v);
        }
    }
    const SparseMatrix k_full = f.stiffness - f.robin;
    f.K = restrict_matrix(k_full, f.dof_of_vertex, f.dimension());
    f.M_free = restrict_matrix(f.mass, f.dof_of_vertex, f.dimension());
    return f;
}

SparseMatrix assemble_trace_mass(const TriMesh& mesh, EdgeTag tag) {
    Triplets t;
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag != tag) continue;
        const double len = norm(mesh.vertices[e.v[1]] - mesh.vertices[e.v[0]]);
        const Eigen::Matrix2d be = robin_edge_matrix(len, 1.0, 1.0);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) t.emplace_back(e.v[i], e.v[j], be(i, j));
        }
    }
    return from_triplets(mesh.vertex_count(), t);
}

PoissonRobinSolution solve_poisson_robin(const TriMesh& mesh, const AssembledForms& forms,
                                         std::span<const double> load, std::span<const double> dirichlet_data) {
    const auto nv = static_cast<std::size_t>(mesh.vertex_count());
    if (load.size() != nv || dirichlet_data.size() != nv || forms.dof_of_vertex.size() != nv) {
        throw ArgumentError("solve_poisson_robin: per-vertex arrays must match the mesh");
    }
    const Eigen::Map<const Eigen::VectorXd> f(load.data(), static_cast<Eigen::Index>(nv));
    Eigen::VectorXd lift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
    for (std::size_t v = 0; v < nv; ++v) {
        if (forms.dof_of_vertex[v] < 0) lift[static_cast<Eigen::Index>(v)] = dirichlet_data[v];
    }
    const SparseMatrix k_full = forms.stiffness - forms.robin;
    const Eigen::VectorXd rhs_full = forms.mass * f - k_full * lift;

    std::vector<double> rhs(forms.free_dofs.size());
    for (std::size_t d = 0; d < rhs.size(); ++d) rhs[d] = rhs_full[forms.free_dofs[d]];

    PoissonRobinSolution out;
    out.values.assign(lift.data(), lift.data() + nv);
    if (rhs.empty()) return out;

    const EnvelopeCholesky chol(forms.K);
    const std::vector<double> v = chol.solve(rhs);
    for (std::size_t d = 0; d < v.size(); ++d) out.values[forms.free_dofs[d]] = v[d];

    const Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::Map<const Eigen::VectorXd> rr(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const double rhs_norm = rr.norm();
    out.relative_residual = rhs_norm > 0.0 ? (forms.K * vv - rr).norm() / rhs_norm : (forms.K * vv).norm();
    return out;
}

double inf_norm(const SparseMatrix& a) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) rows[it.row()] += std::abs(it.value());
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

void write_coordinate(std::ostream& os, const SparseMatrix& a) {
    std::vector<std::pair<std::pair<int, int>, double>> entries;
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            entries.push_back({{static_cast<int>(it.row()), col}, it.value()});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    char buf[48];
    for (const auto& [ij, v] : entries) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << ij.first << ' ' << ij.second << ' ' << buf << '\n';
    }
}

}  // namespace fbindex
