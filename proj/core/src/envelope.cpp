#include "fbindex/envelope.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

namespace fbindex {

namespace {

using Adjacency = std::vector<std::vector<int>>;

Adjacency adjacency_of(const SparseMatrix& a) {
    const int n = static_cast<int>(a.rows());
    Adjacency adj(static_cast<std::size_t>(n));
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (row != col) {
                adj[row].push_back(col);
                adj[col].push_back(row);
            }
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

// BFS levels from root restricted to unvisited vertices; returns the level
// structure (vertices in visit order) and the eccentricity.
std::vector<std::vector<int>> level_structure(const Adjacency& adj, int root, const std::vector<char>& done) {
    std::vector<std::vector<int>> levels{{root}};
    std::vector<char> seen(done);
    seen[root] = 1;
    while (true) {
        std::vector<int> next;
        for (int v : levels.back()) {
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
            }
        }
        if (next.empty()) break;
        levels.push_back(std::move(next));
    }
    return levels;
}

int pseudo_peripheral(const Adjacency& adj, int start, const std::vector<char>& done) {
    int root = start;
    auto levels = level_structure(adj, root, done);
    while (true) {
        const auto& last = levels.back();
        const int candidate = *std::min_element(last.begin(), last.end(), [&](int a, int b) {
            return std::pair(adj[a].size(), a) < std::pair(adj[b].size(), b);
        });
        auto trial = level_structure(adj, candidate, done);
        if (trial.size() <= levels.size()) return root;
        root = candidate;
        levels = std::move(trial);
    }
}

}  // namespace

std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a) {
    const int n = static_cast<int>(a.rows());
    const Adjacency adj = adjacency_of(a);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    std::vector<int> by_degree(static_cast<std::size_t>(n));
    std::iota(by_degree.begin(), by_degree.end(), 0);
    std::stable_sort(by_degree.begin(), by_degree.end(),
                     [&](int x, int y) { return adj[x].size() < adj[y].size(); });
    for (int seed : by_degree) {
        if (done[seed]) continue;
        const int root = pseudo_peripheral(adj, seed, done);
        std::deque<int> queue{root};
        done[root] = 1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            std::vector<int> next;
            for (int w : adj[v]) {
                if (!done[w]) next.push_back(w);
            }
            std::sort(next.begin(), next.end(),
                      [&](int x, int y) { return std::pair(adj[x].size(), x) < std::pair(adj[y].size(), y); });
            for (int w : next) {
                done[w] = 1;
                queue.push_back(w);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

EnvelopeMatrix::EnvelopeMatrix(const SparseMatrix& a, std::span<const int> perm) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || static_cast<int>(perm.size()) != n) {
        throw ArgumentError("EnvelopeMatrix: matrix must be square and match the permutation");
    }
    std::vector<int> inv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    first_.resize(static_cast<std::size_t>(n));
    std::iota(first_.begin(), first_.end(), 0);
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const int i = inv[it.row()], j = inv[col];
            const int hi = std::max(i, j), lo = std::min(i, j);
            first_[hi] = std::min(first_[hi], lo);
        }
    }
    for (int i = n - 2; i >= 0; --i) first_[i] = std::min(first_[i], first_[i + 1]);
    offset_.resize(static_cast<std::size_t>(n) + 1);
    offset_[0] = 0;
    for (int i = 0; i < n; ++i) offset_[i + 1] = offset_[i] + static_cast<std::size_t>(i - first_[i] + 1);
    values_.assign(offset_[n], 0.0);
    last_.resize(static_cast<std::size_t>(n));
    int row = 0;
    for (int k = 0; k < n; ++k) {
        row = std::max(row, k);
        while (row + 1 < n && first_[row + 1] <= k) ++row;
        last_[k] = row;
    }
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const int i = inv[it.row()], j = inv[col];
            if (i >= j) at(i, j) += it.value();
        }
    }
}

int EnvelopeMatrix::bandwidth() const {
    int bw = 0;
    for (int i = 0; i < size(); ++i) bw = std::max(bw, i - first_[i]);
    return bw;
}

Inertia ldlt_inertia(const SparseMatrix& a) {
    const std::vector<int> perm = reverse_cuthill_mckee(a);
    EnvelopeMatrix env(a, perm);
    const int n = env.size();
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    Inertia inertia;
    auto classify = [&](double d) {
        if (d > 0.0) ++inertia.positive;
        else if (d < 0.0) ++inertia.negative;
        else ++inertia.zero;
    };
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    int k = 0;
    while (k < n) {
        const double akk = env.at(k, k);
        const int last = env.last_row(k);
        double sigma = 0.0;
        for (int i = k + 1; i <= last; ++i) sigma = std::max(sigma, std::abs(env.at(i, k)));

        bool two_by_two = false;
        double b = 0.0, c = 0.0, det = 0.0;
        if (!(std::abs(akk) >= alpha * sigma && akk != 0.0) && k + 1 < n) {
            b = env.in_envelope(k + 1, k) ? env.at(k + 1, k) : 0.0;
            c = env.at(k + 1, k + 1);
            det = akk * c - b * b;
            const double scale = std::abs(akk) + 2.0 * std::abs(b) + std::abs(c);
            two_by_two = std::abs(det) > eps * scale * scale || (akk == 0.0 && det != 0.0);
        }

        if (!two_by_two) {
            if (akk == 0.0) {
                if (sigma != 0.0) {
                    throw NumericalError("LDLt breakdown: singular pivot at position " + std::to_string(k) +
                                         " (original index " + std::to_string(perm[k]) + ")");
                }
                ++inertia.zero;
                ++k;
                continue;
            }
            classify(akk);
            for (int i = k + 1; i <= last; ++i) x[i] = env.at(i, k);
            for (int i = k + 1; i <= last; ++i) {
                const double li = x[i] / akk;
                if (li == 0.0) continue;
                for (int j = k + 1; j <= i; ++j) env.at(i, j) -= li * x[j];
            }
            ++k;
            continue;
        }

        // 2x2 block pivot on (k, k+1)
        if (det < 0.0) {
            ++inertia.negative;
            ++inertia.positive;
        } else {
            classify(akk + c);
            classify(akk + c);
        }
        const int last2 = env.last_row(k + 1);
        for (int i = k + 2; i <= last2; ++i) {
            x[i] = env.in_envelope(i, k) ? env.at(i, k) : 0.0;
            y[i] = env.at(i, k + 1);
        }
        for (int i = k + 2; i <= last2; ++i) {
            // (l_i0, l_i1) = (x_i, y_i) D⁻¹
            const double l0 = (c * x[i] - b * y[i]) / det;
            const double l1 = (akk * y[i] - b * x[i]) / det;
            if (l0 == 0.0 && l1 == 0.0) continue;
            for (int j = k + 2; j <= i; ++j) env.at(i, j) -= l0 * x[j] + l1 * y[j];
        }
        k += 2;
    }
    return inertia;
}

EnvelopeCholesky::EnvelopeCholesky(const SparseMatrix& a)
    : perm_(reverse_cuthill_mckee(a)), factor_(a, perm_) {
    const int n = factor_.size();
    for (int k = 0; k < n; ++k) {
        const double akk = factor_.at(k, k);
        if (!(akk > 0.0)) {
            throw StabilityViolation("matrix is not positive definite (pivot " + std::to_string(k) + " = " +
                                     std::to_string(akk) + ")");
        }
        const double lkk = std::sqrt(akk);
        factor_.at(k, k) = lkk;
        const int last = factor_.last_row(k);
        for (int i = k + 1; i <= last; ++i) factor_.at(i, k) /= lkk;
        for (int i = k + 1; i <= last; ++i) {
            const double lik = factor_.at(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j <= i; ++j) factor_.at(i, j) -= lik * factor_.at(j, k);
        }
    }
}

std::vector<double> EnvelopeCholesky::solve(std::span<const double> rhs) const {
    const int n = size();
    if (static_cast<int>(rhs.size()) != n) throw ArgumentError("EnvelopeCholesky::solve: size mismatch");
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[i] = rhs[perm_[i]];
    for (int i = 0; i < n; ++i) {
        double s = y[i];
        for (int j = factor_.first(i); j < i; ++j) s -= factor_.at(i, j) * y[j];
        y[i] = s / factor_.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        y[i] /= factor_.at(i, i);
        const double xi = y[i];
        for (int j = factor_.first(i); j < i; ++j) y[j] -= factor_.at(i, j) * xi;
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[perm_[i]] = y[i];
    return out;
}

}  // namespace fbindex
