#include "qplateau/aq_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qp {

QValue QValue::constant(int q, const Vec& p) {
    QValue v;
    v.points.assign(q, p);
    return v;
}

double QValue::max_norm() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.norm());
    return m;
}

bool Matching::is_identity() const {
    for (int i = 0; i < static_cast<int>(perm.size()); ++i)
        if (perm[i] != i) return false;
    return true;
}

std::vector<int> inverse_perm(const std::vector<int>& p) {
    std::vector<int> inv(p.size());
    for (int i = 0; i < static_cast<int>(p.size()); ++i) inv[p[i]] = i;
    return inv;
}

std::vector<int> compose_perm(const std::vector<int>& outer, const std::vector<int>& inner) {
    std::vector<int> r(inner.size());
    for (int i = 0; i < static_cast<int>(inner.size()); ++i) r[i] = outer[inner[i]];
    return r;
}

std::vector<int> cycle_type(const std::vector<int>& p) {
    std::vector<char> seen(p.size(), 0);
    std::vector<int> cycles;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        if (seen[i]) continue;
        int len = 0, j = i;
        while (!seen[j]) {
            seen[j] = 1;
            j = p[j];
            ++len;
        }
        if (len >= 2) cycles.push_back(len);
    }
    std::sort(cycles.rbegin(), cycles.rend());
    return cycles;
}

namespace {

void check_compatible(const QValue& a, const QValue& b) {
    if (a.q() != b.q())
        throw std::invalid_argument("QValue multiplicity mismatch: " + std::to_string(a.q()) +
                                    " vs " + std::to_string(b.q()));
    if (a.q() == 0) throw std::invalid_argument("empty QValue");
    if (a.dim() != b.dim())
        throw std::invalid_argument("QValue dimension mismatch: " + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()));
}

// Jonker-Volgenant style shortest augmenting path. Exact for the given
// matrix up to floating point; O(q^3).
std::vector<int> jv_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, n);  // p[j] = row assigned to column j (n = none)
    std::vector<int> way(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        int j0 = n;
        p[n] = i;
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    std::vector<int> perm(n);
    for (int j = 0; j < n; ++j)
        if (p[j] < n) perm[p[j]] = j;
    return perm;
}

// Depth-first search in lexicographic column order for the smallest
// assignment whose cost stays within `bound`. The caller supplies a bound
// realized by some assignment, so the search always succeeds; pruning uses
// the sum of per-row minima over the still-free columns.
bool lexmin_dfs(const Eigen::MatrixXd& cost, int row, double partial, double bound,
                std::vector<char>& used, std::vector<int>& out) {
    const int n = static_cast<int>(cost.rows());
    if (row == n) return partial <= bound;
    // optimistic completion bound for rows > row
    double tail = 0.0;
    for (int r = row + 1; r < n; ++r) {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (!used[j]) m = std::min(m, cost(r, j));
        tail += m;
    }
    for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double c = partial + cost(row, j);
        if (c + tail > bound) continue;
        used[j] = 1;
        out[row] = j;
        if (lexmin_dfs(cost, row + 1, c, bound, used, out)) return true;
        used[j] = 0;
    }
    return false;
}

}  // namespace

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* achieved) {
    const int n = static_cast<int>(cost.rows());
    if (n == 0) throw std::invalid_argument("empty cost matrix");
    if (cost.cols() != n) throw std::invalid_argument("cost matrix must be square");
    if (n == 1) {
        if (achieved) *achieved = cost(0, 0);
        return {0};
    }
    std::vector<int> perm = jv_assignment(cost);
    double best = 0.0;
    for (int i = 0; i < n; ++i) best += cost(i, perm[i]);
    // Lexicographic refinement among (numerically) equal-cost optima.
    const double bound = best + 1e-12 * std::max(1.0, std::abs(best));
    std::vector<char> used(n, 0);
    std::vector<int> lex(n, 0);
    if (lexmin_dfs(cost, 0, 0.0, bound, used, lex)) perm = lex;
    if (achieved) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
        *achieved = c;
    }
    return perm;
}

Matching optimal_matching(const QValue& a, const QValue& b) {
    check_compatible(a, b);
    const int q = a.q();
    Eigen::MatrixXd cost(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) cost(i, j) = (a.points[i] - b.points[j]).squaredNorm();
    Matching m;
    m.perm = solve_assignment(cost, &m.cost);
    return m;
}

double metric_g(const QValue& a, const QValue& b) {
    return std::sqrt(std::max(0.0, optimal_matching(a, b).cost));
}

double separation(const QValue& a) {
    const int q = a.q();
    if (q <= 1) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) m = std::min(m, (a.points[i] - a.points[j]).norm());
    return m;
}

std::vector<std::pair<Vec, int>> support_multiplicity(const QValue& a, double tol) {
    if (tol < 0) throw std::invalid_argument("support_multiplicity: tol must be >= 0");
    const int q = a.q();
    // union-find over points; pairs within tol share an atom
    std::vector<int> parent(q);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            if ((a.points[i] - a.points[j]).norm() <= tol) parent[find(i)] = find(j);
    std::vector<std::pair<Vec, int>> atoms;
    std::vector<int> atom_of(q, -1);
    for (int i = 0; i < q; ++i) {
        int r = find(i);
        if (atom_of[r] < 0) {
            atom_of[r] = static_cast<int>(atoms.size());
            atoms.emplace_back(Vec::Zero(a.points[i].size()), 0);
        }
        auto& atom = atoms[atom_of[r]];
        atom.first += a.points[i];
        atom.second += 1;
    }
    for (auto& atom : atoms) atom.first /= atom.second;
    return atoms;
}

}  // namespace qp
