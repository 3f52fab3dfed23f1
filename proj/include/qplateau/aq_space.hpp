#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace qp {

using Vec = Eigen::VectorXd;

// An unordered q-tuple of points in R^n. The stored order is an
// implementation detail; every operation treats the tuple as a multiset.
struct QValue {
    std::vector<Vec> points;

    QValue() = default;
    explicit QValue(std::vector<Vec> pts) : points(std::move(pts)) {}

    int q() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }

    static QValue constant(int q, const Vec& p);
    // All q points stacked; used for scale estimates.
    double max_norm() const;
};

// A pairing between two QValues: slot i of the first value pairs with slot
// perm[i] of the second. cost is the sum of squared point distances under
// the pairing.
struct Matching {
    std::vector<int> perm;
    double cost = 0.0;

    bool is_identity() const;
};

std::vector<int> inverse_perm(const std::vector<int>& p);
std::vector<int> compose_perm(const std::vector<int>& outer, const std::vector<int>& inner);
// Lengths >= 2 of the cycles of p, sorted descending; empty for the identity.
std::vector<int> cycle_type(const std::vector<int>& p);

// min over permutations sigma of sqrt(sum_i |a_i - b_sigma(i)|^2).
double metric_g(const QValue& a, const QValue& b);

// The argmin of metric_g. Exact (shortest augmenting path on the squared
// distance matrix); ties broken toward the lexicographically smallest
// permutation so results are reproducible.
Matching optimal_matching(const QValue& a, const QValue& b);

// Minimum pairwise distance among the stored points; 0 if any point
// repeats, +inf when q == 1.
double separation(const QValue& a);

// Cluster points within tol into support atoms; counts sum to q. Each atom
// is represented by the mean of its members.
std::vector<std::pair<Vec, int>> support_multiplicity(const QValue& a, double tol);

// Exact min-cost assignment of a dense square cost matrix. Returns the
// lexicographically smallest optimal column-for-row assignment.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost, double* achieved = nullptr);

}  // namespace qp
