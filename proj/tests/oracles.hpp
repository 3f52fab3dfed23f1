#pragma once

// Independent reference computations for the test suites. Nothing here may
// call into the implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// Brute-force assignment minimum over all permutations, lexicographically
// first among ties.
inline double brute_force_min_cost(const Eigen::MatrixXd& cost, std::vector<int>* arg = nullptr) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_perm = perm;
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
        if (c < best) {
            best = c;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (arg) *arg = best_perm;
    return best;
}

inline double brute_force_metric(const std::vector<Eigen::VectorXd>& a,
                                 const std::vector<Eigen::VectorXd>& b) {
    const int n = static_cast<int>(a.size());
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = (a[i] - b[j]).squaredNorm();
    return std::sqrt(brute_force_min_cost(cost));
}

// Tensor-product Gauss-Legendre quadrature of f(r, theta) * r over
// [0, 1] x [0, 2 pi), with nr x nt panels of fixed 4-point rules.
inline double polar_quadrature(const std::function<double(double, double)>& f, int nr, int nt) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    const double two_pi = 2.0 * M_PI;
    double total = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r0 = static_cast<double>(i) / nr, r1 = static_cast<double>(i + 1) / nr;
        for (int j = 0; j < nt; ++j) {
            const double t0 = two_pi * j / nt, t1 = two_pi * (j + 1) / nt;
            for (int a = 0; a < 4; ++a) {
                const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gx[a];
                for (int b = 0; b < 4; ++b) {
                    const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gx[b];
                    total += gw[a] * gw[b] * 0.25 * (r1 - r0) * (t1 - t0) * f(r, t) * r;
                }
            }
        }
    }
    return total;
}

// int_D |z|^-1 dA; analytic value 2 pi, but computed by quadrature so the
// solver convergence tests rest on an independent number.
inline double sqrt_z_energy_reference() {
    return polar_quadrature([](double r, double) { return 1.0 / r; }, 512, 16);
}

// Dirichlet energy of the two-sheeted w = sqrt(z^2 - c) field over the unit
// disk: each sheet contributes 2 |w'|^2 = 2 |z|^2 / |z^2 - c|, so the pair
// integrates 4 |z|^2 / |z^2 - c|. The singularities at +-sqrt(c) are
// integrable; fine radial panels keep the fixed rule accurate.
inline double variety_energy_reference(double c, int nr = 2048, int nt = 64) {
    return polar_quadrature(
        [c](double r, double t) {
            const std::complex<double> z = std::polar(r, t);
            const double denom = std::abs(z * z - c);
            return denom > 0 ? 4.0 * r * r / denom : 0.0;
        },
        nr, nt);
}

// Same field including the graph coordinate x -> (x, w(x)): each of the two
// sheets adds |D id|^2 = 2 on top, i.e. 4 pi over the disk.
inline double variety_graph_energy_reference(double c) {
    return 4.0 * M_PI + variety_energy_reference(c);
}

// Monte Carlo area of triangle-disk intersection (geometry oracle).
inline double mc_triangle_disk_area(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                    const Eigen::Vector2d& p2, const Eigen::Vector2d& c, double r,
                                    int samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hit = 0;
    for (int s = 0; s < samples; ++s) {
        double a = u(rng), b = u(rng);
        if (a + b > 1.0) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        const Eigen::Vector2d p = p0 + a * (p1 - p0) + b * (p2 - p0);
        if ((p - c).norm() <= r) ++hit;
    }
    const double area =
        0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
    return area * hit / samples;
}

}  // namespace oracle
