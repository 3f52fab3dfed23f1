#pragma once

#include <optional>
#include <vector>

#include "qplateau/dirichlet_solver.hpp"
#include "qplateau/qfield.hpp"

namespace qp {

// A rectifiable Jordan curve given as a closed simple polyline with its
// arclength parameterization. Nearest-point projection onto the polyline is
// the Lipschitz retraction valid within lnr_radius of the curve.
struct JordanCurve {
    std::vector<Vec> samples;
    double lnr_radius = 0.1;

    // derived
    std::vector<double> cum_len;  // cum_len[i] = arclength up to samples[i], plus closing total
    double total_len = 0.0;

    void finalize();  // builds arclength tables, checks closure and simplicity
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }
    // position at parameter tau (arclength fraction tau / 2 pi of a turn)
    Vec point_at_tau(double tau) const;
    // d position / d tau (piecewise constant; right tangent at kinks)
    Vec tangent_at_tau(double tau) const;
    Vec project(const Vec& p, double* dist = nullptr) const;
};

// Weakly monotone circle reparameterization tau on a uniform grid of B
// points: tau(2 pi l / B) = offset + sum_{m < l} increments[m], with
// increments >= 0 summing to 2 pi.
struct MonotoneParam {
    std::vector<double> increments;
    double offset = 0.0;

    static MonotoneParam uniform(int grid_size);
    int grid_size() const { return static_cast<int>(increments.size()); }
    double tau_at(int grid_index) const;
    void validate(double tol = 1e-6) const;
};

struct BoundaryProblem {
    std::vector<JordanCurve> curves;
    std::vector<int> multiplicities;                 // k_i, sum = Q
    std::vector<MonotoneParam> params;               // grid size B * k_i each
    std::vector<std::vector<int>> pins;              // per-curve pinned grid indices (may be empty)

    int total_q() const;
    void validate() const;
};

// Trace of the problem at the mesh boundary: at angle theta the multiset
// union over curves i of curve_i(tau_i((theta + 2 pi m) / k_i)),
// m = 0 .. k_i - 1 (the k_i-th roots of the boundary point).
std::vector<QValue> boundary_trace(const BoundaryProblem& problem, const DiskMesh& mesh);

struct PlateauOptions {
    SolveOptions inner;          // used for the initial trace solve
    int max_param_iters = 60;
    double param_tol = 1e-7;     // relative energy decrease across an outer cycle
    bool use_fd_gradient = false;
    double fd_step = 1e-5;
    bool pin_all_curves = false; // default pins only curve 0 (three point condition)
    double step0 = 0.25;
};

struct WrappedVerdict {
    int curve = 0;
    double longest_const_arc = 0.0;  // in the tau-domain angle
    double threshold = 0.0;          // 2 pi / k_i
    bool passes = true;
};

struct HomeoVerdict {
    int curve = 0;
    bool ok = true;
    double min_increment = 0.0;
};

struct PlateauResult {
    QField field;
    BoundaryProblem problem;  // with optimized params
    SolveReport report;       // energy_history tracks outer cycles
    std::vector<WrappedVerdict> wrapped;
    std::vector<HomeoVerdict> homeo;
};

PlateauResult solve_plateau(const BoundaryProblem& problem, std::shared_ptr<const DiskMesh> mesh,
                            const PlateauOptions& opts = {});
PlateauResult solve_plateau(const BoundaryProblem& problem, std::shared_ptr<const DiskMesh> mesh,
                            const SolveOptions& inner);

// Longest arc (in the tau domain) on which each curve's image stays within
// tol of the arc's first sample, against the 2 pi / k_i threshold.
std::vector<WrappedVerdict> wrapped_check(const BoundaryProblem& problem, double tol);

// Strict monotonicity at mesh scale: all increments >= tol / B and the
// parameter range covers a full turn.
std::vector<HomeoVerdict> boundary_homeo_check(const BoundaryProblem& problem, double tol);

// Euclidean projection onto {x >= 0, sum x = target}.
std::vector<double> project_simplex(std::vector<double> x, double target);

// Gradient of the inner Dirichlet optimum with respect to the monotone
// parameters (envelope theorem: boundary residual of the quadratic form,
// chained through the curve tangents). field must be a converged inner
// solve of boundary_trace(problem, *field.mesh).
struct ParamGradient {
    std::vector<double> d_inc;
    double d_offset = 0.0;
};
std::vector<ParamGradient> boundary_param_gradient(const QField& field,
                                                   const BoundaryProblem& problem);

// Convenience problem builders used by the CLI and the test suites.
JordanCurve make_circle_curve(double radius, int samples, int dim = 2,
                              const Vec* center = nullptr);
BoundaryProblem make_circle_problem(double radius, const DiskMesh& mesh, int curve_samples = 0);
// The two boundary components of the graph of sqrt(z^2 - 1/4) over S^1,
// as curves in R^4.
BoundaryProblem make_variety_problem(const DiskMesh& mesh, int curve_samples = 0);

}  // namespace qp
