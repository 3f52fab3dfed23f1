#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qplateau/qfield.hpp"

namespace qp {

struct SolveOptions {
    int max_outer_iters = 500;
    double energy_tol = 1e-9;   // relative decrease per outer iteration
    int matching_refresh = 1;   // rematch every k-th outer iteration
    int restarts = 4;
    std::uint64_t seed = 0;
    bool annealing = false;
    // Seed the first restart from the solution one level down. Inherits
    // branch topology across levels but only localizes branch points to
    // coarse-edge precision; off by default.
    bool coarse_init = false;
    int anneal_proposals = 64;      // rematch proposals per outer iteration
    double anneal_temp = 1e-2;      // initial temperature, relative to energy
    double init_noise = 0.05;       // per-restart perturbation scale

    void validate() const;
};

struct SolveReport {
    double final_energy = 0.0;
    int iterations = 0;
    int restart_index = 0;
    bool converged = false;
    std::vector<double> energy_history;  // per outer iteration, non-increasing
};

// Minimize the discrete Dirichlet energy over interior vertex values with
// boundary QValues fixed (given in boundary_loop order). Alternates exact
// linear solves on the matching-aligned sheet graph with matching updates;
// the energy never increases across a cycle.
std::pair<QField, SolveReport> solve_dirichlet(std::shared_ptr<const DiskMesh> mesh,
                                               const std::vector<QValue>& boundary,
                                               const SolveOptions& opts = {});

// Single-restart variant seeded from an existing field on the same mesh
// (its boundary is replaced, matchings refreshed). The Plateau outer loop
// uses this for its line-search probes.
std::pair<QField, SolveReport> solve_dirichlet_warm(std::shared_ptr<const DiskMesh> mesh,
                                                    const std::vector<QValue>& boundary,
                                                    const SolveOptions& opts, const QField& warm);

// Single-valued harmonic extension of per-boundary-vertex data (cotangent
// Laplacian). Used directly and as the q = 1 reference path.
std::vector<Vec> solve_harmonic(const DiskMesh& mesh, const std::vector<Vec>& boundary);

// Energy of the harmonic extension without building a QField.
double harmonic_energy(const DiskMesh& mesh, const std::vector<Vec>& boundary);

struct DecayCheck {
    Vec2 center;
    double radius = 0.0;
    double ball = 0.0;   // energy inside the ball
    double bound = 0.0;  // r^(2/q) * total energy
    double ratio = 0.0;
    bool flagged = false;
};

struct DecayReport {
    std::vector<DecayCheck> checks;
    double max_ratio = 0.0;
};

// Interior energy-decay diagnostic: energy in B_r(x) against
// r^(2/q) * total energy. Flags ratios above 1 + slack.
DecayReport check_energy_decay(const QField& field, const std::vector<Vec2>& centers,
                               const std::vector<double>& radii, double slack = 0.05);

// Max over a deterministic lattice of interior pairs of
// G(F(x), F(y)) / |x - y|^(1/q). The lattice is mesh-independent and keeps
// pair separations at fixed fractions of (1 - inner_radius) / 2, so the
// estimate converges under refinement instead of chasing the unresolved
// neighborhood of a branch point. `samples` scales the lattice density.
double check_holder_modulus(const QField& field, double inner_radius, int samples);

}  // namespace qp
