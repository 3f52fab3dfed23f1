#include "qplateau/dirichlet_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qplateau/parallel.hpp"

namespace qp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_boundary(const DiskMesh& mesh, const std::vector<QValue>& boundary) {
    if (static_cast<int>(boundary.size()) != mesh.boundary_count())
        throw std::invalid_argument("solve_dirichlet: one QValue per boundary vertex required");
    const int q = boundary[0].q(), n = boundary[0].dim();
    if (q <= 0 || n <= 0) throw std::invalid_argument("solve_dirichlet: empty boundary value");
    for (const auto& b : boundary)
        if (b.q() != q || b.dim() != n)
            throw std::invalid_argument("solve_dirichlet: boundary values must share q and n");
}

// 0.5 * cot(angle at corner c); pairs the two other corners.
std::array<double, 3> cotan_weights(const DiskMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    std::array<double, 3> w;
    for (int c = 0; c < 3; ++c) {
        Vec2 u = mesh.vertices[tri[(c + 1) % 3]] - mesh.vertices[tri[c]];
        Vec2 v = mesh.vertices[tri[(c + 2) % 3]] - mesh.vertices[tri[c]];
        double cross = u.x() * v.y() - u.y() * v.x();
        w[c] = 0.5 * u.dot(v) / std::abs(cross);
    }
    return w;
}

// One exact linear solve with matchings (and branch-adjacent alignment
// choices) frozen: minimizes the quadratic sheet energy over all interior
// slot values simultaneously. The unknowns form the covering graph of the
// mesh induced by the matchings; with trivial holonomy this decouples into
// q independent harmonic systems.
void lifted_solve(QField& field) {
    const DiskMesh& mesh = *field.mesh;
    const int q = field.q, n = field.n;
    std::vector<int> interior_index(mesh.vertex_count(), -1);
    int ni = 0;
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (!mesh.on_boundary[v]) interior_index[v] = ni++;
    if (ni == 0) return;
    const int unknowns = ni * q;

    std::vector<TriangleSheets> sheets(mesh.triangle_count());
    parallel_for(sheets.size(), [&](std::size_t t) {
        sheets[t] = sheet_selection(field, static_cast<int>(t));
    });

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.triangle_count()) * q * 12);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(unknowns, n);

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto w = cotan_weights(mesh, t);
        for (int c = 0; c < 3; ++c) {
            const int a = (c + 1) % 3, b = (c + 2) % 3;
            const int va = tri[a], vb = tri[b];
            const bool ia = interior_index[va] >= 0, ib = interior_index[vb] >= 0;
            if (!ia && !ib) continue;
            for (int s = 0; s < q; ++s) {
                const int sa = sheets[t].slots[s][a], sb = sheets[t].slots[s][b];
                const int ua = ia ? interior_index[va] * q + sa : -1;
                const int ub = ib ? interior_index[vb] * q + sb : -1;
                if (ia && ib) {
                    trips.emplace_back(ua, ua, w[c]);
                    trips.emplace_back(ub, ub, w[c]);
                    trips.emplace_back(ua, ub, -w[c]);
                    trips.emplace_back(ub, ua, -w[c]);
                } else if (ia) {
                    trips.emplace_back(ua, ua, w[c]);
                    rhs.row(ua) += w[c] * field.values[vb].points[sb].transpose();
                } else {
                    trips.emplace_back(ub, ub, w[c]);
                    rhs.row(ub) += w[c] * field.values[va].points[sa].transpose();
                }
            }
        }
    }

    Eigen::SparseMatrix<double> A(unknowns, unknowns);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("lifted_solve: factorization failed on a valid disk mesh");
    Eigen::MatrixXd x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("lifted_solve: back substitution failed");

    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (interior_index[v] < 0) continue;
        for (int s = 0; s < q; ++s)
            field.values[v].points[s] = x.row(interior_index[v] * q + s).transpose();
    }
}

// Greedy matching refresh. Each edge is set to its optimal matching only
// when that does not increase the energy of the adjacent triangles (with
// negative cotangent weights a per-edge optimum can cost energy); edges
// kept non-optimal are flagged frozen.
double greedy_rematch(QField& field, std::vector<double>& tri_energy) {
    const DiskMesh& mesh = *field.mesh;
    std::vector<std::vector<int>> edge_tris(mesh.edge_count());
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int c = 0; c < 3; ++c) edge_tris[mesh.tri_edges[t][c]].push_back(t);

    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& ed = mesh.edges[e];
        auto m = optimal_matching(field.values[ed[0]], field.values[ed[1]]);
        if (m.perm == field.edge_perms[e]) {
            field.frozen[e] = 0;
            continue;
        }
        double before = 0.0;
        for (int t : edge_tris[e]) before += tri_energy[t];
        auto old = field.edge_perms[e];
        field.edge_perms[e] = m.perm;
        double after = 0.0;
        for (int t : edge_tris[e]) after += triangle_energy(field, t);
        if (after <= before + 1e-12 * std::max(1.0, before)) {
            for (int t : edge_tris[e]) tri_energy[t] = triangle_energy(field, t);
            field.frozen[e] = 0;
        } else {
            field.edge_perms[e] = std::move(old);
            field.frozen[e] = 1;
        }
    }
    double total = 0.0;
    for (double e : tri_energy) total += e;
    return total;
}

std::vector<double> all_triangle_energies(const QField& field) {
    std::vector<double> e(field.mesh->triangle_count());
    parallel_for(e.size(), [&](std::size_t t) {
        e[t] = triangle_energy(field, static_cast<int>(t));
    });
    return e;
}

// Branch relocation. The alternation cannot walk a discrete branch point
// across the mesh: flipping a single matching at fixed values always costs
// energy, so a branch stuck at the wrong vertex is a local minimum. Each
// proposal makes one inconsistent triangle consistent by rewriting one of
// its edge matchings (pushing the holonomy across that edge), re-solves the
// values exactly, and keeps the flip only on strict descent.
bool try_branch_moves(QField& field, double& energy, bool allow_uphill) {
    const DiskMesh& mesh = *field.mesh;
    std::vector<int> branch_tris;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (sheet_selection(field, t).branch_adjacent) branch_tris.push_back(t);
    if (branch_tris.empty() || branch_tris.size() > 16) return false;

    bool found = false;
    QField best_field = field;
    double best_energy = std::numeric_limits<double>::infinity();
    for (int t : branch_tris) {
        const auto& tri = mesh.triangles[t];
        for (int le = 0; le < 3; ++le) {
            const int u = tri[le], v = tri[(le + 1) % 3], w = tri[(le + 2) % 3];
            // matching through the opposite corner makes the triangle consistent
            const auto through = compose_perm(field.matching_along(w, v),
                                              field.matching_along(u, w));
            const int e = mesh.edge_index(u, v);
            const auto old_perm = field.edge_perms[e];
            field.edge_perms[e] = (mesh.edges[e][0] == u) ? through : inverse_perm(through);
            if (field.edge_perms[e] != old_perm) {
                QField cand = field;
                lifted_solve(cand);
                refresh_matchings(cand);
                lifted_solve(cand);  // settle the values for the refreshed pairing
                auto tri_energy = all_triangle_energies(cand);
                double cand_energy = greedy_rematch(cand, tri_energy);
                if (cand_energy < best_energy) {
                    best_energy = cand_energy;
                    best_field = cand;
                    found = true;
                }
            }
            field.edge_perms[e] = old_perm;
        }
    }
    if (!found) return false;
    const bool improves = best_energy < energy - 1e-12 * std::max(1.0, energy);
    if (!improves && !allow_uphill) return false;
    field = std::move(best_field);
    energy = best_energy;
    return true;
}

std::pair<QField, SolveReport> solve_impl(std::shared_ptr<const DiskMesh> mesh,
                                          const std::vector<QValue>& boundary,
                                          const SolveOptions& opts, const QField* warm);

// Coarse-to-fine continuation: solve the same boundary problem one level
// down (the coarse boundary vertices are a subset of the fine ones) and
// interpolate. This hands the fine solve a nearly correct branch topology,
// which nearest-boundary transport cannot provide.
QField multilevel_init(const std::shared_ptr<const DiskMesh>& mesh,
                       const std::vector<QValue>& boundary, const SolveOptions& opts) {
    auto coarse_mesh = std::make_shared<DiskMesh>(build_disk_mesh(mesh->level - 1));
    std::vector<QValue> coarse_boundary(coarse_mesh->boundary_count());
    for (int j = 0; j < coarse_mesh->boundary_count(); ++j) coarse_boundary[j] = boundary[2 * j];
    SolveOptions copts = opts;
    copts.restarts = 1;
    auto [coarse, rep] = solve_impl(coarse_mesh, coarse_boundary, copts, nullptr);

    std::vector<QValue> values(mesh->vertex_count());
    for (int v = 0; v < mesh->vertex_count(); ++v)
        values[v] = evaluate_clamped(coarse, mesh->vertices[v]);
    for (int j = 0; j < mesh->boundary_count(); ++j)
        values[mesh->boundary_loop[j]] = boundary[j];
    return make_qfield(mesh, std::move(values));
}

QField initial_field(std::shared_ptr<const DiskMesh> mesh, const std::vector<QValue>& boundary,
                     int restart, const SolveOptions& opts) {
    const DiskMesh& m = *mesh;
    std::vector<QValue> values(m.vertex_count());
    for (int j = 0; j < m.boundary_count(); ++j) values[m.boundary_loop[j]] = boundary[j];
    // transport the nearest boundary value inward
    for (int v = 0; v < m.vertex_count(); ++v) {
        if (m.on_boundary[v]) continue;
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int j = 0; j < m.boundary_count(); ++j) {
            double d = (m.vertices[v] - m.vertices[m.boundary_loop[j]]).squaredNorm();
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        values[v] = boundary[arg];
    }
    if (restart > 0 && opts.init_noise > 0) {
        double scale = 0.0;
        for (const auto& b : boundary) scale = std::max(scale, b.max_norm());
        scale = std::max(scale, 1e-6) * opts.init_noise;
        std::mt19937_64 rng(opts.seed * 1000003ull + static_cast<std::uint64_t>(restart));
        std::normal_distribution<double> gauss(0.0, scale);
        for (int v = 0; v < m.vertex_count(); ++v) {
            if (m.on_boundary[v]) continue;
            for (auto& p : values[v].points)
                for (int k = 0; k < p.size(); ++k) p[k] += gauss(rng);
        }
    }
    return make_qfield(std::move(mesh), std::move(values));
}

struct RestartOutcome {
    QField field;
    SolveReport report;
};

RestartOutcome run_restart(std::shared_ptr<const DiskMesh> mesh,
                           const std::vector<QValue>& boundary, int restart,
                           const SolveOptions& opts, const QField* warm) {
    QField field = [&] {
        if (warm) return *warm;
        if (opts.coarse_init && restart == 0 && mesh->level > 3 && boundary[0].q() > 1)
            return multilevel_init(mesh, boundary, opts);
        return initial_field(mesh, boundary, restart, opts);
    }();
    if (warm) {
        for (int j = 0; j < mesh->boundary_count(); ++j)
            field.values[mesh->boundary_loop[j]] = boundary[j];
        refresh_matchings(field);
    }

    SolveReport rep;
    rep.restart_index = restart;
    double energy = dirichlet_energy(field);
    QField best_field = field;
    double best_energy = energy;
    int uphill_allowance = 3;
    int uphill_budget = 24;
    // Branch moves commit only above this relative gain: below it, shifting
    // a branch point merely trades mesh-scale placement artifacts against
    // localization at the true branch position.
    const double relocation_gate = 3e-3;
    bool exploring = false;

    std::mt19937_64 anneal_rng(opts.seed * 7788001ull + static_cast<std::uint64_t>(restart));

    for (int iter = 1; iter <= opts.max_outer_iters; ++iter) {
        lifted_solve(field);
        auto tri_energy = all_triangle_energies(field);
        double current;
        if (iter % opts.matching_refresh == 0)
            current = greedy_rematch(field, tri_energy);
        else {
            current = 0.0;
            for (double e : tri_energy) current += e;
        }

        if (opts.annealing && current > 0) {
            // elitist exploration: random rematch proposals at a decaying
            // temperature; the committed state stays the best seen
            const double temp =
                opts.anneal_temp * current * std::pow(0.85, iter - 1);
            std::uniform_int_distribution<int> pick_edge(0, field.mesh->edge_count() - 1);
            std::uniform_int_distribution<int> pick_slot(0, field.q - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::vector<std::vector<int>> edge_tris(field.mesh->edge_count());
            for (int t = 0; t < field.mesh->triangle_count(); ++t)
                for (int c = 0; c < 3; ++c) edge_tris[field.mesh->tri_edges[t][c]].push_back(t);
            for (int p = 0; p < opts.anneal_proposals; ++p) {
                int e = pick_edge(anneal_rng);
                int i = pick_slot(anneal_rng), j = pick_slot(anneal_rng);
                if (i == j) continue;
                double before = 0.0;
                for (int t : edge_tris[e]) before += triangle_energy(field, t);
                std::swap(field.edge_perms[e][i], field.edge_perms[e][j]);
                double after = 0.0;
                for (int t : edge_tris[e]) after += triangle_energy(field, t);
                const double delta = after - before;
                if (delta <= 0 || (temp > 0 && unit(anneal_rng) < std::exp(-delta / temp))) {
                    field.frozen[e] = 1;
                    current += delta;
                } else {
                    std::swap(field.edge_perms[e][i], field.edge_perms[e][j]);
                }
            }
        }

        const double commit_gate =
            exploring ? relocation_gate * std::max(best_energy, 1e-300) : 0.0;
        if (current < best_energy - commit_gate) {
            best_energy = current;
            best_field = field;
            exploring = false;
        }
        rep.iterations = iter;
        const double drop = energy - std::min(best_energy, current);
        if (drop >= 0 && drop <= opts.energy_tol * std::max(best_energy, 1e-300)) {
            // Stalled: see whether relocating a branch point unlocks
            // descent. A short uphill budget lets the walk cross wiggles in
            // the per-position energy; the committed state stays the best.
            if (field.q > 1 && uphill_budget > 0 &&
                try_branch_moves(field, current, uphill_allowance > 0)) {
                exploring = true;
                if (current < best_energy - relocation_gate * std::max(best_energy, 1e-300)) {
                    best_energy = current;
                    best_field = field;
                    exploring = false;
                    uphill_allowance = 3;
                    uphill_budget = 24;
                } else {
                    --uphill_allowance;
                    --uphill_budget;
                }
                rep.energy_history.push_back(best_energy);
                energy = std::min(best_energy, current);
                continue;
            }
            rep.energy_history.push_back(best_energy);
            rep.converged = true;
            break;
        }
        rep.energy_history.push_back(best_energy);
        energy = std::min(best_energy, current);
    }
    rep.final_energy = best_energy;
    return {std::move(best_field), std::move(rep)};
}

std::pair<QField, SolveReport> solve_impl(std::shared_ptr<const DiskMesh> mesh,
                                          const std::vector<QValue>& boundary,
                                          const SolveOptions& opts, const QField* warm) {
    if (warm) {
        auto outcome = run_restart(std::move(mesh), boundary, 0, opts, warm);
        return {std::move(outcome.field), std::move(outcome.report)};
    }
    RestartOutcome best;
    bool have = false;
    for (int r = 0; r < opts.restarts; ++r) {
        auto outcome = run_restart(mesh, boundary, r, opts, nullptr);
        if (!have || outcome.report.final_energy < best.report.final_energy) {
            best = std::move(outcome);
            have = true;
        }
    }
    return {std::move(best.field), std::move(best.report)};
}

}  // namespace

void SolveOptions::validate() const {
    if (max_outer_iters <= 0 || matching_refresh <= 0 || restarts <= 0)
        throw std::invalid_argument("SolveOptions: iteration counts must be positive");
    if (!(energy_tol > 0 && energy_tol <= 1e-2))
        throw std::invalid_argument("SolveOptions: energy_tol must lie in (0, 1e-2]");
}

std::pair<QField, SolveReport> solve_dirichlet(std::shared_ptr<const DiskMesh> mesh,
                                               const std::vector<QValue>& boundary,
                                               const SolveOptions& opts) {
    opts.validate();
    check_boundary(*mesh, boundary);
    return solve_impl(std::move(mesh), boundary, opts, nullptr);
}

std::pair<QField, SolveReport> solve_dirichlet_warm(std::shared_ptr<const DiskMesh> mesh,
                                                    const std::vector<QValue>& boundary,
                                                    const SolveOptions& opts,
                                                    const QField& warm) {
    opts.validate();
    check_boundary(*mesh, boundary);
    return solve_impl(std::move(mesh), boundary, opts, &warm);
}

std::vector<Vec> solve_harmonic(const DiskMesh& mesh, const std::vector<Vec>& boundary) {
    if (static_cast<int>(boundary.size()) != mesh.boundary_count())
        throw std::invalid_argument("solve_harmonic: one value per boundary vertex required");
    const int n = static_cast<int>(boundary[0].size());
    std::vector<int> interior_index(mesh.vertex_count(), -1);
    int ni = 0;
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (!mesh.on_boundary[v]) interior_index[v] = ni++;

    std::vector<Vec> out(mesh.vertex_count(), Vec::Zero(n));
    for (int j = 0; j < mesh.boundary_count(); ++j) out[mesh.boundary_loop[j]] = boundary[j];
    if (ni == 0) return out;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, n);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto w = cotan_weights(mesh, t);
        for (int c = 0; c < 3; ++c) {
            const int va = tri[(c + 1) % 3], vb = tri[(c + 2) % 3];
            const int ia = interior_index[va], ib = interior_index[vb];
            if (ia < 0 && ib < 0) continue;
            if (ia >= 0 && ib >= 0) {
                trips.emplace_back(ia, ia, w[c]);
                trips.emplace_back(ib, ib, w[c]);
                trips.emplace_back(ia, ib, -w[c]);
                trips.emplace_back(ib, ia, -w[c]);
            } else if (ia >= 0) {
                trips.emplace_back(ia, ia, w[c]);
                rhs.row(ia) += w[c] * out[vb].transpose();
            } else {
                trips.emplace_back(ib, ib, w[c]);
                rhs.row(ib) += w[c] * out[va].transpose();
            }
        }
    }
    Eigen::SparseMatrix<double> A(ni, ni);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("solve_harmonic: factorization failed");
    Eigen::MatrixXd x = ldlt.solve(rhs);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (interior_index[v] >= 0) out[v] = x.row(interior_index[v]).transpose();
    return out;
}

double harmonic_energy(const DiskMesh& mesh, const std::vector<Vec>& boundary) {
    auto h = solve_harmonic(mesh, boundary);
    std::vector<QValue> vals(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) vals[v].points = {h[v]};
    auto field = make_qfield(std::make_shared<DiskMesh>(mesh), std::move(vals));
    return dirichlet_energy(field);
}

DecayReport check_energy_decay(const QField& field, const std::vector<Vec2>& centers,
                               const std::vector<double>& radii, double slack) {
    if (centers.size() != radii.size())
        throw std::invalid_argument("check_energy_decay: centers and radii must pair up");
    const double total = dirichlet_energy(field);
    DecayReport rep;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!(radii[i] > 0) || radii[i] >= 1.0 - centers[i].norm())
            throw std::invalid_argument("check_energy_decay: need r < 1 - |x|");
        DecayCheck c;
        c.center = centers[i];
        c.radius = radii[i];
        c.ball = ball_energy(field, centers[i], radii[i]);
        c.bound = std::pow(radii[i], 2.0 / field.q) * total;
        c.ratio = c.bound > 0 ? c.ball / c.bound : 0.0;
        c.flagged = c.ratio > 1.0 + slack;
        rep.max_ratio = std::max(rep.max_ratio, c.ratio);
        rep.checks.push_back(c);
    }
    return rep;
}

double check_holder_modulus(const QField& field, double inner_radius, int samples) {
    if (!(inner_radius > 0 && inner_radius < 1))
        throw std::invalid_argument("check_holder_modulus: inner_radius must lie in (0, 1)");
    const double max_sep = 0.5 * (1.0 - inner_radius);
    const int nt = std::max(8, samples / 64);
    const int nr = 4, nd = 4, ns = 4;
    double worst = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = inner_radius * (0.25 + 0.7 * (i + 0.5) / nr);
        for (int j = 0; j < nt; ++j) {
            const double a = 2.0 * kPi * (j + 0.5) / nt;
            const Vec2 x(r * std::cos(a), r * std::sin(a));
            const QValue fx = evaluate(field, x);
            for (int d = 0; d < nd; ++d) {
                const double b = 2.0 * kPi * (d + 0.25) / nd;
                for (int k = 0; k < ns; ++k) {
                    const double sep = max_sep * (0.25 + 0.75 * (k + 0.5) / ns);
                    const Vec2 y = x + sep * Vec2(std::cos(b), std::sin(b));
                    if (y.norm() >= inner_radius) continue;
                    const double g = metric_g(fx, evaluate(field, y));
                    worst = std::max(worst, g / std::pow(sep, 1.0 / field.q));
                }
            }
        }
    }
    return worst;
}

}  // namespace qp
