#include "qplateau/analysis.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "qplateau/parallel.hpp"

namespace qp {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> ring_holonomy(const QField& field, int v) {
    const auto loop = field.mesh->one_ring_loop(v);
    std::vector<int> perm(field.q);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i], b = loop[(i + 1) % loop.size()];
        perm = compose_perm(field.matching_along(a, b), perm);
    }
    return perm;
}

bool is_identity(const std::vector<int>& p) {
    for (int i = 0; i < static_cast<int>(p.size()); ++i)
        if (p[i] != i) return false;
    return true;
}

}  // namespace

BranchReport detect_branches(const QField& field, double annulus_inner) {
    const DiskMesh& mesh = *field.mesh;
    BranchReport rep;
    rep.annulus_inner = annulus_inner;

    std::vector<std::vector<int>> holonomy(mesh.vertex_count());
    parallel_for(mesh.vertex_count(), [&](std::size_t v) {
        if (!mesh.on_boundary[v]) holonomy[v] = ring_holonomy(field, static_cast<int>(v));
    });

    std::vector<char> flagged(mesh.vertex_count(), 0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (mesh.on_boundary[v] || holonomy[v].empty()) continue;
        if (!is_identity(holonomy[v])) {
            flagged[v] = 1;
            rep.branch_vertices.push_back({v, cycle_type(holonomy[v])});
            if (mesh.vertices[v].norm() >= annulus_inner) rep.annulus_clear = false;
        }
    }

    // boundary vertices incident to an inconsistent triangle (their one-ring
    // is open, so no holonomy is defined there)
    std::set<int> warn;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (!sheet_selection(field, t).branch_adjacent) continue;
        for (int c = 0; c < 3; ++c)
            if (mesh.on_boundary[mesh.triangles[t][c]]) warn.insert(mesh.triangles[t][c]);
    }
    rep.boundary_warnings.assign(warn.begin(), warn.end());

    // cluster flagged vertices by mesh-edge adjacency
    std::vector<int> cluster_of(mesh.vertex_count(), -1);
    for (const auto& bv : rep.branch_vertices) {
        if (cluster_of[bv.vertex] >= 0) continue;
        const int id = static_cast<int>(rep.clusters.size());
        std::vector<int> stack{bv.vertex}, members;
        cluster_of[bv.vertex] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int t : mesh.vertex_tris[v])
                for (int c = 0; c < 3; ++c) {
                    int u = mesh.triangles[t][c];
                    if (flagged[u] && cluster_of[u] < 0) {
                        cluster_of[u] = id;
                        stack.push_back(u);
                    }
                }
        }
        std::sort(members.begin(), members.end());
        rep.clusters.push_back(std::move(members));
    }
    rep.count = static_cast<int>(rep.clusters.size());
    return rep;
}

std::vector<int> boundary_monodromy(const QField& field) {
    const auto& loop = field.mesh->boundary_loop;
    std::vector<int> perm(field.q);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i], b = loop[(i + 1) % loop.size()];
        perm = compose_perm(field.matching_along(a, b), perm);
    }
    return perm;
}

GraphDecomposition decompose_graph(const QField& field, const std::vector<int>& region,
                                   double alpha) {
    if (region.empty()) throw std::invalid_argument("decompose_graph: empty region");
    if (!(alpha > 0)) throw std::invalid_argument("decompose_graph: alpha must be positive");
    const DiskMesh& mesh = *field.mesh;
    const int q = field.q;
    const double thresh = alpha / 3.0;

    std::vector<int> region_index(mesh.vertex_count(), -1);
    for (std::size_t i = 0; i < region.size(); ++i) region_index[region[i]] = static_cast<int>(i);

    for (int v : region) {
        auto atoms = support_multiplicity(field.values[v], thresh);
        if (static_cast<int>(atoms.size()) != q)
            throw std::invalid_argument(
                "decompose_graph: support multiplicity below q at vertex " + std::to_string(v));
    }

    // union-find over (region vertex, slot)
    const int nodes = static_cast<int>(region.size()) * q;
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& ed = mesh.edges[e];
        const int ia = region_index[ed[0]], ib = region_index[ed[1]];
        if (ia < 0 || ib < 0) continue;
        const auto& perm = field.edge_perms[e];
        for (int s = 0; s < q; ++s) {
            const double d =
                (field.values[ed[0]].points[s] - field.values[ed[1]].points[perm[s]]).norm();
            if (d <= thresh) {
                int ra = find(ia * q + s), rb = find(ib * q + perm[s]);
                if (ra != rb) parent[ra] = rb;
            }
        }
    }

    std::vector<int> comp_of(nodes, -1);
    int ncomp = 0;
    for (int x = 0; x < nodes; ++x) {
        int r = find(x);
        if (comp_of[r] < 0) comp_of[r] = ncomp++;
    }
    for (int x = 0; x < nodes; ++x) comp_of[x] = comp_of[find(x)];

    GraphDecomposition out;
    out.components.resize(ncomp);
    for (std::size_t i = 0; i < region.size(); ++i)
        for (int s = 0; s < q; ++s) {
            auto& comp = out.components[comp_of[i * q + s]];
            comp.values[region[i]].points.push_back(field.values[region[i]].points[s]);
        }
    for (auto& comp : out.components) {
        comp.multiplicity = comp.values.empty() ? 0 : comp.values.begin()->second.q();
        for (const auto& [v, val] : comp.values)
            if (val.q() != comp.multiplicity) {
                out.failure = "component multiplicity inconsistent across the region";
                return out;
            }
        if (static_cast<int>(comp.values.size()) != static_cast<int>(region.size())) {
            out.failure = "component does not cover the region";
            return out;
        }
    }

    // separation of distinct components in the graph point cloud
    out.gap = std::numeric_limits<double>::infinity();
    if (ncomp > 1) {
        for (std::size_t i = 0; i < region.size(); ++i)
            for (int s = 0; s < q; ++s)
                for (std::size_t j = i; j < region.size(); ++j)
                    for (int r = (j == i ? s + 1 : 0); r < q; ++r) {
                        if (comp_of[i * q + s] == comp_of[j * q + r]) continue;
                        const double dx =
                            (mesh.vertices[region[i]] - mesh.vertices[region[j]]).squaredNorm();
                        const double dy = (field.values[region[i]].points[s] -
                                           field.values[region[j]].points[r])
                                              .squaredNorm();
                        out.gap = std::min(out.gap, std::sqrt(dx + dy));
                    }
        if (out.gap <= alpha) {
            out.failure = "components closer than alpha";
            return out;
        }
    }
    out.ok = true;
    return out;
}

ConformalityReport conformality_residual(const QField& field) {
    const DiskMesh& mesh = *field.mesh;
    ConformalityReport rep;
    rep.per_triangle.assign(mesh.triangle_count(), 0.0);
    parallel_for(mesh.triangle_count(), [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        const auto sheets = sheet_selection(field, t);
        const auto& tri = mesh.triangles[t];
        Eigen::Matrix2d J;
        J.col(0) = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
        J.col(1) = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
        const Eigen::Matrix2d Jinv = J.inverse();
        const double area = mesh.triangle_area(t);
        double r = 0.0;
        for (const auto& s : sheets.slots) {
            Eigen::MatrixXd df(field.n, 2);
            df.col(0) = field.values[tri[1]].points[s[1]] - field.values[tri[0]].points[s[0]];
            df.col(1) = field.values[tri[2]].points[s[2]] - field.values[tri[0]].points[s[0]];
            Eigen::MatrixXd g = df * Jinv;
            const double a = g.col(0).squaredNorm() - g.col(1).squaredNorm();
            const double b = g.col(0).dot(g.col(1));
            r += a * a + 4.0 * b * b;
        }
        rep.per_triangle[ti] = r * area;
    });
    for (double r : rep.per_triangle) rep.aggregate += r;
    const double energy = dirichlet_energy(field);
    rep.normalized = energy > 0 ? rep.aggregate / (energy * energy) : 0.0;
    return rep;
}

OscillationReport oscillation_check(const QField& field, double delta, double arc_length,
                                    int sweep, int line_samples) {
    if (!(delta > 0.5 && delta < 1.0))
        throw std::invalid_argument("oscillation_check: delta must lie in (1/2, 1)");
    if (!(arc_length > 0 && arc_length <= kPi / 2.0))
        throw std::invalid_argument("oscillation_check: arc length must lie in (0, pi/2]");

    const double energy = dirichlet_energy(field);
    const double scale = energy > 0 ? 1.0 / std::sqrt(energy) : 1.0;
    const double h = delta * std::sin(arc_length / 2.0);

    // H^2(R_delta) = 2 * int_0^h sqrt(1-y^2) - sqrt(delta^2-y^2) dy, closed form
    auto circle_slab = [](double r, double y) {
        return 0.5 * (y * std::sqrt(std::max(0.0, r * r - y * y)) + r * r * std::asin(y / r));
    };
    const double area = 2.0 * (circle_slab(1.0, h) - circle_slab(delta, h));
    const double bound = std::sqrt(area) / (2.0 * std::sin(arc_length / 2.0) * delta);

    OscillationReport rep;
    for (int a = 0; a < sweep; ++a) {
        const double center = 2.0 * kPi * a / sweep;
        const Eigen::Rotation2D<double> rot(center);
        // the estimate controls the cheapest horizontal crossing of R_delta
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < line_samples; ++i) {
            const double y = -h + 2.0 * h * i / (line_samples - 1);
            const Vec2 inner = rot * Vec2(std::sqrt(delta * delta - y * y), y);
            const Vec2 outer = rot * Vec2(std::sqrt(1.0 - y * y), y);
            const double g =
                metric_g(evaluate_clamped(field, inner), evaluate_clamped(field, outer));
            best = std::min(best, g * scale);
        }
        OscillationArc arc;
        arc.arc_center = center;
        arc.value = best;
        arc.bound = bound;
        arc.ratio = bound > 0 ? best / bound : 0.0;
        rep.max_ratio = std::max(rep.max_ratio, arc.ratio);
        rep.arcs.push_back(arc);
    }
    return rep;
}

}  // namespace qp
