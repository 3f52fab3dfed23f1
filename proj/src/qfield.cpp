#include "qplateau/qfield.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qplateau/parallel.hpp"

namespace qp {

namespace {

void check_field(const QField& f) {
    if (!f.mesh) throw std::invalid_argument("QField has no mesh");
    if (static_cast<int>(f.values.size()) != f.mesh->vertex_count())
        throw std::invalid_argument("QField values/vertex count mismatch");
}

// n x 2 gradient of the affine sheet taking values f0, f1, f2 at the
// triangle corners.
Eigen::MatrixXd sheet_gradient(const DiskMesh& mesh, int t, const Vec& f0, const Vec& f1,
                               const Vec& f2) {
    const auto& tri = mesh.triangles[t];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    J.col(1) = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    Eigen::MatrixXd df(f0.size(), 2);
    df.col(0) = f1 - f0;
    df.col(1) = f2 - f0;
    return df * J.inverse();
}

double alignment_energy(const QField& field, int t,
                        const std::vector<std::array<int, 3>>& slots) {
    const auto& tri = field.mesh->triangles[t];
    const double area = field.mesh->triangle_area(t);
    double e = 0.0;
    for (const auto& s : slots) {
        Eigen::MatrixXd g = sheet_gradient(*field.mesh, t, field.values[tri[0]].points[s[0]],
                                           field.values[tri[1]].points[s[1]],
                                           field.values[tri[2]].points[s[2]]);
        e += g.squaredNorm();
    }
    return e * area;
}

}  // namespace

std::vector<int> QField::matching_along(int from, int to) const {
    int e = mesh->edge_index(from, to);
    if (e < 0) throw std::invalid_argument("matching_along: not a mesh edge");
    if (from < to) return edge_perms[e];
    return inverse_perm(edge_perms[e]);
}

QField make_qfield(std::shared_ptr<const DiskMesh> mesh, std::vector<QValue> values) {
    QField f;
    f.mesh = std::move(mesh);
    f.values = std::move(values);
    check_field(f);
    f.q = f.values[0].q();
    f.n = f.values[0].dim();
    for (const auto& v : f.values)
        if (v.q() != f.q || v.dim() != f.n)
            throw std::invalid_argument("make_qfield: inhomogeneous QValues");
    f.edge_perms.resize(f.mesh->edge_count());
    f.frozen.assign(f.mesh->edge_count(), 0);
    parallel_for(f.mesh->edge_count(), [&](std::size_t e) {
        const auto& ed = f.mesh->edges[e];
        f.edge_perms[e] = optimal_matching(f.values[ed[0]], f.values[ed[1]]).perm;
    });
    return f;
}

void refresh_matchings(QField& field) {
    check_field(field);
    parallel_for(field.mesh->edge_count(), [&](std::size_t e) {
        const auto& ed = field.mesh->edges[e];
        field.edge_perms[e] = optimal_matching(field.values[ed[0]], field.values[ed[1]]).perm;
    });
    field.frozen.assign(field.mesh->edge_count(), 0);
}

int validate_matchings(const QField& field, double tol) {
    int bad = 0;
    for (int e = 0; e < field.mesh->edge_count(); ++e) {
        if (field.frozen[e]) continue;
        const auto& ed = field.mesh->edges[e];
        const QValue& a = field.values[ed[0]];
        const QValue& b = field.values[ed[1]];
        double stored = 0.0;
        for (int i = 0; i < field.q; ++i)
            stored += (a.points[i] - b.points[field.edge_perms[e][i]]).squaredNorm();
        if (stored > optimal_matching(a, b).cost + tol) ++bad;
    }
    return bad;
}

TriangleSheets sheet_selection(const QField& field, int t) {
    const int q = field.q;
    const auto& tri = field.mesh->triangles[t];
    const auto s01 = field.matching_along(tri[0], tri[1]);
    const auto s12 = field.matching_along(tri[1], tri[2]);
    const auto s02 = field.matching_along(tri[0], tri[2]);

    TriangleSheets out;
    out.tri = t;
    const auto through1 = compose_perm(s12, s01);  // corner0 -> corner2 via corner1
    out.branch_adjacent = (through1 != s02);

    auto make_slots = [&](int dropped) {
        std::vector<std::array<int, 3>> slots(q);
        switch (dropped) {
            case 0: {  // pair corners through corner 2
                const auto s21 = inverse_perm(s12);
                for (int s = 0; s < q; ++s) slots[s] = {s, s21[s02[s]], s02[s]};
                break;
            }
            case 1:  // keep edges (0,1) and (2,0)
                for (int s = 0; s < q; ++s) slots[s] = {s, s01[s], s02[s]};
                break;
            default:  // keep edges (0,1) and (1,2)
                for (int s = 0; s < q; ++s) slots[s] = {s, s01[s], s12[s01[s]]};
        }
        return slots;
    };

    if (!out.branch_adjacent) {
        out.slots = make_slots(2);
        out.energy = alignment_energy(field, t, out.slots);
        return out;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int d = 0; d < 3; ++d) {
        auto slots = make_slots(d);
        double e = alignment_energy(field, t, slots);
        if (e < best) {
            best = e;
            out.dropped_edge = d;
            out.slots = std::move(slots);
        }
    }
    out.energy = best;
    return out;
}

double triangle_energy(const QField& field, int t) { return sheet_selection(field, t).energy; }

double dirichlet_energy(const QField& field) {
    std::vector<double> per_tri(field.mesh->triangle_count());
    parallel_for(per_tri.size(), [&](std::size_t t) {
        per_tri[t] = triangle_energy(field, static_cast<int>(t));
    });
    double total = 0.0;
    for (double e : per_tri) total += e;
    return total;
}

double mv_area(const QField& field) {
    std::vector<double> per_tri(field.mesh->triangle_count());
    parallel_for(per_tri.size(), [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        const auto sheets = sheet_selection(field, t);
        const auto& tri = field.mesh->triangles[t];
        const double area = field.mesh->triangle_area(t);
        double a = 0.0;
        for (const auto& s : sheets.slots) {
            Eigen::MatrixXd g = sheet_gradient(*field.mesh, t, field.values[tri[0]].points[s[0]],
                                               field.values[tri[1]].points[s[1]],
                                               field.values[tri[2]].points[s[2]]);
            Eigen::Matrix2d gram = g.transpose() * g;
            a += std::sqrt(std::max(0.0, gram.determinant()));
        }
        per_tri[ti] = a * area;
    });
    double total = 0.0;
    for (double a : per_tri) total += a;
    return total;
}

double ball_energy(const QField& field, const Vec2& x, double r) {
    double total = 0.0;
    for (int t = 0; t < field.mesh->triangle_count(); ++t) {
        const auto& tri = field.mesh->triangles[t];
        const Vec2 &p0 = field.mesh->vertices[tri[0]], &p1 = field.mesh->vertices[tri[1]],
                   &p2 = field.mesh->vertices[tri[2]];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const Vec2* p : {&p0, &p1, &p2}) {
            double d = (*p - x).norm();
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        if (lo >= r) continue;
        const double area = field.mesh->triangle_area(t);
        const double frac =
            hi <= r ? 1.0 : triangle_disk_overlap(p0, p1, p2, x, r) / area;
        if (frac > 0) total += triangle_energy(field, t) * frac;
    }
    return total;
}

QValue evaluate(const QField& field, const Vec2& p) {
    Eigen::Vector3d bary;
    int t = field.mesh->locate(p, &bary);
    if (t < 0) throw std::invalid_argument("evaluate: point outside the triangulated disk");
    const auto sheets = sheet_selection(field, t);
    const auto& tri = field.mesh->triangles[t];
    QValue out;
    out.points.reserve(field.q);
    for (const auto& s : sheets.slots) {
        Vec v = bary[0] * field.values[tri[0]].points[s[0]] +
                bary[1] * field.values[tri[1]].points[s[1]] +
                bary[2] * field.values[tri[2]].points[s[2]];
        out.points.push_back(std::move(v));
    }
    return out;
}

QValue evaluate_clamped(const QField& field, const Vec2& p) {
    Eigen::Vector3d bary;
    if (field.mesh->locate(p, &bary) >= 0) return evaluate(field, p);
    // outside the rim polygon: walk the ray from the origin back to the
    // boundary chord at this angle
    const int B = field.mesh->boundary_count();
    double ang = std::atan2(p.y(), p.x());
    if (ang < 0) ang += 2.0 * std::numbers::pi;
    int j = std::min(B - 1, static_cast<int>(ang / (2.0 * std::numbers::pi) * B));
    for (int probe = 0; probe < 3; ++probe) {
        const Vec2& c0 = field.mesh->vertices[field.mesh->boundary_loop[(j + probe - 1 + B) % B]];
        const Vec2& c1 = field.mesh->vertices[field.mesh->boundary_loop[(j + probe) % B]];
        // solve c0 + s (c1 - c0) = t * p
        Eigen::Matrix2d M;
        M.col(0) = c1 - c0;
        M.col(1) = -p;
        if (std::abs(M.determinant()) < 1e-14) continue;
        Eigen::Vector2d st = M.inverse() * (-c0);
        if (st[0] >= -1e-9 && st[0] <= 1.0 + 1e-9) {
            Vec2 hit = (c0 + st[0] * (c1 - c0)) * (1.0 - 1e-9);
            if (field.mesh->locate(hit, &bary) >= 0) return evaluate(field, hit);
        }
    }
    throw std::invalid_argument("evaluate_clamped: cannot project point onto the mesh");
}

PathRestriction restrict_to_path(const QField& field, const std::vector<Vec2>& path) {
    if (path.empty()) throw std::invalid_argument("restrict_to_path: empty path");
    PathRestriction out;
    out.samples.reserve(path.size());
    for (const auto& p : path) out.samples.push_back(evaluate(field, p));
    std::vector<int> chain(field.q);
    for (int i = 0; i < field.q; ++i) chain[i] = i;
    for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
        auto m = optimal_matching(out.samples[i], out.samples[i + 1]);
        chain = compose_perm(m.perm, chain);
        out.step_perms.push_back(std::move(m.perm));
    }
    out.chain = std::move(chain);
    return out;
}

QField shift_field(const QField& field, const std::vector<Vec>& g) {
    check_field(field);
    if (static_cast<int>(g.size()) != field.mesh->vertex_count())
        throw std::invalid_argument("shift_field: g must be defined on all vertices");
    for (const auto& v : g)
        if (static_cast<int>(v.size()) != field.n)
            throw std::invalid_argument("shift_field: dimension mismatch");
    QField out = field;
    for (int v = 0; v < field.mesh->vertex_count(); ++v)
        for (auto& p : out.values[v].points) p += g[v];
    // A single-valued shift changes every pairing cost by the same amount,
    // so the optimal matchings survive; recompute and check.
    for (int e = 0; e < out.mesh->edge_count(); ++e) {
        const auto& ed = out.mesh->edges[e];
        auto m = optimal_matching(out.values[ed[0]], out.values[ed[1]]);
        double old_cost = 0.0;
        for (int i = 0; i < out.q; ++i)
            old_cost +=
                (out.values[ed[0]].points[i] - out.values[ed[1]].points[field.edge_perms[e][i]])
                    .squaredNorm();
        const double scale = std::max(1.0, old_cost);
        if (old_cost > m.cost + 1e-8 * scale)
            throw std::logic_error("shift_field: matching not preserved by single-valued shift");
        out.edge_perms[e] = std::move(m.perm);
        out.frozen[e] = 0;
    }
    return out;
}

std::vector<QValue> boundary_values(const QField& field) {
    std::vector<QValue> out;
    out.reserve(field.mesh->boundary_count());
    for (int b : field.mesh->boundary_loop) out.push_back(field.values[b]);
    return out;
}

void save_field(const QField& field, std::ostream& os) {
    os << "qpfield v1 " << field.mesh->vertex_count() << " " << field.mesh->level << "\n";
    char buf[64];
    for (const auto& v : field.values) {
        os << v.q() << " " << v.dim();
        for (const auto& p : v.points)
            for (int k = 0; k < p.size(); ++k) {
                std::snprintf(buf, sizeof(buf), " %.17g", p[k]);
                os << buf;
            }
        os << "\n";
    }
}

QField load_field(std::istream& is) {
    std::string tag, ver;
    int nv = 0, level = 0;
    is >> tag >> ver >> nv >> level;
    if (tag != "qpfield" || ver != "v1" || !is)
        throw std::invalid_argument("load_field: not a qpfield v1 file");
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(level));
    if (mesh->vertex_count() != nv)
        throw std::invalid_argument("load_field: vertex count does not match level");
    std::vector<QValue> values(nv);
    for (int v = 0; v < nv; ++v) {
        int q, n;
        is >> q >> n;
        if (!is || q <= 0 || n <= 0) throw std::invalid_argument("load_field: malformed line");
        values[v].points.assign(q, Vec(n));
        for (int i = 0; i < q; ++i)
            for (int k = 0; k < n; ++k) is >> values[v].points[i][k];
    }
    if (!is) throw std::invalid_argument("load_field: truncated file");
    return make_qfield(std::move(mesh), std::move(values));
}

}  // namespace qp
