#include "qplateau/disk_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qp {

namespace {

constexpr double kPi = std::numbers::pi;

int ring_offset(int k) {
    // center vertex is 0; ring k (k >= 1) has 6k vertices
    return k == 0 ? 0 : 1 + 3 * k * (k - 1);
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double DiskMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * cross2(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

Vec2 DiskMesh::centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double DiskMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
    return a;
}

double DiskMesh::max_edge_length() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, (vertices[e[0]] - vertices[e[1]]).norm());
    return m;
}

double DiskMesh::min_angle_deg() const {
    double m = 180.0;
    for (const auto& tri : triangles) {
        for (int c = 0; c < 3; ++c) {
            Vec2 u = vertices[tri[(c + 1) % 3]] - vertices[tri[c]];
            Vec2 v = vertices[tri[(c + 2) % 3]] - vertices[tri[c]];
            double ang = std::atan2(std::abs(cross2(u, v)), u.dot(v)) * 180.0 / kPi;
            m = std::min(m, ang);
        }
    }
    return m;
}

int DiskMesh::edge_index(int u, int v) const {
    std::array<int, 2> key{std::min(u, v), std::max(u, v)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return -1;
    return static_cast<int>(it - edges.begin());
}

void DiskMesh::build_connectivity() {
    const int nv = vertex_count();
    edges.clear();
    edges.reserve(triangles.size() * 3 / 2 + nv);
    for (const auto& tri : triangles)
        for (int c = 0; c < 3; ++c) {
            int u = tri[c], v = tri[(c + 1) % 3];
            edges.push_back({std::min(u, v), std::max(u, v)});
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    tri_edges.resize(triangles.size());
    for (int t = 0; t < triangle_count(); ++t)
        for (int c = 0; c < 3; ++c)
            tri_edges[t][c] = edge_index(triangles[t][c], triangles[t][(c + 1) % 3]);

    vertex_tris.assign(nv, {});
    for (int t = 0; t < triangle_count(); ++t)
        for (int c = 0; c < 3; ++c) vertex_tris[triangles[t][c]].push_back(t);

    on_boundary.assign(nv, 0);
    for (int b : boundary_loop) on_boundary[b] = 1;

    // uniform grid over [-1.05, 1.05]^2 binning triangle bounding boxes
    grid_res_ = std::max(8, 1 << std::min(7, level + 2));
    grid_cells_.assign(static_cast<std::size_t>(grid_res_) * grid_res_, {});
    const double lo = -1.05, span = 2.10;
    auto cell_of = [&](double x) {
        int c = static_cast<int>((x - lo) / span * grid_res_);
        return std::clamp(c, 0, grid_res_ - 1);
    };
    for (int t = 0; t < triangle_count(); ++t) {
        double xmin = 2, xmax = -2, ymin = 2, ymax = -2;
        for (int c = 0; c < 3; ++c) {
            const Vec2& p = vertices[triangles[t][c]];
            xmin = std::min(xmin, p.x());
            xmax = std::max(xmax, p.x());
            ymin = std::min(ymin, p.y());
            ymax = std::max(ymax, p.y());
        }
        for (int cy = cell_of(ymin); cy <= cell_of(ymax); ++cy)
            for (int cx = cell_of(xmin); cx <= cell_of(xmax); ++cx)
                grid_cells_[static_cast<std::size_t>(cy) * grid_res_ + cx].push_back(t);
    }
}

int DiskMesh::locate(const Vec2& p, Eigen::Vector3d* bary) const {
    const double lo = -1.05, span = 2.10;
    int cx = std::clamp(static_cast<int>((p.x() - lo) / span * grid_res_), 0, grid_res_ - 1);
    int cy = std::clamp(static_cast<int>((p.y() - lo) / span * grid_res_), 0, grid_res_ - 1);
    const auto& cands = grid_cells_[static_cast<std::size_t>(cy) * grid_res_ + cx];
    for (int t : cands) {
        const auto& tri = triangles[t];
        const Vec2& a = vertices[tri[0]];
        Vec2 e1 = vertices[tri[1]] - a, e2 = vertices[tri[2]] - a, d = p - a;
        double det = cross2(e1, e2);
        if (det <= 0) continue;
        double l1 = cross2(d, e2) / det;
        double l2 = cross2(e1, d) / det;
        double l0 = 1.0 - l1 - l2;
        const double tol = -1e-10;
        if (l0 >= tol && l1 >= tol && l2 >= tol) {
            if (bary) *bary = Eigen::Vector3d(l0, l1, l2);
            return t;
        }
    }
    return -1;
}

std::vector<int> DiskMesh::one_ring_loop(int v) const {
    if (on_boundary[v]) return {};
    // directed link edges: triangle (v, a, b) in CCW order contributes a -> b
    std::vector<std::pair<int, int>> link;
    for (int t : vertex_tris[v]) {
        const auto& tri = triangles[t];
        for (int c = 0; c < 3; ++c)
            if (tri[c] == v) {
                link.emplace_back(tri[(c + 1) % 3], tri[(c + 2) % 3]);
                break;
            }
    }
    int start = link[0].first;
    for (const auto& e : link) start = std::min(start, e.first);
    std::vector<int> loop;
    loop.reserve(link.size());
    int cur = start;
    for (std::size_t i = 0; i < link.size(); ++i) {
        loop.push_back(cur);
        int next = -1;
        for (const auto& e : link)
            if (e.first == cur) {
                next = e.second;
                break;
            }
        if (next < 0) throw std::runtime_error("one_ring_loop: open link at interior vertex");
        cur = next;
    }
    if (cur != start) throw std::runtime_error("one_ring_loop: link does not close");
    return loop;
}

DiskMesh build_disk_mesh(int level) {
    if (level < 0 || level > 10)
        throw std::invalid_argument("build_disk_mesh: level must lie in [0, 10]");
    DiskMesh mesh;
    mesh.level = level;
    const int rings = 1 << level;

    mesh.vertices.emplace_back(0.0, 0.0);
    for (int k = 1; k <= rings; ++k) {
        const double radius = static_cast<double>(k) / rings;
        const int count = 6 * k;
        for (int m = 0; m < count; ++m) {
            const double ang = 2.0 * kPi * m / count;
            mesh.vertices.emplace_back(radius * std::cos(ang), radius * std::sin(ang));
        }
    }

    // center fan
    for (int m = 0; m < 6; ++m)
        mesh.triangles.push_back({0, ring_offset(1) + m, ring_offset(1) + (m + 1) % 6});

    // annular bands: merge ring k (inner) with ring k+1 (outer) by angle.
    // Angular positions are the rationals m/(6k) and m'/(6(k+1)) of a full
    // turn, so the merge comparisons are exact in integers.
    for (int k = 1; k < rings; ++k) {
        const int ni = 6 * k, no = 6 * (k + 1);
        const int oi = ring_offset(k), oo = ring_offset(k + 1);
        int i = 0, j = 0;
        while (i < ni || j < no) {
            const bool advance_outer =
                (j < no) && (i == ni || static_cast<long long>(j + 1) * ni <
                                            static_cast<long long>(i + 1) * no);
            if (advance_outer) {
                mesh.triangles.push_back({oi + i % ni, oo + j % no, oo + (j + 1) % no});
                ++j;
            } else {
                mesh.triangles.push_back({oi + i % ni, oo + j % no, oi + (i + 1) % ni});
                ++i;
            }
        }
    }

    mesh.boundary_loop.resize(6 * rings);
    for (int m = 0; m < 6 * rings; ++m) mesh.boundary_loop[m] = ring_offset(rings) + m;

    mesh.build_connectivity();
    return mesh;
}

std::vector<int> annulus_band(const DiskMesh& mesh, double inner_radius) {
    if (!(inner_radius > 0.0 && inner_radius < 1.0))
        throw std::invalid_argument("annulus_band: inner_radius must lie in (0, 1)");
    std::vector<int> band;
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.vertices[v].norm() >= inner_radius) band.push_back(v);
    return band;
}

Vec2 mobius_apply(const Vec2& a, double theta, const Vec2& z) {
    std::complex<double> ca(a.x(), a.y()), cz(z.x(), z.y());
    std::complex<double> w = std::polar(1.0, theta) * (cz - ca) / (1.0 - std::conj(ca) * cz);
    return {w.real(), w.imag()};
}

std::vector<Vec2> mobius_pullback(const DiskMesh& mesh, const Vec2& a, double theta) {
    if (a.norm() >= 1.0)
        throw std::invalid_argument("mobius_pullback: |a| must be < 1");
    std::vector<Vec2> out(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) out[v] = mobius_apply(a, theta, mesh.vertices[v]);
    return out;
}

void save_mesh(const DiskMesh& mesh, std::ostream& os) {
    os << "qpmesh v1 " << mesh.vertex_count() << " " << mesh.triangle_count() << " "
       << mesh.boundary_count() << "\n";
    char buf[80];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g\n", v.x(), v.y());
        os << buf;
    }
    for (const auto& t : mesh.triangles) os << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (int b : mesh.boundary_loop) os << "b " << b << "\n";
}

DiskMesh load_mesh(std::istream& is) {
    std::string tag, ver;
    int nv = 0, nt = 0, nb = 0;
    is >> tag >> ver >> nv >> nt >> nb;
    if (tag != "qpmesh" || ver != "v1" || !is)
        throw std::invalid_argument("load_mesh: not a qpmesh v1 file");
    DiskMesh mesh;
    mesh.vertices.reserve(nv);
    mesh.triangles.reserve(nt);
    mesh.boundary_loop.reserve(nb);
    for (int i = 0; i < nv; ++i) {
        double x, y;
        is >> tag >> x >> y;
        if (tag != "v") throw std::invalid_argument("load_mesh: malformed vertex line");
        mesh.vertices.emplace_back(x, y);
    }
    for (int i = 0; i < nt; ++i) {
        int a, b, c;
        is >> tag >> a >> b >> c;
        if (tag != "t") throw std::invalid_argument("load_mesh: malformed triangle line");
        mesh.triangles.push_back({a, b, c});
    }
    for (int i = 0; i < nb; ++i) {
        int b;
        is >> tag >> b;
        if (tag != "b") throw std::invalid_argument("load_mesh: malformed boundary line");
        mesh.boundary_loop.push_back(b);
    }
    if (!is) throw std::invalid_argument("load_mesh: truncated file");
    // boundary count 6 * 2^L fixes the refinement depth
    int rings = nb / 6, lvl = 0;
    while ((1 << lvl) < rings) ++lvl;
    mesh.level = lvl;
    mesh.build_connectivity();
    return mesh;
}

namespace {

// CCW angle from u to v, in [0, pi] for cross2(u, v) >= 0
double angle_ccw(const Vec2& u, const Vec2& v) {
    return std::atan2(std::max(0.0, cross2(u, v)), u.dot(v));
}

// Intersection area of triangle (0, A, B) with the disk |x| <= r, for
// cross2(A, B) >= 0.
double tri_sector_ccw(const Vec2& A, const Vec2& B, double r) {
    const bool in_a = A.squaredNorm() <= r * r;
    const bool in_b = B.squaredNorm() <= r * r;
    if (in_a && in_b) return 0.5 * cross2(A, B);
    const Vec2 D = B - A;
    const double a = D.squaredNorm();
    if (a == 0.0) return 0.0;
    const double b = 2.0 * A.dot(D);
    const double c = A.squaredNorm() - r * r;
    const double disc = b * b - 4.0 * a * c;
    const double sq = disc > 0 ? std::sqrt(disc) : 0.0;
    if (in_a) {  // exit through the larger root
        double t = (-b + sq) / (2.0 * a);
        Vec2 P = A + t * D;
        return 0.5 * cross2(A, P) + 0.5 * r * r * angle_ccw(P, B);
    }
    if (in_b) {
        double t = (-b - sq) / (2.0 * a);
        Vec2 P = A + t * D;
        return 0.5 * r * r * angle_ccw(A, P) + 0.5 * cross2(P, B);
    }
    if (disc <= 0) return 0.5 * r * r * angle_ccw(A, B);
    double t1 = (-b - sq) / (2.0 * a), t2 = (-b + sq) / (2.0 * a);
    if (t2 <= 0.0 || t1 >= 1.0) return 0.5 * r * r * angle_ccw(A, B);
    t1 = std::clamp(t1, 0.0, 1.0);
    t2 = std::clamp(t2, 0.0, 1.0);
    Vec2 P = A + t1 * D, Q = A + t2 * D;
    return 0.5 * r * r * angle_ccw(A, P) + 0.5 * cross2(P, Q) + 0.5 * r * r * angle_ccw(Q, B);
}

}  // namespace

double triangle_disk_overlap(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& c,
                             double r) {
    const Vec2 v[3] = {p0 - c, p1 - c, p2 - c};
    double area = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vec2& A = v[i];
        const Vec2& B = v[(i + 1) % 3];
        if (cross2(A, B) >= 0)
            area += tri_sector_ccw(A, B, r);
        else
            area -= tri_sector_ccw(B, A, r);
    }
    return std::max(0.0, area);
}

}  // namespace qp
