#pragma once

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <vector>

namespace qp {

using Vec2 = Eigen::Vector2d;

// Structured triangulation of the closed unit disk. Level L has concentric
// rings at radii k/2^L; ring k carries 6k vertices at exact angles
// 2*pi*m/(6k), so the boundary has 6*2^L vertices and mesh(L) vertices are
// a subset of mesh(L+1) vertices.
struct DiskMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<int> boundary_loop;             // CCW in angle, starts at angle 0
    int level = 0;

    // derived connectivity
    std::vector<std::array<int, 2>> edges;      // endpoints sorted, u < v
    std::vector<std::array<int, 3>> tri_edges;  // edge index for (corner a, corner a+1)
    std::vector<std::vector<int>> vertex_tris;  // incident triangles, sorted
    std::vector<char> on_boundary;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int boundary_count() const { return static_cast<int>(boundary_loop.size()); }

    double triangle_area(int t) const;
    Vec2 centroid(int t) const;
    double total_area() const;
    double max_edge_length() const;
    double min_angle_deg() const;

    // Containing triangle of p (lowest index on ties / shared edges), with
    // barycentric coordinates; -1 if p lies outside the triangulated polygon.
    int locate(const Vec2& p, Eigen::Vector3d* bary = nullptr) const;

    // Ordered CCW cycle of neighbors around an interior vertex; empty for
    // boundary vertices (their link is an open fan).
    std::vector<int> one_ring_loop(int v) const;

    // Edge index of (u, v) or -1.
    int edge_index(int u, int v) const;

    // Rebuilds edges, incidence tables and the point-location grid from
    // vertices/triangles/boundary_loop.
    void build_connectivity();

  private:
    int grid_res_ = 0;
    std::vector<std::vector<int>> grid_cells_;
};

DiskMesh build_disk_mesh(int level);

// Vertices v with |v| >= inner_radius. inner_radius must lie in (0, 1).
std::vector<int> annulus_band(const DiskMesh& mesh, double inner_radius);

// Per-vertex images under the disk automorphism
// z -> e^{i theta} (z - a) / (1 - conj(a) z), |a| < 1.
std::vector<Vec2> mobius_pullback(const DiskMesh& mesh, const Vec2& a, double theta);
Vec2 mobius_apply(const Vec2& a, double theta, const Vec2& z);

void save_mesh(const DiskMesh& mesh, std::ostream& os);
DiskMesh load_mesh(std::istream& is);

// Exact area of the intersection of triangle (p0,p1,p2) with the disk of
// radius r about c. Used by the energy-decay diagnostics.
double triangle_disk_overlap(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& c,
                             double r);

}  // namespace qp
