#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qplateau/aq_space.hpp"
#include "qplateau/disk_mesh.hpp"

namespace qp {

// Discrete Q-valued function: one QValue per mesh vertex plus a pairing of
// sheet slots across every mesh edge. Matchings are stored once per
// undirected edge, oriented from the lower vertex index to the higher; the
// opposite orientation is always the inverse permutation.
struct QField {
    std::shared_ptr<const DiskMesh> mesh;
    std::vector<QValue> values;              // per vertex
    std::vector<std::vector<int>> edge_perms;  // per mesh edge, low -> high
    std::vector<char> frozen;                // edge kept though possibly non-optimal
    int q = 0;
    int n = 0;

    // slot pairing along the directed edge from -> to
    std::vector<int> matching_along(int from, int to) const;
};

QField make_qfield(std::shared_ptr<const DiskMesh> mesh, std::vector<QValue> values);

// Recompute every edge matching as the optimal one; clears frozen flags.
void refresh_matchings(QField& field);

// Number of unfrozen edges whose stored matching cost exceeds the optimal
// cost by more than tol (absolute, on squared distance sums).
int validate_matchings(const QField& field, double tol = 1e-9);

// The q affine sheets of one triangle after matching alignment. slots[s][c]
// is the point index of sheet s at corner c. When the three edge matchings
// do not compose to the identity the triangle is branch-adjacent and the
// alignment is the cheapest of the three obtained by dropping one edge.
struct TriangleSheets {
    int tri = -1;
    bool branch_adjacent = false;
    int dropped_edge = -1;  // local edge index, -1 when consistent
    std::vector<std::array<int, 3>> slots;
    double energy = 0.0;  // sum over sheets of |grad T_s|_F^2 * area
};

TriangleSheets sheet_selection(const QField& field, int t);

double triangle_energy(const QField& field, int t);
double dirichlet_energy(const QField& field);

// Area of the image counting multiplicity: sum over triangles and sheets of
// sqrt(det(DT^T DT)) * area.
double mv_area(const QField& field);

// Energy restricted to the disk of radius r about x, splitting triangles
// that straddle the circle by exact overlap area (the P1 energy density is
// constant per triangle).
double ball_energy(const QField& field, const Vec2& x, double r);

QValue evaluate(const QField& field, const Vec2& p);          // throws outside the mesh
QValue evaluate_clamped(const QField& field, const Vec2& p);  // projects onto the rim first

struct PathRestriction {
    std::vector<QValue> samples;
    std::vector<std::vector<int>> step_perms;  // sample i -> sample i+1
    std::vector<int> chain;                    // start -> end composition
};

// Interpolated QValues along a polyline inside the closed disk, aligned by
// chained optimal matchings.
PathRestriction restrict_to_path(const QField& field, const std::vector<Vec2>& path);

// Translate every sheet by the single-valued vertex function g. Matchings
// are recomputed; a single-valued shift leaves the optimal pairing costs
// tied exactly, which is asserted.
QField shift_field(const QField& field, const std::vector<Vec>& g);

// Per-boundary-vertex values in boundary_loop order.
std::vector<QValue> boundary_values(const QField& field);

void save_field(const QField& field, std::ostream& os);
QField load_field(std::istream& is);

}  // namespace qp
