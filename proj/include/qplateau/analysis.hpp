#pragma once

#include <map>
#include <string>
#include <vector>

#include "qplateau/qfield.hpp"

namespace qp {

struct BranchVertex {
    int vertex = -1;
    std::vector<int> cycle_type;  // cycle lengths >= 2 of the one-ring holonomy
};

// Branch diagnostics. A vertex is flagged when the edge matchings composed
// around its one-ring are a nontrivial permutation. Flagged vertices come
// in edge-connected clusters (every holonomy-carrying triangle flags its
// three corners); `count` counts clusters, the discrete branch points.
struct BranchReport {
    std::vector<BranchVertex> branch_vertices;
    std::vector<std::vector<int>> clusters;  // flagged vertices, grouped
    int count = 0;
    bool annulus_clear = true;          // no flags with |v| >= annulus_inner
    double annulus_inner = 0.9;
    std::vector<int> boundary_warnings;  // boundary vertices on inconsistent triangles
};

BranchReport detect_branches(const QField& field, double annulus_inner = 0.9);

// Matchings chained around the boundary loop (based at boundary_loop[0]).
std::vector<int> boundary_monodromy(const QField& field);

struct GraphComponent {
    int multiplicity = 0;
    std::map<int, QValue> values;  // region vertex -> sub-multiset
};

struct GraphDecomposition {
    bool ok = false;
    std::string failure;
    double gap = 0.0;  // min distance between distinct components in the graph cloud
    std::vector<GraphComponent> components;
};

// Split the field over `region` into continuous sub-fields by clustering
// the graph point cloud along edge matchings (threshold alpha / 3).
// Requires full support multiplicity q at every region vertex; fails when
// components come closer than alpha or have inconsistent multiplicity.
GraphDecomposition decompose_graph(const QField& field, const std::vector<int>& region,
                                   double alpha);

struct ConformalityReport {
    std::vector<double> per_triangle;  // area-weighted residual per triangle
    double aggregate = 0.0;
    double normalized = 0.0;  // aggregate / total energy^2
};

// Hopf-type residual per aligned sheet:
// (|T_x|^2 - |T_y|^2)^2 + 4 <T_x, T_y>^2, area-weighted. Zero exactly for
// conformal sheets.
ConformalityReport conformality_residual(const QField& field);

struct OscillationArc {
    double arc_center = 0.0;
    double value = 0.0;  // G between inner and outer traces along the arc
    double bound = 0.0;
    double ratio = 0.0;
};

struct OscillationReport {
    std::vector<OscillationArc> arcs;
    double max_ratio = 0.0;
};

// Boundary-oscillation estimate: sweeping arcs of angular width arc_length,
// compares the metric gap between the trace at radius delta and the rim
// trace against H^2(R_delta)^(1/2) / (2 sin(arc/2) delta), on the field
// rescaled to unit total energy. delta must lie in (1/2, 1).
OscillationReport oscillation_check(const QField& field, double delta, double arc_length,
                                    int sweep = 64, int line_samples = 9);

}  // namespace qp
