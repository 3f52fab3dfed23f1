#pragma once

#include <utility>

#include "qplateau/qfield.hpp"

namespace qp {

// The family of two-sheeted varieties w^2 = z^2 - c over the disk. Branch
// points sit at +-sqrt(c) and must lie strictly inside the domain; c = 0 is
// rejected because w^2 = z^2 factors.
struct VarietySpec {
    int q = 2;
    double c = 0.25;
    double domain_radius = 1.0;
    bool graph_target = false;  // values (z, w) in R^4 instead of w in R^2

    void validate() const;
};

// At each vertex z the root multiset {+-sqrt(z^2 - c)}. The stored root
// order is the principal branch; the sheet structure is carried entirely by
// the edge matchings.
QField sample_variety(const VarietySpec& spec, std::shared_ptr<const DiskMesh> mesh);

// The w components of the explicit boundary selection over S^1 for
// c = 1/4: magnitude (1 + 1/16 - cos(2 theta)/2)^(1/4), half the atan2
// phase; the second point is the antipode. As a multiset this equals
// {+-sqrt(e^{2 i theta} - 1/4)}.
std::pair<Vec2, Vec2> boundary_selection_formulas(double theta);

// Piecewise gluing of the two selection branches that is continuous across
// theta = +-pi/2.
std::pair<Vec2, Vec2> glued_boundary_selection(double theta);

// Discrete graph area of x -> (x, lambda F(x)):
// sum over triangles and sheets of sqrt(det(I + lambda^2 DT^T DT)) * area.
double graph_mass(const QField& field, double lambda);

struct MassCheck {
    double lhs = 0.0;  // mv_area + domain area
    double rhs = 0.0;  // graph_mass at lambda = 1
    bool holds = false;
    bool injectivity_sampled = true;  // informational spot check per sheet
};

MassCheck mass_inequality_check(const QField& field, double slack = 1e-9);

struct DegeneracyReport {
    double dir_f = 0.0;        // energy of the base variety field
    double dir_h = 0.0;        // energy of the harmonic extension of g1
    double dir_shifted = 0.0;  // energy of the shifted field
    double identity_rel_err = 0.0;
    double trace_max_err = 0.0;
    int witness_vertex = -1;
    double witness_dist = 0.0;
    bool ok = false;
};

// The degeneracy construction: sample F for w^2 = z^2 - 1/4, harmonically
// extend the glued boundary selection g1 to f, and form F + f. The report
// verifies the exact energy split, the [[2 g1]] + [[0]] trace, and exhibits
// an interior vertex whose support stays away from the origin.
std::pair<QField, DegeneracyReport> build_degenerate_example(
    std::shared_ptr<const DiskMesh> mesh);

}  // namespace qp
