#include "qplateau/examples_lab.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qplateau/dirichlet_solver.hpp"
#include "qplateau/parallel.hpp"

namespace qp {

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> to_complex(const Vec2& p) { return {p.x(), p.y()}; }

}  // namespace

void VarietySpec::validate() const {
    if (q != 2) throw std::invalid_argument("VarietySpec: only degree 2 relations are supported");
    if (c == 0.0)
        throw std::invalid_argument("VarietySpec: c = 0 makes w^2 = z^2 reducible; rejected");
    if (!(std::sqrt(std::abs(c)) < domain_radius))
        throw std::invalid_argument("VarietySpec: branch points must lie inside the domain");
}

QField sample_variety(const VarietySpec& spec, std::shared_ptr<const DiskMesh> mesh) {
    spec.validate();
    const int nv = mesh->vertex_count();
    std::vector<QValue> values(nv);
    for (int v = 0; v < nv; ++v) {
        const Vec2 p = mesh->vertices[v] * spec.domain_radius;
        const std::complex<double> z = to_complex(p);
        const std::complex<double> w = std::sqrt(z * z - spec.c);
        if (spec.graph_target) {
            Vec a(4), b(4);
            a << p.x(), p.y(), w.real(), w.imag();
            b << p.x(), p.y(), -w.real(), -w.imag();
            values[v].points = {a, b};
        } else {
            Vec a(2), b(2);
            a << w.real(), w.imag();
            b << -w.real(), -w.imag();
            values[v].points = {a, b};
        }
    }
    return make_qfield(std::move(mesh), std::move(values));
}

std::pair<Vec2, Vec2> boundary_selection_formulas(double theta) {
    const double mag = std::pow(1.0 + 1.0 / 16.0 - std::cos(2.0 * theta) / 2.0, 0.25);
    const double phase =
        std::atan2(std::sin(2.0 * theta), std::cos(2.0 * theta) - 0.25) / 2.0;
    const Vec2 f1(mag * std::cos(phase), mag * std::sin(phase));
    return {f1, -f1};
}

std::pair<Vec2, Vec2> glued_boundary_selection(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    const auto [f1, f2] = boundary_selection_formulas(t);
    // g1 follows f1 on [-pi/2, pi/2] and f2 on [pi/2, 3 pi/2]
    const bool first = (t <= kPi / 2.0) || (t > 3.0 * kPi / 2.0);
    return first ? std::make_pair(f1, f2) : std::make_pair(f2, f1);
}

double graph_mass(const QField& field, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("graph_mass: lambda must be positive");
    const DiskMesh& mesh = *field.mesh;
    std::vector<double> per_tri(mesh.triangle_count());
    parallel_for(per_tri.size(), [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        const auto sheets = sheet_selection(field, t);
        const auto& tri = mesh.triangles[t];
        Eigen::Matrix2d J;
        J.col(0) = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
        J.col(1) = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
        const Eigen::Matrix2d Jinv = J.inverse();
        const double area = mesh.triangle_area(t);
        double m = 0.0;
        for (const auto& s : sheets.slots) {
            Eigen::MatrixXd df(field.n, 2);
            df.col(0) = field.values[tri[1]].points[s[1]] - field.values[tri[0]].points[s[0]];
            df.col(1) = field.values[tri[2]].points[s[2]] - field.values[tri[0]].points[s[0]];
            Eigen::MatrixXd g = df * Jinv;
            Eigen::Matrix2d gram =
                Eigen::Matrix2d::Identity() + lambda * lambda * (g.transpose() * g).eval();
            m += std::sqrt(std::max(0.0, gram.determinant()));
        }
        per_tri[ti] = m * area;
    });
    double total = 0.0;
    for (double m : per_tri) total += m;
    return total;
}

MassCheck mass_inequality_check(const QField& field, double slack) {
    MassCheck out;
    out.lhs = mv_area(field) + field.mesh->total_area();
    out.rhs = graph_mass(field, 1.0);
    out.holds = out.lhs <= out.rhs + slack * std::max(1.0, out.rhs);
    // spot check per-sheet injectivity on sampled vertex pairs
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, field.mesh->vertex_count() - 1);
    for (int trial = 0; trial < 64 && out.injectivity_sampled; ++trial) {
        const int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        if ((field.mesh->vertices[a] - field.mesh->vertices[b]).norm() < 1e-9) continue;
        for (int s = 0; s < field.q; ++s)
            for (int r = 0; r < field.q; ++r)
                if ((field.values[a].points[s] - field.values[b].points[r]).norm() < 1e-12)
                    out.injectivity_sampled = false;
    }
    return out;
}

std::pair<QField, DegeneracyReport> build_degenerate_example(
    std::shared_ptr<const DiskMesh> mesh) {
    VarietySpec spec;  // w^2 = z^2 - 1/4 on the unit disk
    QField base = sample_variety(spec, mesh);

    // continuous boundary selection, harmonically extended
    const int B = mesh->boundary_count();
    std::vector<Vec> g1(B);
    for (int j = 0; j < B; ++j) {
        const double theta = 2.0 * kPi * j / B;
        const Vec2 g = glued_boundary_selection(theta).first;
        g1[j] = Vec(2);
        g1[j] << g.x(), g.y();
    }
    const std::vector<Vec> f = solve_harmonic(*mesh, g1);

    DegeneracyReport rep;
    rep.dir_f = dirichlet_energy(base);
    {
        std::vector<QValue> hv(mesh->vertex_count());
        for (int v = 0; v < mesh->vertex_count(); ++v) hv[v].points = {f[v]};
        rep.dir_h = dirichlet_energy(make_qfield(mesh, std::move(hv)));
    }

    QField shifted = shift_field(base, f);
    rep.dir_shifted = dirichlet_energy(shifted);
    const double expect = rep.dir_f + 2.0 * rep.dir_h;
    rep.identity_rel_err = std::abs(rep.dir_shifted - expect) / std::max(1.0, expect);

    // trace must be [[2 g1]] + [[0]]
    for (int j = 0; j < B; ++j) {
        QValue want;
        want.points = {2.0 * g1[j], Vec::Zero(2)};
        rep.trace_max_err =
            std::max(rep.trace_max_err, metric_g(shifted.values[mesh->boundary_loop[j]], want));
    }

    // witness: an interior vertex whose support avoids the origin
    for (int v = 0; v < mesh->vertex_count(); ++v) {
        if (mesh->on_boundary[v]) continue;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : shifted.values[v].points) d = std::min(d, p.norm());
        if (d > rep.witness_dist) {
            rep.witness_dist = d;
            rep.witness_vertex = v;
        }
    }
    rep.ok = rep.identity_rel_err <= 1e-10 && rep.trace_max_err <= 1e-9 &&
             rep.witness_dist > 0.01;
    return {std::move(shifted), rep};
}

}  // namespace qp
