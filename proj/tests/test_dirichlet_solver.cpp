#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "qplateau/analysis.hpp"
#include "qplateau/dirichlet_solver.hpp"
#include "qplateau/parallel.hpp"

using namespace qp;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

Vec vec2d(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

std::vector<QValue> sqrt_z_boundary(const DiskMesh& mesh) {
    std::vector<QValue> out(mesh.boundary_count());
    for (int j = 0; j < mesh.boundary_count(); ++j) {
        const Vec2& p = mesh.vertices[mesh.boundary_loop[j]];
        const std::complex<double> w = std::sqrt(std::complex<double>(p.x(), p.y()));
        out[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
    }
    return out;
}

std::vector<QValue> scalar_boundary(const DiskMesh& mesh, double (*f)(const Vec2&)) {
    std::vector<QValue> out(mesh.boundary_count());
    for (int j = 0; j < mesh.boundary_count(); ++j)
        out[j].points = {vec1(f(mesh.vertices[mesh.boundary_loop[j]]))};
    return out;
}

}  // namespace

TEST_CASE("q=1 baseline matches the direct harmonic solve") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(4));
    auto boundary = scalar_boundary(*mesh, [](const Vec2& p) { return p.x(); });
    SolveOptions opts;
    opts.restarts = 2;
    auto [field, rep] = solve_dirichlet(mesh, boundary, opts);
    CHECK(rep.converged);

    std::vector<Vec> hb(mesh->boundary_count());
    for (int j = 0; j < mesh->boundary_count(); ++j) hb[j] = boundary[j].points[0];
    const double direct = harmonic_energy(*mesh, hb);
    CHECK(rep.final_energy == doctest::Approx(direct).epsilon(1e-10));
    CHECK(rep.final_energy == doctest::Approx(kPi).epsilon(0.01));

    // interior values match the direct solution pointwise
    auto h = solve_harmonic(*mesh, hb);
    for (int v = 0; v < mesh->vertex_count(); ++v)
        CHECK(std::abs(field.values[v].points[0][0] - h[v][0]) < 1e-10);
}

TEST_CASE("superposition for q=1") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(3));
    auto b1 = scalar_boundary(*mesh, [](const Vec2& p) { return p.x(); });
    auto b2 = scalar_boundary(*mesh, [](const Vec2& p) { return 2.0 * p.x() * p.y(); });
    auto b12 = b1;
    for (int j = 0; j < mesh->boundary_count(); ++j) b12[j].points[0] += b2[j].points[0];
    SolveOptions opts;
    opts.restarts = 1;
    auto [f1, r1] = solve_dirichlet(mesh, b1, opts);
    auto [f2, r2] = solve_dirichlet(mesh, b2, opts);
    auto [f12, r12] = solve_dirichlet(mesh, b12, opts);
    for (int v = 0; v < mesh->vertex_count(); ++v)
        CHECK(std::abs(f12.values[v].points[0][0] - f1.values[v].points[0][0] -
                       f2.values[v].points[0][0]) < 1e-10);
}

TEST_CASE("two separated constant sheets stay constant at zero energy") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(3));
    std::vector<QValue> boundary(mesh->boundary_count());
    for (auto& b : boundary) b.points = {vec2d(0, 0), vec2d(3, 0)};
    SolveOptions opts;
    opts.restarts = 2;
    auto [field, rep] = solve_dirichlet(mesh, boundary, opts);
    CHECK(rep.final_energy == doctest::Approx(0.0).epsilon(1e-12));
    for (int v = 0; v < mesh->vertex_count(); ++v)
        CHECK(metric_g(field.values[v], boundary[0]) < 1e-9);
}

TEST_CASE("sqrt z minimizer approaches the quadrature reference") {
    const double reference = oracle::sqrt_z_energy_reference();
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(4));
    SolveOptions opts;
    opts.restarts = 2;
    auto [field, rep] = solve_dirichlet(mesh, sqrt_z_boundary(*mesh), opts);
    CHECK(rep.converged);
    CHECK(std::abs(rep.final_energy - reference) / reference < 0.03);

    // descent is monotone
    for (std::size_t i = 1; i < rep.energy_history.size(); ++i)
        CHECK(rep.energy_history[i] <= rep.energy_history[i - 1] + 1e-12);

    // the minimizer keeps the branch structure: one branch cluster near 0
    auto branches = detect_branches(field);
    CHECK(branches.count == 1);
    for (int v : branches.clusters[0])
        CHECK(mesh->vertices[v].norm() <= 1.5 * mesh->max_edge_length());
}

TEST_CASE("solver is deterministic across seeds and thread counts") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(3));
    SolveOptions opts;
    opts.restarts = 2;
    opts.seed = 7;
    auto run = [&] {
        auto [field, rep] = solve_dirichlet(mesh, sqrt_z_boundary(*mesh), opts);
        return rep;
    };
    thread_override() = 1;
    auto rep1 = run();
    thread_override() = 2;
    auto rep2 = run();
    thread_override() = 0;
    REQUIRE(rep1.energy_history.size() == rep2.energy_history.size());
    for (std::size_t i = 0; i < rep1.energy_history.size(); ++i)
        CHECK(rep1.energy_history[i] == rep2.energy_history[i]);
    CHECK(rep1.final_energy == rep2.final_energy);
}

TEST_CASE("conformal invariance under a Moebius pullback") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(4));
    SolveOptions opts;
    opts.restarts = 1;
    auto [f0, r0] = solve_dirichlet(mesh, sqrt_z_boundary(*mesh), opts);

    std::vector<QValue> pulled(mesh->boundary_count());
    for (int j = 0; j < mesh->boundary_count(); ++j) {
        const Vec2 m = mobius_apply(Vec2(0.3, 0.0), 0.0, mesh->vertices[mesh->boundary_loop[j]]);
        const std::complex<double> w = std::sqrt(std::complex<double>(m.x(), m.y()));
        pulled[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
    }
    auto [f1, r1] = solve_dirichlet(mesh, pulled, opts);
    CHECK(std::abs(r1.final_energy - r0.final_energy) / r0.final_energy < 0.02);
}

TEST_CASE("energy decay diagnostic") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(4));
    SolveOptions opts;
    opts.restarts = 1;

    // constant field: zero everywhere
    std::vector<QValue> cb(mesh->boundary_count());
    for (auto& b : cb) b.points = {vec2d(1, 1)};
    auto [cf, cr] = solve_dirichlet(mesh, cb, opts);
    auto crep = check_energy_decay(cf, {Vec2(0, 0)}, {0.5});
    CHECK(crep.max_ratio == doctest::Approx(0.0));

    // harmonic x: exact equality at the origin for r = 1/2
    auto bx = scalar_boundary(*mesh, [](const Vec2& p) { return p.x(); });
    auto [fx, rx] = solve_dirichlet(mesh, bx, opts);
    auto xrep = check_energy_decay(fx, {Vec2(0, 0)}, {0.5});
    CHECK(xrep.checks[0].ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK(!xrep.checks[0].flagged);

    // sqrt z minimizer: ratio stays within the bound plus mesh slack
    auto [fs, rs] = solve_dirichlet(mesh, sqrt_z_boundary(*mesh), opts);
    auto srep = check_energy_decay(fs, {Vec2(0, 0)}, {0.5});
    CHECK(srep.max_ratio <= 1.05);

    CHECK_THROWS_AS(check_energy_decay(fx, {Vec2(0.8, 0)}, {0.5}), std::invalid_argument);
}

TEST_CASE("holder modulus estimate") {
    auto mesh4 = std::make_shared<DiskMesh>(build_disk_mesh(4));
    SolveOptions opts;
    opts.restarts = 1;

    std::vector<QValue> cb(mesh4->boundary_count());
    for (auto& b : cb) b.points = {vec2d(2, -1)};
    auto [cf, cr] = solve_dirichlet(mesh4, cb, opts);
    CHECK(check_holder_modulus(cf, 0.8, 200) == doctest::Approx(0.0));

    auto bx = scalar_boundary(*mesh4, [](const Vec2& p) { return p.x(); });
    auto [fx, rx] = solve_dirichlet(mesh4, bx, opts);
    CHECK(check_holder_modulus(fx, 0.8, 200) <= 1.0 + 1e-9);  // |grad| = 1, q = 1

    auto [f4, r4] = solve_dirichlet(mesh4, sqrt_z_boundary(*mesh4), opts);
    auto mesh5 = std::make_shared<DiskMesh>(build_disk_mesh(5));
    auto [f5, r5] = solve_dirichlet(mesh5, sqrt_z_boundary(*mesh5), opts);
    const double h4 = check_holder_modulus(f4, 0.8, 400);
    const double h5 = check_holder_modulus(f5, 0.8, 400);
    CHECK(std::abs(h5 - h4) / h5 < 0.10);
}

TEST_CASE("option validation") {
    SolveOptions bad;
    bad.energy_tol = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SolveOptions{};
    bad.restarts = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("solver option variants reach the same minimizer") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(3));
    const auto boundary = sqrt_z_boundary(*mesh);
    SolveOptions plain;
    plain.restarts = 1;
    const double reference = solve_dirichlet(mesh, boundary, plain).second.final_energy;

    // sparser matching refresh
    SolveOptions sparse = plain;
    sparse.matching_refresh = 3;
    auto [fs, rs] = solve_dirichlet(mesh, boundary, sparse);
    CHECK(rs.converged);
    CHECK(rs.final_energy == doctest::Approx(reference).epsilon(1e-6));

    // annealed matchings stay elitist: history monotone, result reproducible
    SolveOptions hot = plain;
    hot.annealing = true;
    hot.seed = 11;
    hot.anneal_proposals = 32;
    auto [fa, ra] = solve_dirichlet(mesh, boundary, hot);
    for (std::size_t i = 1; i < ra.energy_history.size(); ++i)
        CHECK(ra.energy_history[i] <= ra.energy_history[i - 1] + 1e-12);
    CHECK(ra.final_energy <= reference * (1.0 + 1e-9));
    auto [fa2, ra2] = solve_dirichlet(mesh, boundary, hot);
    CHECK(ra.final_energy == ra2.final_energy);
    CHECK(ra.energy_history == ra2.energy_history);
}

TEST_CASE("coarse-to-fine initialization solves the shifted-branch problem") {
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(4));
    std::vector<QValue> pulled(mesh->boundary_count());
    for (int j = 0; j < mesh->boundary_count(); ++j) {
        const Vec2 m = mobius_apply(Vec2(0.3, 0.0), 0.0, mesh->vertices[mesh->boundary_loop[j]]);
        const std::complex<double> w = std::sqrt(std::complex<double>(m.x(), m.y()));
        pulled[j].points = {vec2d(w.real(), w.imag()), vec2d(-w.real(), -w.imag())};
    }
    SolveOptions opts;
    opts.restarts = 1;
    opts.coarse_init = true;
    auto [field, rep] = solve_dirichlet(mesh, pulled, opts);
    CHECK(rep.converged);
    // branch topology inherited from the coarse level: energy near 2 pi
    CHECK(rep.final_energy == doctest::Approx(2.0 * kPi).epsilon(0.03));
    auto branches = detect_branches(field);
    CHECK(branches.count == 1);
}
