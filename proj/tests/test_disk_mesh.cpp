#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qplateau/disk_mesh.hpp"

using namespace qp;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("level 0 is the hexagonal fan") {
    auto mesh = build_disk_mesh(0);
    CHECK(mesh.vertex_count() == 7);
    CHECK(mesh.triangle_count() == 6);
    CHECK(mesh.boundary_count() == 6);
}

TEST_CASE("mesh invariants across levels") {
    for (int level = 0; level <= 4; ++level) {
        auto mesh = build_disk_mesh(level);
        CAPTURE(level);
        CHECK(mesh.boundary_count() == 6 * (1 << level));
        // Euler characteristic of a disk
        CHECK(mesh.vertex_count() - mesh.edge_count() + mesh.triangle_count() == 1);
        for (int t = 0; t < mesh.triangle_count(); ++t) CHECK(mesh.triangle_area(t) > 0.0);
        for (int b : mesh.boundary_loop)
            CHECK(std::abs(mesh.vertices[b].norm() - 1.0) < 1e-12);
        // boundary loop monotone in angle
        for (int j = 0; j + 1 < mesh.boundary_count(); ++j) {
            auto ang = [&](int v) {
                double a = std::atan2(mesh.vertices[v].y(), mesh.vertices[v].x());
                return a < 0 ? a + 2 * kPi : a;
            };
            CHECK(ang(mesh.boundary_loop[j]) < ang(mesh.boundary_loop[j + 1]));
        }
        CHECK(mesh.max_edge_length() <= 1.5 / (1 << level));
        CHECK(mesh.min_angle_deg() >= 20.0);
    }
}

TEST_CASE("level guard rejects oversized meshes") {
    CHECK_THROWS_AS(build_disk_mesh(11), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(-1), std::invalid_argument);
}

TEST_CASE("triangle areas converge to the disk area") {
    auto mesh = build_disk_mesh(3);
    CHECK(mesh.total_area() == doctest::Approx(kPi).epsilon(0.005));
}

TEST_CASE("refinement nesting") {
    auto coarse = build_disk_mesh(2);
    auto fine = build_disk_mesh(3);
    std::set<std::pair<long long, long long>> fine_keys;
    auto key = [](const Vec2& p) {
        return std::make_pair(static_cast<long long>(std::llround(p.x() * 1e12)),
                              static_cast<long long>(std::llround(p.y() * 1e12)));
    };
    for (const auto& v : fine.vertices) fine_keys.insert(key(v));
    for (const auto& v : coarse.vertices) CHECK(fine_keys.count(key(v)) == 1);
}

TEST_CASE("annulus_band") {
    auto mesh = build_disk_mesh(2);
    auto all = annulus_band(mesh, 1e-9);
    CHECK(static_cast<int>(all.size()) == mesh.vertex_count() - 1);  // origin excluded at 0 radius? no: |0| < eps
    auto rim = annulus_band(mesh, 1.0 - 1e-9);
    CHECK(static_cast<int>(rim.size()) == mesh.boundary_count());
    // brute-force filter oracle at 0.5
    auto band = annulus_band(mesh, 0.5);
    int expect = 0;
    for (const auto& v : mesh.vertices)
        if (v.norm() >= 0.5) ++expect;
    CHECK(static_cast<int>(band.size()) == expect);
    CHECK_THROWS_AS(annulus_band(mesh, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(annulus_band(mesh, 1.0), std::invalid_argument);
}

TEST_CASE("mobius pullback") {
    auto mesh = build_disk_mesh(2);
    auto ident = mobius_pullback(mesh, Vec2(0, 0), 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        CHECK((ident[v] - mesh.vertices[v]).norm() < 1e-14);
    auto rot = mobius_pullback(mesh, Vec2(0, 0), kPi);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        CHECK((rot[v] + mesh.vertices[v]).norm() < 1e-12);
    auto shifted = mobius_pullback(mesh, Vec2(0.3, 0.0), 0.0);
    for (int b : mesh.boundary_loop) CHECK(std::abs(shifted[b].norm() - 1.0) < 1e-12);
    CHECK_THROWS_AS(mobius_pullback(mesh, Vec2(1.0, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("mesh serialization round trip") {
    auto mesh = build_disk_mesh(2);
    std::stringstream ss;
    save_mesh(mesh, ss);
    auto loaded = load_mesh(ss);
    CHECK(loaded.level == mesh.level);
    REQUIRE(loaded.vertex_count() == mesh.vertex_count());
    REQUIRE(loaded.triangle_count() == mesh.triangle_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
        CHECK((loaded.vertices[v] - mesh.vertices[v]).norm() == 0.0);
    CHECK(loaded.triangles == mesh.triangles);
    CHECK(loaded.boundary_loop == mesh.boundary_loop);
}

TEST_CASE("locate finds containing triangles") {
    auto mesh = build_disk_mesh(3);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 200; ++s) {
        Vec2 p(u(rng), u(rng));
        if (p.norm() > 0.95) continue;
        Eigen::Vector3d bary;
        int t = mesh.locate(p, &bary);
        REQUIRE(t >= 0);
        const auto& tri = mesh.triangles[t];
        Vec2 rec = bary[0] * mesh.vertices[tri[0]] + bary[1] * mesh.vertices[tri[1]] +
                   bary[2] * mesh.vertices[tri[2]];
        CHECK((rec - p).norm() < 1e-12);
    }
    CHECK(mesh.locate(Vec2(2.0, 0.0)) == -1);
}

TEST_CASE("one ring loops close around interior vertices") {
    auto mesh = build_disk_mesh(2);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (mesh.on_boundary[v]) {
            CHECK(mesh.one_ring_loop(v).empty());
            continue;
        }
        auto loop = mesh.one_ring_loop(v);
        CHECK(loop.size() == mesh.vertex_tris[v].size());
        for (int u : loop) CHECK(mesh.edge_index(u, v) >= 0);
    }
}

TEST_CASE("triangle-disk overlap agrees with monte carlo") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_real_distribution<double> ur(0.2, 1.2);
    for (int trial = 0; trial < 25; ++trial) {
        Vec2 a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
        const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        if (std::abs(cross) < 0.05) continue;
        if (cross < 0) std::swap(b, c);
        Vec2 center(u(rng) * 0.3, u(rng) * 0.3);
        const double r = ur(rng);
        const double exact = triangle_disk_overlap(a, b, c, center, r);
        const double mc = oracle::mc_triangle_disk_area(a, b, c, center, r, 200000, 77 + trial);
        CHECK(exact == doctest::Approx(mc).epsilon(0.02).scale(0.05));
    }
}
