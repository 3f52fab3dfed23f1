#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qplateau/aq_space.hpp"

using namespace qp;

namespace {

QValue qv(std::initializer_list<std::initializer_list<double>> pts) {
    QValue v;
    for (const auto& p : pts) {
        Vec x(p.size());
        int i = 0;
        for (double c : p) x[i++] = c;
        v.points.push_back(std::move(x));
    }
    return v;
}

QValue random_qvalue(int q, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    QValue v;
    for (int i = 0; i < q; ++i) {
        Vec p(n);
        for (int k = 0; k < n; ++k) p[k] = gauss(rng);
        v.points.push_back(std::move(p));
    }
    return v;
}

QValue permuted(const QValue& v, std::mt19937_64& rng) {
    QValue out = v;
    std::shuffle(out.points.begin(), out.points.end(), rng);
    return out;
}

}  // namespace

TEST_CASE("metric_g on singletons is the euclidean distance") {
    CHECK(metric_g(qv({{0, 0}}), qv({{3, 4}})) == doctest::Approx(5.0));
}

TEST_CASE("metric_g vanishes on reordered tuples") {
    auto a = qv({{1, 2}, {-3, 0.5}});
    auto b = qv({{-3, 0.5}, {1, 2}});
    CHECK(metric_g(a, b) == doctest::Approx(0.0));
}

TEST_CASE("metric_g two-point example") {
    // brute force over S_2: pairings cost 1^2+1^2 = 2 and 1^2+1^2 = 2
    auto a = qv({{0, 0}, {2, 0}});
    auto b = qv({{1, 0}, {1, 0}});
    CHECK(metric_g(a, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("metric_g rejects mismatched inputs") {
    CHECK_THROWS_AS(metric_g(qv({{0, 0}}), qv({{0, 0}, {1, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(metric_g(qv({{0, 0}}), qv({{0, 0, 0}})), std::invalid_argument);
}

TEST_CASE("optimal_matching identity and swap") {
    auto a = qv({{0, 0}, {1, 0}});
    auto m_id = optimal_matching(a, a);
    CHECK(m_id.perm == std::vector<int>{0, 1});
    CHECK(m_id.cost == doctest::Approx(0.0));

    auto b = qv({{1, 0}, {0, 0}});
    auto m_swap = optimal_matching(a, b);
    CHECK(m_swap.perm == std::vector<int>{1, 0});
    CHECK(m_swap.cost == doctest::Approx(0.0));
}

TEST_CASE("optimal_matching ties break to the lexicographically smallest permutation") {
    // all four points coincide: every permutation costs zero
    auto a = qv({{2, 2}, {2, 2}});
    auto m = optimal_matching(a, a);
    CHECK(m.perm == std::vector<int>{0, 1});
}

TEST_CASE("assignment equals the S_5 brute force on random instances") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = random_qvalue(5, 2, rng);
        auto b = random_qvalue(5, 2, rng);
        const double direct = metric_g(a, b);
        const double brute = oracle::brute_force_metric(a.points, b.points);
        CHECK(direct == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("metric axioms hold on random triples") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int q = 1 + static_cast<int>(rng() % 5);
        const int n = 1 + static_cast<int>(rng() % 3);
        auto a = random_qvalue(q, n, rng);
        auto b = random_qvalue(q, n, rng);
        auto c = random_qvalue(q, n, rng);
        const double ab = metric_g(a, b), ba = metric_g(b, a);
        const double ac = metric_g(a, c), cb = metric_g(c, b);
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(metric_g(a, permuted(a, rng)) == doctest::Approx(0.0));
    }
}

TEST_CASE("metric_g is invariant under simultaneous rigid motion") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_qvalue(4, 2, rng);
        auto b = random_qvalue(4, 2, rng);
        const double before = metric_g(a, b);
        const double angle = gauss(rng);
        Eigen::Matrix2d rot;
        rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        Vec shift(2);
        shift << gauss(rng), gauss(rng);
        auto move = [&](QValue v) {
            for (auto& p : v.points) p = (rot * p + shift).eval();
            return v;
        };
        CHECK(metric_g(move(a), move(b)) == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("separation") {
    CHECK(separation(qv({{0, 0}, {0, 0}})) == doctest::Approx(0.0));
    CHECK(separation(qv({{0, 0}, {1, 0}})) == doctest::Approx(1.0));
    CHECK(std::isinf(separation(qv({{5, 5}}))));
    // value of sqrt(z^2 - 1/4) at z = 1: points +-sqrt(3)/2, gap sqrt(3)
    const double r = std::sqrt(3.0) / 2.0;
    QValue v = qv({{r, 0}, {-r, 0}});
    CHECK(separation(v) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("support_multiplicity clusters within tolerance") {
    auto atoms0 = support_multiplicity(qv({{0, 0}, {0, 0}}), 0.0);
    REQUIRE(atoms0.size() == 1);
    CHECK(atoms0[0].second == 2);

    auto atoms1 = support_multiplicity(qv({{0, 0}, {1, 0}}), 0.1);
    CHECK(atoms1.size() == 2);

    auto atoms2 = support_multiplicity(qv({{0, 0}, {1e-9, 0}}), 1e-6);
    REQUIRE(atoms2.size() == 1);
    CHECK(atoms2[0].second == 2);
}

TEST_CASE("separation and support_multiplicity are permutation invariant") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        auto a = random_qvalue(5, 3, rng);
        auto b = permuted(a, rng);
        CHECK(separation(a) == doctest::Approx(separation(b)));
        auto sa = support_multiplicity(a, 0.5);
        auto sb = support_multiplicity(b, 0.5);
        CHECK(sa.size() == sb.size());
    }
}

TEST_CASE("cycle_type and permutation helpers") {
    CHECK(cycle_type({0, 1, 2}).empty());
    CHECK(cycle_type({1, 0}) == std::vector<int>{2});
    CHECK(cycle_type({1, 2, 0}) == std::vector<int>{3});
    CHECK(cycle_type({1, 0, 3, 2}) == std::vector<int>{2, 2});
    CHECK(inverse_perm({2, 0, 1}) == std::vector<int>{1, 2, 0});
    CHECK(compose_perm({1, 2, 0}, {2, 0, 1}) == std::vector<int>{0, 1, 2});
}
