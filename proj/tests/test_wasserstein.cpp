#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "mflab/wasserstein.hpp"

using namespace mflab;

namespace {

DiscreteMeasure make(Vec xs, std::vector<Vec> xis, Vec ws) {
    DiscreteMeasure mu;
    mu.xs = std::move(xs);
    mu.xis = std::move(xis);
    mu.weights = std::move(ws);
    return mu;
}

DiscreteMeasure random_measure(CounterRng& rng, std::size_t atoms, std::size_t d) {
    DiscreteMeasure mu;
    double total = 0;
    for (std::size_t a = 0; a < atoms; ++a) {
        mu.xs.push_back(rng.next_double());
        Vec xi(d);
        for (auto& v : xi) v = rng.uniform(-1, 1);
        mu.xis.push_back(xi);
        double w = 1.0 + rng.index(4);
        mu.weights.push_back(w);
        total += w;
    }
    for (auto& w : mu.weights) w /= total;
    return mu;
}

}  // namespace

TEST_CASE("w1_line basics") {
    CHECK(w1_line({0.0}, {1.0}, {1.0}, {1.0}) == doctest::Approx(1.0));
    CHECK(w1_line({0.2, 0.9}, {0.5, 0.5}, {0.2, 0.9}, {0.5, 0.5}) ==
          doctest::Approx(0.0));
    // two-atom split against its mean
    CHECK(w1_line({0.0, 1.0}, {0.5, 0.5}, {0.5}, {1.0}) == doctest::Approx(0.5));
    CHECK_THROWS(w1_line({}, {}, {0.5}, {1.0}));
}

TEST_CASE("w1_line against the Lebesgue midpoint discretization") {
    const std::size_t m = 4096;
    Vec lx(m), lw(m, 1.0 / m);
    for (std::size_t i = 0; i < m; ++i) lx[i] = (i + 0.5) / m;
    for (std::size_t n : {2u, 4u, 8u}) {
        Vec tx(n), tw(n, 1.0 / n);
        for (std::size_t i = 0; i < n; ++i) tx[i] = (i + 0.5) / n;
        double d = w1_line(lx, lw, tx, tw);
        CHECK(std::abs(d - 1.0 / (4 * n)) <= 2e-4);
        CHECK(d <= 1.0 / n);
    }
}

TEST_CASE("w1_lp exact small instances") {
    auto mu = make({0.3, 0.7}, {{1.0}, {2.0}}, {0.5, 0.5});
    auto [d0, plan0] = w1_lp(mu, mu);
    CHECK(d0 == doctest::Approx(0.0));
    plan0.check_feasible(mu.weights, mu.weights);

    // both atoms move straight up by 1 in state space
    auto a = make({0.0, 1.0}, {{0.0}, {0.0}}, {0.5, 0.5});
    auto b = make({0.0, 1.0}, {{1.0}, {1.0}}, {0.5, 0.5});
    auto [d1, plan1] = w1_lp(a, b);
    CHECK(d1 == doctest::Approx(1.0).epsilon(1e-12));
    plan1.check_feasible(a.weights, b.weights);

    // atoms on a line agree with the 1-D sweep
    CounterRng rng(61);
    for (int rep = 0; rep < 25; ++rep) {
        auto m1 = random_measure(rng, 4, 1);
        auto m2 = random_measure(rng, 3, 1);
        for (auto& x : m1.xs) x = 0.5;
        for (auto& x : m2.xs) x = 0.5;
        Vec v1, v2;
        for (const auto& t : m1.xis) v1.push_back(t[0]);
        for (const auto& t : m2.xis) v2.push_back(t[0]);
        auto [d, plan] = w1_lp(m1, m2);
        plan.check_feasible(m1.weights, m2.weights);
        CHECK(d == doctest::Approx(w1_line(v1, m1.weights, v2, m2.weights))
                       .epsilon(1e-10));
    }
}

TEST_CASE("w1_lp brute-force oracle on 2x2 instances") {
    CounterRng rng(67);
    for (int rep = 0; rep < 40; ++rep) {
        auto m1 = random_measure(rng, 2, 1);
        auto m2 = random_measure(rng, 2, 1);
        m1.weights = {0.5, 0.5};
        m2.weights = {0.5, 0.5};
        auto dist = [&](std::size_t i, std::size_t j) {
            return std::sqrt(sq(m1.xs[i] - m2.xs[j]) +
                             sq(m1.xis[i][0] - m2.xis[j][0]));
        };
        // equal weights: optimum is the cheaper of the two matchings or an
        // even split; with 2x2 doubly stochastic extremes are permutations
        double direct = 0.5 * (dist(0, 0) + dist(1, 1));
        double crossed = 0.5 * (dist(0, 1) + dist(1, 0));
        auto [d, plan] = w1_lp(m1, m2);
        CHECK(d == doctest::Approx(std::min(direct, crossed)).epsilon(1e-10));
    }
}

TEST_CASE("w1_lp respects the torus metric on x") {
    auto a = make({0.05}, {{0.0}}, {1.0});
    auto b = make({0.95}, {{0.0}}, {1.0});
    auto [di, p1] = w1_lp(a, b, OmegaMetric::interval);
    auto [dt, p2] = w1_lp(a, b, OmegaMetric::torus);
    CHECK(di == doctest::Approx(0.9));
    CHECK(dt == doctest::Approx(0.1));
}

TEST_CASE("w1_lp size cap") {
    DiscreteMeasure big;
    const std::size_t n = 513;
    for (std::size_t i = 0; i < n; ++i) {
        big.xs.push_back((i + 0.5) / n);
        big.xis.push_back({0.0});
        big.weights.push_back(1.0 / n);
    }
    auto small = make({0.5}, {{0.0}}, {1.0});
    CHECK_THROWS_WITH_AS(w1_lp(big, small), doctest::Contains("w1_line"),
                         std::invalid_argument);
}

TEST_CASE("metric axioms on random instances") {
    CounterRng rng(71);
    for (int rep = 0; rep < 15; ++rep) {
        auto m1 = random_measure(rng, 3, 2);
        auto m2 = random_measure(rng, 3, 2);
        auto m3 = random_measure(rng, 2, 2);
        double d12 = w1_lp(m1, m2).first;
        double d21 = w1_lp(m2, m1).first;
        double d13 = w1_lp(m1, m3).first;
        double d32 = w1_lp(m3, m2).first;
        CHECK(std::abs(d12 - d21) <= 1e-10);
        CHECK(d12 <= d13 + d32 + 1e-9);
        CHECK(d12 <= support_sup_norm(m1) + support_sup_norm(m2) + 1e-9);
    }
}

TEST_CASE("l1nu_w1 disintegrated distance") {
    ConditionalFamily f;
    f.sites = {0.25, 0.75};
    f.site_weights = {0.5, 0.5};
    f.atoms = {{{0.0}}, {{0.0}}};
    f.atom_weights = {{1.0}, {1.0}};
    CHECK(l1nu_w1(f, f) == doctest::Approx(0.0));

    // per-site distances 1 and 3, equal site weights -> 2
    ConditionalFamily g = f;
    g.atoms = {{{1.0}}, {{3.0}}};
    CHECK(l1nu_w1(f, g) == doctest::Approx(2.0));

    // single site reduces to the plain state-space W1
    ConditionalFamily a, b;
    a.sites = b.sites = {0.5};
    a.site_weights = b.site_weights = {1.0};
    a.atoms = {{{0.0}, {2.0}}};
    a.atom_weights = {{0.5, 0.5}};
    b.atoms = {{{1.0}}};
    b.atom_weights = {{1.0}};
    CHECK(l1nu_w1(a, b) ==
          doctest::Approx(w1_line({0, 2}, {0.5, 0.5}, {1}, {1})));

    ConditionalFamily bad = g;
    bad.sites = {0.25, 0.7};
    CHECK_THROWS_WITH_AS(l1nu_w1(f, bad), doctest::Contains("marginal"),
                         std::invalid_argument);
}

TEST_CASE("W1 is dominated by the disintegrated distance") {
    CounterRng rng(73);
    auto p_sites = Vec{0.2, 0.5, 0.8};
    for (int rep = 0; rep < 15; ++rep) {
        ConditionalFamily f1, f2;
        f1.sites = f2.sites = p_sites;
        f1.site_weights = f2.site_weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        for (int i = 0; i < 3; ++i) {
            f1.atoms.push_back({{rng.uniform(-1, 1)}, {rng.uniform(-1, 1)}});
            f1.atom_weights.push_back({0.5, 0.5});
            f2.atoms.push_back({{rng.uniform(-1, 1)}});
            f2.atom_weights.push_back({1.0});
        }
        double plain = w1_lp(semi_empirical(f1), semi_empirical(f2)).first;
        CHECK(plain <= l1nu_w1(f1, f2) + 1e-9);
    }
}

TEST_CASE("transport plan CSV export") {
    auto a = make({0.0}, {{0.0}}, {1.0});
    auto b = make({1.0}, {{0.0}}, {1.0});
    auto [d, plan] = w1_lp(a, b);
    std::string path = "plan_export_test.csv";
    plan_to_csv(plan, path);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp != nullptr);
    char line[128];
    REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
    CHECK(std::string(line).rfind("a,b,mass,dist", 0) == 0);
    std::fclose(fp);
    std::remove(path.c_str());
}
