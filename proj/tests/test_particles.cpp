#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "mflab/particles.hpp"

using namespace mflab;

namespace {

ParticleState two_particle_state(double xi1, double xi2) {
    ParticleState s;
    s.tags = {0.25, 0.75};
    s.states = {{xi1}, {xi2}};
    s.site_index = {0, 1};
    return s;
}

// complete-graph opinion dynamics with sigma = 1: each state relaxes to the
// initial mean at unit rate
double opinion_closed_form(double xi0, double mean, double t) {
    return mean + (xi0 - mean) * std::exp(-t);
}

}  // namespace

TEST_CASE("particle_rhs examples") {
    auto zero = opinion_kernel([](double, double) { return 0.0; });
    auto s = two_particle_state(0, 2);
    auto r0 = particle_rhs(zero, 0, s);
    CHECK(r0[0][0] == 0.0);
    CHECK(r0[1][0] == 0.0);

    auto k = opinion_kernel([](double, double) { return 1.0; });
    auto r = particle_rhs(k, 0, s);
    CHECK(r[0][0] == doctest::Approx(1.0));
    CHECK(r[1][0] == doctest::Approx(-1.0));

    ParticleState one;
    one.tags = {0.5};
    one.states = {{7.0}};
    one.site_index = {0};
    CHECK(particle_rhs(k, 0, one)[0][0] == 0.0);
}

TEST_CASE("particle_rhs is independent of thread count") {
    auto k = opinion_kernel([](double x, double xp) { return 1 + x * xp; });
    ParticleState s;
    CounterRng rng(3);
    for (std::size_t i = 0; i < 33; ++i) {
        s.tags.push_back((i + 0.5) / 33);
        s.states.push_back({rng.uniform(-1, 1)});
        s.site_index.push_back(i);
    }
    auto r1 = particle_rhs(k, 0, s, 1);
    auto r4 = particle_rhs(k, 0, s, 4);
    CHECK(r1 == r4);
}

TEST_CASE("particle_rhs rejects non-finite kernel output with indices") {
    auto bad = opinion_kernel([](double x, double xp) {
        return (x > 0.5 && xp < 0.5) ? std::numeric_limits<double>::quiet_NaN()
                                     : 1.0;
    });
    auto s = two_particle_state(0, 2);
    CHECK_THROWS_WITH_AS(particle_rhs(bad, 0, s),
                         doctest::Contains("(1,0)"), std::runtime_error);
}

TEST_CASE("integrate matches the complete-graph closed form") {
    auto k = opinion_kernel([](double, double) { return 1.0; });
    auto s = two_particle_state(0, 2);
    double t = std::log(2.0);
    auto tr = integrate(k, s, t, 1e-3, Scheme::rk4);
    CHECK(tr.times.back() == doctest::Approx(t).epsilon(1e-12));
    CHECK(tr.final_states()[0][0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(tr.final_states()[1][0] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("zero kernel freezes the state exactly") {
    auto zero = opinion_kernel([](double, double) { return 0.0; });
    auto s = two_particle_state(-3.5, 11.0);
    auto tr = integrate(zero, s, 2.0, 0.1, Scheme::euler);
    CHECK(tr.final_states()[0][0] == -3.5);
    CHECK(tr.final_states()[1][0] == 11.0);
}

TEST_CASE("rk4 is at least fourth order on the opinion closed form") {
    auto k = opinion_kernel([](double, double) { return 1.0; });
    auto s = two_particle_state(0, 2);
    double t = 1.0;
    auto err = [&](double dt) {
        auto tr = integrate(k, s, t, dt, Scheme::rk4);
        return std::abs(tr.final_states()[0][0] - opinion_closed_form(0, 1, t));
    };
    double e1 = err(0.1), e2 = err(0.05);
    CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("blow-up guard aborts divergent systems") {
    // anti-consensus: sigma < 0 makes deviations explode
    auto k = opinion_kernel([](double, double) { return -40.0; });
    auto s = two_particle_state(0, 2);
    IntegrateOptions opts;
    opts.blowup_threshold = 1e6;
    CHECK_THROWS_WITH_AS(integrate(k, s, 2.0, 1e-3, Scheme::rk4, opts),
                         doctest::Contains("blow-up"), std::runtime_error);
}

TEST_CASE("cloud_state repeats tags and records the site index") {
    auto p1 = uniform_partition(1, TagRule::midpoint);
    auto c1 = cloud_state(p1, {{{0.0}, {2.0}}});
    REQUIRE(c1.size() == 2);
    CHECK(c1.tags[0] == c1.tags[1]);
    CHECK(c1.states[0][0] == 0.0);
    CHECK(c1.states[1][0] == 2.0);
    CHECK(c1.site_index == std::vector<std::size_t>{0, 0});

    auto p2 = uniform_partition(2, TagRule::midpoint);
    auto c2 = cloud_state(p2, {{{1.0}, {2.0}}, {{3.0}, {4.0}}});
    CHECK(c2.size() == 4);
    CHECK(c2.site_index == std::vector<std::size_t>{0, 0, 1, 1});

    // K = 1 reduces to a plain state
    auto c3 = cloud_state(p2, {{{5.0}}, {{6.0}}});
    CHECK(c3.size() == 2);
    CHECK(c3.tags[0] == p2.tags[0]);

    CHECK_THROWS(cloud_state(p2, {{{1.0}}}));
}

TEST_CASE("symmetric sigma conserves the global mean") {
    auto k = opinion_kernel([](double x, double xp) { return 1 + x * xp; });
    ParticleState s;
    CounterRng rng(17);
    const std::size_t n = 8;
    double mean0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s.tags.push_back((i + 0.5) / n);
        s.states.push_back({rng.uniform(-1, 1)});
        s.site_index.push_back(i);
        mean0 += s.states.back()[0] / n;
    }
    IntegrateOptions opts;
    opts.store_every = 100;
    auto tr = integrate(k, s, 5.0, 1e-3, Scheme::rk4, opts);
    for (const auto& snap : tr.states) {
        double mean = 0;
        for (const auto& row : snap) mean += row[0] / n;
        CHECK(mean == doctest::Approx(mean0).epsilon(1e-10));
    }
}

TEST_CASE("cloud deviations decay at the site rate") {
    // d/dt d_{i,k} = -S_i d_{i,k} exactly for the opinion kernel, so
    // |d(t)| = |d(0)| e^{-S_i t}
    auto sigma = [](double x, double xp) { return 1 + x * xp; };
    auto k = opinion_kernel(sigma);
    auto p = uniform_partition(4, TagRule::midpoint);
    std::vector<std::vector<Vec>> samples(4);
    CounterRng rng(29);
    for (auto& site : samples)
        for (int j = 0; j < 3; ++j) site.push_back({rng.uniform(-1, 1)});
    auto s0 = cloud_state(p, samples);
    double t = 1.0;
    auto tr = integrate(k, s0, t, 1e-3, Scheme::rk4);

    for (std::size_t i = 0; i < 4; ++i) {
        double s_i = 0;
        for (std::size_t j = 0; j < 4; ++j) s_i += sigma(p.tags[i], p.tags[j]) / 4;
        double n0 = 0, nt = 0, m0 = 0, mt = 0;
        for (std::size_t a = 0; a < s0.size(); ++a)
            if (s0.site_index[a] == i) {
                m0 += s0.states[a][0] / 3;
                mt += tr.final_states()[a][0] / 3;
            }
        for (std::size_t a = 0; a < s0.size(); ++a)
            if (s0.site_index[a] == i) {
                n0 += sq(s0.states[a][0] - m0);
                nt += sq(tr.final_states()[a][0] - mt);
            }
        CHECK(std::sqrt(nt) ==
              doctest::Approx(std::sqrt(n0) * std::exp(-s_i * t)).epsilon(1e-6));
    }
}

TEST_CASE("integrate stores first and last snapshots with store_every") {
    auto k = opinion_kernel([](double, double) { return 1.0; });
    auto s = two_particle_state(0, 2);
    IntegrateOptions opts;
    opts.store_every = 7;
    auto tr = integrate(k, s, 0.5, 1e-2, Scheme::rk4, opts);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(0.5).epsilon(1e-12));
}
