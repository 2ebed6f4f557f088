#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mflab/pde.hpp"

using namespace mflab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Simpson integral of g over [a,b]
template <typename F>
double simpson(F g, double a, double b, std::size_t intervals) {
    double h = (b - a) / intervals;
    double s = g(a) + g(b);
    for (std::size_t i = 1; i < intervals; ++i)
        s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("polynomial mollifier normalization and symmetry") {
    auto m1 = polynomial_mollifier(1);
    CHECK(m1.c_q == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(m1.eval(0.0) == doctest::Approx(0.75).epsilon(1e-14));

    for (std::size_t q : {1u, 2u, 3u, 4u, 6u}) {
        auto m = polynomial_mollifier(q);
        double mass = simpson([&](double x) { return m.eval(x); }, -1, 1, 4096);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m.deriv(1, 0.0) == doctest::Approx(0.0));
        CHECK(m.eval(0.37) == doctest::Approx(m.eval(-0.37)).epsilon(1e-14));
        CHECK(m.eval(1.0) == doctest::Approx(0.0));
        CHECK(m.eval(1.5) == 0.0);  // compact support
    }
}

TEST_CASE("mollifier derivatives agree with central finite differences") {
    auto m = polynomial_mollifier(4);
    const double h = 1e-5;
    for (double x : {-0.8, -0.3, 0.15, 0.6, 0.9}) {
        for (std::size_t order = 1; order <= 3; ++order) {
            double fd = (m.deriv(order - 1, x + h) - m.deriv(order - 1, x - h)) /
                        (2 * h);
            double exact = m.deriv(order, x);
            CHECK(exact == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
    // scaled family eta_eps = eta(x/eps)/eps
    double eps = 0.1;
    CHECK(m.deriv_scaled(0, 0.05, eps) ==
          doctest::Approx(m.eval(0.5) / eps).epsilon(1e-14));
    CHECK(m.deriv_scaled(2, 0.05, eps) ==
          doctest::Approx(m.deriv(2, 0.5) / (eps * eps * eps)).epsilon(1e-14));
}

TEST_CASE("sigma_eps self-convolution for the zeroth-order operator") {
    auto spec = parse_pde("dt y = y");
    auto m = polynomial_mollifier(2);
    double eps = 0.1;
    SigmaEps sig(spec, m, eps);
    // sigma(x,x) = integral of eta_eps^2 = (1/eps) integral of eta^2
    double want =
        simpson([&](double u) { return m.eval(u) * m.eval(u); }, -1, 1, 4096) / eps;
    CHECK(sig.eval(0.5, 0.5) == doctest::Approx(want).epsilon(1e-8));
    CHECK(sig.eval(0.5, 0.5) > 0.0);

    // general off-diagonal values equal the fine-grid convolution oracle
    double x = 0.52, xp = 0.46;
    double oracle = simpson(
        [&](double z) {
            return m.deriv_scaled(0, x - z, eps) * m.deriv_scaled(0, z - xp, eps);
        },
        xp - eps, x + eps, 8192);
    CHECK(sig.eval(x, xp) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("sigma_eps is antisymmetric for a constant first-order coefficient") {
    auto spec = parse_pde("dt y = -1 * dx^1 y");
    auto m = polynomial_mollifier(3);
    SigmaEps sig(spec, m, 0.12);
    for (double x : {0.3, 0.5, 0.62}) {
        for (double d : {0.01, 0.08, 0.15, 0.21}) {
            double ab = sig.eval(x, x + d);
            double ba = sig.eval(x + d, x);
            CHECK(std::abs(ab + ba) <= 1e-9);
        }
    }
}

TEST_CASE("sigma_eps vanishes beyond twice the scale") {
    auto spec = parse_pde("dt y = dx^2 y");
    auto m = polynomial_mollifier(4);
    double eps = 0.08;
    SigmaEps sig(spec, m, eps);
    CHECK(sig.eval(0.2, 0.2 + 2 * eps + 1e-6) == 0.0);
    CHECK(sig.eval(0.1, 0.9) == 0.0);          // torus distance 0.2 > 2 eps
    CHECK(sig.eval(0.05, 0.95) != 0.0);        // torus wrap, distance 0.1
}

TEST_CASE("sigma_eps rejects oversized scales and weak mollifiers") {
    auto heat = parse_pde("dt y = dx^2 y");
    CHECK_THROWS(SigmaEps(heat, polynomial_mollifier(4), 0.3));  // torus cap 1/4
    CHECK_THROWS(SigmaEps(heat, polynomial_mollifier(1), 0.1));  // q < p+1
    CHECK_NOTHROW(SigmaEps(heat, polynomial_mollifier(3), 0.1));
}

TEST_CASE("apply_A_eps consistency for the second derivative") {
    auto spec = parse_pde("dt y = dx^2 y");
    auto m = polynomial_mollifier(4);
    const std::size_t g = 2048;
    Vec f(g), af(g);
    for (std::size_t i = 0; i < g; ++i) {
        double x = static_cast<double>(i) / g;
        f[i] = std::sin(2 * kPi * x);
        af[i] = -4 * kPi * kPi * f[i];
    }
    double prev = -1;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        Vec a = apply_A_eps(spec, m, eps, f);
        double err = 0;
        for (std::size_t i = 0; i < g; ++i) err = std::max(err, std::abs(a[i] - af[i]));
        double ratio = err / eps;
        if (prev >= 0) CHECK(ratio <= prev * 1.10);
        prev = ratio;
    }

    // constants are annihilated
    Vec c(g, 2.75);
    Vec ac = apply_A_eps(spec, m, 0.1, c);
    for (double v : ac) CHECK(std::abs(v) <= 1e-8);

    // resolution guard: fewer than 16 nodes per eps
    Vec tiny(64, 0.0);
    CHECK_THROWS(apply_A_eps(spec, m, 0.1, tiny));
}

TEST_CASE("apply_A_eps preserves dissipativity of the Laplacian") {
    auto spec = parse_pde("dt y = dx^2 y");
    auto m = polynomial_mollifier(4);
    const std::size_t g = 1024;
    CounterRng rng(101);
    for (int rep = 0; rep < 5; ++rep) {
        Vec f(g, 0.0);
        for (int mode = 1; mode <= 8; ++mode) {
            double amp = rng.uniform(-1, 1), phase = rng.uniform(0, 2 * kPi);
            for (std::size_t i = 0; i < g; ++i)
                f[i] += amp * std::sin(2 * kPi * mode * static_cast<double>(i) / g +
                                       phase);
        }
        Vec a = apply_A_eps(spec, m, 0.05, f);
        double quad = 0;
        for (std::size_t i = 0; i < g; ++i) quad += a[i] * f[i] / g;
        CHECK(quad <= 1e-8);
    }
}

TEST_CASE("particle solve of the zeroth-order growth equation") {
    auto spec = parse_pde("dt y = y");  // a_0 = 1: dt y = y, growth e^t
    auto m = polynomial_mollifier(2);
    auto y0 = [](double x) { return std::sin(2 * kPi * x); };
    PdeSolveOptions opts;
    auto y = particle_pde_solve(spec, m, 0.05, 256, y0, 0.5, opts);
    double err = 0, nrm = 0;
    for (std::size_t i = 0; i < 256; ++i) {
        double want = std::exp(0.5) * y0(y.partition.tags[i]);
        err += sq(y.values[i][0] - want);
        nrm += sq(want);
    }
    CHECK(std::sqrt(err / nrm) <= 0.05);
}

TEST_CASE("zero coefficients freeze the particle states") {
    auto spec = parse_pde("dt y = 0 * y");
    auto m = polynomial_mollifier(2);
    auto y0 = [](double x) { return x * (1 - x); };
    auto y = particle_pde_solve(spec, m, 0.1, 32, y0, 1.0, {});
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(y.values[i][0] == doctest::Approx(y0(y.partition.tags[i])).epsilon(1e-12));
}

TEST_CASE("transport particles track the shifted sine") {
    auto spec = parse_pde("dt y = -1 * dx^1 y");
    auto m = polynomial_mollifier(3);
    auto y0 = [](double x) { return std::sin(2 * kPi * x); };
    double t = 0.25;
    auto y = particle_pde_solve(spec, m, 0.07, 256, y0, t, {});
    double err = 0, nrm = 0;
    for (std::size_t i = 0; i < 256; ++i) {
        double want = std::sin(2 * kPi * (y.partition.tags[i] - t));
        err += sq(y.values[i][0] - want);
        nrm += sq(want);
    }
    CHECK(std::sqrt(err / nrm) <= 0.05);
}

TEST_CASE("reference solver closed forms") {
    auto y0 = [](double x) { return std::sin(2 * kPi * x); };

    auto heat = parse_pde("dt y = dx^2 y");
    Vec yh = reference_pde_solve(heat, y0, 0.1, 1024);
    for (std::size_t i = 0; i < 1024; i += 97) {
        double x = static_cast<double>(i) / 1024;
        CHECK(yh[i] == doctest::Approx(std::exp(-4 * kPi * kPi * 0.1) * y0(x))
                           .epsilon(1e-10));
    }

    auto transport = parse_pde("dt y = -1 * dx^1 y");
    Vec yt = reference_pde_solve(transport, y0, 0.3, 1024);
    for (std::size_t i = 0; i < 1024; i += 113) {
        double x = static_cast<double>(i) / 1024;
        CHECK(yt[i] == doctest::Approx(std::sin(2 * kPi * (x - 0.3))).epsilon(1e-10));
    }

    // variable-coefficient solves are grid-converged
    auto var = parse_pde("dt y = sin(2*pi*x) * dx^1 y");
    Vec a = reference_pde_solve(var, y0, 0.1, 2048);
    Vec b = reference_pde_solve(var, y0, 0.1, 4096);
    double diff = 0;
    for (std::size_t i = 0; i < 2048; ++i)
        diff = std::max(diff, std::abs(a[i] - b[2 * i]));
    CHECK(diff <= 1e-6);

    auto quasi = parse_pde("dt y = (y)*dx^0 y");
    CHECK_THROWS(reference_pde_solve(quasi, y0, 0.1));
}

TEST_CASE("scaling_schedule") {
    auto s = scaling_schedule(3, std::log(3.0), 2);  // ln N = C gives eps = 1
    CHECK(s.clamped);
    CHECK(s.eps == doctest::Approx(0.25));

    auto big = scaling_schedule(1000000, 1.0, 2);
    CHECK(big.clamped);  // (1/13.8155)^{1/4} = 0.519 before the clamp

    double prev = 1.0;
    for (std::size_t n : {64u, 128u, 256u, 512u, 1024u}) {
        auto v = scaling_schedule(n, 0.002, 1);
        CHECK(!v.clamped);
        CHECK(v.eps < prev);
        prev = v.eps;
    }

    CHECK_THROWS(scaling_schedule(2, 1.0, 2));
    CHECK_THROWS(scaling_schedule(64, 0.0, 2));
}

TEST_CASE("gaussian kernel variant") {
    auto spec = parse_pde("dt y = y", PdeDomain::interval);
    double eps = 0.05;
    auto mk = gaussian_pde_kernel(spec, eps);
    // l = 0 at x = x': a_0 xi' / sqrt(pi eps)
    double got = mk.kernel.eval(0, 0.4, 0.4, {0.0}, {2.0})[0];
    CHECK(got == doctest::Approx(2.0 / std::sqrt(kPi * eps)).epsilon(1e-12));

    // the first-derivative kernel is odd in x - x'
    auto spec1 = parse_pde("dt y = sin(2*pi*x) * dx^1 y", PdeDomain::interval);
    auto mk1 = gaussian_pde_kernel(spec1, eps);
    double plus = mk1.kernel.eval(0, 0.4, 0.4 + 0.02, {0.0}, {1.0})[0];
    double minus = mk1.kernel.eval(0, 0.4, 0.4 - 0.02, {0.0}, {1.0})[0];
    CHECK(plus == doctest::Approx(-minus).epsilon(1e-12));

    auto torus_spec = parse_pde("dt y = y");
    CHECK_THROWS(gaussian_pde_kernel(torus_spec, eps));
}
