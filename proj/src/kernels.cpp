#include "mflab/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mflab {

bool BoundBox::degenerate() const {
    if (!(x_hi > x_lo)) return true;
    if (xi_lo.size() != xi_hi.size() || xi_lo.empty()) return true;
    for (std::size_t i = 0; i < xi_lo.size(); ++i)
        if (!(xi_hi[i] > xi_lo[i])) return true;
    if (!std::isfinite(x_lo) || !std::isfinite(x_hi)) return true;
    if (!all_finite(xi_lo) || !all_finite(xi_hi)) return true;
    return false;
}

InteractionKernel opinion_kernel(std::function<double(double, double)> sigma,
                                 std::size_t state_dim, OmegaMetric metric) {
    InteractionKernel k;
    k.state_dim = state_dim;
    k.name = "opinion";
    k.metric = metric;
    k.eval_fn = [sigma, state_dim](double, double x, double xp, const double* xi,
                                   const double* xip, double* out) {
        double s = sigma(x, xp);
        for (std::size_t c = 0; c < state_dim; ++c) out[c] = s * (xip[c] - xi[c]);
    };
    return k;
}

InteractionKernel cucker_smale_kernel(std::function<double(double)> a,
                                      std::size_t r, OmegaMetric metric) {
    InteractionKernel k;
    k.state_dim = 2 * r;
    k.name = "cucker_smale";
    k.metric = metric;
    k.indistinguishable = true;
    k.eval_fn = [a, r](double, double, double, const double* xi, const double* xip,
                       double* out) {
        double qd = 0;
        for (std::size_t c = 0; c < r; ++c) qd += sq(xi[c] - xip[c]);
        double w = a(std::sqrt(qd));
        for (std::size_t c = 0; c < r; ++c) {
            out[c] = xi[r + c];                       // qdot = p
            out[r + c] = w * (xip[r + c] - xi[r + c]);  // pdot
        }
    };
    return k;
}

Vec hamiltonian_pair_eval(const HamiltonianGradients& g, const Vec& xi,
                          const Vec& xip, bool self) {
    double q = xi[0], p = xi[1], qp = xip[0], pp = xip[1];
    double qdot = g.dh_dp(q, p) + g.dh2_d4(q, p, qp, pp);
    double pdot = -g.dh_dq(q, p) - g.dh2_d3(q, p, qp, pp);
    if (self) {
        qdot += g.dh2_d2(q, p, qp, pp);
        pdot -= g.dh2_d1(q, p, qp, pp);
    }
    return {qdot, pdot};
}

InteractionKernel hamiltonian_pair_kernel(HamiltonianGradients g,
                                          OmegaMetric metric) {
    InteractionKernel k;
    k.state_dim = 2;
    k.name = "hamiltonian";
    k.metric = metric;
    k.indistinguishable = true;
    // The particle integrator compares tags by index; at kernel level the
    // self-term is off (x == x' equality of coordinates is not used).
    k.eval_fn = [g](double, double, double, const double* xi, const double* xip,
                    double* out) {
        Vec a(xi, xi + 2), b(xip, xip + 2);
        Vec r = hamiltonian_pair_eval(g, a, b, false);
        out[0] = r[0];
        out[1] = r[1];
    };
    return k;
}

namespace {

struct SamplePoint {
    double t, x, xp;
    Vec xi, xip;
};

SamplePoint draw_point(const BoundBox& box, std::size_t d, CounterRng& rng) {
    SamplePoint s;
    s.t = box.t_lo + (box.t_hi - box.t_lo) * rng.next_double();
    s.x = rng.uniform(box.x_lo, box.x_hi);
    s.xp = rng.uniform(box.x_lo, box.x_hi);
    s.xi.resize(d);
    s.xip.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        s.xi[c] = rng.uniform(box.xi_lo[c], box.xi_hi[c]);
        s.xip[c] = rng.uniform(box.xi_lo[c], box.xi_hi[c]);
    }
    return s;
}

double input_dist(const SamplePoint& a, const SamplePoint& b, OmegaMetric m) {
    double s = sq(omega_dist(a.x, b.x, m)) + sq(omega_dist(a.xp, b.xp, m));
    for (std::size_t c = 0; c < a.xi.size(); ++c)
        s += sq(a.xi[c] - b.xi[c]) + sq(a.xip[c] - b.xip[c]);
    return std::sqrt(s);
}

}  // namespace

double lipschitz_estimate(const InteractionKernel& k, const BoundBox& box,
                          std::size_t samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("lipschitz_estimate: samples >= 2");
    if (box.degenerate())
        throw std::invalid_argument("lipschitz_estimate: degenerate box");
    CounterRng rng(seed);
    double best = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        SamplePoint a = draw_point(box, k.state_dim, rng);
        SamplePoint b = draw_point(box, k.state_dim, rng);
        b.t = a.t;  // Lipschitz in space/state at fixed time
        double den = input_dist(a, b, k.metric);
        if (den < 1e-12) continue;
        Vec fa = k.eval(a.t, a.x, a.xp, a.xi, a.xip);
        Vec fb = k.eval(b.t, b.x, b.xp, b.xi, b.xip);
        double num = 0;
        for (std::size_t c = 0; c < fa.size(); ++c) num += sq(fa[c] - fb[c]);
        best = std::max(best, std::sqrt(num) / den);
    }
    return best;
}

double sup_estimate(const InteractionKernel& k, const BoundBox& box,
                    std::size_t samples, std::uint64_t seed) {
    if (box.degenerate()) throw std::invalid_argument("sup_estimate: degenerate box");
    CounterRng rng(seed);
    double best = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        SamplePoint a = draw_point(box, k.state_dim, rng);
        best = std::max(best, norm2(k.eval(a.t, a.x, a.xp, a.xi, a.xip)));
    }
    return best;
}

}  // namespace mflab
