#ifndef MFLAB_KERNELS_HPP
#define MFLAB_KERNELS_HPP

#include <functional>
#include <optional>
#include <string>

#include "mflab/common.hpp"

namespace mflab {

// Agent-dependent interaction kernel G(t, x, x', xi, xi') -> R^d.
// Immutable after construction; eval is deterministic and reentrant.
struct InteractionKernel {
    using EvalFn =
        std::function<void(double t, double x, double xp, const double* xi,
                           const double* xip, double* out)>;

    std::size_t state_dim = 1;
    EvalFn eval_fn;
    std::string name;

    // Regularity metadata used by bound evaluators.
    double holder_alpha = 1.0;          // declared Hölder exponent in (x,x')
    bool lipschitz_in_state = true;     // Lipschitz flag in (xi,xi')
    bool indistinguishable = false;     // eval independent of (x,x')
    OmegaMetric metric = OmegaMetric::interval;

    // Optional exact closed-form Lipschitz constant on boxes; when absent,
    // bound certificates must use sampled estimates.
    std::optional<double> exact_lipschitz;

    Vec eval(double t, double x, double xp, const Vec& xi, const Vec& xip) const {
        Vec out(state_dim);
        eval_fn(t, x, xp, xi.data(), xip.data(), out.data());
        return out;
    }
};

// Rectangular domain for sampled sup/Lipschitz estimation: an Omega interval,
// a per-coordinate state box and a time interval.
struct BoundBox {
    double x_lo = 0.0, x_hi = 1.0;
    Vec xi_lo, xi_hi;       // size = state_dim
    double t_lo = 0.0, t_hi = 0.0;

    bool degenerate() const;
};

// G(t,x,x',xi,xi') = sigma(x,x') (xi' - xi), the opinion propagation model.
InteractionKernel opinion_kernel(std::function<double(double, double)> sigma,
                                 std::size_t state_dim = 1,
                                 OmegaMetric metric = OmegaMetric::interval);

// Cucker-Smale: state xi = (q, p) in R^{2r},
// G = (p, a(|q - q'|) (p' - p)).
InteractionKernel cucker_smale_kernel(std::function<double(double)> a,
                                      std::size_t r = 1,
                                      OmegaMetric metric = OmegaMetric::interval);

// Hamiltonian pair interaction: state xi = (q, p) in R^2 (r = 1).
// Callers provide gradients of the single-particle Hamiltonian h(q,p) and the
// pairwise Hamiltonian h2(q,p,q',p').  The Kronecker self-term is applied by
// the particle module when the particle indices coincide (self = true).
struct HamiltonianGradients {
    std::function<double(double, double)> dh_dq;    // d h / dq
    std::function<double(double, double)> dh_dp;    // d h / dp
    std::function<double(double, double, double, double)> dh2_d1;  // d h2 / dq
    std::function<double(double, double, double, double)> dh2_d2;  // d h2 / dp
    std::function<double(double, double, double, double)> dh2_d3;  // d h2 / dq'
    std::function<double(double, double, double, double)> dh2_d4;  // d h2 / dp'
};

InteractionKernel hamiltonian_pair_kernel(HamiltonianGradients g,
                                          OmegaMetric metric = OmegaMetric::interval);

// Evaluates the Hamiltonian vector field for a given pair, with the
// delta_{ij} self-term switched on iff self is true.
Vec hamiltonian_pair_eval(const HamiltonianGradients& g, const Vec& xi,
                          const Vec& xip, bool self);

// Sampled lower estimate of the Lipschitz constant of G over a box: the
// maximum finite-difference quotient over `samples` random input pairs.
// Reports must label the result "estimated"; it never exceeds the true
// constant up to sampling resolution.
double lipschitz_estimate(const InteractionKernel& k, const BoundBox& box,
                          std::size_t samples, std::uint64_t seed = 1);

// Sampled sup of |G| over a box (same caveat: a lower estimate).
double sup_estimate(const InteractionKernel& k, const BoundBox& box,
                    std::size_t samples, std::uint64_t seed = 1);

}  // namespace mflab

#endif
