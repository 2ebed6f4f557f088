#ifndef MFLAB_MARGINALS_HPP
#define MFLAB_MARGINALS_HPP

#include <string>

#include "mflab/measures.hpp"
#include "mflab/particles.hpp"

namespace mflab {

// Symmetrized n-th marginal of a Dirac N-particle configuration: equal
// weights (N-n)!/N! on all distinct n-tuples of (x_i, xi_i).
struct SymmetrizedMarginal {
    std::size_t n = 0;
    std::size_t N = 0;
    // atoms[a] is an n-tuple of (x, xi) pairs
    std::vector<std::vector<std::pair<double, Vec>>> atoms;
    Vec weights;
    double time = 0.0;
};

struct ChaosCertificate {
    std::size_t n = 0;
    std::size_t N = 0;
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double eps_term = 0.0;       // 2(e^{n^2/2N}-1) max(1, supp)
    double transport_term = 0.0; // n C(t) W1(mu^E_0, mu_0)
    double c_mu = 0.0;           // exp(2t(sup|G| + Lip G)), box estimates
    double supp_norm = 0.0;
    bool estimated_constants = true;
    std::string verdict;         // pass | inconclusive | fail
};

// epsilon_n = N^n (N-n)!/N! - 1, computed exactly in integer arithmetic
// (128-bit) with one final float division.
double epsilon_n(std::size_t N, std::size_t n);

// Enumerates all (N)_n distinct index tuples; capped at N <= 8, n <= 3.
SymmetrizedMarginal symmetrized_marginal(const ParticleState& s, std::size_t n);

// Residual measure beta_n from the decomposition
// rho^s_{N:n} = (1+eps_n)(rho^s_{N:1})^(x n) - eps_n beta_n:
// tuples with at least one repeated index, weight (N-n)!/N! / eps_n each
// times their multiplicity in the tensor power.
SymmetrizedMarginal beta_n_measure(const ParticleState& s, std::size_t n);

// n-fold tensor power of a discrete measure as tuple atoms.
SymmetrizedMarginal tensor_power(const DiscreteMeasure& mu, std::size_t n);

// Exact W1 between tuple-atom measures; ground distance is the sum of the
// per-component product-space distances.
double w1_tuples(const SymmetrizedMarginal& m1, const SymmetrizedMarginal& m2,
                 OmegaMetric metric = OmegaMetric::interval);

struct ChaosOptions {
    double dt = 1e-3;
    Scheme scheme = Scheme::rk4;
    unsigned threads = 1;
    double slack = 1.05;  // applied because the constants are box estimates
    std::size_t constant_samples = 4096;
};

// Certifies W1(rho(t)^s_{N:n}, mu_ref(t)^(x n)) against
// 2(e^{n^2/2N}-1) max(1,|supp mu(t)|) + n C(t) W1(mu^E_0, mu_0).
ChaosCertificate chaos_certificate(const InteractionKernel& k,
                                   const ParticleState& s0,
                                   const DiscreteMeasure& mu0_reference,
                                   const DiscreteMeasure& mut_reference,
                                   std::size_t n, double t,
                                   const ChaosOptions& opts = {});

// Per-site first moment field of a (possibly cloud) state.
PartitionField moment_measure_first(const TaggedPartition& p, const ParticleState& s);

void certificates_to_csv(const std::vector<ChaosCertificate>& certs,
                         const std::string& path);

}  // namespace mflab

#endif
