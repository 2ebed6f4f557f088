#ifndef MFLAB_PARTICLES_HPP
#define MFLAB_PARTICLES_HPP

#include <string>

#include "mflab/kernels.hpp"
#include "mflab/partition.hpp"

namespace mflab {

// Finite particle configuration: frozen tags x_i (repetitions allowed for
// cloud systems) and states xi_i in R^d.
struct ParticleState {
    Vec tags;                       // size M
    std::vector<Vec> states;        // M rows of length d
    std::vector<std::size_t> site_index;  // particle -> partition cell

    std::size_t size() const { return tags.size(); }
    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }

    void validate() const;
};

enum class Scheme { euler, rk4 };

struct Trajectory {
    Vec times;                                 // t_0 < ... < t_K
    std::vector<std::vector<Vec>> states;      // per time: M rows of length d
    double dt = 0.0;
    std::string scheme;

    const std::vector<Vec>& final_states() const { return states.back(); }
};

struct IntegrateOptions {
    double blowup_threshold = 1e12;  // max |xi| component before aborting
    unsigned threads = 1;
    std::size_t store_every = 1;     // keep every k-th step (first/last always)
    // Hamiltonian kernels apply the delta_{ij} self-term when i == j; set via
    // the gradients, see hamiltonian_rhs below.
    const HamiltonianGradients* hamiltonian = nullptr;
};

// Y_i = (1/M) sum_j G(t, x_i, x_j, xi_i, xi_j), self-term included, inner sum
// in ascending j so results are bit-reproducible and thread-count independent.
std::vector<Vec> particle_rhs(const InteractionKernel& k, double t,
                              const ParticleState& s, unsigned threads = 1,
                              const HamiltonianGradients* ham = nullptr);

// Fixed-step explicit Euler or RK4; the last step is shortened to land
// exactly on t_end.
Trajectory integrate(const InteractionKernel& k, const ParticleState& s0,
                     double t_end, double dt, Scheme scheme,
                     const IntegrateOptions& opts = {});

// Cloud state: K state samples per partition site, M = N*K particles with the
// site tag repeated K times; represents product-Dirac Liouville data.
ParticleState cloud_state(const TaggedPartition& p,
                          const std::vector<std::vector<Vec>>& samples_per_site);

// Trajectory CSV: columns t,i,x_i,xi_1..xi_d.
void trajectory_to_csv(const Trajectory& tr, const ParticleState& s0,
                       const std::string& path);

}  // namespace mflab

#endif
