#ifndef MFLAB_MEASURES_HPP
#define MFLAB_MEASURES_HPP

#include <string>

#include "mflab/kernels.hpp"
#include "mflab/particles.hpp"
#include "mflab/partition.hpp"

namespace mflab {

// Weighted atoms on Omega x R^d.  Atoms are never merged; multiplicity is
// kept so weights stay rational.
struct DiscreteMeasure {
    Vec xs;                    // Omega coordinates
    std::vector<Vec> xis;      // state coordinates
    Vec weights;               // positive, sum to 1

    std::size_t size() const { return xs.size(); }
    std::size_t dim() const { return xis.empty() ? 0 : xis.front().size(); }
    void validate() const;
};

// Disintegration as grouped atoms: sites x_i with site weights nu_i and a
// conditional atom list per site.  Atoms share a site iff tags are
// bit-identical.
struct ConditionalFamily {
    Vec sites;                                  // distinct x_i
    Vec site_weights;                           // nu_i, sum to 1
    std::vector<std::vector<Vec>> atoms;        // per site: xi atoms
    std::vector<Vec> atom_weights;              // per site: conditional weights

    std::size_t dim() const;
    void validate() const;
};

struct MomentReport {
    std::vector<Vec> means;    // y_i per site
    Vec temperatures;          // T_i >= 0 (1/d normalization)
    // central_moments[k-2][i] = k-th central moment of site i (d = 1 only
    // for k >= 3)
    std::vector<Vec> central_moments;
};

DiscreteMeasure empirical(const ParticleState& s);

// (1/N) sum_i delta_{x_i} tensor delta_{y(x_i)}
DiscreteMeasure monokinetic(const TaggedPartition& p, const PartitionField& y);

// Atoms (x_i, xi) with weight nu_i * conditional weight.  Requires uniform
// site weights (tagged-partition construction).
DiscreteMeasure semi_empirical(const ConditionalFamily& f);

// Group atoms of a discrete measure by bit-identical tag.
ConditionalFamily disintegrate(const DiscreteMeasure& mu);

// X[mu](t,x,xi) = sum_a w_a G(t, x, x_a, xi, xi_a), fixed atom order.
Vec mean_field(const InteractionKernel& k, const DiscreteMeasure& mu, double t,
               double x, const Vec& xi);

MomentReport moments(const ConditionalFamily& f, std::size_t k_max);

// S_i = (1/N) sum_j sigma(x_i, x_j); throws on a negative sigma sample.
Vec site_rate(const std::function<double(double, double)>& sigma,
              const TaggedPartition& p);

void measure_to_csv(const DiscreteMeasure& mu, const std::string& path);
DiscreteMeasure measure_from_csv(const std::string& path);
void moments_to_csv(const ConditionalFamily& f, const MomentReport& r,
                    const std::string& path);

}  // namespace mflab

#endif
