#ifndef MFLAB_WASSERSTEIN_HPP
#define MFLAB_WASSERSTEIN_HPP

#include <string>

#include "mflab/measures.hpp"

namespace mflab {

struct TransportPlan {
    struct Entry {
        std::size_t a, b;   // atom indices in mu1, mu2
        double mass;
        double dist;
    };
    std::vector<Entry> entries;
    double cost = 0.0;

    // Throws if row/column sums deviate from the given weights by more
    // than 1e-10, or if cost disagrees with sum(mass*dist).
    void check_feasible(const Vec& w1, const Vec& w2) const;
};

// Exact W1 on the line: integral of |F1 - F2| over the merged atom grid.
double w1_line(const Vec& xs1, const Vec& ws1, const Vec& xs2, const Vec& ws2);

// Exact optimal transport between two weight vectors for an explicit cost
// matrix, solved as a min-cost flow on integer masses (weights lifted to a
// common denominator <= 1e6).
std::pair<double, TransportPlan> transport_lp(const Vec& w1, const Vec& w2,
                                              const std::vector<std::vector<double>>& cost);

// Exact W1 between discrete measures on Omega x R^d with ground distance
// sqrt(d_Omega(x,x')^2 + |xi - xi'|^2), solved as a min-cost flow on integer
// masses (weights lifted to a common denominator <= 1e6).  Atom counts are
// capped at 512 each.
std::pair<double, TransportPlan> w1_lp(const DiscreteMeasure& mu1,
                                       const DiscreteMeasure& mu2,
                                       OmegaMetric metric = OmegaMetric::interval);

// Disintegrated distance: sum_i nu_i * W1(mu1_{x_i}, mu2_{x_i}).  Requires
// bit-identical site sets and site weights.
double l1nu_w1(const ConditionalFamily& f1, const ConditionalFamily& f2,
               OmegaMetric metric = OmegaMetric::interval);

// Conservative product-space support bound: max over atoms of |x| + |xi|.
double support_sup_norm(const DiscreteMeasure& mu);

void plan_to_csv(const TransportPlan& plan, const std::string& path);

}  // namespace mflab

#endif
