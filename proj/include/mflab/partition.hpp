#ifndef MFLAB_PARTITION_HPP
#define MFLAB_PARTITION_HPP

#include <functional>

#include "mflab/common.hpp"

namespace mflab {

enum class TagRule { left, midpoint };

// Tagged partition of Omega = [0,1]: cells Omega_i = [a_i, a_{i+1}) (last cell
// closed at 1), one tag x_i per cell, partition constant C_Omega such that
// diam(Omega_i) <= C_Omega / N.
struct TaggedPartition {
    std::size_t N = 0;
    Vec breakpoints;   // a_1 < ... < a_{N+1}, a_1 = 0, a_{N+1} = 1
    Vec tags;          // x_i in [a_i, a_{i+1})
    double c_omega = 1.0;
    OmegaMetric metric = OmegaMetric::interval;

    // Index of the cell containing x (right-closed convention: x = a_{i+1}
    // belongs to cell i+1; x = 1 belongs to the last cell).
    std::size_t cell_of(double x) const;

    void validate() const;  // throws on invariant violation
};

// Piecewise-constant field y_Xi(x) = xi_i for x in Omega_i.
struct PartitionField {
    TaggedPartition partition;
    std::size_t dim = 1;
    std::vector<Vec> values;  // N rows of length dim

    Vec eval(double x) const { return values[partition.cell_of(x)]; }
};

// Uniform Lebesgue partition, a_i = (i-1)/N, C_Omega = 1.
TaggedPartition uniform_partition(std::size_t N, TagRule rule = TagRule::midpoint,
                                  OmegaMetric metric = OmegaMetric::interval);

// Non-uniform partitions via explicit breakpoints and tags (invariants checked).
TaggedPartition partition_from_breakpoints(Vec breakpoints, Vec tags,
                                           double c_omega,
                                           OmegaMetric metric = OmegaMetric::interval);

PartitionField field_from_states(const TaggedPartition& p,
                                 const std::vector<Vec>& states);

// Exact L-infinity distance between two piecewise-constant fields, computed
// on the union of both breakpoint grids.
double sup_distance(const PartitionField& f, const PartitionField& g);

// Riemann sum (1/N) sum_i f(x_i).
double riemann_quadrature(const TaggedPartition& p,
                          const std::function<double(double)>& f);

}  // namespace mflab

#endif
