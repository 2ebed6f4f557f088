#include "mflab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mflab {

std::size_t TaggedPartition::cell_of(double x) const {
    if (x <= breakpoints.front()) return 0;
    if (x >= breakpoints.back()) return N - 1;
    // first i with a_{i+1} > x
    auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end(), x);
    return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
}

void TaggedPartition::validate() const {
    if (N == 0) throw std::invalid_argument("partition: N must be >= 1");
    if (breakpoints.size() != N + 1 || tags.size() != N)
        throw std::invalid_argument("partition: size mismatch");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw std::invalid_argument("partition: breakpoints must span [0,1]");
    for (std::size_t i = 0; i < N; ++i) {
        double lo = breakpoints[i], hi = breakpoints[i + 1];
        if (!(hi > lo)) throw std::invalid_argument("partition: breakpoints not increasing");
        if (tags[i] < lo || tags[i] >= hi) {
            if (!(i == N - 1 && tags[i] <= hi))
                throw std::invalid_argument("partition: tag outside its cell");
        }
        if (hi - lo > c_omega / static_cast<double>(N) + 1e-12)
            throw std::invalid_argument("partition: cell diameter exceeds C_Omega/N");
        if (i > 0 && !(tags[i] > tags[i - 1]))
            throw std::invalid_argument("partition: tags not strictly increasing");
    }
}

TaggedPartition uniform_partition(std::size_t N, TagRule rule, OmegaMetric metric) {
    if (N == 0) throw std::invalid_argument("uniform_partition: N must be >= 1");
    TaggedPartition p;
    p.N = N;
    p.metric = metric;
    p.c_omega = 1.0;
    p.breakpoints.resize(N + 1);
    p.tags.resize(N);
    double dn = static_cast<double>(N);
    for (std::size_t i = 0; i <= N; ++i) p.breakpoints[i] = static_cast<double>(i) / dn;
    for (std::size_t i = 0; i < N; ++i)
        p.tags[i] = (rule == TagRule::left) ? static_cast<double>(i) / dn
                                            : (static_cast<double>(i) + 0.5) / dn;
    return p;
}

TaggedPartition partition_from_breakpoints(Vec breakpoints, Vec tags, double c_omega,
                                           OmegaMetric metric) {
    TaggedPartition p;
    p.N = tags.size();
    p.breakpoints = std::move(breakpoints);
    p.tags = std::move(tags);
    p.c_omega = c_omega;
    p.metric = metric;
    p.validate();
    return p;
}

PartitionField field_from_states(const TaggedPartition& p,
                                 const std::vector<Vec>& states) {
    if (states.size() != p.N)
        throw std::invalid_argument("field_from_states: row count != N");
    std::size_t d = states.empty() ? 1 : states.front().size();
    for (const Vec& row : states) {
        if (row.size() != d)
            throw std::invalid_argument("field_from_states: ragged rows");
        if (!all_finite(row))
            throw std::invalid_argument("field_from_states: non-finite value");
    }
    PartitionField f;
    f.partition = p;
    f.dim = d;
    f.values = states;
    return f;
}

double sup_distance(const PartitionField& f, const PartitionField& g) {
    if (f.dim != g.dim) throw std::invalid_argument("sup_distance: dim mismatch");
    Vec grid = f.partition.breakpoints;
    grid.insert(grid.end(), g.partition.breakpoints.begin(),
                g.partition.breakpoints.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double best = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double mid = 0.5 * (grid[i] + grid[i + 1]);
        Vec a = f.eval(mid), b = g.eval(mid);
        double s = 0;
        for (std::size_t c = 0; c < a.size(); ++c) s += sq(a[c] - b[c]);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double riemann_quadrature(const TaggedPartition& p,
                          const std::function<double(double)>& f) {
    double s = 0;
    for (double x : p.tags) s += f(x);
    return s / static_cast<double>(p.N);
}

}  // namespace mflab
