#include "mflab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace mflab {

ParticleState EulerProblem::initial_state() const {
    ParticleState s;
    s.tags = quadrature.tags;
    s.states.reserve(quadrature.N);
    for (double x : quadrature.tags) s.states.push_back(y0(x));
    s.site_index.resize(quadrature.N);
    for (std::size_t i = 0; i < quadrature.N; ++i) s.site_index[i] = i;
    s.validate();
    return s;
}

std::vector<Vec> euler_rhs(const EulerProblem& p, double t,
                           const std::vector<Vec>& y, unsigned threads) {
    ParticleState s;
    s.tags = p.quadrature.tags;
    s.states = y;
    return particle_rhs(p.kernel, t, s, threads);
}

PartitionField reference_solution(const EulerProblem& p, double t_end, double dt,
                                  unsigned threads) {
    IntegrateOptions io;
    io.threads = threads;
    io.store_every = std::numeric_limits<std::size_t>::max();
    Trajectory tr = integrate(p.kernel, p.initial_state(), t_end, dt, Scheme::rk4, io);
    return field_from_states(p.quadrature, tr.final_states());
}

namespace {

double max_tag_error(const PartitionField& ref, const TaggedPartition& part,
                     const std::vector<Vec>& states) {
    double worst = 0;
    for (std::size_t i = 0; i < part.N; ++i) {
        Vec r = ref.eval(part.tags[i]);
        double s = 0;
        for (std::size_t c = 0; c < r.size(); ++c) s += sq(r[c] - states[i][c]);
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

// box-hull Lipschitz estimate over a trajectory of the fine system
double lipschitz_from_trajectory(const InteractionKernel& k, const Trajectory& tr,
                                 double t_end) {
    Vec lo = tr.states.front().front(), hi = lo;
    for (const auto& frame : tr.states)
        for (const Vec& row : frame)
            for (std::size_t c = 0; c < row.size(); ++c) {
                lo[c] = std::min(lo[c], row[c]);
                hi[c] = std::max(hi[c], row[c]);
            }
    BoundBox box;
    box.x_lo = 0;
    box.x_hi = 1;
    box.t_lo = 0;
    box.t_hi = std::max(t_end, 1e-9);
    for (std::size_t c = 0; c < lo.size(); ++c) {
        double pad = std::max(0.5, 0.1 * (hi[c] - lo[c]));
        box.xi_lo.push_back(lo[c] - pad);
        box.xi_hi.push_back(hi[c] + pad);
    }
    return lipschitz_estimate(k, box, 4096);
}

}  // namespace

std::pair<double, std::string> fit_rate(const std::vector<GraphLimitRow>& rows) {
    std::vector<std::pair<double, double>> pts;
    std::size_t dropped = 0;
    for (const auto& r : rows) {
        if (r.error > 0)
            pts.emplace_back(std::log(static_cast<double>(r.N)), std::log(r.error));
        else
            ++dropped;
    }
    if (pts.size() < 2)
        return {0.0, "slope undefined: fewer than two nonzero errors"};
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    std::string note = dropped ? std::to_string(dropped) + " zero-error rows excluded from fit"
                               : "";
    return {sxy / sxx, note};
}

GraphLimitResult graph_limit_experiment(const InteractionKernel& k,
                                        const std::function<Vec(double)>& y0,
                                        const std::vector<std::size_t>& N_list,
                                        double t_end,
                                        const GraphLimitOptions& opts) {
    if (N_list.empty()) throw std::invalid_argument("graph_limit_experiment: empty N list");
    std::size_t max_n = *std::max_element(N_list.begin(), N_list.end());
    std::size_t m = opts.reference_m ? opts.reference_m : 4 * max_n;
    if (opts.reference_m && opts.reference_m < 4 * max_n)
        throw std::invalid_argument(
            "graph_limit_experiment: reference grid must have at least 4x the largest N");

    EulerProblem ref_problem{k, uniform_partition(m, TagRule::midpoint, k.metric), y0};
    IntegrateOptions io;
    io.threads = opts.threads;
    Trajectory ref_tr =
        integrate(k, ref_problem.initial_state(), t_end, opts.dt, Scheme::rk4, io);
    PartitionField ref = field_from_states(ref_problem.quadrature, ref_tr.final_states());
    double lip = lipschitz_from_trajectory(k, ref_tr, t_end);

    GraphLimitResult res;
    res.lipschitz_hat = lip;
    for (std::size_t n : N_list) {
        TaggedPartition part = uniform_partition(n, opts.tag_rule, k.metric);
        EulerProblem prob{k, part, y0};
        Trajectory tr = integrate(k, prob.initial_state(), t_end, opts.dt, Scheme::rk4, io);
        GraphLimitRow row;
        row.N = n;
        row.error = max_tag_error(ref, part, tr.final_states());
        row.bound = std::pow(part.c_omega / static_cast<double>(n), opts.holder_alpha) *
                    (1.0 + opts.holder_seminorm) * std::exp(2.0 * t_end * lip);
        res.rows.push_back(row);
    }
    auto [slope, note] = fit_rate(res.rows);
    res.slope = slope;
    res.note = note;
    res.slope_valid = note.find("undefined") == std::string::npos;
    return res;
}

GraphLimitResult graph_limit_experiment_2(
    const InteractionKernel& k,
    const std::vector<std::pair<TaggedPartition, std::vector<Vec>>>& initial,
    double t_end, const GraphLimitOptions& opts) {
    if (initial.empty()) throw std::invalid_argument("graph_limit_experiment_2: no systems");
    std::size_t max_n = 0;
    for (const auto& [part, states] : initial) max_n = std::max(max_n, part.N);
    std::size_t m = opts.reference_m ? opts.reference_m : 4 * max_n;

    GraphLimitResult res;
    IntegrateOptions io;
    io.threads = opts.threads;
    double lip = 0;
    for (const auto& [part, states] : initial) {
        PartitionField lift = field_from_states(part, states);
        EulerProblem ref_problem{
            k, uniform_partition(m, TagRule::midpoint, k.metric),
            [&lift](double x) { return lift.eval(x); }};
        Trajectory ref_tr =
            integrate(k, ref_problem.initial_state(), t_end, opts.dt, Scheme::rk4, io);
        PartitionField ref =
            field_from_states(ref_problem.quadrature, ref_tr.final_states());
        lip = std::max(lip, lipschitz_from_trajectory(k, ref_tr, t_end));

        ParticleState s0;
        s0.tags = part.tags;
        s0.states = states;
        Trajectory tr = integrate(k, s0, t_end, opts.dt, Scheme::rk4, io);
        GraphLimitRow row;
        row.N = part.N;
        row.error = max_tag_error(ref, part, tr.final_states());
        row.bound = std::pow(part.c_omega / static_cast<double>(part.N), opts.holder_alpha) *
                    (1.0 + opts.holder_seminorm) * std::exp(2.0 * t_end * lip);
        res.rows.push_back(row);
    }
    res.lipschitz_hat = lip;
    auto [slope, note] = fit_rate(res.rows);
    res.slope = slope;
    res.note = note;
    res.slope_valid = note.find("undefined") == std::string::npos;
    return res;
}

void error_table_to_csv(const GraphLimitResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "N,error,bound\n";
    out.precision(17);
    for (const auto& row : r.rows)
        out << row.N << "," << row.error << "," << row.bound << "\n";
    out << "# slope," << r.slope << (r.note.empty() ? "" : "," + r.note) << "\n";
}

}  // namespace mflab
