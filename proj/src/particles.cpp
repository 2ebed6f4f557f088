#include "mflab/particles.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mflab {

void ParticleState::validate() const {
    if (tags.size() != states.size())
        throw std::invalid_argument("particle state: tag/state count mismatch");
    std::size_t d = dim();
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != d)
            throw std::invalid_argument("particle state: ragged state rows");
        if (!all_finite(states[i]) || !std::isfinite(tags[i]))
            throw std::invalid_argument("particle state: non-finite entry");
    }
}

std::vector<Vec> particle_rhs(const InteractionKernel& k, double t,
                              const ParticleState& s, unsigned threads,
                              const HamiltonianGradients* ham) {
    const std::size_t m = s.size();
    const std::size_t d = s.dim();
    if (k.state_dim != d)
        throw std::invalid_argument("particle_rhs: kernel state_dim mismatch");
    std::vector<Vec> out(m, Vec(d, 0.0));
    const double inv_m = 1.0 / static_cast<double>(m);
    parallel_for(
        m,
        [&](std::size_t i) {
            Vec acc(d, 0.0), g(d);
            for (std::size_t j = 0; j < m; ++j) {
                if (ham != nullptr) {
                    g = hamiltonian_pair_eval(*ham, s.states[i], s.states[j], i == j);
                } else {
                    k.eval_fn(t, s.tags[i], s.tags[j], s.states[i].data(),
                              s.states[j].data(), g.data());
                }
                for (std::size_t c = 0; c < d; ++c) {
                    if (!std::isfinite(g[c]))
                        throw std::runtime_error(
                            "particle_rhs: non-finite kernel output at pair (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
                    acc[c] += g[c];
                }
            }
            for (std::size_t c = 0; c < d; ++c) out[i][c] = acc[c] * inv_m;
        },
        threads);
    return out;
}

namespace {

void axpy(std::vector<Vec>& y, double a, const std::vector<Vec>& x) {
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t c = 0; c < y[i].size(); ++c) y[i][c] += a * x[i][c];
}

void check_blowup(const std::vector<Vec>& states, double threshold) {
    for (const Vec& row : states)
        for (double v : row)
            if (!(std::fabs(v) < threshold))
                throw std::runtime_error(
                    "integrate: state exceeded blow-up threshold; the no-blow-up "
                    "hypothesis fails for this kernel/initial condition");
}

}  // namespace

Trajectory integrate(const InteractionKernel& k, const ParticleState& s0,
                     double t_end, double dt, Scheme scheme,
                     const IntegrateOptions& opts) {
    if (!(dt > 0)) throw std::invalid_argument("integrate: dt must be positive");
    if (t_end < 0) throw std::invalid_argument("integrate: t_end must be >= 0");
    s0.validate();

    Trajectory tr;
    tr.dt = dt;
    tr.scheme = (scheme == Scheme::euler) ? "euler" : "rk4";

    ParticleState cur = s0;
    double t = 0.0;
    tr.times.push_back(t);
    tr.states.push_back(cur.states);

    std::size_t step_count = 0;
    while (t < t_end - 1e-15) {
        double h = std::min(dt, t_end - t);
        if (scheme == Scheme::euler) {
            auto k1 = particle_rhs(k, t, cur, opts.threads, opts.hamiltonian);
            axpy(cur.states, h, k1);
        } else {
            ParticleState tmp = cur;
            auto k1 = particle_rhs(k, t, cur, opts.threads, opts.hamiltonian);
            tmp.states = cur.states;
            axpy(tmp.states, 0.5 * h, k1);
            auto k2 = particle_rhs(k, t + 0.5 * h, tmp, opts.threads, opts.hamiltonian);
            tmp.states = cur.states;
            axpy(tmp.states, 0.5 * h, k2);
            auto k3 = particle_rhs(k, t + 0.5 * h, tmp, opts.threads, opts.hamiltonian);
            tmp.states = cur.states;
            axpy(tmp.states, h, k3);
            auto k4 = particle_rhs(k, t + h, tmp, opts.threads, opts.hamiltonian);
            double w = h / 6.0;
            axpy(cur.states, w, k1);
            axpy(cur.states, 2 * w, k2);
            axpy(cur.states, 2 * w, k3);
            axpy(cur.states, w, k4);
        }
        t += h;
        ++step_count;
        check_blowup(cur.states, opts.blowup_threshold);
        bool last = !(t < t_end - 1e-15);
        if (last || step_count % opts.store_every == 0) {
            tr.times.push_back(t);
            tr.states.push_back(cur.states);
        }
    }
    return tr;
}

ParticleState cloud_state(const TaggedPartition& p,
                          const std::vector<std::vector<Vec>>& samples_per_site) {
    if (samples_per_site.size() != p.N)
        throw std::invalid_argument("cloud_state: one sample list per site required");
    std::size_t k = samples_per_site.front().size();
    if (k == 0) throw std::invalid_argument("cloud_state: need >= 1 sample per site");
    for (const auto& lst : samples_per_site)
        if (lst.size() != k)
            throw std::invalid_argument("cloud_state: ragged sample lists");
    ParticleState s;
    for (std::size_t i = 0; i < p.N; ++i)
        for (const Vec& xi : samples_per_site[i]) {
            s.tags.push_back(p.tags[i]);
            s.states.push_back(xi);
            s.site_index.push_back(i);
        }
    s.validate();
    return s;
}

void trajectory_to_csv(const Trajectory& tr, const ParticleState& s0,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::size_t d = s0.dim();
    out << "t,i,x";
    for (std::size_t c = 0; c < d; ++c) out << ",xi_" << (c + 1);
    out << "\n";
    out.precision(17);
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        for (std::size_t i = 0; i < s0.size(); ++i) {
            out << tr.times[k] << "," << i << "," << s0.tags[i];
            for (std::size_t c = 0; c < d; ++c) out << "," << tr.states[k][i][c];
            out << "\n";
        }
}

}  // namespace mflab
