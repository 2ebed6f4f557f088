#include "mflab/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mflab/wasserstein.hpp"

namespace mflab {

double epsilon_n(std::size_t N, std::size_t n) {
    if (n < 1 || n > N)
        throw std::invalid_argument("epsilon_n: need 1 <= n <= N");
    // N^n (N-n)!/N! - 1 = N^n / (N (N-1) ... (N-n+1)) - 1, exact in 128-bit
    // integers when it fits, long double product otherwise
    unsigned __int128 num = 1, den = 1;
    bool overflow = false;
    const unsigned __int128 lim = (~(unsigned __int128)0) / 64;
    for (std::size_t i = 0; i < n; ++i) {
        if (num > lim || den > lim) {
            overflow = true;
            break;
        }
        num *= N;
        den *= (N - i);
    }
    if (!overflow)
        return static_cast<double>(static_cast<long double>(num) /
                                   static_cast<long double>(den)) - 1.0;
    long double r = 1.0L;
    for (std::size_t i = 0; i < n; ++i)
        r *= static_cast<long double>(N) / static_cast<long double>(N - i);
    return static_cast<double>(r) - 1.0;
}

namespace {

void check_caps(std::size_t N, std::size_t n) {
    if (N > 8 || n > 3 || n < 1)
        throw std::invalid_argument(
            "symmetrized marginal: caps are N <= 8 and 1 <= n <= 3; requested "
            "enumeration has N*(N-1)*...*(N-n+1) tuples");
    if (n > N) throw std::invalid_argument("symmetrized marginal: need n <= N");
}

void check_distinct_tags(const ParticleState& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (s.tags[i] == s.tags[j])
                throw std::invalid_argument("symmetrized marginal: tags must be distinct");
}

// enumerate index tuples in lexicographic order; distinct_only skips tuples
// with repeated indices
template <class F>
void for_each_tuple(std::size_t N, std::size_t n, bool distinct_only, F&& f) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        bool ok = true;
        if (distinct_only)
            for (std::size_t a = 0; a < n && ok; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (idx[a] == idx[b]) {
                        ok = false;
                        break;
                    }
        if (ok) f(idx);
        std::size_t pos = n;
        while (pos > 0) {
            if (++idx[pos - 1] < N) break;
            idx[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
}

}  // namespace

SymmetrizedMarginal symmetrized_marginal(const ParticleState& s, std::size_t n) {
    s.validate();
    check_caps(s.size(), n);
    check_distinct_tags(s);
    const std::size_t N = s.size();
    double falling = 1;
    for (std::size_t i = 0; i < n; ++i) falling *= static_cast<double>(N - i);
    SymmetrizedMarginal m;
    m.n = n;
    m.N = N;
    for_each_tuple(N, n, true, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::pair<double, Vec>> tup;
        tup.reserve(n);
        for (std::size_t i : idx) tup.emplace_back(s.tags[i], s.states[i]);
        m.atoms.push_back(std::move(tup));
        m.weights.push_back(1.0 / falling);
    });
    return m;
}

SymmetrizedMarginal beta_n_measure(const ParticleState& s, std::size_t n) {
    s.validate();
    check_caps(s.size(), n);
    check_distinct_tags(s);
    const std::size_t N = s.size();
    if (n < 2 || N < 2)
        throw std::invalid_argument("beta_n: undefined when epsilon_n = 0 (need n >= 2, N >= 2)");
    double eps = epsilon_n(N, n);
    double falling = 1;
    for (std::size_t i = 0; i < n; ++i) falling *= static_cast<double>(N - i);
    double w = 1.0 / (falling * eps);
    SymmetrizedMarginal m;
    m.n = n;
    m.N = N;
    for_each_tuple(N, n, false, [&](const std::vector<std::size_t>& idx) {
        bool repeat = false;
        for (std::size_t a = 0; a < n && !repeat; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (idx[a] == idx[b]) {
                    repeat = true;
                    break;
                }
        if (!repeat) return;
        std::vector<std::pair<double, Vec>> tup;
        tup.reserve(n);
        for (std::size_t i : idx) tup.emplace_back(s.tags[i], s.states[i]);
        m.atoms.push_back(std::move(tup));
        m.weights.push_back(w);
    });
    return m;
}

SymmetrizedMarginal tensor_power(const DiscreteMeasure& mu, std::size_t n) {
    mu.validate();
    if (n < 1) throw std::invalid_argument("tensor_power: need n >= 1");
    double count = std::pow(static_cast<double>(mu.size()), static_cast<double>(n));
    if (count > 262144)
        throw std::invalid_argument("tensor_power: atom count would exceed 262144");
    SymmetrizedMarginal m;
    m.n = n;
    m.N = mu.size();
    for_each_tuple(mu.size(), n, false, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::pair<double, Vec>> tup;
        double w = 1;
        tup.reserve(n);
        for (std::size_t a : idx) {
            tup.emplace_back(mu.xs[a], mu.xis[a]);
            w *= mu.weights[a];
        }
        m.atoms.push_back(std::move(tup));
        m.weights.push_back(w);
    });
    return m;
}

double w1_tuples(const SymmetrizedMarginal& m1, const SymmetrizedMarginal& m2,
                 OmegaMetric metric) {
    if (m1.n != m2.n) throw std::invalid_argument("w1_tuples: order mismatch");
    if (m1.atoms.size() > 512 || m2.atoms.size() > 512)
        throw std::invalid_argument("w1_tuples: atom count exceeds the 512 LP cap");
    std::vector<std::vector<double>> cost(m1.atoms.size(),
                                          std::vector<double>(m2.atoms.size()));
    for (std::size_t a = 0; a < m1.atoms.size(); ++a)
        for (std::size_t b = 0; b < m2.atoms.size(); ++b) {
            double c = 0;
            for (std::size_t comp = 0; comp < m1.n; ++comp) {
                const auto& [x1, xi1] = m1.atoms[a][comp];
                const auto& [x2, xi2] = m2.atoms[b][comp];
                double dx = omega_dist(x1, x2, metric);
                double s = dx * dx;
                for (std::size_t cdim = 0; cdim < xi1.size(); ++cdim)
                    s += sq(xi1[cdim] - xi2[cdim]);
                c += std::sqrt(s);
            }
            cost[a][b] = c;
        }
    return transport_lp(m1.weights, m2.weights, cost).first;
}

ChaosCertificate chaos_certificate(const InteractionKernel& k,
                                   const ParticleState& s0,
                                   const DiscreteMeasure& mu0_reference,
                                   const DiscreteMeasure& mut_reference,
                                   std::size_t n, double t,
                                   const ChaosOptions& opts) {
    s0.validate();
    ChaosCertificate cert;
    cert.n = n;
    cert.N = s0.size();
    cert.t = t;

    ParticleState st = s0;
    double x_lo = *std::min_element(s0.tags.begin(), s0.tags.end());
    double x_hi = *std::max_element(s0.tags.begin(), s0.tags.end());
    Vec xi_lo = s0.states.front(), xi_hi = s0.states.front();
    auto widen = [&](const std::vector<Vec>& rows) {
        for (const Vec& r : rows)
            for (std::size_t c = 0; c < r.size(); ++c) {
                xi_lo[c] = std::min(xi_lo[c], r[c]);
                xi_hi[c] = std::max(xi_hi[c], r[c]);
            }
    };
    if (t > 0) {
        IntegrateOptions io;
        io.threads = opts.threads;
        Trajectory tr = integrate(k, s0, t, opts.dt, opts.scheme, io);
        for (const auto& frame : tr.states) widen(frame);
        st.states = tr.final_states();
    } else {
        widen(s0.states);
    }
    widen(mut_reference.xis);

    SymmetrizedMarginal marg = symmetrized_marginal(st, n);
    cert.measured = w1_tuples(marg, tensor_power(mut_reference, n));

    cert.supp_norm = support_sup_norm(mut_reference);
    cert.eps_term = 2.0 * (std::exp(static_cast<double>(n * n) /
                                    (2.0 * static_cast<double>(cert.N))) - 1.0) *
                    std::max(1.0, cert.supp_norm);

    double w1_0 = w1_lp(empirical(s0), mu0_reference, k.metric).first;
    cert.c_mu = 1.0;
    // sampled sup/Lipschitz constants enter only through C(mu(t)); when the
    // transport term vanishes the bound is exact
    cert.estimated_constants = t > 0 && w1_0 > 0;
    if (cert.estimated_constants) {
        BoundBox box;
        box.x_lo = x_lo;
        box.x_hi = x_hi;
        box.t_lo = 0;
        box.t_hi = t;
        // pad the state hull so finite-difference sampling has room
        for (std::size_t c = 0; c < xi_lo.size(); ++c) {
            double pad = std::max(0.5, 0.1 * (xi_hi[c] - xi_lo[c]));
            box.xi_lo.push_back(xi_lo[c] - pad);
            box.xi_hi.push_back(xi_hi[c] + pad);
        }
        if (box.x_hi - box.x_lo < 1e-9) box.x_hi = box.x_lo + 1e-9;
        double sup = sup_estimate(k, box, opts.constant_samples);
        double lip = lipschitz_estimate(k, box, opts.constant_samples);
        cert.c_mu = std::exp(2.0 * t * (sup + lip));
    }
    cert.transport_term = static_cast<double>(n) * cert.c_mu * w1_0;
    cert.bound = cert.eps_term + cert.transport_term;

    double slack = cert.estimated_constants ? opts.slack : 1.0 + 1e-12;
    if (cert.measured <= cert.bound * slack)
        cert.verdict = "pass";
    else
        cert.verdict = cert.estimated_constants ? "inconclusive" : "fail";
    return cert;
}

PartitionField moment_measure_first(const TaggedPartition& p, const ParticleState& s) {
    s.validate();
    std::size_t d = s.dim();
    std::vector<Vec> sums(p.N, Vec(d, 0.0));
    std::vector<std::size_t> counts(p.N, 0);
    for (std::size_t a = 0; a < s.size(); ++a) {
        std::size_t i = a < s.site_index.size() ? s.site_index[a] : p.cell_of(s.tags[a]);
        if (i >= p.N) throw std::invalid_argument("moment_measure_first: site index out of range");
        for (std::size_t c = 0; c < d; ++c) sums[i][c] += s.states[a][c];
        ++counts[i];
    }
    for (std::size_t i = 0; i < p.N; ++i) {
        if (counts[i] == 0)
            throw std::invalid_argument("moment_measure_first: site " + std::to_string(i) +
                                        " has no particles");
        for (double& v : sums[i]) v /= static_cast<double>(counts[i]);
    }
    return field_from_states(p, sums);
}

void certificates_to_csv(const std::vector<ChaosCertificate>& certs,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "N,n,t,measured,bound,eps_term,transport_term,c_mu,supp_norm,"
           "estimated_constants,verdict\n";
    out.precision(17);
    for (const auto& c : certs)
        out << c.N << "," << c.n << "," << c.t << "," << c.measured << "," << c.bound
            << "," << c.eps_term << "," << c.transport_term << "," << c.c_mu << ","
            << c.supp_norm << "," << (c.estimated_constants ? 1 : 0) << "," << c.verdict
            << "\n";
}

}  // namespace mflab
