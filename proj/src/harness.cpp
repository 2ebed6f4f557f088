#include "mflab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mflab/euler.hpp"
#include "mflab/kernels.hpp"
#include "mflab/marginals.hpp"
#include "mflab/measures.hpp"
#include "mflab/particles.hpp"
#include "mflab/pde.hpp"
#include "mflab/wasserstein.hpp"

namespace mflab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

bool Scenario::has(const std::string& key) const { return values.count(key) > 0; }

std::string Scenario::get_string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw std::invalid_argument("scenario: missing required key '" + key + "'");
    return it->second;
}

std::string Scenario::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double Scenario::get_number(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stod(it->second);
}

double Scenario::require_number(const std::string& key) const {
    return std::stod(get_string(key));
}

std::vector<std::size_t> Scenario::get_size_list(const std::string& key) const {
    std::vector<std::size_t> out;
    std::stringstream ss(get_string(key));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(static_cast<std::size_t>(std::stoull(cell)));
    }
    if (out.empty()) throw std::invalid_argument("scenario: empty list for '" + key + "'");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1])
            throw std::invalid_argument("scenario: '" + key + "' must be ascending");
    return out;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    Scenario sc;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        sc.values[key] = val;
    }
    sc.kind = sc.get_string("kind");
    return sc;
}

RateFit fit_rate(const std::vector<std::pair<std::size_t, double>>& points) {
    std::vector<std::pair<double, double>> logs;
    std::size_t dropped = 0;
    for (const auto& [n, e] : points) {
        if (e > 0)
            logs.emplace_back(std::log(static_cast<double>(n)), std::log(e));
        else
            ++dropped;
    }
    if (logs.size() < 3)
        throw std::invalid_argument("fit_rate: need at least 3 positive-error points");
    double mx = 0, my = 0;
    for (auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= logs.size();
    my /= logs.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    for (auto& [x, y] : logs) fit.residuals.push_back(y - (fit.intercept + fit.slope * x));
    if (dropped)
        fit.note = std::to_string(dropped) + " zero-error points excluded from fit";
    return fit;
}

namespace {

InteractionKernel kernel_by_name(const std::string& name) {
    if (name == "opinion_constant")
        return opinion_kernel([](double, double) { return 1.0; });
    if (name == "opinion_product")
        return opinion_kernel([](double x, double xp) { return 1.0 + x * xp; });
    if (name == "cucker_smale")
        return cucker_smale_kernel([](double r) { return 1.0 / (1.0 + r * r); });
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

std::function<Vec(double)> profile_by_name(const std::string& name, std::size_t d) {
    if (name == "linear") return [d](double x) { return Vec(d, x); };
    if (name == "sine")
        return [d](double x) { return Vec(d, std::sin(2 * 3.14159265358979323846 * x)); };
    throw std::invalid_argument("unknown initial profile '" + name + "'");
}

std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || dir == ".") return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

DiscreteMeasure random_measure(CounterRng& rng, std::size_t d, std::size_t max_atoms) {
    std::size_t k = 1 + rng.index(max_atoms);
    DiscreteMeasure mu;
    // weights live on a fixed 1/8 grid so that tensor powers and pair
    // products of two independent measures still fit the integer-grid lift
    const std::size_t total = 8;
    std::vector<std::size_t> masses(k, 1);
    for (std::size_t u = k; u < total; ++u) ++masses[rng.index(k)];
    for (std::size_t a = 0; a < k; ++a) {
        mu.xs.push_back(rng.uniform(0.0, 1.0));
        Vec xi(d);
        for (double& v : xi) v = rng.uniform(-1.0, 1.0);
        mu.xis.push_back(xi);
        mu.weights.push_back(static_cast<double>(masses[a]) / static_cast<double>(total));
    }
    return mu;
}

DiscreteMeasure marginal_component(const SymmetrizedMarginal& m, std::size_t comp) {
    DiscreteMeasure mu;
    for (std::size_t a = 0; a < m.atoms.size(); ++a) {
        mu.xs.push_back(m.atoms[a][comp].first);
        mu.xis.push_back(m.atoms[a][comp].second);
        mu.weights.push_back(m.weights[a]);
    }
    return mu;
}

SymmetrizedMarginal product_pair(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    SymmetrizedMarginal m;
    m.n = 2;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            m.atoms.push_back({{a.xs[i], a.xis[i]}, {b.xs[j], b.xis[j]}});
            m.weights.push_back(a.weights[i] * b.weights[j]);
        }
    return m;
}

}  // namespace

W1SuiteResult w1_lemma_suite(std::size_t instances, std::uint64_t seed) {
    W1SuiteResult res;
    res.instances = instances;
    CounterRng rng(seed);
    auto fail = [&](std::size_t inst, const std::string& what) {
        ++res.failures;
        if (res.failure_notes.size() < 20)
            res.failure_notes.push_back("instance " + std::to_string(inst) + ": " + what);
    };
    for (std::size_t inst = 0; inst < instances; ++inst) {
        std::size_t d = 1 + rng.index(2);
        DiscreteMeasure a = random_measure(rng, d, 4);
        DiscreteMeasure b = random_measure(rng, d, 4);
        DiscreteMeasure c = random_measure(rng, d, 4);
        double dab = w1_lp(a, b).first;
        double dba = w1_lp(b, a).first;
        if (std::fabs(dab - dba) > 1e-10) fail(inst, "symmetry");
        double dac = w1_lp(a, c).first, dcb = w1_lp(c, b).first;
        if (dab > dac + dcb + 1e-9) fail(inst, "triangle inequality");
        for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
            double dt = w1_tuples(tensor_power(a, n), tensor_power(b, n));
            // the power-form lower bound W1^n <= W1(tensor) only holds for
            // W1 <= 1 (two Diracs at distance c give c^n vs n*c); marginal
            // contraction gives the unconditional lower bound W1 <= W1(tensor)
            if (dab > dt + 1e-9)
                fail(inst, "tensor monotone lower bound n=" + std::to_string(n));
            if (dab <= 1.0 && std::pow(dab, static_cast<double>(n)) > dt + 1e-9)
                fail(inst, "tensor lower bound n=" + std::to_string(n));
            if (dt > static_cast<double>(n) * dab + 1e-9)
                fail(inst, "tensor upper bound n=" + std::to_string(n));
        }
        // marginal contraction on random pair couplings
        SymmetrizedMarginal ja = product_pair(a, c), jb = product_pair(b, c);
        double djoint = w1_tuples(ja, jb);
        double dmarg = w1_lp(marginal_component(ja, 0), marginal_component(jb, 0)).first;
        if (dmarg > djoint + 1e-9) fail(inst, "marginal contraction");
        // common tensor factor
        if (std::fabs(djoint - dab) > 1e-9) fail(inst, "common-factor equality");
        if (dab > support_sup_norm(a) + support_sup_norm(b) + 1e-9)
            fail(inst, "support bound");
        // families with common marginal nu: uniform sites shared by both
        {
            std::size_t sites = 2;
            ConditionalFamily f1, f2;
            for (std::size_t i = 0; i < sites; ++i) {
                double x = rng.uniform(0.0, 1.0);
                f1.sites.push_back(x);
                f2.sites.push_back(x);
                f1.site_weights.push_back(0.5);
                f2.site_weights.push_back(0.5);
                DiscreteMeasure g1 = random_measure(rng, 1, 3);
                DiscreteMeasure g2 = random_measure(rng, 1, 3);
                f1.atoms.push_back(g1.xis);
                f1.atom_weights.push_back(g1.weights);
                f2.atoms.push_back(g2.xis);
                f2.atom_weights.push_back(g2.weights);
            }
            double full = w1_lp(semi_empirical(f1), semi_empirical(f2)).first;
            double disint = l1nu_w1(f1, f2);
            if (full > disint + 1e-9) fail(inst, "disintegrated-distance domination");
        }
    }
    return res;
}

ConsensusResult consensus_experiment(std::size_t N, std::size_t K, double t_end,
                                     double dt, std::uint64_t seed, unsigned threads) {
    TaggedPartition part = uniform_partition(N, TagRule::midpoint);
    auto sigma = [](double x, double xp) { return 1.0 + x * xp; };
    InteractionKernel kernel = opinion_kernel(sigma);

    CounterRng rng(seed);
    std::vector<std::vector<Vec>> samples(N);
    for (std::size_t i = 0; i < N; ++i) {
        Vec offs(K);
        double mean = 0;
        for (double& o : offs) {
            o = rng.uniform(-0.5, 0.5);
            mean += o;
        }
        mean /= static_cast<double>(K);
        for (std::size_t k = 0; k < K; ++k)
            samples[i].push_back(Vec{part.tags[i] + offs[k] - mean});
    }
    ParticleState s0 = cloud_state(part, samples);

    IntegrateOptions io;
    io.threads = threads;
    io.store_every = std::numeric_limits<std::size_t>::max();
    Trajectory tr = integrate(kernel, s0, t_end, dt, Scheme::rk4, io);

    auto family_of = [&](const std::vector<Vec>& states) {
        ConditionalFamily f;
        f.sites = part.tags;
        f.site_weights.assign(N, 1.0 / static_cast<double>(N));
        f.atoms.assign(N, {});
        f.atom_weights.assign(N, {});
        for (std::size_t a = 0; a < s0.size(); ++a) {
            std::size_t i = s0.site_index[a];
            f.atoms[i].push_back(states[a]);
            f.atom_weights[i].push_back(1.0 / static_cast<double>(K));
        }
        return f;
    };

    MomentReport m0 = moments(family_of(s0.states), 4);
    MomentReport m1 = moments(family_of(tr.final_states()), 4);
    Vec s_rates = site_rate(sigma, part);

    ConsensusResult res;
    res.sites = part.tags;
    res.s_rates = s_rates;
    std::size_t votes_k = 0, votes_plain = 0;
    for (std::size_t i = 0; i < N; ++i) {
        res.t_start.push_back(m0.temperatures[i]);
        res.t_end_vals.push_back(m1.temperatures[i]);
        double expected = m0.temperatures[i] * std::exp(-2.0 * s_rates[i] * t_end);
        double rel = std::fabs(m1.temperatures[i] - expected) / expected;
        res.rel_err.push_back(rel);
        res.max_rel_err = std::max(res.max_rel_err, rel);
        for (std::size_t k : {std::size_t{3}, std::size_t{4}}) {
            double y0k = m0.central_moments[k - 2][i];
            double y1k = m1.central_moments[k - 2][i];
            double rate = 0;
            if (std::fabs(y0k) > 1e-12 && std::fabs(y1k) > 1e-300 &&
                y0k * y1k > 0)
                rate = std::log(y0k / y1k) / t_end;
            (k == 3 ? res.y3_rate : res.y4_rate).push_back(rate);
            if (rate != 0) {
                double dk = std::fabs(rate - static_cast<double>(k) * s_rates[i]);
                double dp = std::fabs(rate - s_rates[i]);
                (dk < dp ? votes_k : votes_plain) += 1;
            }
        }
    }
    res.moment_rate_winner = votes_k >= votes_plain ? "k*S" : "S";
    return res;
}

namespace {

RunReport run_graph_limit(const Scenario& sc, const RunOptions& opts) {
    RunReport rep;
    InteractionKernel k = kernel_by_name(sc.get_string("kernel", "opinion_constant"));
    std::size_t d = k.state_dim;
    auto y0 = profile_by_name(sc.get_string("y0", "linear"), d);
    GraphLimitOptions go;
    go.dt = sc.get_number("dt", 1e-3);
    go.reference_m = static_cast<std::size_t>(sc.get_number("reference_m", 0));
    go.threads = opts.threads;
    std::string tags = sc.get_string("tags", "left");
    if (tags == "left")
        go.tag_rule = TagRule::left;
    else if (tags == "midpoint")
        go.tag_rule = TagRule::midpoint;
    else
        throw std::invalid_argument("graph_limit: unknown tags '" + tags + "'");
    GraphLimitResult res = graph_limit_experiment(k, y0, sc.get_size_list("N_list"),
                                                  sc.get_number("t_end", 1.0), go);
    error_table_to_csv(res, join_path(opts.out_dir, sc.get_string("out", "graph_limit.csv")));

    std::vector<std::pair<std::size_t, double>> pts;
    for (const auto& r : res.rows) pts.emplace_back(r.N, r.error);
    RateFit fit = fit_rate(pts);
    std::ostringstream line;
    line.precision(6);
    line << "graph_limit slope=" << fit.slope << " r2=" << fit.r2;
    bool ok = true;
    if (sc.has("slope_min") && fit.slope < sc.require_number("slope_min")) ok = false;
    if (sc.has("slope_max") && fit.slope > sc.require_number("slope_max")) ok = false;
    if (sc.has("r2_min") && fit.r2 < sc.require_number("r2_min")) ok = false;
    bool bound_ok = true;
    for (const auto& r : res.rows)
        if (r.error > r.bound * 1.05) bound_ok = false;
    if (sc.get_string("check_bound", "true") == "true" && !bound_ok) ok = false;
    line << " bound_check=" << (bound_ok ? "pass" : "fail") << " verdict="
         << (ok ? "pass" : "fail");
    rep.summary_lines.push_back(line.str());
    rep.ok = ok;
    return rep;
}

RunReport run_chaos(const Scenario& sc, const RunOptions& opts) {
    RunReport rep;
    InteractionKernel k = kernel_by_name(sc.get_string("kernel", "opinion_constant"));
    std::size_t n = static_cast<std::size_t>(sc.get_number("n", 2));
    std::vector<double> t_list;
    {
        std::stringstream ss(sc.get_string("t_list", "0,1"));
        std::string cell;
        while (std::getline(ss, cell, ',')) t_list.push_back(std::stod(trim(cell)));
    }
    std::vector<ChaosCertificate> certs;
    bool ok = true;
    for (std::size_t N : sc.get_size_list("N_list")) {
        CounterRng rng(opts.seed + N);
        TaggedPartition part = uniform_partition(N, TagRule::midpoint);
        ParticleState s0;
        s0.tags = part.tags;
        for (std::size_t i = 0; i < N; ++i)
            s0.states.push_back(Vec{rng.uniform(-1.0, 1.0)});
        DiscreteMeasure mu0 = empirical(s0);
        for (double t : t_list) {
            // with mu_0 = mu^E_0 the mean-field flow is the particle flow, so
            // the reference at time t is the evolved empirical measure
            ParticleState st = s0;
            if (t > 0) {
                IntegrateOptions io;
                io.threads = opts.threads;
                io.store_every = std::numeric_limits<std::size_t>::max();
                st.states =
                    integrate(k, s0, t, sc.get_number("dt", 1e-3), Scheme::rk4, io)
                        .final_states();
            }
            ChaosOptions co;
            co.dt = sc.get_number("dt", 1e-3);
            co.threads = opts.threads;
            ChaosCertificate cert =
                chaos_certificate(k, s0, mu0, empirical(st), n, t, co);
            if (cert.verdict == "fail") ok = false;
            certs.push_back(cert);
        }
    }
    certificates_to_csv(certs, join_path(opts.out_dir, sc.get_string("out", "chaos.csv")));
    std::size_t pass = 0, inconclusive = 0, failc = 0;
    for (const auto& c : certs)
        (c.verdict == "pass" ? pass : (c.verdict == "inconclusive" ? inconclusive : failc))++;
    rep.summary_lines.push_back("chaos pass=" + std::to_string(pass) +
                                " inconclusive=" + std::to_string(inconclusive) +
                                " fail=" + std::to_string(failc) + " verdict=" +
                                (ok ? "pass" : "fail"));
    rep.ok = ok;
    return rep;
}

RunReport run_consensus(const Scenario& sc, const RunOptions& opts) {
    RunReport rep;
    std::size_t N = static_cast<std::size_t>(sc.get_number("N", 8));
    std::size_t K = static_cast<std::size_t>(sc.get_number("K", 16));
    double t_end = sc.get_number("t_end", 1.0);
    ConsensusResult res = consensus_experiment(N, K, t_end, sc.get_number("dt", 1e-3),
                                               opts.seed, opts.threads);
    std::ofstream out(join_path(opts.out_dir, sc.get_string("out", "consensus.csv")));
    out << "site,x,S,T_start,T_end,rel_err,y3_rate,y4_rate\n";
    out.precision(17);
    for (std::size_t i = 0; i < N; ++i)
        out << i << "," << res.sites[i] << "," << res.s_rates[i] << "," << res.t_start[i]
            << "," << res.t_end_vals[i] << "," << res.rel_err[i] << "," << res.y3_rate[i]
            << "," << res.y4_rate[i] << "\n";
    double tol = sc.get_number("tol", 1e-5);
    bool ok = res.max_rel_err <= tol;
    std::ostringstream line;
    line.precision(6);
    line << "consensus max_rel_err=" << res.max_rel_err << " moment_rate_winner="
         << res.moment_rate_winner << " verdict=" << (ok ? "pass" : "fail");
    rep.summary_lines.push_back(line.str());
    rep.ok = ok;
    return rep;
}

RunReport run_pde(const Scenario& sc, const RunOptions& opts) {
    RunReport rep;
    PdeDomain domain = sc.get_string("domain", "torus") == "interval"
                           ? PdeDomain::interval
                           : PdeDomain::torus;
    PdeSpec spec = parse_pde(sc.get_string("pde"), domain);
    Mollifier m = polynomial_mollifier(spec.p + 2);
    auto y0v = profile_by_name(sc.get_string("y0", "sine"), 1);
    auto y0 = [&y0v](double x) { return y0v(x)[0]; };
    double t_end = sc.get_number("t_end", 0.25);
    double C = sc.get_number("C", 1.0);
    Vec ref = reference_pde_solve(spec, y0, t_end);

    std::ofstream out(join_path(opts.out_dir, sc.get_string("out", "pde.csv")));
    out << "N,eps,l2_error,rel_error\n";
    out.precision(17);
    Vec rels;
    PdeSolveOptions po;
    po.dt = sc.get_number("dt", 1e-3);
    po.threads = opts.threads;
    for (std::size_t N : sc.get_size_list("N_list")) {
        double eps = sc.has("eps") ? sc.require_number("eps")
                                   : scaling_schedule(N, C, spec.p).eps;
        PartitionField y = particle_pde_solve(spec, m, eps, N, y0, t_end, po);
        double err2 = 0, norm2v = 0;
        const std::size_t g = ref.size();
        for (std::size_t i = 0; i < N; ++i) {
            double x = y.partition.tags[i];
            double pos = x * static_cast<double>(g);
            std::size_t j0 = static_cast<std::size_t>(pos) % g;
            double frac = pos - std::floor(pos);
            double rv = ref[j0] * (1 - frac) + ref[(j0 + 1) % g] * frac;
            err2 += sq(y.values[i][0] - rv);
            norm2v += sq(rv);
        }
        double l2 = std::sqrt(err2 / static_cast<double>(N));
        double rel = l2 / std::sqrt(norm2v / static_cast<double>(N));
        rels.push_back(rel);
        out << N << "," << eps << "," << l2 << "," << rel << "\n";
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < rels.size(); ++i)
        if (!(rels[i] < rels[i - 1])) decreasing = false;
    double tol = sc.get_number("tol", 0.05);
    bool ok = decreasing && rels.back() <= tol;
    std::ostringstream line;
    line.precision(6);
    line << "pde final_rel_error=" << rels.back() << " decreasing="
         << (decreasing ? "yes" : "no") << " verdict=" << (ok ? "pass" : "fail");
    rep.summary_lines.push_back(line.str());
    rep.ok = ok;
    return rep;
}

RunReport run_w1_suite(const Scenario& sc, const RunOptions& opts) {
    RunReport rep;
    std::size_t instances = static_cast<std::size_t>(sc.get_number("instances", 200));
    W1SuiteResult res = w1_lemma_suite(instances, opts.seed);
    std::ofstream out(join_path(opts.out_dir, sc.get_string("out", "w1_suite.csv")));
    out << "instances,failures\n" << res.instances << "," << res.failures << "\n";
    for (const auto& n : res.failure_notes) out << "# " << n << "\n";
    rep.ok = res.failures == 0;
    rep.summary_lines.push_back("w1_suite instances=" + std::to_string(res.instances) +
                                " failures=" + std::to_string(res.failures) +
                                " verdict=" + (rep.ok ? "pass" : "fail"));
    return rep;
}

}  // namespace

RunReport run_scenario(const Scenario& sc, const RunOptions& options) {
    RunOptions opts = options;
    if (!opts.seed_overridden && sc.has("seed"))
        opts.seed = static_cast<std::uint64_t>(sc.require_number("seed"));
    if (sc.kind == "graph_limit") return run_graph_limit(sc, opts);
    if (sc.kind == "chaos") return run_chaos(sc, opts);
    if (sc.kind == "consensus") return run_consensus(sc, opts);
    if (sc.kind == "pde") return run_pde(sc, opts);
    if (sc.kind == "w1_suite") return run_w1_suite(sc, opts);
    throw std::invalid_argument("unknown scenario kind '" + sc.kind + "'");
}

}  // namespace mflab
