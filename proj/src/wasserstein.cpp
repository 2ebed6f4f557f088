#include "mflab/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace mflab {

void TransportPlan::check_feasible(const Vec& w1, const Vec& w2) const {
    Vec row(w1.size(), 0.0), col(w2.size(), 0.0);
    double c = 0;
    for (const Entry& e : entries) {
        if (e.a >= w1.size() || e.b >= w2.size())
            throw std::runtime_error("transport plan: atom index out of range");
        if (e.mass < 0) throw std::runtime_error("transport plan: negative mass");
        row[e.a] += e.mass;
        col[e.b] += e.mass;
        c += e.mass * e.dist;
    }
    for (std::size_t a = 0; a < w1.size(); ++a)
        if (std::fabs(row[a] - w1[a]) > 1e-10)
            throw std::runtime_error("transport plan: row sums do not match first marginal");
    for (std::size_t b = 0; b < w2.size(); ++b)
        if (std::fabs(col[b] - w2[b]) > 1e-10)
            throw std::runtime_error("transport plan: column sums do not match second marginal");
    if (std::fabs(c - cost) > 1e-9)
        throw std::runtime_error("transport plan: cost does not match entries");
}

double w1_line(const Vec& xs1, const Vec& ws1, const Vec& xs2, const Vec& ws2) {
    if (xs1.empty() || xs2.empty())
        throw std::invalid_argument("w1_line: empty measure");
    if (xs1.size() != ws1.size() || xs2.size() != ws2.size())
        throw std::invalid_argument("w1_line: atom/weight size mismatch");
    // sort atoms of each measure by position
    auto sorted = [](const Vec& xs, const Vec& ws) {
        std::vector<std::pair<double, double>> v(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) v[i] = {xs[i], ws[i]};
        std::sort(v.begin(), v.end());
        return v;
    };
    auto a = sorted(xs1, ws1), b = sorted(xs2, ws2);
    // sweep the merged grid accumulating |F1 - F2| * segment length
    std::size_t i = 0, j = 0;
    double f1 = 0, f2 = 0, prev = std::min(a.front().first, b.front().first);
    double total = 0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i].first <= b[j].first))
            x = a[i].first;
        else
            x = b[j].first;
        total += std::fabs(f1 - f2) * (x - prev);
        prev = x;
        while (i < a.size() && a[i].first == x) f1 += a[i++].second;
        while (j < b.size() && b[j].first == x) f2 += b[j++].second;
    }
    return total;
}

namespace {

// Smallest denominator q <= cap with |w - round(w*q)/q| tiny; continued
// fraction expansion of w.
std::int64_t rational_denominator(double w, std::int64_t cap) {
    double x = w;
    std::int64_t p0 = 1, q0 = 0, p1 = static_cast<std::int64_t>(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::fabs(w * static_cast<double>(q1) -
                      std::round(w * static_cast<double>(q1))) < 1e-9)
            return q1;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
        double fl = std::floor(x);
        frac = x - fl;
        std::int64_t ai = static_cast<std::int64_t>(fl);
        std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > cap) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    throw std::runtime_error(
        "w1_lp: atom weights do not fit a common integer grid with denominator <= 1e6");
}

std::vector<std::int64_t> integer_masses(const Vec& ws, std::int64_t d) {
    std::vector<std::int64_t> m(ws.size());
    std::int64_t total = 0;
    for (std::size_t a = 0; a < ws.size(); ++a) {
        double v = ws[a] * static_cast<double>(d);
        m[a] = static_cast<std::int64_t>(std::llround(v));
        if (std::fabs(v - static_cast<double>(m[a])) > 1e-6 || m[a] <= 0)
            throw std::runtime_error("w1_lp: weight is not representable on the integer grid");
        total += m[a];
    }
    if (total != d)
        throw std::runtime_error("w1_lp: integer masses do not sum to the grid size");
    return m;
}

double ground_dist(const DiscreteMeasure& mu1, std::size_t a,
                   const DiscreteMeasure& mu2, std::size_t b, OmegaMetric metric) {
    double dx = omega_dist(mu1.xs[a], mu2.xs[b], metric);
    double s = dx * dx;
    for (std::size_t c = 0; c < mu1.dim(); ++c) s += sq(mu1.xis[a][c] - mu2.xis[b][c]);
    return std::sqrt(s);
}

}  // namespace

std::pair<double, TransportPlan> transport_lp(const Vec& weights1, const Vec& weights2,
                                              const std::vector<std::vector<double>>& cost_matrix) {
    const std::size_t n1 = weights1.size(), n2 = weights2.size();
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("transport_lp: empty measure");
    if (cost_matrix.size() != n1)
        throw std::invalid_argument("transport_lp: cost matrix shape mismatch");
    for (const auto& row : cost_matrix)
        if (row.size() != n2)
            throw std::invalid_argument("transport_lp: cost matrix shape mismatch");

    // lift weights to a common integer grid
    const std::int64_t cap = 1000000;
    std::int64_t denom = 1;
    for (double w : weights1) denom = std::lcm(denom, rational_denominator(w, cap));
    for (double w : weights2) denom = std::lcm(denom, rational_denominator(w, cap));
    if (denom > cap)
        throw std::runtime_error(
            "w1_lp: atom weights do not fit a common integer grid with denominator <= 1e6");
    std::vector<std::int64_t> m1 = integer_masses(weights1, denom);
    std::vector<std::int64_t> m2 = integer_masses(weights2, denom);

    // min-cost flow: source (0) -> left (1..n1) -> right (n1+1..n1+n2) -> sink
    const std::size_t src = 0, snk = n1 + n2 + 1, nv = n1 + n2 + 2;
    struct Edge {
        std::size_t to;
        std::int64_t cap;
        double cost;
        std::size_t rev;
    };
    std::vector<std::vector<Edge>> g(nv);
    auto add_edge = [&](std::size_t u, std::size_t v, std::int64_t c, double w) {
        g[u].push_back({v, c, w, g[v].size()});
        g[v].push_back({u, 0, -w, g[u].size() - 1});
    };
    for (std::size_t a = 0; a < n1; ++a) add_edge(src, 1 + a, m1[a], 0.0);
    for (std::size_t b = 0; b < n2; ++b) add_edge(n1 + 1 + b, snk, m2[b], 0.0);
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n2; ++b)
            add_edge(1 + a, n1 + 1 + b, denom, cost_matrix[a][b]);

    // successive shortest paths with Dijkstra and node potentials (all
    // original costs are nonnegative, so zero initial potentials are valid)
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pot(nv, 0.0), d(nv);
    std::vector<std::size_t> pv(nv), pe(nv);
    std::int64_t remaining = denom;
    while (remaining > 0) {
        std::fill(d.begin(), d.end(), inf);
        d[src] = 0;
        using QE = std::pair<double, std::size_t>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> q;
        q.push({0.0, src});
        while (!q.empty()) {
            auto [du, u] = q.top();
            q.pop();
            if (du > d[u]) continue;
            for (std::size_t ei = 0; ei < g[u].size(); ++ei) {
                const Edge& e = g[u][ei];
                if (e.cap <= 0) continue;
                // rounding in the potential updates can leave the reduced
                // cost a hair negative; clamping keeps Dijkstra's invariant
                double rc = e.cost + pot[u] - pot[e.to];
                if (rc < 0) rc = 0;
                double nd = du + rc;
                if (nd < d[e.to]) {
                    d[e.to] = nd;
                    pv[e.to] = u;
                    pe[e.to] = ei;
                    q.push({nd, e.to});
                }
            }
        }
        if (d[snk] == inf)
            throw std::runtime_error("w1_lp: no augmenting path (internal error)");
        for (std::size_t v = 0; v < nv; ++v)
            if (d[v] < inf) pot[v] += d[v];
        std::int64_t push = remaining;
        for (std::size_t v = snk; v != src; v = pv[v])
            push = std::min(push, g[pv[v]][pe[v]].cap);
        for (std::size_t v = snk; v != src; v = pv[v]) {
            Edge& e = g[pv[v]][pe[v]];
            e.cap -= push;
            g[v][e.rev].cap += push;
        }
        remaining -= push;
    }

    TransportPlan plan;
    double cost = 0;
    for (std::size_t a = 0; a < n1; ++a)
        for (const Edge& e : g[1 + a]) {
            if (e.to <= n1 || e.to == snk || e.to == src) continue;
            std::size_t b = e.to - n1 - 1;
            std::int64_t flow = denom - e.cap;
            if (flow > 0) {
                double mass = static_cast<double>(flow) / static_cast<double>(denom);
                plan.entries.push_back({a, b, mass, cost_matrix[a][b]});
                cost += mass * cost_matrix[a][b];
            }
        }
    plan.cost = cost;
    return {cost, plan};
}

std::pair<double, TransportPlan> w1_lp(const DiscreteMeasure& mu1,
                                       const DiscreteMeasure& mu2,
                                       OmegaMetric metric) {
    mu1.validate();
    mu2.validate();
    if (mu1.size() > 512 || mu2.size() > 512)
        throw std::invalid_argument(
            "w1_lp: atom count exceeds 512; use w1_line for 1-D data or subsample");
    if (mu1.dim() != mu2.dim())
        throw std::invalid_argument("w1_lp: state dimension mismatch");
    std::vector<std::vector<double>> dist(mu1.size(), std::vector<double>(mu2.size()));
    for (std::size_t a = 0; a < mu1.size(); ++a)
        for (std::size_t b = 0; b < mu2.size(); ++b)
            dist[a][b] = ground_dist(mu1, a, mu2, b, metric);
    return transport_lp(mu1.weights, mu2.weights, dist);
}

double l1nu_w1(const ConditionalFamily& f1, const ConditionalFamily& f2,
               OmegaMetric metric) {
    f1.validate();
    f2.validate();
    bool same = f1.sites.size() == f2.sites.size();
    if (same)
        for (std::size_t i = 0; i < f1.sites.size(); ++i)
            if (f1.sites[i] != f2.sites[i] || f1.site_weights[i] != f2.site_weights[i])
                same = false;
    if (!same)
        throw std::invalid_argument(
            "l1nu_w1: the families must disintegrate over the same sites, "
            "having the same marginal nu");
    std::size_t d = f1.dim();
    if (d != f2.dim()) throw std::invalid_argument("l1nu_w1: state dimension mismatch");
    double total = 0;
    for (std::size_t i = 0; i < f1.sites.size(); ++i) {
        double wi;
        if (d == 1) {
            Vec xs1, xs2;
            for (const Vec& xi : f1.atoms[i]) xs1.push_back(xi[0]);
            for (const Vec& xi : f2.atoms[i]) xs2.push_back(xi[0]);
            wi = w1_line(xs1, f1.atom_weights[i], xs2, f2.atom_weights[i]);
        } else {
            DiscreteMeasure a, b;
            a.xs.assign(f1.atoms[i].size(), f1.sites[i]);
            a.xis = f1.atoms[i];
            a.weights = f1.atom_weights[i];
            b.xs.assign(f2.atoms[i].size(), f2.sites[i]);
            b.xis = f2.atoms[i];
            b.weights = f2.atom_weights[i];
            wi = w1_lp(a, b, metric).first;
        }
        total += f1.site_weights[i] * wi;
    }
    return total;
}

double support_sup_norm(const DiscreteMeasure& mu) {
    double best = 0;
    for (std::size_t a = 0; a < mu.size(); ++a) {
        double s = 0;
        for (double v : mu.xis[a]) s += v * v;
        best = std::max(best, std::fabs(mu.xs[a]) + std::sqrt(s));
    }
    return best;
}

void plan_to_csv(const TransportPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "a,b,mass,distance\n";
    out.precision(17);
    for (const auto& e : plan.entries)
        out << e.a << "," << e.b << "," << e.mass << "," << e.dist << "\n";
}

}  // namespace mflab
