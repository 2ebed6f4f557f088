#include "mflab/measures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mflab {

void DiscreteMeasure::validate() const {
    if (xs.empty()) throw std::invalid_argument("measure: no atoms");
    if (xis.size() != xs.size() || weights.size() != xs.size())
        throw std::invalid_argument("measure: field size mismatch");
    std::size_t d = dim();
    double total = 0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
        if (xis[a].size() != d) throw std::invalid_argument("measure: ragged atoms");
        if (!std::isfinite(xs[a]) || !all_finite(xis[a]))
            throw std::invalid_argument("measure: non-finite atom");
        if (!(weights[a] > 0)) throw std::invalid_argument("measure: weights must be positive");
        total += weights[a];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("measure: weights must sum to 1 within 1e-12");
}

std::size_t ConditionalFamily::dim() const {
    for (const auto& lst : atoms)
        if (!lst.empty()) return lst.front().size();
    return 0;
}

void ConditionalFamily::validate() const {
    if (sites.empty()) throw std::invalid_argument("conditional family: no sites");
    if (site_weights.size() != sites.size() || atoms.size() != sites.size() ||
        atom_weights.size() != sites.size())
        throw std::invalid_argument("conditional family: field size mismatch");
    double total = 0;
    std::size_t d = dim();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!(site_weights[i] > 0))
            throw std::invalid_argument("conditional family: site weights must be positive");
        total += site_weights[i];
        if (atoms[i].empty() || atom_weights[i].size() != atoms[i].size())
            throw std::invalid_argument("conditional family: bad site atom list");
        double ctot = 0;
        for (std::size_t a = 0; a < atoms[i].size(); ++a) {
            if (atoms[i][a].size() != d)
                throw std::invalid_argument("conditional family: ragged atoms");
            if (!(atom_weights[i][a] > 0))
                throw std::invalid_argument("conditional family: conditional weights must be positive");
            ctot += atom_weights[i][a];
        }
        if (std::fabs(ctot - 1.0) > 1e-12)
            throw std::invalid_argument(
                "conditional family: conditional weights must sum to 1 within 1e-12");
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("conditional family: site weights must sum to 1 within 1e-12");
}

DiscreteMeasure empirical(const ParticleState& s) {
    s.validate();
    DiscreteMeasure mu;
    mu.xs = s.tags;
    mu.xis = s.states;
    mu.weights.assign(s.size(), 1.0 / static_cast<double>(s.size()));
    return mu;
}

DiscreteMeasure monokinetic(const TaggedPartition& p, const PartitionField& y) {
    if (y.partition.N != p.N || y.partition.breakpoints != p.breakpoints)
        throw std::invalid_argument("monokinetic: partitions do not match");
    DiscreteMeasure mu;
    mu.xs = p.tags;
    mu.xis.reserve(p.N);
    for (double x : p.tags) mu.xis.push_back(y.eval(x));
    mu.weights.assign(p.N, 1.0 / static_cast<double>(p.N));
    mu.validate();
    return mu;
}

DiscreteMeasure semi_empirical(const ConditionalFamily& f) {
    f.validate();
    double uniform = 1.0 / static_cast<double>(f.sites.size());
    for (double nu : f.site_weights)
        if (std::fabs(nu - uniform) > 1e-12)
            throw std::invalid_argument(
                "semi_empirical: site weights must be uniform 1/N (tagged-partition construction)");
    DiscreteMeasure mu;
    for (std::size_t i = 0; i < f.sites.size(); ++i)
        for (std::size_t a = 0; a < f.atoms[i].size(); ++a) {
            mu.xs.push_back(f.sites[i]);
            mu.xis.push_back(f.atoms[i][a]);
            mu.weights.push_back(f.site_weights[i] * f.atom_weights[i][a]);
        }
    mu.validate();
    return mu;
}

ConditionalFamily disintegrate(const DiscreteMeasure& mu) {
    mu.validate();
    ConditionalFamily f;
    for (std::size_t a = 0; a < mu.size(); ++a) {
        std::size_t i = f.sites.size();
        for (std::size_t s = 0; s < f.sites.size(); ++s)
            if (f.sites[s] == mu.xs[a]) {  // bit-identical grouping on purpose
                i = s;
                break;
            }
        if (i == f.sites.size()) {
            f.sites.push_back(mu.xs[a]);
            f.site_weights.push_back(0.0);
            f.atoms.emplace_back();
            f.atom_weights.emplace_back();
        }
        f.site_weights[i] += mu.weights[a];
        f.atoms[i].push_back(mu.xis[a]);
        f.atom_weights[i].push_back(mu.weights[a]);
    }
    for (std::size_t i = 0; i < f.sites.size(); ++i)
        for (double& w : f.atom_weights[i]) w /= f.site_weights[i];
    return f;
}

Vec mean_field(const InteractionKernel& k, const DiscreteMeasure& mu, double t,
               double x, const Vec& xi) {
    if (mu.dim() != k.state_dim || xi.size() != k.state_dim)
        throw std::invalid_argument("mean_field: state dimension mismatch");
    std::size_t d = k.state_dim;
    Vec acc(d, 0.0), g(d);
    for (std::size_t a = 0; a < mu.size(); ++a) {
        k.eval_fn(t, x, mu.xs[a], xi.data(), mu.xis[a].data(), g.data());
        for (std::size_t c = 0; c < d; ++c) {
            if (!std::isfinite(g[c]))
                throw std::runtime_error("mean_field: non-finite kernel output at atom " +
                                         std::to_string(a));
            acc[c] += mu.weights[a] * g[c];
        }
    }
    return acc;
}

MomentReport moments(const ConditionalFamily& f, std::size_t k_max) {
    f.validate();
    if (k_max < 2) throw std::invalid_argument("moments: k_max must be >= 2");
    std::size_t d = f.dim();
    if (k_max >= 3 && d > 1)
        throw std::invalid_argument("moments: central moments of order >= 3 require d = 1");
    std::size_t n = f.sites.size();
    MomentReport r;
    r.means.assign(n, Vec(d, 0.0));
    r.temperatures.assign(n, 0.0);
    r.central_moments.assign(k_max - 1, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < f.atoms[i].size(); ++a)
            for (std::size_t c = 0; c < d; ++c)
                r.means[i][c] += f.atom_weights[i][a] * f.atoms[i][a][c];
        for (std::size_t a = 0; a < f.atoms[i].size(); ++a) {
            double s2 = 0;
            for (std::size_t c = 0; c < d; ++c) s2 += sq(f.atoms[i][a][c] - r.means[i][c]);
            r.temperatures[i] += f.atom_weights[i][a] * s2;
        }
        r.temperatures[i] /= static_cast<double>(d);
        r.central_moments[0][i] = r.temperatures[i] * static_cast<double>(d);
        for (std::size_t k = 3; k <= k_max; ++k) {
            double m = 0;
            for (std::size_t a = 0; a < f.atoms[i].size(); ++a)
                m += f.atom_weights[i][a] *
                     std::pow(f.atoms[i][a][0] - r.means[i][0], static_cast<double>(k));
            r.central_moments[k - 2][i] = m;
        }
    }
    return r;
}

Vec site_rate(const std::function<double(double, double)>& sigma,
              const TaggedPartition& p) {
    Vec s(p.N, 0.0);
    for (std::size_t i = 0; i < p.N; ++i) {
        for (std::size_t j = 0; j < p.N; ++j) {
            double v = sigma(p.tags[i], p.tags[j]);
            if (!(v >= 0))
                throw std::invalid_argument("site_rate: sigma must be nonnegative, got " +
                                            std::to_string(v) + " at (" +
                                            std::to_string(p.tags[i]) + "," +
                                            std::to_string(p.tags[j]) + ")");
            s[i] += v;
        }
        s[i] /= static_cast<double>(p.N);
    }
    return s;
}

void measure_to_csv(const DiscreteMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::size_t d = mu.dim();
    out << "weight,x";
    for (std::size_t c = 0; c < d; ++c) out << ",xi_" << (c + 1);
    out << "\n";
    out.precision(17);
    for (std::size_t a = 0; a < mu.size(); ++a) {
        out << mu.weights[a] << "," << mu.xs[a];
        for (std::size_t c = 0; c < d; ++c) out << "," << mu.xis[a][c];
        out << "\n";
    }
}

DiscreteMeasure measure_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    DiscreteMeasure mu;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vec row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw std::runtime_error(path + ": bad row '" + line + "'");
        mu.weights.push_back(row[0]);
        mu.xs.push_back(row[1]);
        mu.xis.emplace_back(row.begin() + 2, row.end());
    }
    mu.validate();
    return mu;
}

void moments_to_csv(const ConditionalFamily& f, const MomentReport& r,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::size_t d = f.dim();
    std::size_t k_max = r.central_moments.size() + 1;
    out << "site,x";
    for (std::size_t c = 0; c < d; ++c) out << ",y_" << (c + 1);
    out << ",T";
    for (std::size_t k = 2; k <= k_max; ++k) out << ",m_" << k;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < f.sites.size(); ++i) {
        out << i << "," << f.sites[i];
        for (std::size_t c = 0; c < d; ++c) out << "," << r.means[i][c];
        out << "," << r.temperatures[i];
        for (std::size_t k = 2; k <= k_max; ++k) out << "," << r.central_moments[k - 2][i];
        out << "\n";
    }
}

}  // namespace mflab
