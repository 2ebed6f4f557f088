#ifndef MFLAB_HARNESS_HPP
#define MFLAB_HARNESS_HPP

#include <map>
#include <string>

#include "mflab/common.hpp"

namespace mflab {

// Flat key = value scenario file (TOML-compatible subset: comments with #,
// bare or quoted string values, numbers, comma-separated integer lists).
struct Scenario {
    std::string kind;  // graph_limit | chaos | consensus | pde | w1_suite
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_number(const std::string& key, double fallback) const;
    double require_number(const std::string& key) const;
    std::vector<std::size_t> get_size_list(const std::string& key) const;
};

Scenario parse_scenario(const std::string& path);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    Vec residuals;
    std::string note;  // mentions excluded zero-error points
};

// OLS of log(error) on log(N); needs >= 3 positive-error points.
RateFit fit_rate(const std::vector<std::pair<std::size_t, double>>& points);

struct RunOptions {
    std::string out_dir = ".";
    unsigned threads = 1;
    std::uint64_t seed = 1;
    bool seed_overridden = false;
};

struct RunReport {
    bool ok = true;               // all hard assertions passed
    std::vector<std::string> summary_lines;
};

RunReport run_scenario(const Scenario& sc, const RunOptions& opts);

// Randomized optimal-transport lemma checks (symmetry, triangle, tensor
// sandwich, marginal contraction, common-factor equality, support bound,
// disintegrated-distance domination) with the exact LP as oracle.
struct W1SuiteResult {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_notes;
};

W1SuiteResult w1_lemma_suite(std::size_t instances, std::uint64_t seed);

// Cloud consensus run with sigma(x,x') = 1 + x*x': per-site temperature decay
// against exp(-2 S_i t) plus the measured decay rates of the third and fourth
// central moments.
struct ConsensusResult {
    Vec sites, s_rates, t_start, t_end_vals, rel_err;
    Vec y3_rate, y4_rate;
    double max_rel_err = 0.0;
    std::string moment_rate_winner;  // "k*S" or "S"
};

ConsensusResult consensus_experiment(std::size_t N, std::size_t K, double t_end,
                                     double dt, std::uint64_t seed, unsigned threads);

}  // namespace mflab

#endif
