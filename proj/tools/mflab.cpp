#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mflab/harness.hpp"
#include "mflab/measures.hpp"
#include "mflab/pde.hpp"
#include "mflab/wasserstein.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mflab: particle-system and mean-field convergence experiments"};
    app.require_subcommand(1);

    unsigned threads = 1;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool seed_set = false;
    app.add_option("--threads", threads, "worker thread count");
    app.add_option("--out", out_dir, "output directory for CSV reports");
    app.add_option("--seed", seed, "64-bit seed for randomized suites")
        ->each([&](const std::string&) { seed_set = true; });

    auto* run_cmd = app.add_subcommand("run", "run a scenario file");
    std::string scenario_path;
    run_cmd->add_option("scenario", scenario_path, "scenario file (key = value)")
        ->required();

    auto* pde_cmd = app.add_subcommand("pde", "particle approximation of a 1-D PDE");
    std::string pde_text, domain_str = "torus", eps_schedule;
    std::size_t pde_n = 256;
    double pde_t = 0.25, pde_dt = 1e-3, pde_eps = 0.0;
    pde_cmd->add_option("--pde", pde_text, "PDE in the dt y = ... form")->required();
    pde_cmd->add_option("--domain", domain_str, "torus or interval");
    pde_cmd->add_option("--N", pde_n, "particle count");
    pde_cmd->add_option("--t", pde_t, "final time");
    pde_cmd->add_option("--dt", pde_dt, "time step");
    pde_cmd->add_option("--eps", pde_eps, "fixed mollifier scale");
    pde_cmd->add_option("--eps-schedule", eps_schedule,
                        "C=<value>: use eps = (C/ln N)^(1/(p+2))");

    auto* w1_cmd = app.add_subcommand("w1", "exact W1 between two measure CSV files");
    std::string csv_a, csv_b;
    w1_cmd->add_option("a", csv_a, "first measure CSV")->required();
    w1_cmd->add_option("b", csv_b, "second measure CSV")->required();
    bool w1_torus = false;
    w1_cmd->add_flag("--torus", w1_torus, "use the torus metric on the x coordinate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            mflab::Scenario sc = mflab::parse_scenario(scenario_path);
            mflab::RunOptions opts;
            opts.out_dir = out_dir;
            opts.threads = threads;
            opts.seed = seed;
            opts.seed_overridden = seed_set;
            mflab::RunReport rep = mflab::run_scenario(sc, opts);
            for (const auto& line : rep.summary_lines) std::cout << line << "\n";
            return rep.ok ? 0 : 1;
        }
        if (*pde_cmd) {
            mflab::PdeDomain domain = domain_str == "interval"
                                          ? mflab::PdeDomain::interval
                                          : mflab::PdeDomain::torus;
            mflab::PdeSpec spec = mflab::parse_pde(pde_text, domain);
            double eps = pde_eps;
            if (!eps_schedule.empty()) {
                if (eps_schedule.rfind("C=", 0) != 0)
                    throw std::invalid_argument("--eps-schedule expects C=<value>");
                double c = std::stod(eps_schedule.substr(2));
                auto sv = mflab::scaling_schedule(pde_n, c, spec.p);
                eps = sv.eps;
                if (sv.clamped)
                    std::cerr << "warning: schedule value clamped to eps = 0.25\n";
            }
            if (!(eps > 0))
                throw std::invalid_argument("provide --eps or --eps-schedule C=<value>");
            mflab::Mollifier m = mflab::polynomial_mollifier(spec.p + 2);
            auto y0 = [](double x) { return std::sin(2 * 3.14159265358979323846 * x); };
            mflab::PdeSolveOptions po;
            po.dt = pde_dt;
            po.threads = threads;
            mflab::PartitionField y =
                mflab::particle_pde_solve(spec, m, eps, pde_n, y0, pde_t, po);
            std::string path = out_dir == "." ? "pde_solution.csv"
                                              : out_dir + "/pde_solution.csv";
            std::ofstream out(path);
            out << "x,y\n";
            out.precision(17);
            for (std::size_t i = 0; i < pde_n; ++i)
                out << y.partition.tags[i] << "," << y.values[i][0] << "\n";
            std::cout << "pde N=" << pde_n << " eps=" << eps << " wrote " << path << "\n";
            if (spec.is_linear()) {
                mflab::Vec ref = mflab::reference_pde_solve(spec, y0, pde_t);
                double err2 = 0, nrm2 = 0;
                const std::size_t g = ref.size();
                for (std::size_t i = 0; i < pde_n; ++i) {
                    double pos = y.partition.tags[i] * static_cast<double>(g);
                    std::size_t j0 = static_cast<std::size_t>(pos) % g;
                    double frac = pos - std::floor(pos);
                    double rv = ref[j0] * (1 - frac) + ref[(j0 + 1) % g] * frac;
                    err2 += mflab::sq(y.values[i][0] - rv);
                    nrm2 += mflab::sq(rv);
                }
                std::cout << "relative L2 error vs reference: "
                          << std::sqrt(err2 / nrm2) << "\n";
            }
            return 0;
        }
        if (*w1_cmd) {
            mflab::DiscreteMeasure a = mflab::measure_from_csv(csv_a);
            mflab::DiscreteMeasure b = mflab::measure_from_csv(csv_b);
            auto [dist, plan] = mflab::w1_lp(
                a, b, w1_torus ? mflab::OmegaMetric::torus : mflab::OmegaMetric::interval);
            std::cout.precision(17);
            std::cout << "W1 = " << dist << "\n";
            std::string path = out_dir == "." ? "transport_plan.csv"
                                              : out_dir + "/transport_plan.csv";
            mflab::plan_to_csv(plan, path);
            std::cout << "plan written to " << path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
