#include "dnfkpp/errors.hpp"
#include "dnfkpp/reporting.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace dnfkpp;
    CLI::App app{"Bifurcation analysis for the doubly-nonlocal Fisher-KPP equation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    report::RunOptions opt;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "rng seed (overrides the config)");
    app.add_flag("--verbose", opt.verbose, "progress on stderr");

    const char* names[][2] = {
        {"analyze", "critical point, branch, stability and uniqueness in sequence"},
        {"critical", "locate the tangency (h_c, k_c) and write the dispersion curve"},
        {"branch", "Galerkin stationary branch against the amplitude law"},
        {"stability", "spectrum of the linearization along the branch"},
        {"evolve", "time integration from a perturbed state"},
        {"limit", "local-diffusion scaling limit study"},
        {"uniqueness", "dominance check and uniqueness radii"},
        {"sweep", "sup of the dispersion relation over an (m, h) grid"},
    };
    for (const auto& n : names) app.add_subcommand(n[0], n[1]);

    double t_max = 0.0, dt = 0.0;
    std::string initial, initial_file;
    auto* evolve = app.get_subcommand("evolve");
    auto* t_max_opt = evolve->add_option("--t-max", t_max, "final time")->check(CLI::PositiveNumber);
    auto* dt_opt = evolve->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
    auto* init_opt = evolve->add_option("--initial", initial, "initial state")
                         ->check(CLI::IsMember({"theta-perturbation", "pattern-perturbation", "file"}));
    auto* file_opt = evolve->add_option("--initial-file", initial_file, "coefficient CSV (j, a_j, b_j)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    opt.subcommand = app.get_subcommands().front()->get_name();
    if (*seed_opt) opt.seed = seed;
    if (*t_max_opt) opt.t_max = t_max;
    if (*dt_opt) opt.dt = dt;
    if (*init_opt) opt.initial = initial;
    if (*file_opt) opt.initial_file = initial_file;

    report::ExperimentConfig cfg;
    try {
        cfg = report::load_config(config_path);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return report::run(cfg, opt);
}
