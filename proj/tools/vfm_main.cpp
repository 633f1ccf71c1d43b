// vfm: vibration-driven in-hand manipulation simulator and benchmark CLI.

#include <CLI11.hpp>

#include "vfm/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Vibratory finger manipulation: simulate, bench, sweep-freq, feasibility"};
    app.require_subcommand(1);

    vfm::CliOptions opt;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", opt.scenario_path, "scenario file")->required();
        sub->add_option("--seed", seed_value, "override sim.rng_seed");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--set", opt.overrides, "dotted.key=value override (repeatable)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one closed-loop episode per goal");
    add_common(simulate);

    CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo benchmark with chained trials");
    add_common(bench);
    bench->add_option("--trials", opt.trials, "number of trials")->check(CLI::PositiveNumber);
    bench->add_flag("--paired", opt.paired, "compare duty cycle against continuous drive");

    CLI::App* sweep = app.add_subcommand("sweep-freq", "steady rotation rate across frequencies");
    add_common(sweep);
    sweep->add_option("--hz", opt.sweep_hz, "frequency grid in Hz")->required();

    CLI::App* feas = app.add_subcommand("feasibility", "slip thresholds across grasp radii");
    add_common(feas);
    feas->add_option("--r", opt.radii, "radius grid in m")->required();

    CLI11_PARSE(app, argc, argv);

    for (CLI::App* sub : {simulate, bench, sweep, feas})
        if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed_value;

    if (simulate->parsed()) return vfm::cli_simulate(opt);
    if (bench->parsed()) return vfm::cli_bench(opt);
    if (sweep->parsed()) return vfm::cli_sweep_frequency(opt);
    if (feas->parsed()) return vfm::cli_feasibility(opt);
    return 1;
}
