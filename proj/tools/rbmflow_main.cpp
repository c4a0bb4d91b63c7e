// rbmflow: reflected-Brownian-motion flow laboratory CLI.
//
// Subcommands expose the experiment runners; exit code 0 means the
// subcommand's criterion passed, 2 means it ran but failed its criterion,
// 1 means a usage or runtime error.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbmflow/csv.hpp"
#include "rbmflow/experiment.hpp"

using namespace rbmflow;

namespace {

int run_simulate(const ExperimentConfig& config, double time_horizon, std::size_t step_count,
                 const std::string& dump_file, const std::string& excursion_file, bool gzip) {
    const Domain dom = Domain::parse(config.domain);
    const Vec z0 = config.start_point(dom);
    GaussianStream noise(config.base_seed, config.dt, dom.dim());

    Horizon horizon = Horizon::local_time(config.r);
    if (step_count > 0)
        horizon = Horizon::steps(step_count);
    else if (time_horizon > 0.0)
        horizon = Horizon::time(time_horizon);

    const ReflectedPath path = simulate_path(dom, z0, noise, horizon, config.budget);
    std::printf("simulate: %zu steps, final L = %.6g, contacts at %zu steps\n", path.steps(),
                path.final_local_time(), [&] {
                    std::size_t c = 0;
                    for (std::size_t k = 0; k < path.size(); ++k)
                        if (path.contact(k)) ++c;
                    return c;
                }());

    std::filesystem::create_directories(config.out_dir);
    const std::string path_file =
        dump_file.empty() ? (std::filesystem::path(config.out_dir) / "path.csv").string()
                          : dump_file;
    {
        CsvSink sink(gzip ? path_file + ".gz" : path_file, gzip);
        write_path_csv(path, sink);
    }
    std::printf("simulate: path written to %s\n",
                (gzip ? path_file + ".gz" : path_file).c_str());

    if (!excursion_file.empty()) {
        const auto records = decompose(path);
        CsvSink sink(gzip ? excursion_file + ".gz" : excursion_file, gzip);
        write_excursions_csv(records, dom.dim(), sink);
        std::printf("simulate: %zu excursions written to %s\n", records.size(),
                    (gzip ? excursion_file + ".gz" : excursion_file).c_str());
    }
    return 0;
}

int run_flow_derivative_cmd(const ExperimentConfig& config) {
    const FlowDerivativeOutcome outcome = run_flow_derivative(config);
    for (std::size_t i = 0; i < outcome.eps.size(); ++i)
        std::printf("flow-derivative: eps=%-8g median sup_err=%.6g mean=%.6g (n=%d)\n",
                    outcome.eps[i], outcome.sup_err[i].median, outcome.sup_err[i].mean,
                    outcome.sup_err[i].count);
    std::printf("flow-derivative: failed cells %d/%d\n", outcome.failed_cells, outcome.cells);
    if (!outcome.within_error_budget()) {
        std::fprintf(stderr, "flow-derivative: more than 10%% of replicas exhausted the budget\n");
        return 1;
    }
    std::printf("flow-derivative: medians strictly decreasing: %s\n",
                outcome.medians_strictly_decreasing() ? "yes" : "no");
    std::printf("flow-derivative: smallest-eps median < 0.5 x largest-eps median: %s\n",
                outcome.smallest_eps_below_half_of_largest() ? "yes" : "no");
    return outcome.pass() ? 0 : 2;
}

int run_calibrate_cmd(const ExperimentConfig& config) {
    const CalibrationOutcome outcome = run_localtime_calibration(config);
    std::printf("calibrate-localtime: dt=%g replicas=%d mean L1=%.6g +/- %.2g, target %.6g, "
                "rel err %.3g\n",
                outcome.dt, outcome.replicas, outcome.mean_l1, outcome.std_error, outcome.target,
                outcome.rel_error());
    return outcome.pass() ? 0 : 2;
}

int run_excursion_stats_cmd(const ExperimentConfig& config) {
    const TailSlopeOutcome outcome = run_excursion_stats(config);
    for (std::size_t i = 0; i < outcome.counts.thresholds.size(); ++i)
        std::printf("excursion-stats: b=%-8g count/L=%.6g +/- %.2g\n",
                    outcome.counts.thresholds[i], outcome.counts.mean_counts[i],
                    outcome.counts.std_errors[i]);
    std::printf("excursion-stats: log-log slope %.4f (halves: %.4f / %.4f)\n", outcome.slope,
                outcome.slope_first_half, outcome.slope_second_half);
    return outcome.pass() ? 0 : 2;
}

int run_contraction_cmd(const ExperimentConfig& config) {
    const ContractionOutcome outcome = run_contraction_check(config);
    std::printf("contraction: max |X-Y| / |X0-Y0| = %.17g, stepwise nonincreasing: %s\n",
                outcome.max_ratio, outcome.monotone ? "yes" : "no");
    return outcome.pass() ? 0 : 2;
}

int run_identity_2d_cmd(const ExperimentConfig& config) {
    const Identity2dOutcome outcome = run_identity_2d(config);
    std::printf("identity-2d: max relative gap %.3g (threshold 1e-8)\n", outcome.max_rel_gap);
    return outcome.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    // --config is loaded first so explicit flags can override file values.
    ExperimentConfig config;
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") config = load_config_file(argv[i + 1]);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }

    CLI::App app{"Reflected Brownian motion flow laboratory"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "TOML config file (flat key = value entries)");

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--domain", config.domain,
                        "Domain spec: ball:r=1.0[,d=3] | ellipse:a=2.0,b=1.0 | "
                        "ellipsoid:a=..,b=..,c=.. | halfspace[:d=3]");
        sub->add_option("--dt", config.dt, "Euler time step");
        sub->add_option("--r", config.r, "Target boundary local time");
        sub->add_option("--eps", config.eps, "Displacement schedule, descending")
            ->delimiter(',');
        sub->add_option("--c0", config.c0, "Excursion threshold coupling eps_star = c0*eps");
        sub->add_option("--replicas", config.replicas, "Monte Carlo replicas");
        sub->add_option("--seed", config.base_seed, "Base seed; replica i uses seed+i");
        sub->add_option("--out", config.out_dir, "Output directory for CSV files");
        sub->add_option("--budget", config.budget, "Max steps per path simulation");
        sub->add_option("--threads", config.threads, "Worker threads (0 = hardware)");
        sub->add_option("--z0", config.z0, "Base point (default: center offset to (0.2,0,..))")
            ->delimiter(',');
        sub->add_option("--config", config_path, "TOML config file")->configurable(false);
    };

    CLI::App* flow = app.add_subcommand("flow-derivative",
                                        "Finite differences of the flow vs A_r^eps");
    add_shared(flow);
    flow->add_option("--directions", config.directions,
                     "Sphere directions (0 = 16 in 2D / 64 in 3D)");

    CLI::App* calibrate = app.add_subcommand("calibrate-localtime",
                                             "Mean L_1 from uniform starts vs |dD|/(2|D|)");
    add_shared(calibrate);
    calibrate->add_option("--time", config.time_horizon, "Simulation time horizon");

    CLI::App* stats = app.add_subcommand("excursion-stats",
                                         "Excursion-size tail counts per unit local time");
    add_shared(stats);
    stats->add_option("--thresholds", config.thresholds, "Size thresholds b")->delimiter(',');

    CLI::App* contraction = app.add_subcommand("contraction",
                                               "Synchronous-coupling contraction check");
    add_shared(contraction);
    contraction->add_option("--displacement", config.displacement, "Initial |X0-Y0|");
    contraction->add_option("--steps", config.steps, "Steps per replica");

    CLI::App* identity = app.add_subcommand("identity-2d",
                                            "|A v| vs the 2D curvature product");
    add_shared(identity);
    identity->add_option("--eps-star", config.eps_star, "Excursion size threshold");

    CLI::App* simulate = app.add_subcommand("simulate", "Dump one reflected path as CSV");
    add_shared(simulate);
    double sim_time = 0.0;
    std::size_t sim_steps = 0;
    std::string dump_file, excursion_file;
    bool gzip = false;
    simulate->add_option("--time", sim_time, "Stop at a fixed time instead of local time r");
    simulate->add_option("--steps", sim_steps, "Stop after a fixed number of steps");
    simulate->add_option("--dump", dump_file, "Path CSV file (default <out>/path.csv)");
    simulate->add_option("--excursions", excursion_file, "Also dump the excursion records");
    simulate->add_flag("--gzip", gzip, "gzip-compress the dumps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*flow) return run_flow_derivative_cmd(config);
        if (*calibrate) return run_calibrate_cmd(config);
        if (*stats) return run_excursion_stats_cmd(config);
        if (*contraction) return run_contraction_cmd(config);
        if (*identity) return run_identity_2d_cmd(config);
        if (*simulate)
            return run_simulate(config, sim_time, sim_steps, dump_file, excursion_file, gzip);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 1;
}
