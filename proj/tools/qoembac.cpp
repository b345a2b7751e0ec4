#include "qoembac/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace cli = qoembac::cli;

int main(int argc, char** argv) {
    CLI::App app{"Measurement-based admission control toolkit for bursty video"};
    app.require_subcommand(1);

    std::optional<std::string> out_flag;
    std::optional<std::uint64_t> seed;
    bool packets_csv = false;
    bool quiet = false;
    app.add_option("--out", out_flag, "Output directory (default $QOEMBAC_OUT or ./qoembac_out)");
    app.add_option("--seed", seed, "Override every scenario seed");
    app.add_flag("--packets-csv", packets_csv, "Also write packets.csv");
    app.add_flag("--quiet,-q", quiet, "Suppress progress output");

    auto* sim = app.add_subcommand("simulate", "Run every scenario in a scenario file");
    std::string scenario_file;
    unsigned jobs = 1;
    sim->add_option("file", scenario_file, "Scenario file")->required();
    sim->add_option("--jobs,-j", jobs, "Run variants concurrently")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "Fit beta model coefficients to c_l_mbps,n,beta rows");
    std::string points_csv;
    std::optional<std::string> fit_preset;
    fit->add_option("csv", points_csv, "Points CSV")->required();
    fit->add_option("--preset", fit_preset, "Also evaluate a preset on the points");

    auto* admit = app.add_subcommand("admit", "Single admission decision");
    cli::AdmitArgs admit_args;
    std::optional<double> beta;
    std::optional<std::string> admit_preset;
    admit->add_option("--state", admit_args.state_csv, "CSV: session_id,x_bps,p,x_min,x_max")->required();
    admit->add_option("--xnew", admit_args.x_new, "Peak rate of the new session, bits/s")->required();
    admit->add_option("--cl", admit_args.c_l, "Link capacity, bits/s")->required();
    admit->add_option("--policy", admit_args.policy, "cbac or proibmac")->required();
    auto* beta_opt = admit->add_option("--beta", beta, "Fixed beta");
    admit->add_option("--preset", admit_preset, "Beta model preset")->excludes(beta_opt);

    auto* trace = app.add_subcommand("trace", "Trace utilities");
    trace->require_subcommand(1);
    auto* synth = trace->add_subcommand("synth", "Write a synthetic VBR trace");
    cli::SynthArgs synth_args;
    std::optional<std::string> synth_out;
    synth->add_option("--mean", synth_args.params.mean_bitrate, "Mean payload bitrate, bits/s");
    synth->add_option("--burstiness", synth_args.params.burstiness, "I-frame size over mean frame size");
    synth->add_option("--duration", synth_args.params.duration, "Seconds");
    synth->add_option("--fps", synth_args.params.fps);
    synth->add_option("--gop", synth_args.params.gop);
    synth->add_option("--trace-seed", synth_args.params.seed, "Generator seed");
    synth->add_option("--jitter", synth_args.params.jitter_scale, "Log jitter per unit ln(burstiness)");
    synth->add_option("-o,--output", synth_out, "Output file (default stdout)");

    auto* inspect = trace->add_subcommand("inspect", "Summarise a trace file");
    cli::InspectArgs inspect_args;
    inspect->add_option("file", inspect_args.trace_file)->required();
    inspect->add_option("--fps", inspect_args.fps);
    inspect->add_option("--gop", inspect_args.gop);
    inspect->add_option("--payload-limit", inspect_args.payload_limit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    if (*sim) {
        cli::SimulateArgs args{scenario_file, cli::output_dir(out_flag), seed, packets_csv, quiet, jobs};
        return cli::cmd_simulate(args, std::cout, std::cerr);
    }
    if (*fit) {
        cli::FitArgs args{points_csv, fit_preset, cli::output_dir(out_flag), quiet};
        return cli::cmd_fit(args, std::cout, std::cerr);
    }
    if (*admit) {
        admit_args.beta = beta;
        admit_args.preset = admit_preset;
        return cli::cmd_admit(admit_args, std::cout, std::cerr);
    }
    if (*synth) {
        if (seed) synth_args.params.seed = *seed;
        synth_args.out_file = synth_out;
        return cli::cmd_trace_synth(synth_args, std::cout, std::cerr);
    }
    return cli::cmd_trace_inspect(inspect_args, std::cout, std::cerr);
}
