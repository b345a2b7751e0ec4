#include "qoembac/commands.hpp"

#include "qoembac/admission.hpp"
#include "qoembac/betafit.hpp"
#include "qoembac/csv.hpp"
#include "qoembac/error.hpp"
#include "qoembac/measurement.hpp"
#include "qoembac/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>

namespace qoembac::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double parse_number(const std::string& text, const std::string& what, std::size_t line) {
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    double v = 0.0;
    if (!(in >> v) || !(in >> std::ws).eof())
        throw ParseError(line, what + ": '" + text + "' is not a number");
    return v;
}

RateState read_state(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    RateState state;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = csv::split_line(line);
        if (!header) {
            if (f.size() != 5 || f[0] != "session_id" || f[1] != "x_bps" || f[2] != "p" ||
                f[3] != "x_min" || f[4] != "x_max")
                throw ParseError(lineno, "expected header session_id,x_bps,p,x_min,x_max");
            header = true;
            continue;
        }
        if (f.size() != 5) throw ParseError(lineno, "expected 5 fields");
        const double id = parse_number(f[0], "session_id", lineno);
        if (id < 0 || id != static_cast<double>(static_cast<SessionId>(id)))
            throw ParseError(lineno, "session_id must be a non-negative integer");
        state.push(static_cast<SessionId>(id), parse_number(f[1], "x_bps", lineno),
                   parse_number(f[2], "p", lineno), parse_number(f[3], "x_min", lineno),
                   parse_number(f[4], "x_max", lineno));
    }
    if (!header) throw ParseError(lineno, "missing header row");
    state.validate();
    return state;
}

std::string bps(double v) { return csv::fixed(v, 1) + " bps (" + csv::num(v / 1e6) + " Mbps)"; }

}  // namespace

fs::path output_dir(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("QOEMBAC_OUT"); env && *env) return env;
    return "qoembac_out";
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<Scenario> scenarios;
    try {
        scenarios = load_scenarios(args.scenario_file, args.seed);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        fs::create_directories(args.out_dir);
        csv::Writer all(args.out_dir / "summary.csv", summary_header());
        for (auto& sc : scenarios) {
            sc.base.record_packets = args.packets_csv;
            const ScenarioResult result = run_scenario(sc, args.jobs);
            write_bundle(result, args.out_dir / sc.name, BundleOptions{args.packets_csv, 20});
            for (const auto& row : summary_rows(result)) all.row(row);
            if (!args.quiet) {
                for (const auto& run : result.runs) {
                    out << sc.name << "  " << run.variant.label << "  admitted "
                        << run.report.admitted_count() << "  dropped " << run.report.dropped << '/'
                        << run.report.sent << '\n';
                    for (const auto& w : run.report.warnings) err << "warning: " << w << '\n';
                }
            }
        }
        all.close();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    if (!args.quiet) out << "wrote " << args.out_dir.string() << '\n';
    return kExitOk;
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<BetaPoint> points;
    FitReport fit;
    std::optional<Preset> preset;
    try {
        if (args.preset) {
            preset = preset_from_name(*args.preset);
            if (!preset) throw ConfigError("unknown preset '" + *args.preset + "'");
        }
        points = read_beta_points(read_file(args.points_csv));
        fit = fit_beta_model(points);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    out.imbue(std::locale::classic());
    out << "points  " << fit.n_points << '\n'
        << "alpha   " << csv::num(fit.alpha) << '\n'
        << "delta   " << csv::num(fit.delta) << '\n'
        << "r2      " << csv::num(fit.r_squared) << '\n'
        << "adj_r2  " << csv::num(fit.adj_r_squared) << '\n'
        << "rmse    " << csv::num(fit.rmse) << '\n';

    try {
        fs::create_directories(args.out_dir);
        csv::Writer w(args.out_dir / "fit.csv",
                      {"model", "alpha", "delta", "r_squared", "adj_r_squared", "rmse", "points"});
        w.row({"fit", csv::num(fit.alpha), csv::num(fit.delta), csv::num(fit.r_squared),
               csv::num(fit.adj_r_squared), csv::num(fit.rmse), csv::num(std::uint64_t{fit.n_points})});
        if (preset) {
            const auto& p = coefficient_preset(*preset);
            const Goodness g = goodness(BetaModel{p.alpha, p.delta, false, std::nullopt}, points);
            out << std::string(p.name) << "  alpha " << csv::num(p.alpha) << "  delta "
                << csv::num(p.delta) << "  r2 " << csv::num(g.r_squared) << "  rmse "
                << csv::num(g.rmse) << '\n';
            w.row({std::string(p.name), csv::num(p.alpha), csv::num(p.delta), csv::num(g.r_squared),
                   "", csv::num(g.rmse), csv::num(std::uint64_t{fit.n_points})});
        }
        w.close();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_admit(const AdmitArgs& args, std::ostream& out, std::ostream& err) {
    RateState state;
    Policy policy{};
    BetaSource beta = 1.0;
    try {
        auto p = policy_from_name(args.policy);
        if (!p || *p == Policy::none) throw ConfigError("policy must be cbac or proibmac");
        policy = *p;
        if (args.beta && args.preset) throw ConfigError("give --beta or --preset, not both");
        if (args.preset) {
            auto pr = preset_from_name(*args.preset);
            if (!pr) throw ConfigError("unknown preset '" + *args.preset + "'");
            beta = beta_model(*pr);
        } else if (args.beta) {
            beta = *args.beta;
        } else if (policy == Policy::pro_ibmac) {
            throw ConfigError("proibmac needs --beta or --preset");
        }
        if (!(args.c_l > 0.0)) throw ConfigError("--cl must be positive");
        if (!(args.x_new >= 0.0)) throw ConfigError("--xnew must be non-negative");
        state = read_state(args.state_csv);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    AdmissionDecision d;
    if (policy == Policy::cbac) {
        // a single-shot CBAC decision uses the summed current rates as CalR
        d = cbac_decide(iaar(state), args.x_new, args.c_l);
    } else {
        d = pro_ibmac_decide(state, args.x_new, args.c_l, beta);
    }

    out.imbue(std::locale::classic());
    out << (d.accepted ? "accept" : "reject") << '\n'
        << "policy    " << to_string(d.policy) << '\n'
        << (policy == Policy::cbac ? "calr      " : "pro_iaar  ") << bps(d.measured) << '\n'
        << "x_new     " << bps(d.x_new) << '\n'
        << "c_l       " << bps(d.threshold) << '\n';
    if (d.beta_used) out << "beta      " << csv::num(*d.beta_used) << '\n';
    if (!d.note.empty()) out << "note      " << d.note << '\n';
    return kExitOk;
}

int cmd_trace_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const VideoTrace trace = synth_trace(args.params);
        if (args.out_file) {
            std::ofstream f(*args.out_file, std::ios::binary | std::ios::trunc);
            if (!f) throw Error("cannot write '" + *args.out_file + "'");
            write_trace(f, trace);
        } else {
            write_trace(out, trace);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_trace_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const VideoTrace trace = load_trace_file(args.trace_file, args.fps, args.gop);
        const WireProfile profile(trace, args.payload_limit);
        std::size_t counts[3] = {0, 0, 0};
        for (const auto& f : trace.frames())
            ++counts[f.type == FrameType::I ? 0 : f.type == FrameType::P ? 1 : 2];
        const double mean_payload = 8.0 * static_cast<double>(trace.total_bytes()) / trace.duration();
        const double mean_wire = profile.total_bits() / trace.duration();
        const double peak = profile.peak_rate(trace.fps(), 1.0);
        out.imbue(std::locale::classic());
        out << "frames          " << trace.size() << " (I " << counts[0] << ", P " << counts[1]
            << ", B " << counts[2] << ")\n"
            << "duration_s      " << csv::num(trace.duration()) << '\n'
            << "mean_payload_bps " << csv::fixed(mean_payload, 1) << '\n'
            << "mean_wire_bps   " << csv::fixed(mean_wire, 1) << '\n'
            << "peak_wire_bps   " << csv::fixed(peak, 1) << '\n'
            << "peak_to_mean    " << csv::fixed(peak / mean_wire, 4) << '\n';
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace qoembac::cli
