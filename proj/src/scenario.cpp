#include "qoembac/scenario.hpp"

#include "qoembac/csv.hpp"
#include "qoembac/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace qoembac {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKeys = {
    "capacity",          "capacity_mbps",    "policies",        "beta",
    "preset",            "trace",            "fps",             "gop",
    "synth_mean_bitrate", "synth_burstiness", "synth_duration", "synth_seed",
    "synth_jitter_scale", "synth_jitter_correlation", "requests", "request_interval",
    "request_start",     "peak_rate",        "duration",        "seed",
    "queue_capacity",    "prop_delay",       "payload_limit",   "tick",
    "activity_window",   "loop",             "beta_n",          "synth_count",
};

/// Flat key lookup with [defaults] fallback and typed conversion.
class Section {
  public:
    Section(std::string name, std::map<std::string, std::string> values)
        : name_(std::move(name)), values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.contains(key); }

    std::string str(const std::string& key, const std::string& fallback = {}) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return to_double(key, values_.at(key));
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const double v = num(key, 0.0);
        if (v < 0.0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
            throw ConfigError(where(key) + ": expected a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = values_.at(key);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        throw ConfigError(where(key) + ": expected true/false");
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        if (!has(key)) return out;
        for (auto& item : csv::split_line(values_.at(key)))
            if (!item.empty()) out.push_back(item);
        return out;
    }

    double to_double(const std::string& key, const std::string& text) const {
        std::istringstream in(text);
        in.imbue(std::locale::classic());
        double v = 0.0;
        if (!(in >> v) || !(in >> std::ws).eof())
            throw ConfigError(where(key) + ": '" + text + "' is not a number");
        return v;
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }
    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::string name_;
    std::map<std::string, std::string> values_;
};

std::string beta_text(double beta) { return csv::num(beta); }

Scenario build_scenario(const Section& sec, const std::string& name, const fs::path& base_dir,
                        std::optional<std::uint64_t> seed_override) {
    for (const auto& [key, value] : sec.values())
        if (!kKeys.contains(key)) throw ConfigError(sec.where(key) + ": unknown key");

    Scenario sc;
    sc.name = name;
    SimConfig& cfg = sc.base;
    if (sec.has("capacity"))
        cfg.capacity = sec.num("capacity", 0.0);
    else if (sec.has("capacity_mbps"))
        cfg.capacity = sec.num("capacity_mbps", 0.0) * 1e6;
    else
        throw ConfigError("[" + name + "] needs capacity or capacity_mbps");
    cfg.duration = sec.num("duration", 500.0);
    cfg.queue_capacity = sec.integer("queue_capacity", 5300);
    cfg.prop_delay = sec.num("prop_delay", 0.010);
    cfg.payload_limit = static_cast<int>(sec.integer("payload_limit", kDefaultPayloadLimit));
    cfg.tick = sec.num("tick", 1.0);
    cfg.activity_window = sec.num("activity_window", 10.0);
    cfg.loop_sessions = sec.flag("loop", true);
    cfg.seed = seed_override ? *seed_override : sec.integer("seed", 1);

    const double fps = sec.num("fps", 30.0);
    const int gop = static_cast<int>(sec.integer("gop", 30));
    std::vector<std::string> trace_ids;
    try {
        for (const auto& path : sec.list("trace")) {
            const fs::path resolved = fs::path(path).is_absolute() ? fs::path(path) : base_dir / path;
            if (!fs::exists(resolved)) throw ConfigError("trace file not found: " + resolved.string());
            if (!cfg.traces.contains(path))
                cfg.traces[path] = std::make_shared<const VideoTrace>(
                    load_trace_file(resolved.string(), fps, gop));
            trace_ids.push_back(path);
        }
        if (trace_ids.empty()) {
            if (!sec.has("synth_mean_bitrate"))
                throw ConfigError("[" + name + "] needs trace or synth_mean_bitrate");
            SynthParams sp;
            sp.mean_bitrate = sec.num("synth_mean_bitrate", sp.mean_bitrate);
            sp.burstiness = sec.num("synth_burstiness", sp.burstiness);
            sp.duration = sec.num("synth_duration", 30.0);
            sp.fps = fps;
            sp.gop = gop;
            sp.seed = sec.integer("synth_seed", cfg.seed);
            sp.jitter_scale = sec.num("synth_jitter_scale", sp.jitter_scale);
            sp.jitter_correlation = sec.num("synth_jitter_correlation", sp.jitter_correlation);
            const auto count = sec.integer("synth_count", 1);
            if (count < 1) throw ConfigError(sec.where("synth_count") + ": must be >= 1");
            for (std::uint64_t i = 0; i < count; ++i) {
                const std::string id = count == 1 ? "synthetic" : "synthetic" + std::to_string(i + 1);
                cfg.traces[id] = std::make_shared<const VideoTrace>(synth_trace(sp));
                trace_ids.push_back(id);
                ++sp.seed;
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("[" + name + "] trace: " + e.what());
    }

    const double interval = sec.num("request_interval", 1.0);
    const double start = sec.num("request_start", 0.0);
    const auto default_requests = static_cast<std::uint64_t>(std::max(0.0, (cfg.duration - start) / interval));
    const auto requests = sec.integer("requests", default_requests);
    cfg.arrivals = make_arrival_schedule(requests, interval, start, trace_ids, cfg.seed,
                                         sec.num("peak_rate", 0.0));

    auto policies = sec.list("policies");
    if (policies.empty()) policies = {"cbac", "proibmac"};
    for (const auto& pname : policies) {
        const auto policy = policy_from_name(pname);
        if (!policy) throw ConfigError(sec.where("policies") + ": unknown policy '" + pname + "'");
        if (*policy != Policy::pro_ibmac) {
            sc.runs.push_back({std::string(to_string(*policy)), *policy, 1.0, ""});
            continue;
        }
        bool any = false;
        for (const auto& b : sec.list("beta")) {
            const double beta = sec.to_double("beta", b);
            if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError(sec.where("beta") + ": must lie in (0, 1]");
            sc.runs.push_back({"ProIBMAC(beta=" + beta_text(beta) + ")", Policy::pro_ibmac, beta,
                               beta_text(beta)});
            any = true;
        }
        if (sec.has("preset")) {
            const auto preset = preset_from_name(sec.str("preset"));
            if (!preset) throw ConfigError(sec.where("preset") + ": unknown preset '" + sec.str("preset") + "'");
            std::string pname_str(coefficient_preset(*preset).name);
            BetaModel model = beta_model(*preset);
            if (sec.has("beta_n")) {
                const auto planned = sec.integer("beta_n", 0);
                if (planned < 1) throw ConfigError(sec.where("beta_n") + ": must be >= 1");
                model.planned_n = static_cast<std::size_t>(planned);
                pname_str += "@n=" + std::to_string(planned);
            }
            sc.runs.push_back({"ProIBMAC(" + pname_str + ")", Policy::pro_ibmac, model, pname_str});
            any = true;
        }
        if (!any) throw ConfigError("[" + name + "] Pro-IBMAC needs beta and/or preset");
    }
    std::set<std::string> labels;
    for (const auto& r : sc.runs)
        if (!labels.insert(r.label).second) throw ConfigError("[" + name + "] duplicate run '" + r.label + "'");
    cfg.validate();
    return sc;
}

}  // namespace

std::vector<Scenario> load_scenarios(const fs::path& file, std::optional<std::uint64_t> seed_override) {
    if (!fs::exists(file)) throw ConfigError("scenario file not found: " + file.string());
    pt::ptree tree;
    try {
        pt::read_ini(file.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("scenario file: ") + e.what());
    }

    std::map<std::string, std::string> defaults;
    if (auto d = tree.get_child_optional("defaults"))
        for (const auto& [k, v] : *d) defaults[k] = v.data();

    std::vector<Scenario> out;
    std::set<std::string> names;
    const fs::path base_dir = file.parent_path();
    for (const auto& [name, section] : tree) {
        if (name == "defaults") continue;
        if (section.empty()) throw ConfigError("key '" + name + "' outside any [section]");
        if (!names.insert(name).second) throw ConfigError("duplicate scenario '" + name + "'");
        auto values = defaults;
        for (const auto& [k, v] : section) values[k] = v.data();
        out.push_back(build_scenario(Section(name, std::move(values)), name, base_dir, seed_override));
    }
    if (out.empty()) throw ConfigError("scenario file defines no scenarios");
    return out;
}

ScenarioResult run_scenario(const Scenario& scenario, unsigned jobs) {
    ScenarioResult result;
    result.name = scenario.name;
    result.capacity = scenario.base.capacity;

    auto run_one = [&scenario](const RunVariant& v) {
        SimConfig cfg = scenario.base;
        cfg.policy = v.policy;
        cfg.beta = v.beta;
        return RunResult{v, run_simulation(cfg)};
    };

    if (jobs <= 1) {
        for (const auto& v : scenario.runs) result.runs.push_back(run_one(v));
        return result;
    }
    std::vector<std::future<RunResult>> pending;
    for (std::size_t i = 0; i < scenario.runs.size(); ++i) {
        if (pending.size() >= jobs) {
            result.runs.push_back(pending.front().get());
            pending.erase(pending.begin());
        }
        pending.push_back(std::async(std::launch::async, run_one, std::cref(scenario.runs[i])));
    }
    for (auto& f : pending) result.runs.push_back(f.get());
    return result;
}

const std::vector<std::string>& summary_header() {
    static const std::vector<std::string> header = {
        "scenario",     "run",          "policy",        "c_l_mbps",      "beta",
        "admitted",     "rejected",     "drop_percent",  "mean_delay_s",  "mean_session_delay_s",
        "mean_mos",     "min_mos",      "max_div_percent", "sent",        "delivered",
        "dropped",      "queued",
    };
    return header;
}

std::vector<std::vector<std::string>> summary_rows(const ScenarioResult& result) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& run : result.runs) {
        const SimReport& r = run.report;
        double mos_sum = 0.0, mos_min = 5.0, div_max = 0.0;
        std::size_t scored = 0;
        for (const auto& s : r.sessions) {
            if (!s.qoe) continue;
            mos_sum += s.qoe->mos;
            mos_min = std::min(mos_min, s.qoe->mos);
            div_max = std::max(div_max, s.qoe->div_percent);
            ++scored;
        }
        const double drop = r.sent ? 100.0 * static_cast<double>(r.dropped) / static_cast<double>(r.sent) : 0.0;
        rows.push_back({
            result.name,
            run.variant.label,
            std::string(to_string(run.variant.policy)),
            csv::num(result.capacity / 1e6),
            run.variant.beta_label,
            csv::num(static_cast<std::uint64_t>(r.admitted_count())),
            csv::num(static_cast<std::uint64_t>(r.rejected_ids().size())),
            csv::fixed(drop, 4),
            csv::fixed(r.mean_delay(), 6),
            csv::fixed(r.mean_session_delay(), 6),
            scored ? csv::fixed(mos_sum / static_cast<double>(scored), 4) : "nan",
            scored ? csv::fixed(mos_min, 4) : "nan",
            csv::fixed(div_max, 2),
            csv::num(r.sent),
            csv::num(r.delivered),
            csv::num(r.dropped),
            csv::num(r.queued),
        });
    }
    return rows;
}

void write_bundle(const ScenarioResult& result, const fs::path& dir, const BundleOptions& options) {
    fs::create_directories(dir);

    csv::Writer summary(dir / "summary.csv", summary_header());
    for (const auto& row : summary_rows(result)) summary.row(row);

    csv::Writer admissions(dir / "admissions.csv",
                           {"run", "t", "session", "policy", "decision", "measured", "beta",
                            "threshold", "x_new", "note"});
    csv::Writer rates(dir / "rates.csv",
                      {"run", "t", "n", "iaar", "mu_s", "pro_iaar", "calr", "beta", "gamma"});
    csv::Writer qoe(dir / "qoe.csv", {"run", "session", "mos", "div"});
    csv::Writer cdf(dir / "delay_cdf.csv", {"run", "delay_s", "fraction"});

    for (const auto& run : result.runs) {
        const auto& label = run.variant.label;
        for (const auto& a : run.report.admissions) {
            const auto& d = a.decision;
            admissions.row({label, csv::fixed(d.t, 6), csv::num(std::uint64_t{a.session}),
                            std::string(to_string(d.policy)), d.accepted ? "accept" : "reject",
                            csv::fixed(d.measured, 3), d.beta_used ? csv::fixed(*d.beta_used, 6) : "",
                            csv::fixed(d.threshold, 3), csv::fixed(d.x_new, 3), d.note});
        }
        for (const auto& s : run.report.rates)
            rates.row({label, csv::fixed(s.t, 6), csv::num(std::uint64_t{s.n}), csv::fixed(s.iaar, 3),
                       csv::fixed(s.mu_s, 3), csv::fixed(s.pro_iaar, 3), csv::fixed(s.calr, 3),
                       csv::fixed(s.beta, 6), csv::fixed(s.gamma, 6)});
        for (const auto& s : run.report.sessions)
            if (s.qoe)
                qoe.row({label, csv::num(std::uint64_t{s.id}), csv::fixed(s.qoe->mos, 4),
                         csv::fixed(s.qoe->div_percent, 2)});
        if (run.report.delivered > 0)
            for (const auto& [delay, frac] : delay_cdf(run.report, options.cdf_points))
                cdf.row({label, csv::fixed(delay, 6), csv::fixed(frac, 6)});
    }

    if (options.packets_csv) {
        csv::Writer packets(dir / "packets.csv", {"run", "session", "frame", "seq", "wire_bytes",
                                                 "send_time", "finish_time", "delay", "dropped"});
        for (const auto& run : result.runs)
            for (const auto& p : run.report.packets)
                packets.row({run.variant.label, csv::num(std::uint64_t{p.session}), csv::num(p.frame),
                             csv::num(std::uint64_t{p.seq}), csv::num(std::uint64_t{p.wire_bytes}),
                             csv::fixed(p.send_time, 9), p.dropped ? "" : csv::fixed(p.finish_time, 9),
                             p.dropped ? "" : csv::fixed(p.delay, 9), p.dropped ? "1" : "0"});
    }
}

}  // namespace qoembac
