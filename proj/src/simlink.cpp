#include "qoembac/simlink.hpp"

#include "qoembac/error.hpp"
#include "qoembac/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace qoembac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FrameEvent {
    double t;
    std::size_t session;  // index into the request list
    std::uint64_t k;      // played frame counter

    bool operator>(const FrameEvent& o) const {
        return t != o.t ? t > o.t : session > o.session;
    }
};

std::string format_time(double t) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << t;
    return os.str();
}

}  // namespace

void SimConfig::validate() const {
    if (!(capacity > 0.0)) throw ConfigError("link capacity must be positive");
    if (queue_capacity < 1) throw ConfigError("queue capacity must be >= 1 packet");
    if (!(duration > 0.0)) throw ConfigError("duration must be positive");
    if (!(tick > 0.0)) throw ConfigError("tick must be positive");
    if (!(prop_delay >= 0.0)) throw ConfigError("propagation delay must be >= 0");
    if (payload_limit <= 0) throw ConfigError("payload limit must be positive");
    if (!(activity_window > 0.0)) throw ConfigError("activity window must be positive");
    double last = -kInf;
    for (const auto& a : arrivals) {
        if (!traces.contains(a.trace_id)) throw ConfigError("unknown trace id '" + a.trace_id + "'");
        if (!traces.at(a.trace_id)) throw ConfigError("trace '" + a.trace_id + "' is not loaded");
        if (!(a.time >= 0.0)) throw ConfigError("arrival times must be >= 0");
        if (a.time < last) throw ConfigError("arrival schedule must be ordered by time");
        last = a.time;
    }
    if (const auto* fixed = std::get_if<double>(&beta); fixed && policy == Policy::pro_ibmac &&
                                                        !(*fixed > 0.0 && *fixed <= 1.0))
        throw ConfigError("fixed beta must lie in (0, 1]");
}

std::vector<ArrivalRequest> make_arrival_schedule(std::size_t count, double interval, double start,
                                                  const std::vector<std::string>& trace_ids,
                                                  std::uint64_t seed, double peak_rate) {
    if (trace_ids.empty()) throw ConfigError("arrival schedule needs at least one trace id");
    if (!(interval > 0.0)) throw ConfigError("request interval must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, interval);
    std::vector<ArrivalRequest> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ArrivalRequest a;
        a.time = start + static_cast<double>(i) * interval + jitter(rng);
        a.trace_id = trace_ids[i % trace_ids.size()];
        a.peak_rate = peak_rate;
        out.push_back(std::move(a));
    }
    return out;
}

DroptailLink::DroptailLink(double capacity, std::size_t queue_capacity)
    : capacity_(capacity), queue_capacity_(queue_capacity) {
    if (!(capacity_ > 0.0)) throw DomainError("link capacity must be positive");
    if (queue_capacity_ < 1) throw DomainError("queue capacity must be >= 1");
}

std::size_t DroptailLink::backlog(double t) {
    while (!finish_times_.empty() && finish_times_.front() <= t) finish_times_.pop_front();
    return finish_times_.size();
}

std::optional<double> DroptailLink::offer(double t, double bits) {
    if (backlog(t) >= queue_capacity_) {
        ++dropped_;
        return std::nullopt;
    }
    const double finish = std::max(t, busy_until_) + bits / capacity_;
    busy_until_ = finish;
    finish_times_.push_back(finish);
    served_bits_ += bits;
    ++accepted_;
    max_backlog_ = std::max(max_backlog_, finish_times_.size());
    return finish;
}

std::vector<SessionId> SimReport::admitted_ids() const {
    std::vector<SessionId> ids;
    for (const auto& s : sessions)
        if (s.admitted) ids.push_back(s.id);
    return ids;
}

std::vector<SessionId> SimReport::rejected_ids() const {
    std::vector<SessionId> ids;
    for (const auto& a : admissions)
        if (!a.decision.accepted) ids.push_back(a.session);
    return ids;
}

std::size_t SimReport::admitted_count() const {
    return static_cast<std::size_t>(
        std::count_if(sessions.begin(), sessions.end(), [](const auto& s) { return s.admitted; }));
}

double SimReport::mean_delay() const {
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const auto& s : sessions) {
        sum += s.delay_sum;
        count += s.delivered;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

double SimReport::mean_session_delay() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : sessions) {
        if (!s.admitted || s.delivered == 0) continue;
        sum += s.mean_delay();
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

SimReport run_simulation(const SimConfig& config) {
    config.validate();

    SimReport report;
    std::vector<Session> sessions;
    sessions.reserve(config.arrivals.size());
    report.sessions.resize(config.arrivals.size());
    for (std::size_t i = 0; i < config.arrivals.size(); ++i) {
        const auto& a = config.arrivals[i];
        sessions.emplace_back(static_cast<SessionId>(i + 1), config.traces.at(a.trace_id), a.time,
                              a.peak_rate, config.loop_sessions, config.payload_limit);
        auto& r = report.sessions[i];
        r.id = sessions.back().id();
        r.trace_id = a.trace_id;
        r.request_time = a.time;
        r.peak_rate = sessions.back().peak_rate();
        r.min_delay = kInf;
    }

    DroptailLink link(config.capacity, config.queue_capacity);
    SourceRateOracle oracle(config.tick, config.tick, config.activity_window);
    std::priority_queue<FrameEvent, std::vector<FrameEvent>, std::greater<>> frames;
    std::vector<std::size_t> active;
    std::size_t next_request = 0;
    std::uint64_t next_tick_index = 1;

    auto active_view = [&] {
        std::vector<const Session*> view;
        view.reserve(active.size());
        for (std::size_t idx : active) view.push_back(&sessions[idx]);
        return view;
    };

    auto emit_frame = [&](const FrameEvent& ev) {
        Session& s = sessions[ev.session];
        SessionReport& r = report.sessions[ev.session];
        const VideoTrace& trace = s.trace();
        const FrameRecord& rec = trace[static_cast<std::size_t>(ev.k % trace.size())];
        bool intact = true;
        for (const Packet& pkt : packetize(rec, config.payload_limit)) {
            const double bits = 8.0 * pkt.wire_size();
            const auto finish = link.offer(ev.t, bits);
            ++r.sent;
            PacketRecord pr;
            if (!finish) {
                ++r.dropped;
                intact = false;
                pr.dropped = true;
            } else if (*finish > config.duration) {
                ++r.queued;
                pr.finish_time = *finish;
                pr.delay = *finish - ev.t + config.prop_delay;
            } else {
                const double delay = *finish - ev.t + config.prop_delay;
                ++r.delivered;
                r.delay_sum += delay;
                r.min_delay = std::min(r.min_delay, delay);
                pr.finish_time = *finish;
                pr.delay = delay;
            }
            if (config.record_packets) {
                pr.session = s.id();
                pr.frame = ev.k;
                pr.seq = pkt.seq_in_frame;
                pr.wire_bytes = pkt.wire_size();
                pr.send_time = ev.t;
                report.packets.push_back(pr);
            }
        }
        r.frame_delivered.push_back(intact ? 1 : 0);

        const std::uint64_t next = ev.k + 1;
        if (!s.loop() && next >= trace.size()) {
            s.transition(SessionState::finished);
            std::erase(active, ev.session);
            return;
        }
        const double nt = s.frame_time(next);
        if (nt < config.duration) frames.push({nt, ev.session, next});
    };

    auto run_tick = [&](double t) {
        const auto view = active_view();
        const MeasuredLoad load = oracle.measure(t, view);
        RateSample sample;
        sample.t = t;
        sample.n = load.state.n();
        sample.iaar = iaar(load.state);
        sample.mu_s = mu_s(load.state);
        sample.calr = load.calr;
        sample.beta = std::numeric_limits<double>::quiet_NaN();
        if (sample.n > 0) {
            try {
                sample.beta = resolve_beta(config.beta, config.capacity, sample.n);
                const double eps = epsilon(sample.beta, sample.mu_s, sample.n);
                sample.pro_iaar = pro_iaar(sample.mu_s, sample.n, eps);
                sample.gamma = hoeffding_gamma(load.state, eps);
            } catch (const DomainError&) {
                sample.pro_iaar = std::numeric_limits<double>::quiet_NaN();
                sample.gamma = std::numeric_limits<double>::quiet_NaN();
            }
        }
        report.rates.push_back(sample);
    };

    auto handle_request = [&](std::size_t idx) {
        Session& s = sessions[idx];
        const double t = s.start_time();
        AdmissionDecision d;
        if (config.policy == Policy::none) {
            d.policy = Policy::none;
            d.accepted = true;
            d.threshold = config.capacity;
            d.x_new = s.peak_rate();
        } else {
            const auto view = active_view();
            const MeasuredLoad load = oracle.measure(t, view);
            d = config.policy == Policy::cbac
                    ? cbac_decide(load.calr, s.peak_rate(), config.capacity, t)
                    : pro_ibmac_decide(load.state, s.peak_rate(), config.capacity, config.beta);
        }
        d.t = t;
        s.transition(d.accepted ? SessionState::active : SessionState::rejected);
        report.sessions[idx].admitted = d.accepted;
        if (d.accepted) {
            active.push_back(idx);
            frames.push({s.frame_time(0), idx, 0});
        }
        report.admissions.push_back({s.id(), std::move(d)});
    };

    for (;;) {
        const double tf = frames.empty() ? kInf : frames.top().t;
        const double tick_time = static_cast<double>(next_tick_index) * config.tick;
        const double tt = tick_time <= config.duration ? tick_time : kInf;
        double tr = kInf;
        while (next_request < sessions.size() && !(sessions[next_request].start_time() < config.duration)) {
            report.warnings.push_back("request for session " + std::to_string(sessions[next_request].id()) +
                                      " at t=" + format_time(sessions[next_request].start_time()) +
                                      " lies beyond the simulated duration; ignored");
            ++next_request;
        }
        if (next_request < sessions.size()) tr = sessions[next_request].start_time();
        if (tf == kInf && tt == kInf && tr == kInf) break;

        if (tf <= tt && tf <= tr) {
            const FrameEvent ev = frames.top();
            frames.pop();
            emit_frame(ev);
        } else if (tt <= tr) {
            run_tick(tt);
            ++next_tick_index;
        } else {
            handle_request(next_request++);
        }
    }

    for (std::size_t idx : active) sessions[idx].transition(SessionState::finished);

    for (std::size_t i = 0; i < sessions.size(); ++i) {
        auto& r = report.sessions[i];
        if (r.min_delay == kInf) r.min_delay = 0.0;
        report.sent += r.sent;
        report.delivered += r.delivered;
        report.dropped += r.dropped;
        report.queued += r.queued;
        if (r.admitted && !r.frame_delivered.empty())
            r.qoe = score_playback(sessions[i].trace(), r.frame_delivered, sessions[i].trace().gop());
    }
    report.served_bits = link.served_bits();
    report.max_backlog = link.max_backlog();
    return report;
}

double drop_ratio(const SimReport& report) {
    std::uint64_t sent = 0, dropped = 0;
    for (const auto& s : report.sessions) {
        if (!s.admitted) continue;
        sent += s.sent;
        dropped += s.dropped;
    }
    if (sent == 0) throw NoDataError("no traffic was sent");
    return static_cast<double>(dropped) / static_cast<double>(sent);
}

std::vector<std::pair<double, double>> delay_cdf(const SimReport& report, std::size_t points) {
    if (points < 1) throw DomainError("delay CDF needs at least one point");
    std::vector<double> delays;
    for (const auto& s : report.sessions)
        if (s.admitted && s.delivered > 0) delays.push_back(s.mean_delay());
    if (delays.empty()) throw NoDataError("no delivered packets");
    std::sort(delays.begin(), delays.end());

    const auto m = delays.size();
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(points);
    for (std::size_t j = 1; j <= points; ++j) {
        // Smallest sample whose empirical CDF reaches j / points.
        const auto rank = static_cast<std::size_t>(
            std::ceil(static_cast<double>(j) * static_cast<double>(m) / static_cast<double>(points) - 1e-12));
        const double d = delays[std::clamp<std::size_t>(rank, 1, m) - 1];
        const auto upto = std::upper_bound(delays.begin(), delays.end(), d) - delays.begin();
        cdf.emplace_back(d, static_cast<double>(upto) / static_cast<double>(m));
    }
    return cdf;
}

}  // namespace qoembac
