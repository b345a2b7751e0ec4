#include "helpers.hpp"

#include "qoembac/error.hpp"
#include "qoembac/simlink.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace qoembac;

namespace {

SimConfig cbr_config(double capacity, std::vector<double> rates, double duration) {
    SimConfig cfg;
    cfg.capacity = capacity;
    cfg.duration = duration;
    cfg.policy = Policy::none;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const std::string id = "cbr" + std::to_string(i);
        cfg.traces[id] = fixtures::cbr_trace(rates[i], 10.0);
        cfg.arrivals.push_back({0.0, id, 0.0});
    }
    return cfg;
}

}  // namespace

TEST(DroptailLink, ServesFifoAndDropsWhenFull) {
    DroptailLink link(1000.0, 2);
    EXPECT_DOUBLE_EQ(*link.offer(0.0, 1000.0), 1.0);
    EXPECT_DOUBLE_EQ(*link.offer(0.0, 500.0), 1.5);
    EXPECT_FALSE(link.offer(0.1, 100.0).has_value());
    EXPECT_EQ(link.backlog(1.0), 1u);
    EXPECT_DOUBLE_EQ(*link.offer(1.2, 100.0), 1.6);
    EXPECT_DOUBLE_EQ(*link.offer(5.0, 100.0), 5.1);
    EXPECT_EQ(link.dropped_packets(), 1u);
    EXPECT_EQ(link.accepted_packets(), 4u);
}

TEST(Simulation, UncontendedLinkDelayIsTransmissionPlusPropagation) {
    auto cfg = cbr_config(10e6, {1e6}, 5.0);
    cfg.record_packets = true;
    const auto r = run_simulation(cfg);
    EXPECT_EQ(r.dropped, 0u);
    EXPECT_EQ(drop_ratio(r), 0.0);
    const std::uint32_t frame = (*cfg.traces.at("cbr0"))[0].size;
    const auto pkts = packetize({0, FrameType::P, frame});
    ASSERT_FALSE(r.packets.empty());
    for (const auto& p : r.packets) {
        if (p.finish_time > cfg.duration) continue;
        // packets of one frame leave back to back
        double expect = 0.0;
        for (std::uint32_t s = 0; s <= p.seq; ++s) expect += 8.0 * pkts[s].wire_size() / cfg.capacity;
        EXPECT_NEAR(p.delay, expect + cfg.prop_delay, 1e-9);
    }
}

TEST(Simulation, OverloadDropsExcessShare) {
    auto cfg = cbr_config(10e6, {6e6 * 1024.0 / 1052.0, 6e6 * 1024.0 / 1052.0}, 60.0);
    cfg.queue_capacity = 100;  // a little over one frame interval of bursts
    const auto r = run_simulation(cfg);
    EXPECT_NEAR(static_cast<double>(r.dropped) / static_cast<double>(r.sent), 1.0 / 6.0, 0.01);
}

TEST(Simulation, ConservationAndFifo) {
    auto cfg = cbr_config(3e6, {1.5e6, 1.2e6, 0.9e6}, 12.0);
    cfg.queue_capacity = 30;
    cfg.record_packets = true;
    const auto r = run_simulation(cfg);
    EXPECT_GT(r.dropped, 0u);
    EXPECT_EQ(r.sent, r.delivered + r.dropped + r.queued);
    for (const auto& s : r.sessions) EXPECT_EQ(s.sent, s.delivered + s.dropped + s.queued);
    EXPECT_EQ(r.packets.size(), r.sent);

    std::map<SessionId, double> last_finish;
    double link_last = 0.0;
    for (const auto& p : r.packets) {
        if (p.dropped) continue;
        EXPECT_GE(p.finish_time, last_finish[p.session]);
        last_finish[p.session] = p.finish_time;
        EXPECT_GE(p.finish_time, link_last);
        link_last = p.finish_time;
        EXPECT_GE(p.delay, 8.0 * p.wire_bytes / cfg.capacity + cfg.prop_delay - 1e-12);
    }
}

TEST(Simulation, WorkConserving) {
    auto cfg = cbr_config(2e6, {1.5e6, 1.5e6}, 10.0);
    cfg.queue_capacity = 10000;
    cfg.record_packets = true;
    const auto r = run_simulation(cfg);
    // every accepted packet starts service at its arrival or when the previous one finishes
    double busy = 0.0;
    for (const auto& p : r.packets) {
        if (p.dropped) continue;
        const double start = p.finish_time - 8.0 * p.wire_bytes / cfg.capacity;
        EXPECT_NEAR(start, std::max(p.send_time, busy), 1e-9);
        busy = p.finish_time;
    }
}

TEST(Simulation, Deterministic) {
    SimConfig cfg;
    cfg.capacity = 8e6;
    cfg.duration = 40.0;
    cfg.policy = Policy::pro_ibmac;
    cfg.beta = 0.8;
    SynthParams p;
    p.mean_bitrate = 1e6;
    p.burstiness = 4.0;
    p.duration = 10.0;
    p.jitter_scale = 0.3;
    cfg.traces["v"] = std::make_shared<const VideoTrace>(synth_trace(p));
    cfg.arrivals = make_arrival_schedule(20, 1.0, 0.0, {"v"}, 11);
    const auto a = run_simulation(cfg), b = run_simulation(cfg);
    EXPECT_EQ(a.sent, b.sent);
    EXPECT_EQ(a.dropped, b.dropped);
    EXPECT_EQ(a.admitted_ids(), b.admitted_ids());
    ASSERT_EQ(a.rates.size(), b.rates.size());
    for (std::size_t i = 0; i < a.rates.size(); ++i) EXPECT_EQ(a.rates[i].pro_iaar, b.rates[i].pro_iaar);
    EXPECT_EQ(a.mean_delay(), b.mean_delay());
}

TEST(Simulation, ConfigErrorsAndWarnings) {
    auto cfg = cbr_config(10e6, {1e6}, 5.0);
    cfg.arrivals.push_back({1.0, "missing", 0.0});
    EXPECT_THROW(run_simulation(cfg), ConfigError);

    auto late = cbr_config(10e6, {1e6}, 5.0);
    late.arrivals.push_back({7.0, "cbr0", 0.0});
    const auto r = run_simulation(late);
    EXPECT_EQ(r.warnings.size(), 1u);
    EXPECT_EQ(r.admitted_count(), 1u);
}

TEST(Simulation, PolicyNoneAdmitsEverything) {
    auto cfg = cbr_config(1e6, {1e6, 1e6, 1e6}, 3.0);
    const auto r = run_simulation(cfg);
    EXPECT_EQ(r.admitted_count(), 3u);
    EXPECT_TRUE(r.rejected_ids().empty());
}

TEST(DropRatio, Definition) {
    SimReport r;
    SessionReport s;
    s.admitted = true;
    s.sent = 1000;
    s.dropped = 67;
    r.sessions.push_back(s);
    EXPECT_DOUBLE_EQ(drop_ratio(r), 0.067);
    EXPECT_THROW(drop_ratio(SimReport{}), NoDataError);
}

TEST(DelayCdf, TwoSessions) {
    SimReport r;
    for (double d : {0.010, 0.020}) {
        SessionReport s;
        s.admitted = true;
        s.delivered = 10;
        s.sent = 10;
        s.delay_sum = 10 * d;
        r.sessions.push_back(s);
    }
    const auto cdf = delay_cdf(r, 2);
    ASSERT_EQ(cdf.size(), 2u);
    EXPECT_DOUBLE_EQ(cdf[0].first, 0.010);
    EXPECT_DOUBLE_EQ(cdf[0].second, 0.5);
    EXPECT_DOUBLE_EQ(cdf[1].first, 0.020);
    EXPECT_DOUBLE_EQ(cdf[1].second, 1.0);
    EXPECT_THROW(delay_cdf(SimReport{}, 3), NoDataError);
}

TEST(ArrivalSchedule, OnePerIntervalRoundRobin) {
    const auto s = make_arrival_schedule(6, 1.0, 2.0, {"a", "b"}, 3);
    ASSERT_EQ(s.size(), 6u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_GE(s[i].time, 2.0 + i);
        EXPECT_LT(s[i].time, 3.0 + i);
        EXPECT_EQ(s[i].trace_id, i % 2 ? "b" : "a");
    }
}
