#pragma once

#include "qoembac/admission.hpp"
#include "qoembac/qoe.hpp"
#include "qoembac/traffic.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qoembac {

struct ArrivalRequest {
    double time = 0.0;
    std::string trace_id;
    double peak_rate = 0.0;  // <= 0: derive from the trace
};

struct SimConfig {
    double capacity = 22e6;  // bits/s
    double prop_delay = 0.010;
    std::size_t queue_capacity = 5300;  // packets
    int payload_limit = kDefaultPayloadLimit;
    double tick = 1.0;  // measurement period and CalR window
    double duration = 500.0;
    double activity_window = 10.0;
    std::vector<ArrivalRequest> arrivals;
    Policy policy = Policy::none;
    BetaSource beta = 1.0;
    std::uint64_t seed = 0;
    bool loop_sessions = true;  // admitted sessions replay their trace until the run ends
    bool record_packets = false;
    std::map<std::string, std::shared_ptr<const VideoTrace>> traces;

    /// Throws ConfigError.
    void validate() const;
};

/// One request per `interval` seconds starting at `start`, each jittered uniformly in
/// [0, interval) by a generator seeded with `seed`. Trace ids are assigned round-robin.
std::vector<ArrivalRequest> make_arrival_schedule(std::size_t count, double interval, double start,
                                                  const std::vector<std::string>& trace_ids,
                                                  std::uint64_t seed, double peak_rate = 0.0);

/// FIFO droptail bottleneck. Packets in the system (waiting or being transmitted) are
/// tracked by their transmission finish times.
class DroptailLink {
  public:
    DroptailLink(double capacity, std::size_t queue_capacity);

    /// Offers a packet arriving at `t` (non-decreasing across calls). Returns its
    /// transmission finish time, or nullopt if the queue was full.
    std::optional<double> offer(double t, double bits);

    /// Packets still in the system at time t.
    std::size_t backlog(double t);
    double busy_until() const noexcept { return busy_until_; }
    double served_bits() const noexcept { return served_bits_; }
    std::uint64_t accepted_packets() const noexcept { return accepted_; }
    std::uint64_t dropped_packets() const noexcept { return dropped_; }
    std::size_t max_backlog() const noexcept { return max_backlog_; }

  private:
    double capacity_;
    std::size_t queue_capacity_;
    std::deque<double> finish_times_;
    double busy_until_ = 0.0;
    double served_bits_ = 0.0;
    std::uint64_t accepted_ = 0;
    std::uint64_t dropped_ = 0;
    std::size_t max_backlog_ = 0;
};

struct PacketRecord {
    SessionId session = 0;
    std::uint64_t frame = 0;  // played frame counter
    std::uint32_t seq = 0;
    std::uint32_t wire_bytes = 0;
    double send_time = 0.0;
    double finish_time = 0.0;  // transmission complete; meaningless when dropped
    double delay = 0.0;        // finish - send + propagation; meaningless when dropped
    bool dropped = false;
};

struct SessionReport {
    SessionId id = 0;
    std::string trace_id;
    double request_time = 0.0;
    double peak_rate = 0.0;
    bool admitted = false;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t queued = 0;  // still in the link when the run ended
    double delay_sum = 0.0;    // over delivered packets
    double min_delay = 0.0;
    std::vector<std::uint8_t> frame_delivered;  // per played frame: no packet dropped
    std::optional<SessionQoe> qoe;

    double mean_delay() const noexcept {
        return delivered ? delay_sum / static_cast<double>(delivered) : 0.0;
    }
};

struct RateSample {
    double t = 0.0;
    std::size_t n = 0;
    double iaar = 0.0;
    double mu_s = 0.0;
    double pro_iaar = 0.0;
    double calr = 0.0;
    double beta = 0.0;   // NaN when not resolvable
    double gamma = 1.0;  // Hoeffding bound at the Pro-IAAR deviation
};

struct AdmissionRecord {
    SessionId session = 0;
    AdmissionDecision decision;
};

struct SimReport {
    std::vector<SessionReport> sessions;  // one per request, in request order
    std::vector<AdmissionRecord> admissions;
    std::vector<RateSample> rates;
    std::vector<PacketRecord> packets;  // only with SimConfig::record_packets
    std::vector<std::string> warnings;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t queued = 0;
    double served_bits = 0.0;
    std::size_t max_backlog = 0;

    std::vector<SessionId> admitted_ids() const;
    std::vector<SessionId> rejected_ids() const;
    std::size_t admitted_count() const;
    /// Mean over all delivered packets.
    double mean_delay() const;
    /// Mean of the per-session mean delays of admitted sessions that delivered anything.
    double mean_session_delay() const;
};

/// Deterministic packet-level run of the configured scenario.
SimReport run_simulation(const SimConfig& config);

/// dropped / sent over admitted sessions. Throws NoDataError if nothing was sent.
double drop_ratio(const SimReport& report);

/// Empirical CDF of per-session mean delays sampled at `points` evenly spaced quantiles:
/// (delay seconds, fraction of sessions with mean delay <= that value).
std::vector<std::pair<double, double>> delay_cdf(const SimReport& report, std::size_t points);

}  // namespace qoembac
