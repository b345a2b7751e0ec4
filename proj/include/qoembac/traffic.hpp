#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qoembac {

inline constexpr int kUdpHeaderBytes = 8;
inline constexpr int kIpHeaderBytes = 20;
inline constexpr int kHeaderBytes = kUdpHeaderBytes + kIpHeaderBytes;
inline constexpr int kDefaultPayloadLimit = 1024;
inline constexpr double kDefaultRefPsnr = 38.0;

enum class FrameType : char { I = 'I', P = 'P', B = 'B' };
enum class VideoFormat { cif, qcif, other };

char to_char(FrameType type);

struct FrameRecord {
    std::size_t index = 0;
    FrameType type = FrameType::P;
    std::uint32_t size = 1;  // bytes
    double ref_psnr = kDefaultRefPsnr;
};

/// An immutable, validated sequence of frames describing one VBR video source.
class VideoTrace {
  public:
    /// Throws StructureError / NoDataError / DomainError when an invariant is violated.
    explicit VideoTrace(std::vector<FrameRecord> frames, double fps = 30.0, int gop = 30,
                        VideoFormat format = VideoFormat::other);

    const std::vector<FrameRecord>& frames() const noexcept { return frames_; }
    const FrameRecord& operator[](std::size_t i) const { return frames_[i]; }
    std::size_t size() const noexcept { return frames_.size(); }
    double fps() const noexcept { return fps_; }
    int gop() const noexcept { return gop_; }
    VideoFormat format() const noexcept { return format_; }

    double duration() const noexcept { return static_cast<double>(frames_.size()) / fps_; }
    std::uint64_t total_bytes() const noexcept;

  private:
    std::vector<FrameRecord> frames_;
    double fps_;
    int gop_;
    VideoFormat format_;
};

/// Parse the whitespace-separated `index type size_bytes [psnr_db]` text format.
VideoTrace load_trace(std::string_view source, double fps = 30.0, int gop = 30,
                      VideoFormat format = VideoFormat::other);
VideoTrace load_trace_file(const std::string& path, double fps = 30.0, int gop = 30,
                           VideoFormat format = VideoFormat::other);
void write_trace(std::ostream& os, const VideoTrace& trace);

using SessionId = std::uint32_t;

struct Packet {
    SessionId session_id = 0;
    std::size_t frame_index = 0;
    std::uint32_t seq_in_frame = 0;
    std::uint32_t payload = 0;
    std::uint32_t header = kHeaderBytes;
    double send_time = 0.0;

    std::uint32_t wire_size() const noexcept { return payload + header; }
};

std::vector<Packet> packetize(const FrameRecord& frame, int payload_limit = kDefaultPayloadLimit);

std::uint32_t packet_count(std::uint32_t frame_size, int payload_limit) noexcept;
/// Bytes on the wire for one frame: payload plus one header per packet.
std::uint64_t wire_bytes(std::uint32_t frame_size, int payload_limit) noexcept;

struct SynthParams {
    double mean_bitrate = 1e6;  // bits/s of payload
    double burstiness = 1.0;    // I-frame size over the mean frame size
    double duration = 10.0;     // seconds
    double fps = 30.0;
    int gop = 30;
    std::uint64_t seed = 1;
    /// Log-scale jitter amplitude per unit of ln(burstiness). Zero burstiness spread at 1.0.
    double jitter_scale = 0.25;
    /// Frame-to-frame correlation of the jitter process.
    double jitter_correlation = 0.95;
};

VideoTrace synth_trace(const SynthParams& params);

/// Prefix sums of wire bits for a trace at a fixed payload limit; answers window queries
/// over an optionally looped playback in O(1).
class WireProfile {
  public:
    WireProfile(const VideoTrace& trace, int payload_limit);

    int payload_limit() const noexcept { return payload_limit_; }
    std::size_t frames() const noexcept { return prefix_.size() - 1; }
    /// Total wire bits of played frames [0, count); frame k maps to trace frame k mod size
    /// when looping.
    double bits_before(std::uint64_t count, bool loop) const;
    double total_bits() const noexcept { return prefix_.back(); }
    /// Maximum wire bitrate over any `window`-second span of consecutive frames, including
    /// spans that wrap around the end of the trace.
    double peak_rate(double fps, double window = 1.0) const;

  private:
    int payload_limit_;
    std::vector<double> prefix_;
};

enum class SessionState { requested, active, rejected, finished };

std::string_view to_string(SessionState state);

class Session {
  public:
    /// `peak_rate` <= 0 derives the peak from the trace's maximum 1-second wire bitrate.
    Session(SessionId id, std::shared_ptr<const VideoTrace> trace, double start_time,
            double peak_rate = 0.0, bool loop = false, int payload_limit = kDefaultPayloadLimit);

    SessionId id() const noexcept { return id_; }
    const VideoTrace& trace() const noexcept { return *trace_; }
    const std::shared_ptr<const VideoTrace>& trace_ptr() const noexcept { return trace_; }
    const WireProfile& profile() const noexcept { return *profile_; }
    double start_time() const noexcept { return start_time_; }
    double peak_rate() const noexcept { return peak_rate_; }
    bool loop() const noexcept { return loop_; }
    int payload_limit() const noexcept { return profile_->payload_limit(); }
    SessionState state() const noexcept { return state_; }

    /// Allowed: requested -> active | rejected, active -> finished.
    void transition(SessionState next);

    /// Send instant of the k-th played frame.
    double frame_time(std::uint64_t k) const noexcept;
    /// Number of played frames with send instant <= t.
    std::uint64_t frames_sent_by(double t) const noexcept;
    /// Time after the last frame instant, or +inf for a looped session.
    double end_time() const noexcept;

  private:
    SessionId id_;
    std::shared_ptr<const VideoTrace> trace_;
    std::shared_ptr<const WireProfile> profile_;
    double start_time_;
    double peak_rate_;
    bool loop_;
    SessionState state_ = SessionState::requested;
};

/// Wire bits sent by the session in (t - window, t], divided by window.
double instantaneous_rate(const Session& session, double t, double window = 1.0);

}  // namespace qoembac
