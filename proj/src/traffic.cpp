#include "qoembac/traffic.hpp"

#include "qoembac/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace qoembac {

namespace {

constexpr double kTimeEps = 1e-9;

bool parse_frame_type(std::string_view token, FrameType& out) {
    if (token.size() != 1) return false;
    switch (token[0]) {
        case 'I': out = FrameType::I; return true;
        case 'P': out = FrameType::P; return true;
        case 'B': out = FrameType::B; return true;
        default: return false;
    }
}

}  // namespace

char to_char(FrameType type) { return static_cast<char>(type); }

VideoTrace::VideoTrace(std::vector<FrameRecord> frames, double fps, int gop, VideoFormat format)
    : frames_(std::move(frames)), fps_(fps), gop_(gop), format_(format) {
    if (frames_.empty()) throw NoDataError("empty trace");
    if (!(fps_ > 0.0)) throw DomainError("fps must be positive");
    if (gop_ < 1) throw DomainError("gop must be >= 1");
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        const auto& f = frames_[i];
        if (f.index != i)
            throw StructureError("frame " + std::to_string(i) + " has index " +
                                 std::to_string(f.index) + "; indices must count up from 0");
        if (f.size == 0) throw StructureError("frame " + std::to_string(i) + " has zero size");
        if (!(f.ref_psnr >= 0.0))
            throw StructureError("frame " + std::to_string(i) + " has negative PSNR");
        if (i % static_cast<std::size_t>(gop_) == 0 && f.type != FrameType::I)
            throw StructureError("frame " + std::to_string(i) + " opens a GoP but is not an I frame");
    }
}

std::uint64_t VideoTrace::total_bytes() const noexcept {
    return std::accumulate(frames_.begin(), frames_.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const FrameRecord& f) { return acc + f.size; });
}

VideoTrace load_trace(std::string_view source, double fps, int gop, VideoFormat format) {
    std::vector<FrameRecord> frames;
    std::istringstream in{std::string(source)};
    std::string line;
    std::size_t line_no = 0;
    std::size_t data_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        ++data_line;

        std::istringstream cols(line);
        cols.imbue(std::locale::classic());
        std::string idx_tok, type_tok, size_tok, psnr_tok, extra;
        cols >> idx_tok >> type_tok >> size_tok;
        if (size_tok.empty()) throw ParseError(line_no, "expected `index type size_bytes [psnr_db]`");
        cols >> psnr_tok >> extra;
        if (!extra.empty()) throw ParseError(line_no, "too many columns");

        FrameRecord rec;
        std::size_t pos = 0;
        try {
            long long idx = std::stoll(idx_tok, &pos);
            if (pos != idx_tok.size() || idx < 0) throw std::invalid_argument("index");
            rec.index = static_cast<std::size_t>(idx);
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad frame index '" + idx_tok + "'");
        }
        if (!parse_frame_type(type_tok, rec.type))
            throw ParseError(line_no, "bad frame type '" + type_tok + "' (expected I, P or B)");
        try {
            long long size = std::stoll(size_tok, &pos);
            if (pos != size_tok.size() || size <= 0 || size > std::numeric_limits<std::uint32_t>::max())
                throw std::invalid_argument("size");
            rec.size = static_cast<std::uint32_t>(size);
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad frame size '" + size_tok + "'");
        }
        if (!psnr_tok.empty()) {
            std::istringstream ps(psnr_tok);
            ps.imbue(std::locale::classic());
            double psnr = 0.0;
            if (!(ps >> psnr) || !ps.eof() || !(psnr >= 0.0))
                throw ParseError(line_no, "bad PSNR '" + psnr_tok + "'");
            rec.ref_psnr = psnr;
        }
        if (rec.index != frames.size())
            throw StructureError("line " + std::to_string(line_no) + ": frame index " +
                                 std::to_string(rec.index) + " out of sequence (expected " +
                                 std::to_string(frames.size()) + ")");
        frames.push_back(rec);
    }
    if (data_line == 0) throw NoDataError("empty trace");
    return VideoTrace(std::move(frames), fps, gop, format);
}

VideoTrace load_trace_file(const std::string& path, double fps, int gop, VideoFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_trace(buf.str(), fps, gop, format);
}

void write_trace(std::ostream& os, const VideoTrace& trace) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "# index type size_bytes psnr_db\n";
    out << std::fixed << std::setprecision(2);
    for (const auto& f : trace.frames())
        out << f.index << ' ' << to_char(f.type) << ' ' << f.size << ' ' << f.ref_psnr << '\n';
    os << out.str();
}

std::uint32_t packet_count(std::uint32_t frame_size, int payload_limit) noexcept {
    const auto limit = static_cast<std::uint32_t>(payload_limit);
    return (frame_size + limit - 1) / limit;
}

std::uint64_t wire_bytes(std::uint32_t frame_size, int payload_limit) noexcept {
    return std::uint64_t{frame_size} +
           std::uint64_t{packet_count(frame_size, payload_limit)} * kHeaderBytes;
}

std::vector<Packet> packetize(const FrameRecord& frame, int payload_limit) {
    if (payload_limit <= 0) throw DomainError("payload limit must be positive");
    const auto limit = static_cast<std::uint32_t>(payload_limit);
    const std::uint32_t count = packet_count(frame.size, payload_limit);
    std::vector<Packet> packets;
    packets.reserve(count);
    std::uint32_t left = frame.size;
    for (std::uint32_t s = 0; s < count; ++s) {
        Packet p;
        p.frame_index = frame.index;
        p.seq_in_frame = s;
        p.payload = std::min(left, limit);
        left -= p.payload;
        packets.push_back(p);
    }
    return packets;
}

VideoTrace synth_trace(const SynthParams& params) {
    if (!(params.mean_bitrate > 0.0) || !(params.duration > 0.0) || !(params.fps > 0.0) ||
        params.gop < 1)
        throw DomainError("synth_trace: parameters must be positive");
    if (!(params.burstiness >= 1.0)) throw DomainError("synth_trace: burstiness must be >= 1");
    if (params.gop > 1 && params.burstiness >= params.gop)
        throw DomainError("synth_trace: burstiness must be below the GoP length");

    const auto count = static_cast<std::size_t>(std::llround(params.duration * params.fps));
    if (count == 0) throw DomainError("synth_trace: duration shorter than one frame");
    const double mean_frame = params.mean_bitrate / (8.0 * params.fps);
    const double b = params.burstiness;
    const double p_weight = params.gop > 1 ? (params.gop - b) / (params.gop - 1) : 1.0;
    const double sigma = params.jitter_scale * std::log(b);
    const double rho = std::clamp(params.jitter_correlation, 0.0, 0.999999);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(count);
    double z = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const bool intra = params.gop == 1 || i % static_cast<std::size_t>(params.gop) == 0;
        double jitter = 1.0;
        if (sigma > 0.0) {
            const double e = normal(rng);
            z = i == 0 ? e : rho * z + std::sqrt(1.0 - rho * rho) * e;
            jitter = std::exp(sigma * z - 0.5 * sigma * sigma);
        }
        raw[i] = (intra ? b : p_weight) * jitter;
    }
    // Rescale so the emitted trace hits the requested mean exactly before rounding.
    const double raw_total = std::accumulate(raw.begin(), raw.end(), 0.0);
    const double scale = mean_frame * static_cast<double>(count) / raw_total;

    std::vector<FrameRecord> frames(count);
    for (std::size_t i = 0; i < count; ++i) {
        frames[i].index = i;
        frames[i].type = (params.gop == 1 || i % static_cast<std::size_t>(params.gop) == 0)
                             ? FrameType::I
                             : FrameType::P;
        frames[i].size = static_cast<std::uint32_t>(std::max<long long>(1, std::llround(raw[i] * scale)));
        frames[i].ref_psnr = kDefaultRefPsnr;
    }
    return VideoTrace(std::move(frames), params.fps, params.gop, VideoFormat::other);
}

WireProfile::WireProfile(const VideoTrace& trace, int payload_limit) : payload_limit_(payload_limit) {
    if (payload_limit <= 0) throw DomainError("payload limit must be positive");
    prefix_.resize(trace.size() + 1, 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i)
        prefix_[i + 1] = prefix_[i] + 8.0 * static_cast<double>(wire_bytes(trace[i].size, payload_limit));
}

double WireProfile::bits_before(std::uint64_t count, bool loop) const {
    const std::uint64_t n = frames();
    if (!loop) return prefix_[std::min(count, n)];
    return static_cast<double>(count / n) * prefix_.back() + prefix_[count % n];
}

double WireProfile::peak_rate(double fps, double window) const {
    const std::size_t n = frames();
    const auto span = static_cast<std::size_t>(
        std::max(1.0, std::ceil(window * fps - kTimeEps)));
    double best = 0.0;
    for (std::size_t start = 0; start < n; ++start) {
        const std::uint64_t end = start + span;
        double bits = 0.0;
        if (span >= n) {
            // Window longer than the trace: count whole loops plus the remainder.
            bits = bits_before(start + span, true) - bits_before(start, true);
        } else if (end <= n) {
            bits = prefix_[end] - prefix_[start];
        } else {
            bits = (prefix_[n] - prefix_[start]) + prefix_[end - n];
        }
        best = std::max(best, bits);
    }
    return best / window;
}

std::string_view to_string(SessionState state) {
    switch (state) {
        case SessionState::requested: return "requested";
        case SessionState::active: return "active";
        case SessionState::rejected: return "rejected";
        case SessionState::finished: return "finished";
    }
    return "unknown";
}

Session::Session(SessionId id, std::shared_ptr<const VideoTrace> trace, double start_time,
                 double peak_rate, bool loop, int payload_limit)
    : id_(id), trace_(std::move(trace)), start_time_(start_time), peak_rate_(peak_rate), loop_(loop) {
    if (!trace_) throw ConfigError("session " + std::to_string(id) + " has no trace");
    if (!(start_time_ >= 0.0)) throw DomainError("session start time must be >= 0");
    profile_ = std::make_shared<const WireProfile>(*trace_, payload_limit);
    if (!(peak_rate_ > 0.0)) peak_rate_ = profile_->peak_rate(trace_->fps(), 1.0);
}

void Session::transition(SessionState next) {
    const bool ok = (state_ == SessionState::requested &&
                     (next == SessionState::active || next == SessionState::rejected)) ||
                    (state_ == SessionState::active && next == SessionState::finished);
    if (!ok)
        throw StructureError("session " + std::to_string(id_) + ": illegal transition " +
                             std::string(to_string(state_)) + " -> " + std::string(to_string(next)));
    state_ = next;
}

double Session::frame_time(std::uint64_t k) const noexcept {
    return start_time_ + static_cast<double>(k) / trace_->fps();
}

std::uint64_t Session::frames_sent_by(double t) const noexcept {
    if (t < start_time_) return 0;
    const double x = (t - start_time_) * trace_->fps();
    const auto sent = static_cast<std::uint64_t>(std::floor(x + kTimeEps)) + 1;
    return loop_ ? sent : std::min<std::uint64_t>(sent, trace_->size());
}

double Session::end_time() const noexcept {
    if (loop_) return std::numeric_limits<double>::infinity();
    return start_time_ + trace_->duration();
}

double instantaneous_rate(const Session& session, double t, double window) {
    if (!(window > 0.0)) throw DomainError("rate window must be positive");
    if (session.state() == SessionState::rejected) return 0.0;
    const std::uint64_t hi = session.frames_sent_by(t);
    const std::uint64_t lo = session.frames_sent_by(t - window);
    if (hi <= lo) return 0.0;
    const auto& prof = session.profile();
    return (prof.bits_before(hi, session.loop()) - prof.bits_before(lo, session.loop())) / window;
}

}  // namespace qoembac
