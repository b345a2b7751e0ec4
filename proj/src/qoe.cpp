#include "qoembac/qoe.hpp"

#include "qoembac/error.hpp"

#include <algorithm>
#include <string>

namespace qoembac {

int psnr_to_mos(double psnr_db) {
    if (!(psnr_db >= 0.0)) throw DomainError("PSNR must be >= 0");
    if (psnr_db > 37.0) return 5;
    if (psnr_db > 31.0) return 4;
    if (psnr_db > 25.0) return 3;
    if (psnr_db > 20.0) return 2;
    return 1;
}

std::vector<FrameOutcome> frame_outcomes(const VideoTrace& trace,
                                         std::span<const std::uint8_t> delivery, int gop) {
    if (gop < 1) throw DomainError("gop must be >= 1");
    const std::size_t frames = trace.size();
    std::vector<FrameOutcome> out(delivery.size());
    bool chain_ok = false;
    for (std::size_t k = 0; k < delivery.size(); ++k) {
        const std::size_t local = k % frames;
        const FrameRecord& f = trace[local];
        // A new GoP starts at every gop-th frame of the trace and again when it loops.
        if (local % static_cast<std::size_t>(gop) == 0) chain_ok = true;
        chain_ok = chain_ok && delivery[k] != 0;

        FrameOutcome& o = out[k];
        o.index = k;
        o.delivered = chain_ok;
        o.sent_mos = psnr_to_mos(f.ref_psnr);
        o.recv_mos = chain_ok ? o.sent_mos : 1;
    }
    return out;
}

double div_metric(std::span<const FrameOutcome> outcomes, std::size_t interval) {
    if (interval < 1) throw DomainError("DIV interval must be >= 1");
    if (outcomes.empty()) throw NoDataError("DIV over no frames");
    double worst = 0.0;
    for (std::size_t begin = 0; begin < outcomes.size(); begin += interval) {
        const std::size_t end = std::min(outcomes.size(), begin + interval);
        const auto degraded = std::count_if(
            outcomes.begin() + static_cast<std::ptrdiff_t>(begin),
            outcomes.begin() + static_cast<std::ptrdiff_t>(end),
            [](const FrameOutcome& o) { return o.recv_mos < o.sent_mos; });
        worst = std::max(worst, 100.0 * static_cast<double>(degraded) /
                                    static_cast<double>(end - begin));
    }
    return worst;
}

SessionQoe score_playback(const VideoTrace& trace, std::span<const std::uint8_t> delivery, int gop,
                          std::size_t interval) {
    if (delivery.empty()) throw NoDataError("no frames to score");
    const auto outcomes = frame_outcomes(trace, delivery, gop);
    double total = 0.0;
    for (const auto& o : outcomes) total += o.recv_mos;
    SessionQoe q;
    q.interval = interval;
    q.mos = total / static_cast<double>(outcomes.size());
    q.div_percent = div_metric(outcomes, interval);
    return q;
}

SessionQoe score_session(const VideoTrace& trace, std::span<const std::uint8_t> delivery, int gop,
                         std::size_t interval) {
    if (delivery.size() != trace.size())
        throw StructureError("delivery map covers " + std::to_string(delivery.size()) +
                             " frames, trace has " + std::to_string(trace.size()));
    return score_playback(trace, delivery, gop, interval);
}

}  // namespace qoembac
