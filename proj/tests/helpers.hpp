#pragma once

#include "qoembac/simlink.hpp"
#include "qoembac/traffic.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qoembac::fixtures {

/// Constant-rate trace: every frame the same size, one I frame per GoP.
inline std::shared_ptr<const VideoTrace> cbr_trace(double payload_bps, double seconds, double fps = 30.0,
                                                   int gop = 30) {
    SynthParams p;
    p.mean_bitrate = payload_bps;
    p.burstiness = 1.0;
    p.duration = seconds;
    p.fps = fps;
    p.gop = gop;
    return std::make_shared<const VideoTrace>(synth_trace(p));
}

inline std::shared_ptr<const VideoTrace> trace_of(const std::vector<std::uint32_t>& sizes, int gop = 30,
                                                  double fps = 30.0) {
    std::vector<FrameRecord> frames;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        frames.push_back({i, i % static_cast<std::size_t>(gop) == 0 ? FrameType::I : FrameType::P, sizes[i]});
    return std::make_shared<const VideoTrace>(std::move(frames), fps, gop);
}

}  // namespace qoembac::fixtures
