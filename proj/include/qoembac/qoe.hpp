#pragma once

#include "qoembac/traffic.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qoembac {

/// Five-grade PSNR mapping: >37 -> 5, (31,37] -> 4, (25,31] -> 3, (20,25] -> 2, <=20 -> 1.
int psnr_to_mos(double psnr_db);

struct FrameOutcome {
    std::size_t index = 0;
    bool delivered = false;  // all packets arrived and every reference frame is viable
    int sent_mos = 5;
    int recv_mos = 5;
};

struct SessionQoe {
    double mos = 5.0;
    double div_percent = 0.0;
    std::size_t interval = 30;
};

/// Decodability of each played frame. `delivery[k]` tells whether every packet of the k-th
/// played frame arrived; played frame k is trace frame k mod trace.size(). Within a GoP a
/// frame is viable only if it and every earlier frame of the GoP arrived.
std::vector<FrameOutcome> frame_outcomes(const VideoTrace& trace,
                                         std::span<const std::uint8_t> delivery, int gop);

/// Mean frame MOS and DIV of one play-through. Throws StructureError when the delivery map
/// does not cover the trace exactly.
SessionQoe score_session(const VideoTrace& trace, std::span<const std::uint8_t> delivery, int gop,
                         std::size_t interval = 30);

/// Same scoring over a looped playback of any length (at least one frame).
SessionQoe score_playback(const VideoTrace& trace, std::span<const std::uint8_t> delivery, int gop,
                          std::size_t interval = 30);

/// Maximum over consecutive windows of `interval` frames of the percentage of frames whose
/// received MOS is below the sent MOS. Throws NoDataError on empty input.
double div_metric(std::span<const FrameOutcome> outcomes, std::size_t interval = 30);

}  // namespace qoembac
