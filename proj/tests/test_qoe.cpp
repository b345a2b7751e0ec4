#include "helpers.hpp"

#include "qoembac/error.hpp"
#include "qoembac/qoe.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qoembac;

TEST(PsnrToMos, TableBoundaries) {
    EXPECT_EQ(psnr_to_mos(38.0), 5);
    EXPECT_EQ(psnr_to_mos(37.0), 4);
    EXPECT_EQ(psnr_to_mos(33.0), 4);
    EXPECT_EQ(psnr_to_mos(31.0), 3);
    EXPECT_EQ(psnr_to_mos(25.0), 2);
    EXPECT_EQ(psnr_to_mos(20.0), 1);
    EXPECT_EQ(psnr_to_mos(19.0), 1);
    int prev = 1;
    for (double p = 0.0; p < 60.0; p += 0.25) {
        EXPECT_GE(psnr_to_mos(p), prev);
        prev = psnr_to_mos(p);
    }
}

TEST(ScoreSession, Extremes) {
    const auto trace = fixtures::trace_of(std::vector<std::uint32_t>(900, 2000));
    const std::vector<std::uint8_t> all(900, 1), none(900, 0);
    const auto good = score_session(*trace, all, 30);
    EXPECT_DOUBLE_EQ(good.mos, 5.0);
    EXPECT_DOUBLE_EQ(good.div_percent, 0.0);
    const auto bad = score_session(*trace, none, 30);
    EXPECT_DOUBLE_EQ(bad.mos, 1.0);
    EXPECT_DOUBLE_EQ(bad.div_percent, 100.0);
}

TEST(ScoreSession, LostPFramePoisonsRestOfGop) {
    const auto trace = fixtures::trace_of(std::vector<std::uint32_t>(900, 2000));
    std::vector<std::uint8_t> d(900, 1);
    d[45] = 0;
    const auto q = score_session(*trace, d, 30);
    EXPECT_NEAR(q.mos, (885.0 * 5 + 15.0) / 900.0, 1e-12);
    const auto outcomes = frame_outcomes(*trace, d, 30);
    EXPECT_TRUE(outcomes[44].delivered);
    EXPECT_FALSE(outcomes[45].delivered);
    EXPECT_FALSE(outcomes[59].delivered);
    EXPECT_TRUE(outcomes[60].delivered);
}

TEST(ScoreSession, LengthMismatch) {
    const auto trace = fixtures::trace_of(std::vector<std::uint32_t>(60, 2000));
    const std::vector<std::uint8_t> d(59, 1);
    EXPECT_THROW(score_session(*trace, d, 30), StructureError);
}

TEST(DivMetric, Examples) {
    std::vector<FrameOutcome> o(90);
    EXPECT_DOUBLE_EQ(div_metric(o, 30), 0.0);
    o[40].recv_mos = 1;
    EXPECT_NEAR(div_metric(o, 30), 100.0 / 30.0, 1e-12);
    for (auto& f : o) f.recv_mos = 1;
    EXPECT_DOUBLE_EQ(div_metric(o, 30), 100.0);
    EXPECT_THROW(div_metric(std::vector<FrameOutcome>{}, 30), NoDataError);
}

TEST(ScoreSession, LosingFramesNeverHelps) {
    const auto trace = fixtures::trace_of(std::vector<std::uint32_t>(300, 2000));
    std::mt19937 rng(5);
    std::vector<std::uint8_t> d(300, 1);
    auto prev = score_session(*trace, d, 30);
    for (int step = 0; step < 60; ++step) {
        d[rng() % d.size()] = 0;
        const auto q = score_session(*trace, d, 30);
        EXPECT_LE(q.mos, prev.mos);
        EXPECT_GE(q.div_percent, prev.div_percent);
        prev = q;
    }
}

TEST(ScorePlayback, LoopedPlaybackUsesTraceFrames) {
    std::vector<FrameRecord> frames;
    for (std::size_t i = 0; i < 30; ++i) frames.push_back({i, i == 0 ? FrameType::I : FrameType::P, 100, 33.0});
    const VideoTrace trace(frames, 30.0, 30);
    const std::vector<std::uint8_t> d(75, 1);
    EXPECT_DOUBLE_EQ(score_playback(trace, d, 30).mos, 4.0);
}
