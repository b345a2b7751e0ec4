#include "qoembac/commands.hpp"
#include "qoembac/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace qoembac;

namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qoembac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

const char* kScenario = R"([defaults]
synth_mean_bitrate = 1e6
synth_burstiness = 3
synth_duration = 10
requests = 12
duration = 20
seed = 5
beta = 0.9, 0.7

[small]
capacity_mbps = 6
policies = cbac, proibmac
preset = MAD_CIF
)";

}  // namespace

TEST_F(CliTest, FitPublishedPoints) {
    const auto csv = write("pts.csv", "c_l_mbps,n,beta\n22,15,0.96\n24,17,0.95\n30,21,0.94\n36,26,0.87\n39,29,0.84\n40,30,0.83\n");
    cli::FitArgs args{csv.string(), std::string("MAD_CIF"), dir_ / "out", false};
    ASSERT_EQ(cli::cmd_fit(args, out_, err_), 0) << err_.str();
    EXPECT_NE(out_.str().find("alpha   -0.61999334795"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("MAD_CIF"), std::string::npos);
    const auto fit = slurp(dir_ / "out" / "fit.csv");
    EXPECT_EQ(fit.rfind("model,alpha,delta,r_squared,adj_r_squared,rmse,points\n", 0), 0u);
}

TEST_F(CliTest, FitOneRowIsConfigError) {
    const auto csv = write("one.csv", "c_l_mbps,n,beta\n22,15,0.96\n");
    cli::FitArgs args{csv.string(), std::nullopt, dir_ / "out", true};
    EXPECT_EQ(cli::cmd_fit(args, out_, err_), 2);
}

TEST_F(CliTest, FitDegenerateIsConfigError) {
    const auto csv = write("deg.csv", "c_l_mbps,n,beta\n20,10,0.9\n40,20,0.8\n");
    cli::FitArgs args{csv.string(), std::nullopt, dir_ / "out", true};
    EXPECT_EQ(cli::cmd_fit(args, out_, err_), 2);
}

TEST_F(CliTest, AdmitWorkedExample) {
    const auto state = write("s.csv", "session_id,x_bps,p,x_min,x_max\n1,2e6,1,0,3e6\n2,2e6,1,0,3e6\n3,2e6,1,0,3e6\n");
    cli::AdmitArgs args{state.string(), 2e6, 15e6, "proibmac", 0.5, std::nullopt};
    ASSERT_EQ(cli::cmd_admit(args, out_, err_), 0) << err_.str();
    EXPECT_EQ(out_.str().rfind("accept\n", 0), 0u);
    EXPECT_NE(out_.str().find("12 Mbps"), std::string::npos) << out_.str();

    std::ostringstream out2;
    args.c_l = 13e6;
    ASSERT_EQ(cli::cmd_admit(args, out2, err_), 0);
    EXPECT_EQ(out2.str().rfind("reject\n", 0), 0u);
}

TEST_F(CliTest, AdmitEmptyStateAccepts) {
    const auto state = write("s.csv", "session_id,x_bps,p,x_min,x_max\n");
    cli::AdmitArgs args{state.string(), 2e6, 22e6, "proibmac", std::nullopt, std::string("MAD_CIF")};
    ASSERT_EQ(cli::cmd_admit(args, out_, err_), 0);
    EXPECT_EQ(out_.str().rfind("accept\n", 0), 0u);
}

TEST_F(CliTest, AdmitMalformedCsv) {
    const auto state = write("s.csv", "session_id,x_bps,p,x_min,x_max\n1,abc,1,0,3e6\n");
    cli::AdmitArgs args{state.string(), 2e6, 22e6, "cbac", std::nullopt, std::nullopt};
    EXPECT_EQ(cli::cmd_admit(args, out_, err_), 2);
    EXPECT_NE(err_.str().find("line 2"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SimulateMissingTraceNamesPath) {
    const auto sc = write("bad.ini", "[x]\ncapacity_mbps = 10\ntrace = nowhere/video.txt\n");
    cli::SimulateArgs args{sc.string(), dir_ / "out", std::nullopt, false, true, 1};
    EXPECT_EQ(cli::cmd_simulate(args, out_, err_), 2);
    EXPECT_NE(err_.str().find("nowhere/video.txt"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SimulateUnknownKey) {
    const auto sc = write("bad.ini", "[x]\ncapacity_mbps = 10\nsynth_mean_bitrate = 1e6\ncolour = red\n");
    cli::SimulateArgs args{sc.string(), dir_ / "out", std::nullopt, false, true, 1};
    EXPECT_EQ(cli::cmd_simulate(args, out_, err_), 2);
}

TEST_F(CliTest, SimulateWritesBundleAndIsRepeatable) {
    const auto sc = write("s.ini", kScenario);
    for (const char* sub : {"a", "b"}) {
        cli::SimulateArgs args{sc.string(), dir_ / sub, std::nullopt, true, true, 1};
        ASSERT_EQ(cli::cmd_simulate(args, out_, err_), 0) << err_.str();
    }
    for (const char* f : {"summary.csv", "small/summary.csv", "small/admissions.csv", "small/rates.csv",
                          "small/qoe.csv", "small/delay_cdf.csv", "small/packets.csv"}) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    std::istringstream summary(slurp(dir_ / "a" / "summary.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(summary, line)) ++rows;
    EXPECT_EQ(rows, 4);  // CBAC, two fixed betas, preset
}

TEST_F(CliTest, ParallelRunsMatchSerial) {
    const auto sc = write("s.ini", kScenario);
    cli::SimulateArgs serial{sc.string(), dir_ / "s", std::nullopt, false, true, 1};
    cli::SimulateArgs parallel{sc.string(), dir_ / "p", std::nullopt, false, true, 4};
    ASSERT_EQ(cli::cmd_simulate(serial, out_, err_), 0);
    ASSERT_EQ(cli::cmd_simulate(parallel, out_, err_), 0);
    EXPECT_EQ(slurp(dir_ / "s" / "small" / "rates.csv"), slurp(dir_ / "p" / "small" / "rates.csv"));
}

TEST_F(CliTest, SeedOverrideChangesArrivals) {
    const auto sc = write("s.ini", kScenario);
    const auto a = load_scenarios(sc, 1), b = load_scenarios(sc, 2);
    EXPECT_NE(a[0].base.arrivals[0].time, b[0].base.arrivals[0].time);
}

TEST_F(CliTest, TraceSynthThenInspect) {
    cli::SynthArgs synth;
    synth.params.mean_bitrate = 2e6;
    synth.params.burstiness = 4.0;
    synth.params.duration = 30.0;
    synth.out_file = (dir_ / "t.txt").string();
    ASSERT_EQ(cli::cmd_trace_synth(synth, out_, err_), 0);
    cli::InspectArgs inspect;
    inspect.trace_file = (dir_ / "t.txt").string();
    ASSERT_EQ(cli::cmd_trace_inspect(inspect, out_, err_), 0) << err_.str();
    EXPECT_NE(out_.str().find("frames          900"), std::string::npos) << out_.str();
}

TEST(OutputDir, FlagThenEnvironment) {
    EXPECT_EQ(cli::output_dir(std::string("x")), fs::path("x"));
    ::setenv("QOEMBAC_OUT", "from_env", 1);
    EXPECT_EQ(cli::output_dir(std::nullopt), fs::path("from_env"));
    ::unsetenv("QOEMBAC_OUT");
    EXPECT_EQ(cli::output_dir(std::nullopt), fs::path("qoembac_out"));
}
