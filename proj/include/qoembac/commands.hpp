#pragma once

#include "qoembac/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace qoembac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Output directory: explicit flag, else $QOEMBAC_OUT, else ./qoembac_out.
std::filesystem::path output_dir(const std::optional<std::string>& flag);

struct SimulateArgs {
    std::string scenario_file;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    bool packets_csv = false;
    bool quiet = false;
    unsigned jobs = 1;
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct FitArgs {
    std::string points_csv;
    std::optional<std::string> preset;
    std::filesystem::path out_dir;
    bool quiet = false;
};
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);

struct AdmitArgs {
    std::string state_csv;
    double x_new = 0.0;  // bits/s
    double c_l = 0.0;    // bits/s
    std::string policy;
    std::optional<double> beta;
    std::optional<std::string> preset;
};
int cmd_admit(const AdmitArgs& args, std::ostream& out, std::ostream& err);

struct SynthArgs {
    SynthParams params;
    std::optional<std::string> out_file;  // stdout when empty
};
int cmd_trace_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

struct InspectArgs {
    std::string trace_file;
    double fps = 30.0;
    int gop = 30;
    int payload_limit = kDefaultPayloadLimit;
};
int cmd_trace_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err);

}  // namespace qoembac::cli
