#pragma once

#include "qoembac/measurement.hpp"
#include "qoembac/traffic.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qoembac {

/// beta = alpha + c_l / (delta * n), with c_l in Mbps.
struct BetaModel {
    double alpha = 0.0;
    double delta = 1.0;  // Mbps per session
    bool clamp = true;
    /// Session count the model is evaluated at; the live count when empty.
    std::optional<std::size_t> planned_n;
};

enum class Preset { mad_cif, paris_cif, deadline_qcif };

struct CoefficientPreset {
    Preset id;
    std::string_view name;
    double alpha;
    double delta;
};

const CoefficientPreset& coefficient_preset(Preset preset);
/// Accepts MAD_CIF, PARIS_CIF, DEADLINE_QCIF (case-insensitive).
std::optional<Preset> preset_from_name(std::string_view name);
BetaModel beta_model(Preset preset);
std::span<const CoefficientPreset> all_presets();

/// Evaluates the model. With clamping on, values above 1 become 1 and values <= 0 raise
/// OutOfRegionError. Without clamping the raw value is returned.
double beta_eval(const BetaModel& model, double c_l_mbps, std::size_t n);

enum class Policy { none, cbac, pro_ibmac };

std::string_view to_string(Policy policy);
std::optional<Policy> policy_from_name(std::string_view name);

struct AdmissionDecision {
    bool accepted = false;
    Policy policy = Policy::cbac;
    double measured = 0.0;   // CalR or Pro-IAAR, bits/s
    double threshold = 0.0;  // link capacity, bits/s
    double x_new = 0.0;      // bits/s
    std::optional<double> beta_used;
    double t = 0.0;
    std::string note;  // set when the decision fell back to reject on an error
};

/// Fixed beta or a model evaluated at the current session count.
using BetaSource = std::variant<double, BetaModel>;

AdmissionDecision cbac_decide(double calr_bps, double x_new, double c_l, double t = 0.0);

/// Algorithm: mu_S from the state, beta from the source, Pro-IAAR = mu_S (1 + beta (n - 1));
/// accept iff Pro-IAAR + x_new <= c_l. An out-of-region beta yields a rejection carrying
/// the error text in `note`.
AdmissionDecision pro_ibmac_decide(const RateState& state, double x_new, double c_l,
                                   const BetaSource& beta);

/// Resolves the beta a Pro-IBMAC decision would use for `n` existing sessions.
/// Throws OutOfRegionError / DomainError.
double resolve_beta(const BetaSource& beta, double c_l, std::size_t n);

/// Measured load handed to admission at time t for the currently active sessions.
using RateOracle = std::function<MeasuredLoad(double t, std::span<const Session* const> active)>;

struct AdmissionLog {
    std::vector<AdmissionDecision> decisions;  // one per request, in order
    std::vector<SessionId> session_ids;        // parallel to decisions
    std::size_t admitted = 0;
};

/// Runs the policy over requests ordered by start time, updating each session's state.
/// Admitted sessions stay active until their trace ends (never, when looped).
AdmissionLog admit_sequence(std::span<Session> requests, Policy policy, double c_l,
                            const BetaSource& beta, const RateOracle& oracle);

}  // namespace qoembac
