#include "qoembac/admission.hpp"

#include "qoembac/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace qoembac {

namespace {

constexpr std::array<CoefficientPreset, 3> kPresets{{
    {Preset::mad_cif, "MAD_CIF", -0.5429, 0.9689},
    {Preset::paris_cif, "PARIS_CIF", -0.1227, 1.952},
    {Preset::deadline_qcif, "DEADLINE_QCIF", -0.1323, 0.4991},
}};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

const CoefficientPreset& coefficient_preset(Preset preset) {
    for (const auto& p : kPresets)
        if (p.id == preset) return p;
    throw DomainError("unknown preset");
}

std::optional<Preset> preset_from_name(std::string_view name) {
    for (const auto& p : kPresets)
        if (iequals(p.name, name)) return p.id;
    return std::nullopt;
}

BetaModel beta_model(Preset preset) {
    const auto& p = coefficient_preset(preset);
    return BetaModel{p.alpha, p.delta, true, std::nullopt};
}

std::span<const CoefficientPreset> all_presets() { return kPresets; }

double beta_eval(const BetaModel& model, double c_l_mbps, std::size_t n) {
    if (n < 1) throw DomainError("beta model needs n >= 1");
    if (!(c_l_mbps > 0.0)) throw DomainError("beta model needs c_l > 0");
    if (model.delta == 0.0) throw DomainError("beta model delta must be non-zero");
    const double beta = model.alpha + c_l_mbps / (model.delta * static_cast<double>(n));
    if (!model.clamp) return beta;
    if (beta <= 0.0) throw OutOfRegionError(c_l_mbps, n, beta);
    return std::min(beta, 1.0);
}

std::string_view to_string(Policy policy) {
    switch (policy) {
        case Policy::none: return "none";
        case Policy::cbac: return "CBAC";
        case Policy::pro_ibmac: return "ProIBMAC";
    }
    return "unknown";
}

std::optional<Policy> policy_from_name(std::string_view name) {
    if (iequals(name, "none")) return Policy::none;
    if (iequals(name, "cbac")) return Policy::cbac;
    if (iequals(name, "proibmac") || iequals(name, "pro-ibmac") || iequals(name, "pro_ibmac"))
        return Policy::pro_ibmac;
    return std::nullopt;
}

AdmissionDecision cbac_decide(double calr_bps, double x_new, double c_l, double t) {
    if (!(calr_bps >= 0.0) || !(x_new >= 0.0) || !(c_l >= 0.0))
        throw DomainError("cbac_decide: rates must be >= 0");
    AdmissionDecision d;
    d.policy = Policy::cbac;
    d.measured = calr_bps;
    d.threshold = c_l;
    d.x_new = x_new;
    d.t = t;
    d.accepted = calr_bps + x_new <= c_l;
    return d;
}

double resolve_beta(const BetaSource& beta, double c_l, std::size_t n) {
    if (const auto* fixed = std::get_if<double>(&beta)) {
        if (!(*fixed > 0.0 && *fixed <= 1.0)) throw DomainError("fixed beta must lie in (0, 1]");
        return *fixed;
    }
    const auto& model = std::get<BetaModel>(beta);
    return beta_eval(model, c_l / 1e6, model.planned_n.value_or(n));
}

AdmissionDecision pro_ibmac_decide(const RateState& state, double x_new, double c_l,
                                   const BetaSource& beta) {
    if (!(x_new > 0.0)) throw DomainError("pro_ibmac_decide: x_new must be > 0");
    if (!(c_l > 0.0)) throw DomainError("pro_ibmac_decide: c_l must be > 0");
    AdmissionDecision d;
    d.policy = Policy::pro_ibmac;
    d.threshold = c_l;
    d.x_new = x_new;
    d.t = state.t;

    const std::size_t n = state.n();
    if (n == 0) {
        d.accepted = x_new <= c_l;
        return d;
    }
    double b = 0.0;
    try {
        b = resolve_beta(beta, c_l, n);
    } catch (const DomainError& e) {
        d.accepted = false;
        d.note = e.what();
        return d;
    }
    const double mu = mu_s(state);
    d.beta_used = b;
    d.measured = pro_iaar(mu, n, epsilon(b, mu, n));
    d.accepted = d.measured + x_new <= c_l;
    return d;
}

AdmissionLog admit_sequence(std::span<Session> requests, Policy policy, double c_l,
                            const BetaSource& beta, const RateOracle& oracle) {
    AdmissionLog log;
    std::vector<Session*> active;
    for (Session& req : requests) {
        const double t = req.start_time();
        // Retire sessions whose trace has ended.
        std::erase_if(active, [&](Session* s) {
            if (s->end_time() <= t) {
                s->transition(SessionState::finished);
                return true;
            }
            return false;
        });

        AdmissionDecision d;
        if (policy == Policy::none) {
            d.policy = Policy::none;
            d.accepted = true;
            d.threshold = c_l;
            d.x_new = req.peak_rate();
            d.t = t;
        } else {
            std::vector<const Session*> view(active.begin(), active.end());
            const MeasuredLoad load = oracle(t, view);
            d = policy == Policy::cbac ? cbac_decide(load.calr, req.peak_rate(), c_l, t)
                                       : pro_ibmac_decide(load.state, req.peak_rate(), c_l, beta);
            d.t = t;
        }
        req.transition(d.accepted ? SessionState::active : SessionState::rejected);
        if (d.accepted) {
            active.push_back(&req);
            ++log.admitted;
        }
        log.session_ids.push_back(req.id());
        log.decisions.push_back(std::move(d));
    }
    return log;
}

}  // namespace qoembac
