#include "helpers.hpp"

#include "qoembac/admission.hpp"
#include "qoembac/error.hpp"

#include <gtest/gtest.h>

using namespace qoembac;

TEST(BetaEval, MadPresetAgainstPublishedPoints) {
    const auto m = beta_model(Preset::mad_cif);
    EXPECT_NEAR(beta_eval(m, 40, 30), 0.833, 5e-4);
    EXPECT_NEAR(beta_eval(m, 22, 15), 0.9708, 5e-5);
    EXPECT_NEAR(beta_eval(m, 39, 29), 0.845, 5e-4);
}

TEST(BetaEval, ClampAndRegion) {
    const auto m = beta_model(Preset::mad_cif);
    EXPECT_EQ(beta_eval(m, 40, 5), 1.0);
    EXPECT_THROW(beta_eval(m, 10, 100), OutOfRegionError);
    BetaModel raw = m;
    raw.clamp = false;
    EXPECT_GT(beta_eval(raw, 40, 5), 1.0);
    EXPECT_LT(beta_eval(raw, 10, 100), 0.0);
    EXPECT_THROW(beta_eval(m, 10, 0), DomainError);
}

TEST(BetaEval, AffineInCapacityDecreasingInCount) {
    BetaModel m = beta_model(Preset::paris_cif);
    m.clamp = false;
    const double b1 = beta_eval(m, 10, 8), b2 = beta_eval(m, 20, 8), b3 = beta_eval(m, 30, 8);
    EXPECT_NEAR(b2 - b1, b3 - b2, 1e-12);
    for (std::size_t n = 1; n < 50; ++n) EXPECT_GT(beta_eval(m, 30, n), beta_eval(m, 30, n + 1));
}

TEST(BetaEval, PlannedCountOverridesLiveCount) {
    BetaModel m = beta_model(Preset::mad_cif);
    m.planned_n = 30;
    EXPECT_DOUBLE_EQ(resolve_beta(m, 40e6, 3), beta_eval(beta_model(Preset::mad_cif), 40, 30));
}

TEST(Presets, NamesAndValues) {
    EXPECT_EQ(preset_from_name("mad_cif"), Preset::mad_cif);
    EXPECT_EQ(preset_from_name("DEADLINE_QCIF"), Preset::deadline_qcif);
    EXPECT_FALSE(preset_from_name("foreman").has_value());
    const auto& p = coefficient_preset(Preset::paris_cif);
    EXPECT_EQ(p.alpha, -0.1227);
    EXPECT_EQ(p.delta, 1.952);
    EXPECT_EQ(all_presets().size(), 3u);
}

TEST(Cbac, Examples) {
    EXPECT_TRUE(cbac_decide(20e6, 1.5e6, 22e6).accepted);
    EXPECT_FALSE(cbac_decide(21e6, 1.5e6, 22e6).accepted);
    EXPECT_TRUE(cbac_decide(20.5e6, 1.5e6, 22e6).accepted);
}

TEST(ProIbmac, Examples) {
    EXPECT_TRUE(pro_ibmac_decide(RateState{}, 2e6, 22e6, beta_model(Preset::mad_cif)).accepted);

    RateState s;
    for (SessionId i = 1; i <= 3; ++i) s.push(i, 2e6, 1.0, 0.0, 3e6);
    const auto ok = pro_ibmac_decide(s, 2e6, 15e6, 0.5);
    EXPECT_TRUE(ok.accepted);
    EXPECT_DOUBLE_EQ(ok.measured, 12e6);
    EXPECT_EQ(ok.beta_used, 0.5);
    EXPECT_FALSE(pro_ibmac_decide(s, 2e6, 13e6, 0.5).accepted);
}

TEST(ProIbmac, OutOfRegionRejectsWithNote) {
    RateState s;
    for (SessionId i = 1; i <= 60; ++i) s.push(i, 1e5, 1.0 / 60.0, 0.0, 2e5);
    const auto d = pro_ibmac_decide(s, 1e5, 10e6, beta_model(Preset::mad_cif));
    EXPECT_FALSE(d.accepted);
    EXPECT_FALSE(d.note.empty());
}

TEST(ProIbmac, DecisionMatchesThreshold) {
    RateState s;
    for (SessionId i = 1; i <= 5; ++i) s.push(i, 1e6 * i, 0.2, 0.0, 6e6);
    for (double cl = 5e6; cl < 30e6; cl += 0.37e6) {
        const auto d = pro_ibmac_decide(s, 1.5e6, cl, 0.8);
        EXPECT_EQ(d.accepted, d.measured + d.x_new <= d.threshold);
    }
}

TEST(Policy, Names) {
    EXPECT_EQ(policy_from_name("CBAC"), Policy::cbac);
    EXPECT_EQ(policy_from_name("pro-ibmac"), Policy::pro_ibmac);
    EXPECT_FALSE(policy_from_name("fifo").has_value());
    EXPECT_EQ(to_string(Policy::pro_ibmac), "ProIBMAC");
}

namespace {

std::vector<Session> requests(std::shared_ptr<const VideoTrace> trace, int count, double peak = 0.0) {
    std::vector<Session> out;
    for (int i = 0; i < count; ++i) out.emplace_back(i + 1, trace, 1.0 * i, peak, true);
    return out;
}

AdmissionLog run(std::vector<Session>& reqs, Policy policy, double c_l, BetaSource beta) {
    SourceRateOracle oracle(1.0, 1.0, 10.0);
    return admit_sequence(reqs, policy, c_l, beta,
                          [&](double t, std::span<const Session* const> a) { return oracle.measure(t, a); });
}

}  // namespace

TEST(AdmitSequence, TinyLinkAdmitsNothing) {
    auto trace = fixtures::cbr_trace(1e6, 30.0);
    for (Policy p : {Policy::cbac, Policy::pro_ibmac}) {
        auto reqs = requests(trace, 10);
        const auto log = run(reqs, p, 0.5e6, beta_model(Preset::mad_cif));
        EXPECT_EQ(log.admitted, 0u);
        EXPECT_EQ(log.decisions.size(), 10u);
    }
}

TEST(AdmitSequence, ConstantRateBetaOneMatchesCbac) {
    auto trace = fixtures::cbr_trace(1e6, 30.0);
    auto a = requests(trace, 30), b = requests(trace, 30);
    const auto cbac = run(a, Policy::cbac, 10e6, 1.0);
    const auto pro = run(b, Policy::pro_ibmac, 10e6, 1.0);
    EXPECT_EQ(cbac.admitted, pro.admitted);
    EXPECT_GT(cbac.admitted, 0u);

    auto one_a = requests(trace, 1), one_b = requests(trace, 1);
    EXPECT_EQ(run(one_a, Policy::cbac, 10e6, 1.0).admitted, run(one_b, Policy::pro_ibmac, 10e6, 1.0).admitted);
}

TEST(AdmitSequence, CountNonincreasingInBeta) {
    auto trace = fixtures::cbr_trace(1e6, 30.0);
    std::size_t prev = 1000;
    for (double beta : {0.5, 0.7, 0.85, 0.96, 1.0}) {
        auto reqs = requests(trace, 40);
        const auto log = run(reqs, Policy::pro_ibmac, 20e6, beta);
        EXPECT_LE(log.admitted, prev) << beta;
        prev = log.admitted;
    }
}

TEST(AdmitSequence, StatesUpdated) {
    auto trace = fixtures::cbr_trace(1e6, 30.0);
    auto reqs = requests(trace, 5);
    const auto log = run(reqs, Policy::cbac, 3.0e6, 1.0);
    EXPECT_EQ(log.admitted, 2u);
    EXPECT_EQ(reqs[0].state(), SessionState::active);
    EXPECT_EQ(reqs[4].state(), SessionState::rejected);
}
