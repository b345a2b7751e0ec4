#include "qoembac/measurement.hpp"

#include "qoembac/error.hpp"

#include <algorithm>
#include <cmath>

namespace qoembac {

void RateState::push(SessionId id, double rate, double prob, double lo, double hi) {
    const auto k = static_cast<Eigen::Index>(ids.size());
    ids.push_back(id);
    x.conservativeResize(k + 1);
    p.conservativeResize(k + 1);
    x_min.conservativeResize(k + 1);
    x_max.conservativeResize(k + 1);
    x[k] = rate;
    p[k] = prob;
    x_min[k] = lo;
    x_max[k] = hi;
}

void RateState::validate() const {
    const auto k = static_cast<Eigen::Index>(ids.size());
    if (x.size() != k || p.size() != k || x_min.size() != k || x_max.size() != k)
        throw DomainError("rate state columns disagree in length");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0))
            throw DomainError("activity probability outside [0, 1] for session " +
                              std::to_string(ids[static_cast<std::size_t>(i)]));
        if (!(x_min[i] <= x[i] && x[i] <= x_max[i]))
            throw DomainError("rate outside [x_min, x_max] for session " +
                              std::to_string(ids[static_cast<std::size_t>(i)]));
    }
}

double iaar(const RateState& state) { return state.n() == 0 ? 0.0 : iaar(state.x); }

double mu_s(const RateState& state) { return state.n() == 0 ? 0.0 : mu_s(state.x, state.p); }

double hoeffding_gamma(const RateState& state, double eps) {
    if (state.n() == 0) throw NoDataError("hoeffding bound needs at least one session");
    if (!(eps >= 0.0)) throw DomainError("eps must be >= 0");
    return hoeffding_gamma(state.x_min, state.x_max, eps);
}

MeasurementWindow::MeasurementWindow(double tau) : tau_(tau) {
    if (!(tau_ > 0.0)) throw DomainError("measurement window tau must be positive");
}

void MeasurementWindow::push(double t, double bits) {
    advance(t);
    samples_.emplace_back(t, bits);
}

void MeasurementWindow::advance(double t) {
    now_ = std::max(now_, t);
    while (!samples_.empty() && samples_.front().first <= now_ - tau_) samples_.pop_front();
}

double MeasurementWindow::bits() const noexcept {
    double total = 0.0;
    for (const auto& s : samples_) total += s.second;
    return total;
}

double calr(const MeasurementWindow& window) {
    if (window.empty()) throw NoDataError("CalR over an empty window");
    return window.bits() / window.tau();
}

ActivityHistory::ActivityHistory(double tick) : tick_(tick) {
    if (!(tick_ > 0.0)) throw DomainError("tick must be positive");
}

double activity_probability(const ActivityHistory& history, double window) {
    if (!(window > 0.0)) throw DomainError("activity window must be positive");
    const auto flags = history.flags();
    if (flags.empty()) return 1.0;
    const auto span = static_cast<std::size_t>(std::max(1.0, std::ceil(window / history.tick() - 1e-9)));
    const std::size_t take = std::min(span, flags.size());
    const auto tail = flags.subspan(flags.size() - take);
    const auto active = std::count(tail.begin(), tail.end(), std::uint8_t{1});
    return static_cast<double>(active) / static_cast<double>(take);
}

Eigen::VectorXd activity_weights(const Eigen::Ref<const Eigen::VectorXd>& activity) {
    const auto n = activity.size();
    if (n == 0) return {};
    const double total = activity.sum();
    if (!(total > 0.0)) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    return activity / total;
}

SourceRateOracle::SourceRateOracle(double tau, double tick, double activity_window)
    : tau_(tau), tick_(tick), activity_window_(activity_window) {
    if (!(tau_ > 0.0) || !(tick_ > 0.0) || !(activity_window_ > 0.0))
        throw DomainError("oracle windows must be positive");
}

MeasuredLoad SourceRateOracle::measure(double t, std::span<const Session* const> active) {
    MeasuredLoad load;
    load.state.t = t;
    MeasurementWindow window(tau_);
    window.advance(t);

    Eigen::VectorXd activity(static_cast<Eigen::Index>(active.size()));
    std::vector<double> rates;
    rates.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        const Session& s = *active[i];
        const bool young = t - s.start_time() < tau_;
        const double rate = young ? s.peak_rate() : instantaneous_rate(s, t, tau_);
        rates.push_back(rate);
        window.push(t, rate * tau_);

        ActivityHistory history(tick_);
        const auto last_tick = static_cast<long long>(std::floor(t / tick_ + 1e-9));
        const auto first_tick = static_cast<long long>(std::floor(s.start_time() / tick_)) + 1;
        const auto window_ticks = static_cast<long long>(std::ceil(activity_window_ / tick_ - 1e-9));
        for (long long j = std::max(first_tick, last_tick - window_ticks + 1); j <= last_tick; ++j) {
            const double hi = static_cast<double>(j) * tick_;
            history.record(s.frames_sent_by(hi) > s.frames_sent_by(hi - tick_));
        }
        activity[static_cast<Eigen::Index>(i)] = activity_probability(history, activity_window_);
    }

    const Eigen::VectorXd weights = activity_weights(activity);
    for (std::size_t i = 0; i < active.size(); ++i) {
        const Session& s = *active[i];
        auto [it, inserted] = bounds_.try_emplace(s.id(), 0.0, s.peak_rate());
        auto& [lo, hi] = it->second;
        lo = std::min(lo, rates[i]);
        hi = std::max(hi, rates[i]);
        load.state.push(s.id(), rates[i], weights[static_cast<Eigen::Index>(i)], lo, hi);
    }
    load.calr = window.empty() ? 0.0 : calr(window);
    return load;
}

}  // namespace qoembac
