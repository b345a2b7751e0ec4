#pragma once

#include "qoembac/error.hpp"
#include "qoembac/traffic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace qoembac {

/// Per-session measured rates at one instant, stored column-wise.
struct RateState {
    double t = 0.0;
    std::vector<SessionId> ids;
    Eigen::VectorXd x;      // instantaneous rate, bits/s
    Eigen::VectorXd p;      // activity probability
    Eigen::VectorXd x_min;  // bits/s
    Eigen::VectorXd x_max;  // bits/s

    std::size_t n() const noexcept { return ids.size(); }
    void push(SessionId id, double rate, double prob, double lo, double hi);
    /// Throws DomainError if a column length or bound is inconsistent.
    void validate() const;
};

// Estimators over Eigen expressions. Rates in bits/s throughout.

template <typename Derived>
typename Derived::Scalar iaar(const Eigen::MatrixBase<Derived>& x) {
    return x.sum();
}

template <typename DerivedX, typename DerivedP>
typename DerivedX::Scalar mu_s(const Eigen::MatrixBase<DerivedX>& x,
                               const Eigen::MatrixBase<DerivedP>& p) {
    return x.dot(p);
}

/// Hoeffding deviation: beta * mu * (n - 1) / n. Throws DomainError for beta outside (0, 1].
template <typename Scalar>
Scalar epsilon(Scalar beta, Scalar mu, std::size_t n) {
    if (!(beta > Scalar(0) && beta <= Scalar(1))) throw DomainError("beta must lie in (0, 1]");
    if (n < 1) throw DomainError("epsilon needs n >= 1");
    if (!(mu >= Scalar(0))) throw DomainError("mu must be >= 0");
    const auto count = static_cast<Scalar>(n);
    return beta * mu * (count - Scalar(1)) / count;
}

/// Exceedable aggregate rate mu + n * eps.
template <typename Scalar>
Scalar pro_iaar(Scalar mu, std::size_t n, Scalar eps) {
    if (n < 1) throw DomainError("pro_iaar needs n >= 1");
    if (!(eps >= Scalar(0))) throw DomainError("eps must be >= 0");
    return mu + static_cast<Scalar>(n) * eps;
}

/// exp(-2 n^2 eps^2 / sum (x_max - x_min)^2); 1 at eps = 0, 0 when every range is empty.
template <typename DerivedLo, typename DerivedHi>
typename DerivedLo::Scalar hoeffding_gamma(const Eigen::MatrixBase<DerivedLo>& x_min,
                                           const Eigen::MatrixBase<DerivedHi>& x_max,
                                           typename DerivedLo::Scalar eps) {
    using Scalar = typename DerivedLo::Scalar;
    const auto n = static_cast<Scalar>(x_min.size());
    if (eps == Scalar(0)) return Scalar(1);
    const Scalar spread = (x_max - x_min).squaredNorm();
    if (spread == Scalar(0)) return Scalar(0);
    return std::exp(-Scalar(2) * n * n * eps * eps / spread);
}

double iaar(const RateState& state);
double mu_s(const RateState& state);
/// Throws NoDataError when the state holds no sessions, DomainError for eps < 0.
double hoeffding_gamma(const RateState& state, double eps);

/// Trailing aggregate-bit samples; CalR(tau) = bits observed in (t - tau, t] / tau.
class MeasurementWindow {
  public:
    explicit MeasurementWindow(double tau = 1.0);

    double tau() const noexcept { return tau_; }
    /// Adds a sample and drops everything no longer inside (t - tau, t].
    void push(double t, double bits);
    void advance(double t);
    bool empty() const noexcept { return samples_.empty(); }
    std::size_t size() const noexcept { return samples_.size(); }
    double bits() const noexcept;

  private:
    double tau_;
    double now_ = -std::numeric_limits<double>::infinity();
    std::deque<std::pair<double, double>> samples_;
};

/// Throws NoDataError on an empty window.
double calr(const MeasurementWindow& window);

/// One flag per completed measurement tick: did the session send at least one packet.
class ActivityHistory {
  public:
    explicit ActivityHistory(double tick = 1.0);
    void record(bool sent) { flags_.push_back(sent ? 1 : 0); }
    double tick() const noexcept { return tick_; }
    std::span<const std::uint8_t> flags() const noexcept { return flags_; }

  private:
    double tick_;
    std::vector<std::uint8_t> flags_;
};

/// Fraction of ticks inside the trailing window during which the session was active;
/// 1.0 for a session with no history yet.
double activity_probability(const ActivityHistory& history, double window);

/// Activity fractions renormalised into a distribution over sessions (sums to 1).
/// All-zero input maps to the uniform distribution.
Eigen::VectorXd activity_weights(const Eigen::Ref<const Eigen::VectorXd>& activity);

struct MeasuredLoad {
    RateState state;
    double calr = 0.0;
};

/// Measures the load offered by a set of sessions straight from their traces, the way a
/// link-side meter sampling every tick would see it.
///
/// Sessions younger than `tau` have no complete window yet and are charged their declared
/// peak rate. Per-session bounds track the running min/max of observed rates, seeded at
/// (0, peak).
class SourceRateOracle {
  public:
    explicit SourceRateOracle(double tau = 1.0, double tick = 1.0, double activity_window = 10.0);

    MeasuredLoad measure(double t, std::span<const Session* const> active);

    double tau() const noexcept { return tau_; }

  private:
    double tau_;
    double tick_;
    double activity_window_;
    std::map<SessionId, std::pair<double, double>> bounds_;
};

}  // namespace qoembac
