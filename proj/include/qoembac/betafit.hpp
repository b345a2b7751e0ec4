#pragma once

#include "qoembac/admission.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace qoembac {

struct BetaPoint {
    double c_l = 0.0;  // Mbps
    std::size_t n = 1;
    double beta = 1.0;
};

struct FitReport {
    double alpha = 0.0;
    double delta = 1.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;  // NaN with fewer than three points
    double rmse = 0.0;
    std::size_t n_points = 0;

    BetaModel model() const { return BetaModel{alpha, delta, false, std::nullopt}; }
};

struct Goodness {
    double r_squared = 0.0;  // -inf when the observed betas have no spread but residuals do
    double rmse = 0.0;
};

/// Least squares on beta = alpha + (1/delta) * (c_l / n). Throws NoDataError with fewer
/// than two points and DomainError when the regressor c_l / n takes a single value.
FitReport fit_beta_model(std::span<const BetaPoint> points);

/// Residual diagnostics of an (unclamped) model on the given points.
Goodness goodness(const BetaModel& model, std::span<const BetaPoint> points);

/// Reads `c_l_mbps,n,beta` rows after a header line.
std::vector<BetaPoint> read_beta_points(std::string_view csv);

}  // namespace qoembac
