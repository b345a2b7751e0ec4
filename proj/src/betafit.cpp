#include "qoembac/betafit.hpp"

#include "qoembac/error.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace qoembac {

namespace {

void check_point(const BetaPoint& p, std::size_t row) {
    if (!(p.c_l > 0.0) || p.n < 1 || !(p.beta > 0.0 && p.beta <= 1.0))
        throw DomainError("beta point " + std::to_string(row) +
                          " violates c_l > 0, n >= 1, 0 < beta <= 1");
}

}  // namespace

FitReport fit_beta_model(std::span<const BetaPoint> points) {
    if (points.size() < 2) throw NoDataError("beta fit needs at least two points");
    const auto rows = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(rows, 2);
    Eigen::VectorXd beta(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        check_point(p, static_cast<std::size_t>(i) + 1);
        design(i, 0) = 1.0;
        design(i, 1) = p.c_l / static_cast<double>(p.n);
        beta[i] = p.beta;
    }
    const auto z = design.col(1);
    if ((z.array() == z[0]).all())
        throw DomainError("degenerate design: every point has the same c_l / n");

    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(beta);
    if (coef[1] == 0.0) throw DomainError("degenerate fit: zero slope in c_l / n");

    FitReport report;
    report.alpha = coef[0];
    report.delta = 1.0 / coef[1];
    report.n_points = points.size();
    const Goodness g = goodness(report.model(), points);
    report.r_squared = g.r_squared;
    report.rmse = g.rmse;
    const double dof = static_cast<double>(points.size()) - 2.0;
    report.adj_r_squared = dof > 0.0
        ? 1.0 - (1.0 - g.r_squared) * (static_cast<double>(points.size()) - 1.0) / dof
        : std::numeric_limits<double>::quiet_NaN();
    return report;
}

Goodness goodness(const BetaModel& model, std::span<const BetaPoint> points) {
    if (points.empty()) throw NoDataError("goodness needs at least one point");
    if (model.delta == 0.0) throw DomainError("beta model delta must be non-zero");
    const auto rows = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd observed(rows), z(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        observed[i] = p.beta;
        z[i] = p.c_l / static_cast<double>(p.n);
    }
    const Eigen::VectorXd predicted = (model.alpha + z.array() / model.delta).matrix();
    const double sse = (observed - predicted).squaredNorm();
    const double sst = (observed.array() - observed.mean()).matrix().squaredNorm();

    Goodness g;
    g.rmse = std::sqrt(sse / static_cast<double>(rows));
    if (sst > 0.0)
        g.r_squared = 1.0 - sse / sst;
    else
        g.r_squared = sse > 0.0 ? -std::numeric_limits<double>::infinity() : 1.0;
    return g;
}

std::vector<BetaPoint> read_beta_points(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::vector<BetaPoint> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header) {
            header = true;
            continue;
        }
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        BetaPoint p;
        long long n = 0;
        char c1 = 0, c2 = 0;
        if (!(row >> p.c_l >> c1 >> n >> c2 >> p.beta) || c1 != ',' || c2 != ',' || n < 1)
            throw ParseError(line_no, "expected `c_l_mbps,n,beta`");
        row >> std::ws;
        if (!row.eof()) throw ParseError(line_no, "trailing data after beta");
        p.n = static_cast<std::size_t>(n);
        check_point(p, points.size() + 1);
        points.push_back(p);
    }
    if (!header) throw NoDataError("empty beta CSV");
    return points;
}

}  // namespace qoembac
