#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nhim/manifold.hpp"

namespace nhim::fit {

// Least-squares quartic through the grid values within half_window lambda
// nodes of z (all fiber nodes). Returns Taylor coefficients in the order
// 1, l, x, l^2, lx, x^2, l^3, ...
inline Eigen::VectorXd local_quartic(const GridGraph& g, const Point& z, int half_window) {
    std::vector<std::array<int, 2>> mon;
    for (int d = 0; d <= 4; ++d)
        for (int i = d; i >= 0; --i) mon.push_back({i, d - i});
    const int n = g.n_lambda();
    const int i0 = static_cast<int>(std::lround(z[0] * n));
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> vals;
    for (int di = -half_window; di <= half_window; ++di)
        for (int j = 0; j < g.n_fiber(); ++j) {
            int i = ((i0 + di) % n + n) % n;
            double dl = torus_delta(z[0], g.lambda_node(i)), dx = g.fiber_node(j) - z[1];
            Eigen::VectorXd r(mon.size());
            for (std::size_t k = 0; k < mon.size(); ++k) r[k] = std::pow(dl, mon[k][0]) * std::pow(dx, mon[k][1]);
            rows.push_back(r);
            vals.push_back(g.value(i, j));
        }
    Eigen::MatrixXd A(rows.size(), mon.size());
    Eigen::VectorXd b(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        A.row(k) = rows[k];
        b[k] = vals[k];
    }
    Eigen::VectorXd scale = A.colwise().norm();
    for (int k = 0; k < A.cols(); ++k) A.col(k) /= scale[k];
    return A.colPivHouseholderQr().solve(b).cwiseQuotient(scale);
}

// Least-squares slope of log(values[first..last]) against the index.
inline double log_slope(const std::vector<double>& values, std::size_t first, std::size_t last) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(last - first + 1);
    for (std::size_t l = first; l <= last; ++l) {
        double x = static_cast<double>(l), y = std::log(values[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nhim::fit
