#ifndef TRCEXP_SCALAR_OPT_HPP
#define TRCEXP_SCALAR_OPT_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace trcexp {

struct ScalarPoint {
    double arg = 0.0;
    double value = 0.0;
};

std::vector<double> linspace(double lo, double hi, int points);
std::vector<double> logspace(double lo, double hi, int points);  // lo, hi > 0

// Golden-section minimization on [a, b]. Assumes the function is unimodal on
// the bracket; on a monotone bracket it converges to the better endpoint.
ScalarPoint golden_min(const std::function<double(double)>& f, double a, double b,
                       double xtol = 1e-10, int max_iter = 200);

ScalarPoint golden_max(const std::function<double(double)>& f, double a, double b,
                       double xtol = 1e-10, int max_iter = 200);

// Scan an ascending grid, then golden-refine between the neighbors of the best
// grid point. Returns the better of grid best and refined point.
ScalarPoint grid_then_golden_min(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, double xtol = 1e-10);

ScalarPoint grid_then_golden_max(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, double xtol = 1e-10);

}  // namespace trcexp

#endif
