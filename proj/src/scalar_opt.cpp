#include "trcexp/scalar_opt.hpp"

#include <cmath>
#include <stdexcept>

namespace trcexp {

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < points; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    }
    out.back() = hi;
    return out;
}

std::vector<double> logspace(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("logspace: bounds must be > 0");
    auto t = linspace(std::log(lo), std::log(hi), points);
    for (double& v : t) v = std::exp(v);
    t.front() = lo;
    t.back() = hi;
    return t;
}

ScalarPoint golden_min(const std::function<double(double)>& f, double a, double b, double xtol,
                       int max_iter) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    if (b < a) std::swap(a, b);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? ScalarPoint{x1, f1} : ScalarPoint{x2, f2};
}

ScalarPoint golden_max(const std::function<double(double)>& f, double a, double b, double xtol,
                       int max_iter) {
    auto r = golden_min([&f](double x) { return -f(x); }, a, b, xtol, max_iter);
    return {r.arg, -r.value};
}

ScalarPoint grid_then_golden_min(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, double xtol) {
    if (grid.empty()) throw std::invalid_argument("grid_then_golden_min: empty grid");
    std::size_t best = 0;
    double best_val = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double v = f(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    ScalarPoint result{grid[best], best_val};
    if (grid.size() > 1) {
        double a = grid[best == 0 ? 0 : best - 1];
        double b = grid[best + 1 < grid.size() ? best + 1 : best];
        if (b > a) {
            ScalarPoint refined = golden_min(f, a, b, xtol);
            if (refined.value < result.value) result = refined;
        }
    }
    return result;
}

ScalarPoint grid_then_golden_max(const std::function<double(double)>& f,
                                 const std::vector<double>& grid, double xtol) {
    auto r = grid_then_golden_min([&f](double x) { return -f(x); }, grid, xtol);
    return {r.arg, -r.value};
}

}  // namespace trcexp
