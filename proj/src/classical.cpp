#include "trcexp/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trcexp/kernels.hpp"
#include "trcexp/logspace.hpp"
#include "trcexp/scalar_opt.hpp"

namespace trcexp {

namespace {

// ascending rho grid for sup over [lo, cap]: linear density on [lo, min(cap,1)]
// plus log spacing above 1
std::vector<double> rho_grid(double lo, const RhoCap& cap) {
    std::vector<double> grid;
    const double hi = cap.rho_max;
    if (lo < 1.0) {
        auto lin = linspace(lo, std::min(1.0, hi), 41);
        grid.insert(grid.end(), lin.begin(), lin.end());
    } else {
        grid.push_back(lo);
    }
    if (hi > std::max(lo, 1.0)) {
        const double start = std::max(lo, 1.0);
        const int pts =
            std::max(2, static_cast<int>(cap.grid_points_per_decade * std::log10(hi / start)) + 1);
        auto tail = logspace(start, hi, pts);
        grid.insert(grid.end(), tail.begin(), tail.end());
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// sup of f over the grid plus golden refinement; sentinel when still
// increasing at the top of the grid
RhoAchiever maximize_with_sentinel(const std::function<double(double)>& f,
                                   const std::vector<double>& grid) {
    std::vector<double> vals(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = f(grid[i]);
        if (vals[i] > vals[best]) best = i;
    }
    if (grid.size() >= 2 && best == grid.size() - 1 && vals[best] > vals[best - 1] + 1e-12) {
        return {kPosInf, grid.back(), true};
    }
    RhoAchiever out{vals[best], grid[best], false};
    if (grid.size() > 1) {
        const double a = grid[best == 0 ? 0 : best - 1];
        const double b = grid[best + 1 < grid.size() ? best + 1 : best];
        if (b > a) {
            auto refined = golden_max(f, a, b, 1e-12);
            if (refined.value > out.value) {
                out.value = refined.value;
                out.rho = refined.arg;
            }
        }
    }
    return out;
}

}  // namespace

double gallager_e0(const ChannelModel& model, double rho) {
    if (rho < 0.0) throw std::domain_error("gallager_e0: rho must be >= 0");
    LogSumAccumulator acc;
    for (std::size_t y = 0; y < model.num_outputs(); ++y) {
        acc.add((1.0 + rho) * a_value(model, model.w, y, 1.0 + rho));
    }
    return -acc.result();
}

double bhattacharyya_log(const ChannelModel& model, std::size_t x, std::size_t x2) {
    LogSumAccumulator acc;
    for (std::size_t y = 0; y < model.num_outputs(); ++y) {
        const double a = model.w[x][y];
        const double b = model.w[x2][y];
        acc.add(a == 0.0 || b == 0.0 ? kNegInf : 0.5 * (std::log(a) + std::log(b)));
    }
    return acc.result();
}

namespace detail {

double ex_value(const ChannelModel& model, double rho) {
    LogSumAccumulator acc;
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        for (std::size_t x2 = 0; x2 < model.num_inputs(); ++x2) {
            const double pp = model.p[x] * model.p[x2];
            if (pp == 0.0) continue;
            acc.add(std::log(pp) + bhattacharyya_log(model, x, x2) / rho);
        }
    }
    return -rho * acc.result();
}

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace detail

double expurgated_ex(const ChannelModel& model, double rho) {
    if (rho < 1.0) throw std::domain_error("expurgated_ex: rho must be >= 1");
    return detail::ex_value(model, rho);
}

double expurgated_ex_limit(const ChannelModel& model) {
    double sum = 0.0;
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        for (std::size_t x2 = 0; x2 < model.num_inputs(); ++x2) {
            const double pp = model.p[x] * model.p[x2];
            if (pp == 0.0) continue;
            const double lb = bhattacharyya_log(model, x, x2);
            if (lb == kNegInf) return kPosInf;
            sum -= pp * lb;
        }
    }
    return sum;
}

RhoAchiever random_coding_achiever(const ChannelModel& model, double rate) {
    if (rate < 0.0) throw std::domain_error("random_coding_exponent: rate must be >= 0");
    auto f = [&](double rho) { return gallager_e0(model, rho) - rho * rate; };
    auto grid = linspace(0.0, 1.0, 101);
    std::size_t best = 0;
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = f(grid[i]);
        if (vals[i] > vals[best]) best = i;
    }
    RhoAchiever out{vals[best], grid[best], false};
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[best + 1 < grid.size() ? best + 1 : best];
    if (b > a) {
        auto refined = golden_max(f, a, b, 1e-12);
        if (refined.value > out.value) out = {refined.value, refined.arg, false};
    }
    return out;
}

double random_coding_exponent(const ChannelModel& model, double rate) {
    return random_coding_achiever(model, rate).value;
}

RhoAchiever sphere_packing_achiever(const ChannelModel& model, double rate, const RhoCap& cap) {
    if (rate < 0.0) throw std::domain_error("sphere_packing_exponent: rate must be >= 0");
    auto f = [&](double rho) { return gallager_e0(model, rho) - rho * rate; };
    return maximize_with_sentinel(f, rho_grid(0.0, cap));
}

double sphere_packing_exponent(const ChannelModel& model, double rate, const RhoCap& cap) {
    return sphere_packing_achiever(model, rate, cap).value;
}

RhoAchiever expurgated_achiever(const ChannelModel& model, double rate, const RhoCap& cap) {
    if (rate < 0.0) throw std::domain_error("expurgated_exponent: rate must be >= 0");
    auto f = [&](double rho) { return detail::ex_value(model, rho) - rho * rate; };
    RhoAchiever out = maximize_with_sentinel(f, rho_grid(1.0, cap));
    if (rate == 0.0) {
        // analytic rho -> inf candidate; at R = 0 the objective climbs to it
        const double limit = expurgated_ex_limit(model);
        if (limit > out.value || out.at_cap) {
            out = {limit, kPosInf, std::isinf(limit)};
        }
    }
    return out;
}

double expurgated_exponent(const ChannelModel& model, double rate, const RhoCap& cap) {
    // the rho >= 1 family can dip below zero at high rates where the bound is
    // vacuous; the curve is reported clamped like the other exponents
    return std::max(0.0, expurgated_achiever(model, rate, cap).value);
}

std::pair<double, double> critical_rates(const ChannelModel& model, const RhoCap&) {
    const double h = 1e-5;
    auto ex = [&](double rho) { return detail::ex_value(model, rho); };
    auto e0 = [&](double rho) { return gallager_e0(model, rho); };
    const double r_c1 = detail::central_difference(ex, 1.0, h) / 2.0;
    const double r_c2 = detail::central_difference(e0, 1.0, h);
    return {r_c1, r_c2};
}

double mutual_information(const ChannelModel& model) {
    const std::size_t ny = model.num_outputs();
    std::vector<double> py(ny, 0.0);
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        for (std::size_t y = 0; y < ny; ++y) py[y] += model.p[x] * model.w[x][y];
    }
    double info = 0.0;
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        if (model.p[x] == 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y) {
            const double w = model.w[x][y];
            if (w == 0.0) continue;
            info += model.p[x] * w * std::log(w / py[y]);
        }
    }
    return info;
}

}  // namespace trcexp
