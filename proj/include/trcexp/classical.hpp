#ifndef TRCEXP_CLASSICAL_HPP
#define TRCEXP_CLASSICAL_HPP

#include <functional>
#include <utility>

#include "trcexp/channel.hpp"

namespace trcexp {

// Truncation of sup over rho in [1, inf): grid cap plus density of the
// log-spaced part of the search grid.
struct RhoCap {
    double rho_max = 64.0;
    int grid_points_per_decade = 20;
};

struct RhoAchiever {
    double value = 0.0;
    double rho = 0.0;
    bool at_cap = false;  // objective still increasing at rho_max
};

// Gallager function E0(rho) = -ln sum_y [sum_x P(x) W(y|x)^{1/(1+rho)}]^{1+rho}.
double gallager_e0(const ChannelModel& model, double rho);

// ln sum_y sqrt(W(y|x) W(y|x2)), the pairwise Bhattacharyya kernel in log domain.
double bhattacharyya_log(const ChannelModel& model, std::size_t x, std::size_t x2);

// E_x(rho) = -rho ln sum_{x,x'} P(x)P(x') [sum_y sqrt(W(y|x)W(y|x'))]^{1/rho},
// rho >= 1 (standard Gallager sign convention).
double expurgated_ex(const ChannelModel& model, double rho);

// rho -> inf limit of E_x: -sum_{x,x'} P(x)P(x') ln B(x,x'); +inf when a
// supported pair has B = 0.
double expurgated_ex_limit(const ChannelModel& model);

// E_r(R) = sup_{0<=rho<=1} [E0(rho) - rho R].
double random_coding_exponent(const ChannelModel& model, double rate);
RhoAchiever random_coding_achiever(const ChannelModel& model, double rate);

// E_sp(R) = sup_{rho>=0} [E0(rho) - rho R], truncated at cap.rho_max; +inf
// sentinel when the objective is still increasing at the cap (rate below the
// zero-error/R_inf region).
double sphere_packing_exponent(const ChannelModel& model, double rate, const RhoCap& cap = {});
RhoAchiever sphere_packing_achiever(const ChannelModel& model, double rate,
                                    const RhoCap& cap = {});

// E_ex(R) = sup_{rho>=1} [E_x(rho) - rho R], truncated at cap.rho_max, with
// the analytic rho -> inf candidate included at R = 0. The curve value is
// clamped at 0; the achiever variant carries the raw sup, which is what the
// regime decomposition needs.
double expurgated_exponent(const ChannelModel& model, double rate, const RhoCap& cap = {});
RhoAchiever expurgated_achiever(const ChannelModel& model, double rate, const RhoCap& cap = {});

// (R_c1, R_c2) = (dEx/drho(1) / 2, dE0/drho(1)), central differences h = 1e-5.
std::pair<double, double> critical_rates(const ChannelModel& model, const RhoCap& cap = {});

double mutual_information(const ChannelModel& model);

namespace detail {
// E_x formula evaluated without the rho >= 1 precondition (derivatives at 1).
double ex_value(const ChannelModel& model, double rho);
double central_difference(const std::function<double(double)>& f, double x, double h);
}  // namespace detail

}  // namespace trcexp

#endif
