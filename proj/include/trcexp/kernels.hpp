#ifndef TRCEXP_KERNELS_HPP
#define TRCEXP_KERNELS_HPP

#include <cstddef>
#include <span>

#include "trcexp/channel.hpp"

namespace trcexp {

// A(y, r) = ln sum_x P(x) metric(y|x)^{1/r}, r > 0. Zero metric entries
// contribute nothing to the sum; throws std::domain_error for r <= 0.
double a_value(const ChannelModel& model, const Matrix& metric, std::size_t y, double r);

// ln of the collective-competition factor [sum_x P(x) metric(y|x)^{1/lambda}]^lambda,
// i.e. lambda * A(y, lambda), with the analytic endpoints:
//   lambda = 0    ->  max over {x : P(x) > 0} of ln metric(y|x)
//   lambda = inf  ->  sum_x P(x) ln metric(y|x)   (-inf if a supported entry is 0)
double collective_factor_log(const ChannelModel& model, const Matrix& metric, std::size_t y,
                             double lambda);

// sum_x q(x) ln(q(x)/p(x)) with 0 ln(0/.) = 0; +inf when q puts mass where p
// has none.
double kl_divergence(std::span<const double> q, std::span<const double> p);

// sum_x q_x(x) sum_y q(y|x) ln(q(y|x)/w(y|x)), same zero conventions.
double weighted_conditional_divergence(const Matrix& q_y_given_x, const Matrix& w,
                                       std::span<const double> q_x);

// E_Q ln[ Q_{X'|X}(X'|X) / P(X') ] for a joint q over X x X', equivalently
// I_Q(X;X') + D(Q_{X'} || P).
double j_divergence(const Matrix& q_joint, std::span<const double> p);

// min_Q [ D(Q||P) + E_Q f ] = -ln E_P exp(-f), the exponential-family
// minimization identity.
double tilted_min(std::span<const double> p, std::span<const double> f);

}  // namespace trcexp

#endif
