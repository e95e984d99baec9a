#ifndef TRCEXP_PRIMAL_HPP
#define TRCEXP_PRIMAL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trcexp/channel.hpp"

namespace trcexp {

// Joint distribution over X x X' (row-major), the outer variable of the
// type-style oracle.
struct JointXXPrime {
    std::size_t nx = 0;
    std::vector<double> q;  // q[x * nx + xp]

    double operator()(std::size_t x, std::size_t xp) const { return q[x * nx + xp]; }
    std::vector<double> marginal_x() const;
    std::vector<double> marginal_xp() const;
    std::vector<std::string> validate() const;
};

// Simplex grids are multiples of delta = 1/resolution with exact integer
// bookkeeping, so a resolution of 2k nests the resolution-k grid.
struct GridSpec {
    int resolution = 20;
    std::size_t max_alphabet = 3;

    double delta() const { return 1.0 / resolution; }
};

// alpha(R, Q_Y) = inf_{lambda > 0} lambda [ sum_y Q_Y(y) A(y, lambda/beta) + R ]
// with A built on the decoder metric. The objective is convex in lambda (a
// supremum of affine functions), so a log-grid scan plus golden-section
// bracketing is exact to optimizer tolerance. For beta = inf the returned
// value is the beta-normalized limit alpha/beta, which is what enters the
// deterministic-decoder comparisons.
double alpha_dual(const ChannelModel& model, const DecoderSpec& decoder,
                  std::span<const double> q_y, double rate);

// F_Q(X,X') = D(Q_X||P) + max{ D(Q_X||P), J_Q(X;X') }.
double f_q(const JointXXPrime& q, std::span<const double> p);

// Grid infimum over the conditional tensor Q_{Y|XX'} of
//   D(Q_{Y|X}||W|Q_X) + I_Q(X';Y|X) + [ max{g(Q_XY), alpha(R,Q_Y)} - g(Q_X'Y) ]_+ .
// The conditional of every positive-mass cell is gridded jointly (alpha
// couples cells through Q_Y), enumerated by branch-and-bound. Gridding a
// subset of conditionals over-approximates the true infimum, preserving the
// oracle direction. Throws when an alphabet exceeds grid.max_alphabet.
double gamma_value(const ChannelModel& model, const DecoderSpec& decoder, const JointXXPrime& q,
                   double rate, const GridSpec& grid);

struct PrimalResult {
    double value = kPosInf;         // min over F_Q <= 2R + slack (slack = delta ln|X|)
    double value_strict = kPosInf;  // min over F_Q <= 2R, used by nesting tests
    JointXXPrime argmin;
    std::size_t feasible_count = 0;
    std::size_t feasible_count_strict = 0;
    std::vector<std::string> warnings;
};

// Grid evaluation of
//   inf_{Q_XX' : F_Q <= 2R} [ Gamma(Q,R) + J_Q(X;X') + D(Q_X||P) - R ]
// over the delta-simplex. Feasibility is widened by delta ln|X| so that
// discretization cannot exclude the neighborhood of a near-boundary
// minimizer; both the slacked and strict values are reported. threads = 0
// uses the hardware count; the reduction is deterministic regardless.
PrimalResult primal_bound(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                          const GridSpec& grid = {}, int threads = 0);

}  // namespace trcexp

#endif
