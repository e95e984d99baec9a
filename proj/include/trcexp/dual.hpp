#ifndef TRCEXP_DUAL_HPP
#define TRCEXP_DUAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "trcexp/channel.hpp"
#include "trcexp/classical.hpp"

namespace trcexp {

// The five scalar parameters of the Gallager-style TRC lower bound:
//   sup_{sigma} sup_{tau} inf_{lambda} sup_{theta} sup_{zeta >= 1+theta}.
// For a decoder with finite beta, feasibility additionally requires
// sigma <= beta and tau <= beta - sigma.
struct DualParams {
    double sigma = 0.0;
    double tau = 0.0;
    double lambda = 0.0;  // in [0, inf], endpoints meaningful
    double theta = 0.0;
    double zeta = 1.0;

    bool feasible_for(double beta) const;
};

struct LambdaGrid {
    double lo = 1e-3;
    double hi = 1e3;
    int points = 200;
    bool include_zero_limit = true;  // analytic lambda = 0 endpoint
    // chase a profile that is still decreasing at the grid cap (the lambda ->
    // inf limit can be -inf when the metric has zeros on the ensemble support)
    bool extend_on_decreasing_tail = true;
};

struct HybridGrid {
    double linear_max = 2.0;
    double linear_step = 0.1;
    std::vector<double> log_tail = {2.8284271247461903, 4.0, 8.0, 16.0};

    // ascending candidate list clipped to [0, cap], cap included
    std::vector<double> values(double cap) const;
};

struct DualConfig {
    HybridGrid sigma_tau_grid;     // achievers of all known regimes live in [0, 2]
    double beta_cap = 16.0;        // search cap for sigma, tau when beta = inf
    LambdaGrid lambda_grid;
    double theta_cap = 32.0;
    int theta_points = 14;
    double zeta_cap = 64.0;
    int refine_rounds = 3;
    bool unimodality_check = true;
};

enum class Regime { low, moderate, high, unknown };
const char* to_string(Regime r);

struct DualDiagnostics {
    std::vector<std::pair<double, double>> lambda_profile;  // (lambda, inner sup) samples
    bool lambda_unimodal = true;
    std::vector<std::string> warnings;
};

struct DualResult {
    double value = 0.0;
    DualParams params;
    Regime regime_hint = Regime::unknown;
    DualDiagnostics diagnostics;
};

// ln of the inner-most sum over y:
//   sum_y W(y|x) [Wt(y|x')/Wt(y|x)]^sigma [Wt(y|x') / collective(y,lambda)]^tau
// Terms with W(y|x) = 0 are dropped before any division; a zero metric in a
// denominator with a positive exponent yields +inf (objective -inf).
double inner_sum_log(const ChannelModel& model, const DecoderSpec& decoder, std::size_t x,
                     std::size_t xp, const DualParams& params);

// The bracketed five-parameter objective at rate R (nats):
//   -zeta ln{ sum_x P(x) [ sum_x' P(x') inner(x,x')^{1/(1+theta)} ]^{(1+theta)/zeta} }
//   - (zeta + theta - lambda tau) R
double dual_objective(const ChannelModel& model, const DecoderSpec& decoder,
                      const DualParams& params, double rate);

// sup-inf-sup optimization in the theorem's order: for each (sigma, tau)
// candidate the inner sup over (theta, zeta) is minimized over a dense lambda
// grid with analytic endpoints and golden-section refinement, then the best
// (sigma, tau) is refined by a shrinking pattern search. Finite theta/zeta
// grids under-approximate inner sups, which can only weaken the reported
// lower bound; the lambda infimum is the direction that needs the dense grid.
DualResult optimize_dual(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                         const DualConfig& config = {});

// E1(rho, lambda) = -ln sum_y exp{ 2 A(y,1+rho) - (1-rho)/(1+rho) * lambda A(y,lambda) },
// 0 < rho <= 1. lambda = 1+rho collapses it to E0(rho).
double e1(const ChannelModel& model, double rho, double lambda);

struct RegimeBound {
    double value = 0.0;
    Regime regime = Regime::unknown;
    DualParams params;  // the closed-form parameter assignment of the winning regime
    double r_c1 = 0.0;
    double r_c2 = 0.0;
};

// Closed-form bounds for matched deterministic decoding:
//   low       R <= R_c1        E_ex(2R) + R
//   moderate  R_c1 < R < R_c2  E0(1) - R
//   high      R >= R_c2        E_sp(R)
// Returns the max of the three with the label chosen by rate; throws on a
// mismatched decoder (the closed forms are proved for the matched case only).
RegimeBound regime_bound(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                         const RhoCap& cap = {});

// beta_0 = sigma* + tau*: the decoder temperature beyond which the bound
// stops depending on beta.
double beta_threshold(double sigma_star, double tau_star);

}  // namespace trcexp

#endif
