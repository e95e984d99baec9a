#include "trcexp/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trcexp/kernels.hpp"
#include "trcexp/logspace.hpp"
#include "trcexp/scalar_opt.hpp"

namespace trcexp {

bool DualParams::feasible_for(double beta) const {
    if (!(sigma >= 0.0) || !(tau >= 0.0) || !(theta >= 0.0) || !(lambda >= 0.0)) return false;
    if (zeta < 1.0 + theta - 1e-12) return false;
    if (!std::isinf(beta)) {
        if (sigma > beta + 1e-12) return false;
        if (tau > beta - sigma + 1e-12) return false;
    }
    return true;
}

std::vector<double> HybridGrid::values(double cap) const {
    std::vector<double> out;
    for (double v = 0.0; v <= std::min(linear_max, cap) + 1e-12; v += linear_step) {
        out.push_back(std::min(v, cap));
    }
    for (double v : log_tail) {
        if (v <= cap) out.push_back(v);
    }
    out.push_back(cap);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              out.end());
    return out;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::low: return "low";
        case Regime::moderate: return "moderate";
        case Regime::high: return "high";
        default: return "unknown";
    }
}

namespace {

double safe_log(double v) { return v == 0.0 ? kNegInf : std::log(v); }

// one y-term of the inner sum, with the zero conventions: a zero metric in a
// denominator (positive exponent) dominates as +inf
double inner_term_log(double log_w, double log_wt_xp, double log_wt_x, double cf, double sigma,
                      double tau) {
    bool plus_inf = false;
    bool minus_inf = false;
    double finite = log_w;

    auto absorb = [&](double coeff, double lv, bool negated) {
        if (coeff == 0.0) return;
        if (lv == kNegInf) {
            (negated ? plus_inf : minus_inf) = true;
        } else {
            finite += negated ? -coeff * lv : coeff * lv;
        }
    };
    absorb(sigma + tau, log_wt_xp, false);
    absorb(sigma, log_wt_x, true);
    absorb(tau, cf, true);
    if (plus_inf) return kPosInf;
    if (minus_inf) return kNegInf;
    return finite;
}

// inner sums for all (x, x') at fixed (sigma, tau, lambda); cf holds the
// collective factor logs per y (ignored when tau == 0)
std::vector<double> inner_table(const ChannelModel& model, const DecoderSpec& decoder, double sigma,
                                double tau, const std::vector<double>& cf) {
    const std::size_t nx = model.num_inputs();
    const std::size_t ny = model.num_outputs();
    std::vector<double> table(nx * nx);
    std::vector<double> terms;
    terms.reserve(ny);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            terms.clear();
            for (std::size_t y = 0; y < ny; ++y) {
                const double w = model.w[x][y];
                if (w == 0.0) continue;  // dropped before any division
                terms.push_back(inner_term_log(std::log(w), safe_log(decoder.w_tilde[xp][y]),
                                               safe_log(decoder.w_tilde[x][y]),
                                               tau == 0.0 ? 0.0 : cf[y], sigma, tau));
            }
            table[x * nx + xp] = log_sum_exp(std::span<const double>(terms));
        }
    }
    return table;
}

std::vector<double> collective_logs(const ChannelModel& model, const Matrix& metric,
                                    double lambda) {
    std::vector<double> cf(model.num_outputs());
    for (std::size_t y = 0; y < model.num_outputs(); ++y) {
        cf[y] = collective_factor_log(model, metric, y, lambda);
    }
    return cf;
}

struct ThetaZetaBest {
    double value = kNegInf;
    double theta = 0.0;
    double zeta = 1.0;
};

// objective for a fixed inner table; lambda_tau = lambda * tau (0 when tau = 0)
double objective_from_table(const std::vector<double>& log_p, const std::vector<double>& table,
                            double theta, double zeta, double rate, double lambda_tau) {
    const std::size_t nx = log_p.size();
    std::vector<double> inner(nx), outer(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            const double isl = table[x * nx + xp];
            inner[xp] = std::isinf(isl) ? isl : log_p[xp] + isl / (1.0 + theta);
            if (inner[xp] == kPosInf && log_p[xp] == kNegInf) inner[xp] = kNegInf;
        }
        const double u = log_sum_exp(std::span<const double>(inner));
        outer[x] = std::isinf(u) ? u : log_p[x] + u * (1.0 + theta) / zeta;
        if (outer[x] == kPosInf && log_p[x] == kNegInf) outer[x] = kNegInf;
    }
    const double s = log_sum_exp(std::span<const double>(outer));
    // +inf: zero metric hit on channel support; -inf: degenerate all-zero
    // metric. Either way the bound is refused rather than claimed.
    if (std::isinf(s)) return kNegInf;
    double value = -zeta * s;
    if (rate != 0.0) value -= (zeta + theta - lambda_tau) * rate;
    return value;
}

// knob set for the inner sup; under-approximating the sup only weakens the
// reported lower bound, so coarse settings are always valid
struct SupEffort {
    std::vector<double> thetas;
    double zeta_xtol = 1e-7;
    int zeta_iters = 48;
    // theta refinement raises the sup toward its true value; only safe where
    // no lambda infimum sits above it (the tau = 0 family), because the
    // reported inf must use one consistent sup approximation across lambda
    bool refine_theta = false;
};

std::vector<double> theta_grid(double cap, int points) {
    std::vector<double> thetas{0.0};
    if (points > 1) {
        auto tail = logspace(1e-2, cap, points - 1);
        thetas.insert(thetas.end(), tail.begin(), tail.end());
    }
    return thetas;
}

// sup over theta >= 0 and zeta in [1+theta, zeta_cap] for a fixed inner table
ThetaZetaBest sup_theta_zeta(const std::vector<double>& log_p, const std::vector<double>& table,
                             double rate, double lambda_tau, double zeta_cap,
                             const SupEffort& effort) {
    const std::size_t nx = log_p.size();

    auto best_over_zeta = [&](double theta) -> ThetaZetaBest {
        // c_x = (1+theta) ln sum_x' P(x') inner(x,x')^{1/(1+theta)}
        std::vector<double> c(nx), inner(nx);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t xp = 0; xp < nx; ++xp) {
                const double isl = table[x * nx + xp];
                inner[xp] = std::isinf(isl) ? isl : log_p[xp] + isl / (1.0 + theta);
                if (inner[xp] == kPosInf && log_p[xp] == kNegInf) inner[xp] = kNegInf;
            }
            const double u = log_sum_exp(std::span<const double>(inner));
            c[x] = std::isinf(u) ? u : u * (1.0 + theta);
        }
        std::vector<double> outer(nx);
        auto value_at = [&](double zeta) {
            for (std::size_t x = 0; x < nx; ++x) {
                outer[x] = std::isinf(c[x]) ? c[x] : log_p[x] + c[x] / zeta;
                if (outer[x] == kPosInf && log_p[x] == kNegInf) outer[x] = kNegInf;
            }
            const double s = log_sum_exp(std::span<const double>(outer));
            if (std::isinf(s)) return kNegInf;
            double v = -zeta * s;
            if (rate != 0.0) v -= (zeta + theta - lambda_tau) * rate;
            return v;
        };
        const double lo = 1.0 + theta;
        const double hi = std::max(zeta_cap, lo);
        ThetaZetaBest best{value_at(lo), theta, lo};
        const double at_hi = value_at(hi);
        if (at_hi > best.value) best = {at_hi, theta, hi};
        if (hi > lo) {
            // concave in zeta: -zeta ln E_P exp(c/zeta) is a perspective form
            auto refined = golden_max(value_at, lo, hi, effort.zeta_xtol, effort.zeta_iters);
            if (refined.value > best.value) best = {refined.value, theta, refined.arg};
        }
        return best;
    };

    ThetaZetaBest best;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < effort.thetas.size(); ++i) {
        auto cand = best_over_zeta(effort.thetas[i]);
        if (cand.value > best.value) {
            best = cand;
            best_idx = i;
        }
    }
    if (effort.refine_theta) {
        const double a = effort.thetas[best_idx == 0 ? 0 : best_idx - 1];
        const double b =
            effort.thetas[best_idx + 1 < effort.thetas.size() ? best_idx + 1 : best_idx];
        if (b > a) {
            auto refined =
                golden_max([&](double th) { return best_over_zeta(th).value; }, a, b, 1e-9);
            if (refined.value > best.value) best = best_over_zeta(refined.arg);
        }
    }
    return best;
}

struct PhiResult {
    double value = kNegInf;
    DualParams params;
    DualDiagnostics diagnostics;
};

// inf over lambda of sup over (theta, zeta) for a fixed (sigma, tau).
// `screening` shrinks the grids for candidate ranking; a winner is always
// re-evaluated at full effort.
PhiResult evaluate_sigma_tau(const ChannelModel& model, const DecoderSpec& decoder, double sigma,
                             double tau, double rate, const DualConfig& cfg,
                             const std::vector<double>& log_p, bool screening) {
    PhiResult out;
    out.params.sigma = sigma;
    out.params.tau = tau;

    SupEffort effort;
    effort.thetas = theta_grid(cfg.theta_cap,
                               screening ? std::max(6, cfg.theta_points / 2) : cfg.theta_points);
    if (screening) {
        effort.zeta_xtol = 1e-4;
        effort.zeta_iters = 28;
    }

    auto sup_at_lambda = [&](double lambda) -> ThetaZetaBest {
        const std::vector<double> cf =
            tau == 0.0 ? std::vector<double>() : collective_logs(model, decoder.w_tilde, lambda);
        auto table = inner_table(model, decoder, sigma, tau, cf);
        return sup_theta_zeta(log_p, table, rate, mulexp(tau, lambda), cfg.zeta_cap, effort);
    };

    if (tau == 0.0) {
        // the collective factor carries exponent tau = 0: lambda is
        // immaterial and there is no infimum to protect, so the sup may be
        // refined in theta as well
        effort.refine_theta = !screening;
        effort.zeta_xtol = screening ? effort.zeta_xtol : 1e-9;
        auto best = sup_at_lambda(0.0);
        out.value = best.value;
        out.params.lambda = 0.0;
        out.params.theta = best.theta;
        out.params.zeta = best.zeta;
        out.diagnostics.lambda_profile.emplace_back(0.0, best.value);
        return out;
    }

    std::vector<double> lambdas;
    if (cfg.lambda_grid.include_zero_limit) lambdas.push_back(0.0);
    auto body = logspace(cfg.lambda_grid.lo, cfg.lambda_grid.hi,
                         screening ? std::max(12, cfg.lambda_grid.points / 5)
                                   : cfg.lambda_grid.points);
    lambdas.insert(lambdas.end(), body.begin(), body.end());

    std::vector<ThetaZetaBest> sup(lambdas.size());
    std::size_t min_idx = 0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        sup[i] = sup_at_lambda(lambdas[i]);
        if (sup[i].value < sup[min_idx].value) min_idx = i;
    }

    // a profile still descending at the cap chases the lambda -> inf limit,
    // which is -inf when the metric has zeros on the ensemble support
    if (cfg.lambda_grid.extend_on_decreasing_tail && !screening) {
        bool extended = false;
        while (lambdas.size() >= 2 && min_idx == lambdas.size() - 1 && lambdas.back() < 1e9 &&
               sup[min_idx].value < sup[min_idx - 1].value - 1e-12) {
            const double start = lambdas.back() * 1.5;
            const double stop = std::min(lambdas.back() * 1e3, 1e9);
            if (start >= stop) break;
            for (double l : logspace(start, stop, 30)) {
                lambdas.push_back(l);
                sup.push_back(sup_at_lambda(l));
                if (sup.back().value < sup[min_idx].value) min_idx = sup.size() - 1;
            }
            extended = true;
        }
        if (extended) {
            out.diagnostics.warnings.push_back("lambda profile decreasing at grid cap; extended to " +
                                               std::to_string(lambdas.back()));
        }
    }

    if (!screening) {
        out.diagnostics.lambda_profile.reserve(lambdas.size());
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            out.diagnostics.lambda_profile.emplace_back(lambdas[i], sup[i].value);
        }
    }

    if (cfg.unimodality_check && !screening) {
        int descents_after_rise = 0;
        bool rising = false;
        for (std::size_t i = 1; i < sup.size(); ++i) {
            if (sup[i].value > sup[i - 1].value + 1e-12) rising = true;
            if (rising && sup[i].value < sup[i - 1].value - 1e-12) {
                ++descents_after_rise;
                rising = false;
            }
        }
        if (descents_after_rise > 0) {
            out.diagnostics.lambda_unimodal = false;
            out.diagnostics.warnings.push_back(
                "lambda profile not unimodal on grid; reported value is the grid+refinement "
                "minimum");
        }
    }

    ThetaZetaBest best = sup[min_idx];
    double best_lambda = lambdas[min_idx];
    // golden refinement between the neighbors of the grid minimum
    const double a = lambdas[min_idx == 0 ? 0 : min_idx - 1];
    const double b = lambdas[min_idx + 1 < lambdas.size() ? min_idx + 1 : min_idx];
    if (b > a) {
        auto h = [&](double l) { return sup_at_lambda(l).value; };
        auto refined = golden_min(h, a, b, 1e-9);
        if (refined.value < best.value) {
            best = sup_at_lambda(refined.arg);
            best_lambda = refined.arg;
        }
    }

    out.value = best.value;
    out.params.lambda = best_lambda;
    out.params.theta = best.theta;
    out.params.zeta = best.zeta;
    return out;
}

}  // namespace

double inner_sum_log(const ChannelModel& model, const DecoderSpec& decoder, std::size_t x,
                     std::size_t xp, const DualParams& params) {
    const std::vector<double> cf =
        params.tau == 0.0 ? std::vector<double>()
                          : collective_logs(model, decoder.w_tilde, params.lambda);
    auto table = inner_table(model, decoder, params.sigma, params.tau, cf);
    return table[x * model.num_inputs() + xp];
}

double dual_objective(const ChannelModel& model, const DecoderSpec& decoder,
                      const DualParams& params, double rate) {
    if (rate < 0.0) throw std::domain_error("dual_objective: rate must be >= 0");
    const std::vector<double> cf =
        params.tau == 0.0 ? std::vector<double>()
                          : collective_logs(model, decoder.w_tilde, params.lambda);
    auto table = inner_table(model, decoder, params.sigma, params.tau, cf);
    std::vector<double> log_p(model.num_inputs());
    for (std::size_t x = 0; x < log_p.size(); ++x) log_p[x] = safe_log(model.p[x]);
    return objective_from_table(log_p, table, params.theta, params.zeta, rate,
                                mulexp(params.tau, params.lambda));
}

DualResult optimize_dual(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                         const DualConfig& config) {
    if (rate < 0.0) throw std::domain_error("optimize_dual: rate must be >= 0");
    const double beta = decoder.beta;
    const double sigma_cap = std::isinf(beta) ? config.beta_cap : std::min(beta, config.beta_cap);

    std::vector<double> log_p(model.num_inputs());
    for (std::size_t x = 0; x < log_p.size(); ++x) log_p[x] = safe_log(model.p[x]);

    auto tau_cap_for = [&](double sigma) {
        return std::isinf(beta) ? config.beta_cap : std::max(0.0, std::min(beta - sigma, config.beta_cap));
    };

    // cheap pass over the whole grid ranks (sigma, tau) candidates; the full
    // lambda grid plus refinement only runs on the short list, and the value
    // finally reported always comes from a full evaluation
    struct Scored {
        double value;
        double sigma;
        double tau;
    };
    std::vector<Scored> screened;
    for (double sigma : config.sigma_tau_grid.values(sigma_cap)) {
        for (double tau : config.sigma_tau_grid.values(tau_cap_for(sigma))) {
            auto cand = evaluate_sigma_tau(model, decoder, sigma, tau, rate, config, log_p,
                                           /*screening=*/true);
            screened.push_back({cand.value, sigma, tau});
        }
    }
    std::stable_sort(screened.begin(), screened.end(),
                     [](const Scored& a, const Scored& b) { return a.value > b.value; });

    PhiResult best;
    bool have_best = false;
    std::vector<std::pair<double, double>> evaluated;
    auto consider = [&](double sigma, double tau) {
        for (auto [s, t] : evaluated) {
            if (std::abs(s - sigma) < 1e-12 && std::abs(t - tau) < 1e-12) return;
        }
        evaluated.emplace_back(sigma, tau);
        auto cand = evaluate_sigma_tau(model, decoder, sigma, tau, rate, config, log_p,
                                       /*screening=*/false);
        if (!have_best || cand.value > best.value) {
            best = std::move(cand);
            have_best = true;
        }
    };

    const std::size_t short_list = std::min<std::size_t>(screened.size(), 8);
    for (std::size_t i = 0; i < short_list; ++i) consider(screened[i].sigma, screened[i].tau);

    // shrinking pattern search around the best point; moves only on strict
    // improvement, so ties keep the parameters found first
    double step = config.sigma_tau_grid.linear_step / 2.0;
    for (int round = 0; round < config.refine_rounds; ++round) {
        for (int move = 0; move < 6; ++move) {
            const double s0 = best.params.sigma;
            const double t0 = best.params.tau;
            const double before = best.value;
            for (int ds = -1; ds <= 1; ++ds) {
                for (int dt = -1; dt <= 1; ++dt) {
                    if (ds == 0 && dt == 0) continue;
                    double s = s0 + ds * step;
                    double t = t0 + dt * step;
                    if (s < 0.0 || s > sigma_cap + 1e-12) continue;
                    s = std::min(s, sigma_cap);
                    if (t < 0.0 || t > tau_cap_for(s) + 1e-12) continue;
                    t = std::min(t, tau_cap_for(s));
                    consider(s, t);
                }
            }
            if (!(best.value > before + 1e-14)) break;
        }
        step /= 2.0;
    }

    DualResult result;
    result.params = best.params;
    result.diagnostics = std::move(best.diagnostics);
    // achiever consistency: the reported value is the objective at the
    // reported parameters
    result.value = dual_objective(model, decoder, result.params, rate);
    if (std::abs(result.value - best.value) > 1e-9) {
        result.diagnostics.warnings.push_back("achiever re-evaluation drifted by " +
                                              std::to_string(result.value - best.value));
    }

    if (is_matched(model, decoder)) {
        auto [r_c1, r_c2] = critical_rates(model);
        result.regime_hint =
            rate <= r_c1 ? Regime::low : (rate < r_c2 ? Regime::moderate : Regime::high);
    } else {
        result.regime_hint = Regime::unknown;
    }
    return result;
}

double e1(const ChannelModel& model, double rho, double lambda) {
    if (!(rho > 0.0) || rho > 1.0) throw std::domain_error("e1: rho must be in (0, 1]");
    if (!(lambda > 0.0)) throw std::domain_error("e1: lambda must be > 0");
    const double coeff = (1.0 - rho) / (1.0 + rho);
    LogSumAccumulator acc;
    for (std::size_t y = 0; y < model.num_outputs(); ++y) {
        const double a2 = 2.0 * a_value(model, model.w, y, 1.0 + rho);
        const double cf = collective_factor_log(model, model.w, y, lambda);
        acc.add(a2 - mulexp(coeff, cf));
    }
    return -acc.result();
}

RegimeBound regime_bound(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                         const RhoCap& cap) {
    if (!is_matched(model, decoder)) {
        throw std::invalid_argument(
            "regime_bound: closed forms are only established for the matched deterministic "
            "decoder");
    }
    if (rate < 0.0) throw std::domain_error("regime_bound: rate must be >= 0");

    RegimeBound out;
    auto [r_c1, r_c2] = critical_rates(model, cap);
    out.r_c1 = r_c1;
    out.r_c2 = r_c2;

    // sup_{rho>=1}[E_x(rho) - 2 rho R] + R, valid at every rate
    auto low = expurgated_achiever(model, 2.0 * rate, cap);
    const double v_low = low.value + rate;
    // E0(1) - R, valid at every rate (fixed feasible parameter point)
    const double v_mod = gallager_e0(model, 1.0) - rate;
    // E_sp(R): the lambda = 1+rho stationary point is the minimizer only for
    // R >= R_c2, so the sphere-packing form enters the max only there
    double v_high = kNegInf;
    RhoAchiever high;
    if (rate >= r_c2) {
        high = sphere_packing_achiever(model, rate, cap);
        v_high = high.value;
    }

    out.value = std::max({v_low, v_mod, v_high});
    out.regime = rate <= r_c1 ? Regime::low : (rate < r_c2 ? Regime::moderate : Regime::high);

    switch (out.regime) {
        case Regime::low:
            out.params = {0.5, 0.0, 0.0, low.rho - 1.0, low.rho};
            break;
        case Regime::moderate:
            out.params = {0.5, 0.0, 0.0, 0.0, 1.0};
            break;
        default: {
            const double varrho = std::clamp(high.rho, 0.0, 1.0);
            out.params = {varrho / (1.0 + varrho), (1.0 - varrho) / (1.0 + varrho), 1.0 + varrho,
                          0.0, 1.0};
            break;
        }
    }
    return out;
}

double beta_threshold(double sigma_star, double tau_star) { return sigma_star + tau_star; }

}  // namespace trcexp
