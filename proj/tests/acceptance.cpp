// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 10 drives the CLI binary passed via --cli.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "trcexp/channel_io.hpp"
#include "trcexp/classical.hpp"
#include "trcexp/dual.hpp"
#include "trcexp/kernels.hpp"
#include "trcexp/primal.hpp"
#include "trcexp/simulate.hpp"

using namespace trcexp;
using testutil::make_z_channel;
using testutil::random_channel;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Criterion {
    int id;
    std::string name;
    bool pass = true;
    std::ostringstream detail;
    Clock::time_point start = Clock::now();

    Criterion(int id_, std::string name_) : id(id_), name(std::move(name_)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }

    double finish() {
        const double secs =
            std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start).count();
        std::printf("%s  %2d  %-24s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(), secs,
                    detail.str().empty() ? "" : "  -- ", detail.str().c_str());
        std::fflush(stdout);
        failures += pass ? 0 : 1;
        return secs;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<double> rate_span(double hi, int points) {
    std::vector<double> rates(points);
    for (int i = 0; i < points; ++i) rates[i] = hi * static_cast<double>(i) / (points - 1);
    return rates;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// matched dual evaluations shared by criteria 3-5
struct DualPoint {
    const char* channel;
    double rate;
    double dual;
    double e_sp;
};
std::vector<DualPoint> tested_points;

void criterion1_identities() {
    Criterion c(1, "algebraic-identities");
    detail::SplitMix64 rng(20240601);
    double worst_ex = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto model = random_channel(rng, 2 + i % 3, 2 + (i / 3) % 3);
        worst_ex = std::max(worst_ex, std::abs(expurgated_ex(model, 1.0) - gallager_e0(model, 1.0)));
    }
    c.require(worst_ex <= 1e-10, "E_x(1) vs E0(1) worst " + fmt(worst_ex));

    auto bsc = make_bsc(0.1);
    auto rnd = random_channel(rng, 3, 3);
    double worst_e1 = 0.0;
    for (int i = 1; i <= 10; ++i) {
        const double rho = 0.1 * i;
        worst_e1 = std::max(worst_e1, std::abs(e1(bsc, rho, 1.0 + rho) - gallager_e0(bsc, rho)));
        worst_e1 = std::max(worst_e1, std::abs(e1(rnd, rho, 1.0 + rho) - gallager_e0(rnd, rho)));
    }
    c.require(worst_e1 <= 1e-12, "E1(rho,1+rho) vs E0(rho) worst " + fmt(worst_e1));

    const double e00 = std::abs(gallager_e0(bsc, 0.0));
    c.require(e00 <= 1e-15, "E0(0) = " + fmt(e00));
    const double secs = c.finish();
    if (secs >= 1.0) {
        std::printf("FAIL   1  (runtime %.2f s exceeded 1 s)\n", secs);
        ++failures;
    }
}

void criterion2_closed_forms() {
    Criterion c(2, "bsc-closed-forms");
    const double e01 = gallager_e0(make_bsc(0.1), 1.0);
    c.require(std::abs(e01 - (-std::log(0.8))) <= 1e-10, "E0(1) = " + fmt(e01));
    auto ident = testutil::make_noiseless_binary();
    auto [r_c1, r_c2] = critical_rates(ident);
    (void)r_c1;
    c.require(std::abs(r_c2 - std::log(2.0)) <= 1e-6, "identity-channel E0'(1) = " + fmt(r_c2));
    c.finish();
}

void criterion3_regime_dominance() {
    Criterion c(3, "regime-dominance");
    auto bsc = make_bsc(0.1);
    auto dec = matched_decoder(bsc);
    const double cap = mutual_information(bsc);
    auto [r_c1, r_c2] = critical_rates(bsc);
    (void)r_c1;
    for (double rate : rate_span(cap, 30)) {
        auto res = optimize_dual(bsc, dec, rate);
        auto rb = regime_bound(bsc, dec, rate);
        const double esp = sphere_packing_exponent(bsc, rate);
        tested_points.push_back({"bsc", rate, res.value, esp});
        if (res.value < rb.value - 5e-3) {
            c.require(false, "dual " + fmt(res.value) + " < regime " + fmt(rb.value) + " - 5e-3 at R=" +
                                 fmt(rate));
        }
        if (rate >= r_c2 && std::abs(res.value - esp) > 5e-3) {
            c.require(false, "|dual - Esp| = " + fmt(std::abs(res.value - esp)) + " at R=" + fmt(rate));
        }
    }
    const double secs = c.finish();
    if (secs >= 60.0) {
        std::printf("FAIL   3  (runtime %.2f s exceeded 60 s)\n", secs);
        ++failures;
    }
}

void criterion4_duality_direction() {
    Criterion c(4, "duality-direction");
    struct Case {
        const char* name;
        ChannelModel model;
    };
    std::vector<Case> cases{{"bsc", make_bsc(0.1)}, {"z", make_z_channel(0.3)}};
    for (auto& [name, model] : cases) {
        auto dec = matched_decoder(model);
        const double cap = mutual_information(model);
        for (double rate : rate_span(cap, 8)) {
            auto dres = optimize_dual(model, dec, rate);
            const double esp = sphere_packing_exponent(model, rate);
            tested_points.push_back({name, rate, dres.value, esp});
            // the strict-filter value is the duality-direction oracle; the
            // slack-widened value is reported for grid-effect visibility only
            GridSpec coarse;
            coarse.resolution = 20;
            auto p20 = primal_bound(model, dec, rate, coarse);
            if (p20.value_strict < dres.value - 1e-6) {
                c.require(false, std::string(name) + ": primal(1/20) " + fmt(p20.value_strict) +
                                     " < dual " + fmt(dres.value) + " at R=" + fmt(rate));
            }
            GridSpec fine;
            fine.resolution = 40;
            auto p40 = primal_bound(model, dec, rate, fine);
            if (p40.value_strict < dres.value - 1e-6) {
                c.require(false, std::string(name) + ": primal(1/40) " + fmt(p40.value_strict) +
                                     " < dual " + fmt(dres.value) + " at R=" + fmt(rate));
            }
        }
    }
    const double secs = c.finish();
    if (secs >= 300.0) {
        std::printf("FAIL   4  (runtime %.2f s exceeded 300 s)\n", secs);
        ++failures;
    }
}

void criterion5_sphere_packing_ceiling() {
    Criterion c(5, "sphere-packing-ceiling");
    for (const auto& pt : tested_points) {
        if (pt.dual > pt.e_sp + 1e-6) {
            c.require(false, std::string(pt.channel) + ": dual " + fmt(pt.dual) + " > Esp " +
                                 fmt(pt.e_sp) + " at R=" + fmt(pt.rate));
        }
    }
    c.require(!tested_points.empty(), "no matched points were collected");
    c.finish();
}

void criterion6_beta_behavior() {
    Criterion c(6, "beta-monotonicity");
    auto bsc = make_bsc(0.1);
    const double rate = 0.02;
    double prev = -kPosInf;
    double at_half = 0.0;
    double at_inf = 0.0;
    for (double beta : {0.25, 0.5, 1.0, 2.0, kPosInf}) {
        DecoderSpec dec{bsc.w, beta};
        auto res = optimize_dual(bsc, dec, rate);
        if (res.value < prev - 1e-6) {
            c.require(false, "value decreased at beta=" + fmt(beta) + ": " + fmt(res.value) +
                                 " < " + fmt(prev));
        }
        prev = res.value;
        if (beta == 0.5) at_half = res.value;
        if (std::isinf(beta)) at_inf = res.value;
    }
    c.require(std::abs(at_half - at_inf) <= 1e-4, "saturation gap " + fmt(at_half - at_inf));
    c.finish();
}

void criterion7_lambda_limits() {
    Criterion c(7, "lambda-limit-correctness");
    detail::SplitMix64 rng(555);
    double worst0 = 0.0;
    double worst_inf = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        auto model = random_channel(rng, 2 + trial % 3, 2 + (trial + 1) % 3);
        for (std::size_t y = 0; y < model.num_outputs(); ++y) {
            worst0 = std::max(worst0,
                              std::abs(collective_factor_log(model, model.w, y, 1e-6) -
                                       collective_factor_log(model, model.w, y, 0.0)));
            worst_inf = std::max(worst_inf,
                                 std::abs(collective_factor_log(model, model.w, y, 1e6) -
                                          collective_factor_log(model, model.w, y, kPosInf)));
        }
    }
    c.require(worst0 <= 1e-4, "lambda->0 worst gap " + fmt(worst0));
    c.require(worst_inf <= 1e-4, "lambda->inf worst gap " + fmt(worst_inf));
    c.finish();
}

void criterion8_simulator() {
    Criterion c(8, "simulator-exactness");
    auto bsc = make_bsc(0.1);
    Codebook code;
    code.n = 1;
    code.codewords = {{0}, {1}};
    DecoderSpec dec{bsc.w, 1.0};
    const double pe = exact_error_prob(code, bsc, dec);
    c.require(std::abs(pe - 0.18) <= 1e-12, "P_e = " + fmt(pe));

    detail::SplitMix64 rng(888);
    double worst_norm = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        const int m = 2 + static_cast<int>(rng.next() % 6);
        Codebook fuzz;
        fuzz.n = n;
        fuzz.codewords.assign(m, std::vector<int>(n));
        std::vector<int> y(n);
        for (auto& cw : fuzz.codewords) {
            for (auto& s : cw) s = static_cast<int>(rng.next() % 2);
        }
        for (auto& s : y) s = static_cast<int>(rng.next() % 2);
        DecoderSpec fdec{bsc.w, 0.5 + 2.0 * rng.next_double()};
        auto post = gld_posterior_all(fuzz, fdec, y);
        double sum = 0.0;
        for (double p : post) sum += p;
        worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
    }
    c.require(worst_norm <= 1e-12, "posterior normalization worst " + fmt(worst_norm));

    auto mdec = matched_decoder(bsc);
    SimConfig cfg;
    cfg.n = 6;
    cfg.rate_nats = 0.1;
    cfg.num_codes = 50;
    cfg.seed = 31337;
    cfg.threads = 1;
    auto run1 = trc_estimate(bsc, mdec, cfg);
    auto run2 = trc_estimate(bsc, mdec, cfg);
    c.require(run1.estimate == run2.estimate && run1.std_error == run2.std_error,
              "two runs differ");
    cfg.threads = 4;
    auto run4 = trc_estimate(bsc, mdec, cfg);
    c.require(run1.estimate == run4.estimate && run1.std_error == run4.std_error,
              "1-thread vs 4-thread differ");
    c.finish();
}

void criterion9_convexity() {
    Criterion c(9, "convexity-properties");
    detail::SplitMix64 rng(999);
    double worst = -kPosInf;
    for (int trial = 0; trial < 10; ++trial) {
        auto model = random_channel(rng, 2 + trial % 3, 2 + (trial + 1) % 2);
        std::vector<double> lambdas;
        for (int i = 0; i <= 80; ++i) lambdas.push_back(std::pow(10.0, -3.0 + 6.0 * i / 80.0));
        for (std::size_t y = 0; y < model.num_outputs(); ++y) {
            std::vector<double> f(lambdas.size());
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                f[i] = collective_factor_log(model, model.w, y, lambdas[i]);
            }
            for (std::size_t i = 0; i + 2 < lambdas.size(); i += 2) {
                const double mid =
                    collective_factor_log(model, model.w, y, (lambdas[i] + lambdas[i + 2]) / 2.0);
                worst = std::max(worst, mid - (f[i] + f[i + 2]) / 2.0);
            }
        }
        // alpha-dual objective: lambda [ sum_y Q_Y A(y, lambda) + R ]
        auto q_y = testutil::random_distribution(rng, model.num_outputs());
        const double rate = 0.3 * rng.next_double();
        auto psi = [&](double u) {
            double v = u * rate;
            for (std::size_t y = 0; y < q_y.size(); ++y) {
                v += q_y[y] * collective_factor_log(model, model.w, y, u);
            }
            return v;
        };
        std::vector<double> g(lambdas.size());
        for (std::size_t i = 0; i < lambdas.size(); ++i) g[i] = psi(lambdas[i]);
        for (std::size_t i = 0; i + 2 < lambdas.size(); i += 2) {
            worst = std::max(worst, psi((lambdas[i] + lambdas[i + 2]) / 2.0) - (g[i] + g[i + 2]) / 2.0);
        }
    }
    c.require(worst <= 1e-9, "worst midpoint violation " + fmt(worst));
    c.finish();
}

void criterion10_cli_round_trip(const std::string& cli) {
    Criterion c(10, "cli-round-trip");
    if (cli.empty()) {
        c.require(false, "no --cli path provided");
        c.finish();
        return;
    }
    {
        std::ofstream out("acceptance_bsc.json");
        out << R"({"W": [[0.9, 0.1], [0.1, 0.9]]})";
    }
    const std::string quiet = " >/dev/null 2>&1";
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + quiet).c_str());
        return status == -1 ? -1 : WEXITSTATUS(status);
    };
    const int code1 = run("curve --channel acceptance_bsc.json --out acceptance_run1.csv");
    const int code2 = run("curve --channel acceptance_bsc.json --out acceptance_run2.csv");
    c.require(code1 == 0 && code2 == 0, "curve exit codes " + fmt(code1) + "/" + fmt(code2));
    const auto text1 = slurp("acceptance_run1.csv");
    const auto text2 = slurp("acceptance_run2.csv");
    c.require(!text1.empty() && text1 == text2, "sweep CSVs are not byte-identical");

    {
        std::ofstream out("acceptance_bad1.json");
        out << "{ this is not json";
    }
    {
        std::ofstream out("acceptance_bad2.json");
        out << R"({"W": [[0.9, -0.1], [0.1, 0.9]]})";
    }
    c.require(run("curve --channel acceptance_bad1.json --out acceptance_bad.csv") == 1,
              "malformed JSON not rejected with exit 1");
    c.require(run("curve --channel acceptance_bad2.json --out acceptance_bad.csv") == 1,
              "negative probability not rejected with exit 1");
    c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }

    criterion1_identities();
    criterion2_closed_forms();
    criterion3_regime_dominance();
    criterion4_duality_direction();
    criterion5_sphere_packing_ceiling();
    criterion6_beta_behavior();
    criterion7_lambda_limits();
    criterion8_simulator();
    criterion9_convexity();
    criterion10_cli_round_trip(cli);

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
