#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "trcexp/kernels.hpp"
#include "trcexp/logspace.hpp"

using namespace trcexp;
using testutil::random_channel;
using testutil::random_distribution;

TEST_CASE("validate_channel accepts the BSC and names violations") {
    auto bsc = make_bsc(0.1);
    CHECK(validate_channel(bsc).empty());

    ChannelModel bad = bsc;
    bad.w[0] = {0.9, 0.2};
    auto v = validate_channel(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("row 0") != std::string::npos);
    CHECK(v[0].find("1.1") != std::string::npos);

    ChannelModel badp = bsc;
    badp.p = {0.7, 0.4};
    v = validate_channel(badp);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("input distribution") != std::string::npos);
}

TEST_CASE("log_sum_exp basics") {
    const double l05 = std::log(0.5);
    CHECK(log_sum_exp({l05, l05}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(log_sum_exp({kNegInf, kNegInf}) == kNegInf);
    CHECK(log_sum_exp({0.0, 0.0, 0.0}) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(log_sum_exp(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("LogValue combinators never produce NaN from valid operands") {
    auto zero = LogValue::from_linear(0.0);
    auto half = LogValue::from_linear(0.5);
    CHECK((zero * half).is_zero());
    CHECK((zero * zero).is_zero());
    CHECK(zero.pow(0.0).log() == 0.0);  // empty product convention
    CHECK(half.pow(2.0).log() == doctest::Approx(2.0 * std::log(0.5)));
    CHECK(!std::isnan((zero * half).log()));
    CHECK(mulexp(0.0, kNegInf) == 0.0);
    CHECK(mulexp(0.0, kPosInf) == 0.0);
}

TEST_CASE("a_value worked examples") {
    auto flat = make_bsc(0.5);
    CHECK(a_value(flat, flat.w, 0, 2.0) == doctest::Approx(-std::log(2.0) / 2.0).epsilon(1e-12));

    auto bsc = make_bsc(0.1);
    CHECK(a_value(bsc, bsc.w, 0, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    // 0.5 (sqrt(0.9) + sqrt(0.1)) = 0.6324555...
    CHECK(a_value(bsc, bsc.w, 0, 2.0) ==
          doctest::Approx(std::log(0.5 * (std::sqrt(0.9) + std::sqrt(0.1)))).epsilon(1e-12));
    CHECK_THROWS_AS(a_value(bsc, bsc.w, 0, 0.0), std::domain_error);
    CHECK_THROWS_AS(a_value(bsc, bsc.w, 0, -1.0), std::domain_error);
}

TEST_CASE("collective_factor_log endpoints and interior") {
    auto bsc = make_bsc(0.1);
    CHECK(collective_factor_log(bsc, bsc.w, 0, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(collective_factor_log(bsc, bsc.w, 0, 0.0) == doctest::Approx(std::log(0.9)).epsilon(1e-12));
    CHECK(collective_factor_log(bsc, bsc.w, 0, kPosInf) ==
          doctest::Approx(0.5 * std::log(0.9) + 0.5 * std::log(0.1)).epsilon(1e-12));
}

TEST_CASE("collective factor is sandwiched between its limits and midpoint convex") {
    detail::SplitMix64 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        auto model = random_channel(rng, 2 + trial % 3, 2 + (trial + 1) % 3);
        for (std::size_t y = 0; y < model.num_outputs(); ++y) {
            const double lo = collective_factor_log(model, model.w, y, kPosInf);
            const double hi = collective_factor_log(model, model.w, y, 0.0);
            std::vector<double> lambdas;
            for (int i = 0; i <= 40; ++i) lambdas.push_back(std::pow(10.0, -2.0 + 4.0 * i / 40.0));
            std::vector<double> f(lambdas.size());
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                f[i] = collective_factor_log(model, model.w, y, lambdas[i]);
                CHECK(f[i] >= lo - 1e-9);
                CHECK(f[i] <= hi + 1e-9);
            }
            for (std::size_t i = 0; i + 2 < lambdas.size(); i += 2) {
                const double mid =
                    collective_factor_log(model, model.w, y, (lambdas[i] + lambdas[i + 2]) / 2.0);
                CHECK(mid <= (f[i] + f[i + 2]) / 2.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("kl_divergence examples and nonnegativity") {
    std::vector<double> u{0.5, 0.5};
    CHECK(kl_divergence(u, u) == 0.0);
    std::vector<double> point{1.0, 0.0};
    CHECK(kl_divergence(point, u) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    std::vector<double> q{0.9, 0.1};
    CHECK(kl_divergence(q, u) ==
          doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)).epsilon(1e-14));
    std::vector<double> three{0.2, 0.3, 0.5};
    CHECK_THROWS_AS(kl_divergence(three, u), std::invalid_argument);

    detail::SplitMix64 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto a = random_distribution(rng, 2 + i % 4);
        auto b = random_distribution(rng, a.size());
        CHECK(kl_divergence(a, b) >= 0.0);
        CHECK(kl_divergence(a, a) == doctest::Approx(0.0).epsilon(1e-12));
        double gap = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]));
        if (gap > 1e-3) CHECK(kl_divergence(a, b) > 1e-12);  // zero only at q = p
    }
}

TEST_CASE("validate_channel flags alphabet size mismatches") {
    auto bsc = make_bsc(0.1);
    bsc.input_alphabet = {"0", "1", "2"};
    auto v = validate_channel(bsc);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("alphabet") != std::string::npos);
}

TEST_CASE("weighted_conditional_divergence examples") {
    auto bsc = make_bsc(0.1);
    std::vector<double> qx{0.5, 0.5};
    CHECK(weighted_conditional_divergence(bsc.w, bsc.w, qx) == 0.0);

    // point mass reduces to the row divergence
    Matrix q{{1.0, 0.0}, {0.5, 0.5}};
    std::vector<double> point{1.0, 0.0};
    CHECK(weighted_conditional_divergence(q, bsc.w, point) ==
          doctest::Approx(kl_divergence(q[0], bsc.w[0])).epsilon(1e-14));

    Matrix mixed{{1.0, 0.0}, {0.1, 0.9}};
    CHECK(weighted_conditional_divergence(mixed, bsc.w, qx) ==
          doctest::Approx(0.5 * std::log(1.0 / 0.9)).epsilon(1e-12));
}

TEST_CASE("j_divergence examples and cross-check") {
    std::vector<double> p{0.5, 0.5};
    Matrix product{{0.25, 0.25}, {0.25, 0.25}};
    CHECK(j_divergence(product, p) == doctest::Approx(0.0).epsilon(1e-14));

    Matrix diagonal{{0.5, 0.0}, {0.0, 0.5}};
    CHECK(j_divergence(diagonal, p) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    // J = I + D(Q_X' || P) on random joints
    detail::SplitMix64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 3;
        auto flatq = random_distribution(rng, n * n);
        Matrix q(n, std::vector<double>(n));
        std::vector<double> qx(n, 0.0), qxp(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t xp = 0; xp < n; ++xp) {
                q[x][xp] = flatq[x * n + xp];
                qx[x] += q[x][xp];
                qxp[xp] += q[x][xp];
            }
        }
        auto pp = random_distribution(rng, n);
        double mi = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t xp = 0; xp < n; ++xp) {
                if (q[x][xp] > 0.0) mi += q[x][xp] * std::log(q[x][xp] / (qx[x] * qxp[xp]));
            }
        }
        CHECK(j_divergence(q, pp) ==
              doctest::Approx(mi + kl_divergence(qxp, pp)).epsilon(1e-10));
    }
}

TEST_CASE("tilted_min examples, duality inequality, and brute-force check") {
    std::vector<double> p{0.5, 0.5};
    std::vector<double> zero{0.0, 0.0};
    CHECK(tilted_min(p, zero) == doctest::Approx(0.0).epsilon(1e-14));
    std::vector<double> c{0.7, 0.7};
    CHECK(tilted_min(p, c) == doctest::Approx(0.7).epsilon(1e-14));
    std::vector<double> f{0.0, std::log(2.0)};
    CHECK(tilted_min(p, f) == doctest::Approx(-std::log(0.75)).epsilon(1e-14));

    // brute-force oracle over a fine grid of binary distributions
    double brute = kPosInf;
    for (int i = 0; i <= 100000; ++i) {
        const double a = i / 100000.0;
        std::vector<double> q{a, 1.0 - a};
        brute = std::min(brute, kl_divergence(q, p) + a * f[0] + (1.0 - a) * f[1]);
    }
    CHECK(tilted_min(p, f) == doctest::Approx(brute).epsilon(1e-8));

    detail::SplitMix64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 4;
        auto pp = random_distribution(rng, n);
        std::vector<double> g(n);
        for (auto& v : g) v = 4.0 * rng.next_double() - 2.0;
        auto q = random_distribution(rng, n);
        double expectation = 0.0;
        for (std::size_t i = 0; i < n; ++i) expectation += q[i] * g[i];
        CHECK(tilted_min(pp, g) <= expectation + kl_divergence(q, pp) + 1e-10);
    }
}
