#include "trcexp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "trcexp/logspace.hpp"

namespace trcexp {

namespace detail {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return mixer.next();
}

}  // namespace detail

namespace {

constexpr double kLogZeroCap = 700.0;  // -ln P_e cap for zero-error codes, in nats

double metric_score_log(const DecoderSpec& decoder, const std::vector<int>& codeword,
                        std::span<const int> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = decoder.w_tilde[codeword[i]][y[i]];
        if (m == 0.0) return kNegInf;
        s += std::log(m);
    }
    return s;
}

// posterior for all messages at a fixed output; beta = inf resolves to argmax
// with uniform tie-splitting
std::vector<double> posterior_from_scores(const std::vector<double>& scores, double beta,
                                          bool* all_zero) {
    const std::size_t m = scores.size();
    std::vector<double> post(m, 0.0);
    if (all_zero) *all_zero = false;
    double top = kNegInf;
    for (double s : scores) top = std::max(top, s);
    if (top == kNegInf) {
        if (all_zero) *all_zero = true;
        std::fill(post.begin(), post.end(), 1.0 / static_cast<double>(m));
        return post;
    }
    if (std::isinf(beta)) {
        std::size_t ties = 0;
        for (double s : scores) ties += s == top ? 1 : 0;
        for (std::size_t i = 0; i < m; ++i) {
            post[i] = scores[i] == top ? 1.0 / static_cast<double>(ties) : 0.0;
        }
        return post;
    }
    double denom = 0.0;
    for (double s : scores) denom += s == kNegInf ? 0.0 : std::exp(beta * (s - top));
    for (std::size_t i = 0; i < m; ++i) {
        post[i] = scores[i] == kNegInf ? 0.0 : std::exp(beta * (scores[i] - top)) / denom;
    }
    return post;
}

void check_codebook(const Codebook& code) {
    if (code.size() < 2) throw std::invalid_argument("codebook needs at least 2 codewords");
    for (const auto& cw : code.codewords) {
        if (static_cast<int>(cw.size()) != code.n) {
            throw std::invalid_argument("codeword length does not match blocklength");
        }
    }
}

}  // namespace

int SimConfig::num_messages() const {
    const double m = std::ceil(std::exp(n * rate_nats) - 1e-9);
    return std::max(2, static_cast<int>(m));
}

void SimConfig::enforce_caps(std::size_t nx, std::size_t ny) const {
    if (n < 1) throw std::invalid_argument("blocklength must be >= 1");
    const double work =
        n * std::pow(static_cast<double>(nx), n) * std::pow(static_cast<double>(ny), n);
    if (work > kSimEnumerationCap) {
        throw std::invalid_argument("n*|X|^n*|Y|^n = " + std::to_string(work) +
                                    " exceeds the exact-enumeration cap " +
                                    std::to_string(kSimEnumerationCap));
    }
    if (num_messages() > 65536) throw std::invalid_argument("codebook size cap exceeded");
}

std::vector<double> gld_posterior_all(const Codebook& code, const DecoderSpec& decoder,
                                      std::span<const int> y, bool* all_zero) {
    check_codebook(code);
    if (static_cast<int>(y.size()) != code.n) {
        throw std::invalid_argument("output length does not match blocklength");
    }
    std::vector<double> scores(code.size());
    for (std::size_t m = 0; m < code.size(); ++m) {
        scores[m] = metric_score_log(decoder, code.codewords[m], y);
    }
    return posterior_from_scores(scores, decoder.beta, all_zero);
}

double gld_posterior(const Codebook& code, const DecoderSpec& decoder, std::span<const int> y,
                     std::size_t m) {
    if (std::isinf(decoder.beta)) {
        throw std::domain_error("gld_posterior: beta must be finite (beta = inf decodes by argmax)");
    }
    return gld_posterior_all(code, decoder, y)[m];
}

double exact_error_prob(const Codebook& code, const ChannelModel& model,
                        const DecoderSpec& decoder) {
    check_codebook(code);
    const std::size_t m_count = code.size();
    const std::size_t ny = model.num_outputs();
    const int n = code.n;
    const double work = static_cast<double>(n) * std::pow(static_cast<double>(ny), n) *
                        static_cast<double>(m_count);
    if (work > 64.0 * kSimEnumerationCap) {
        throw std::invalid_argument("exact_error_prob: enumeration cap exceeded");
    }

    std::vector<int> y(n, 0);
    std::vector<double> scores(m_count);
    double p_error = 0.0;
    while (true) {
        for (std::size_t m = 0; m < m_count; ++m) {
            scores[m] = metric_score_log(decoder, code.codewords[m], y);
        }
        const auto post = posterior_from_scores(scores, decoder.beta, nullptr);
        // sum_m W(y|x_m) (1 - post(m|y)) accumulates all wrong decisions
        for (std::size_t m = 0; m < m_count; ++m) {
            double w = 1.0;
            const auto& cw = code.codewords[m];
            for (int i = 0; i < n; ++i) {
                w *= model.w[cw[i]][y[i]];
                if (w == 0.0) break;
            }
            if (w > 0.0) p_error += w * (1.0 - post[m]);
        }
        // odometer over Y^n
        int pos = n - 1;
        while (pos >= 0 && y[pos] == static_cast<int>(ny) - 1) {
            y[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++y[pos];
    }
    return std::clamp(p_error / static_cast<double>(m_count), 0.0, 1.0);
}

TrcEstimate trc_estimate(const ChannelModel& model, const DecoderSpec& decoder,
                         const SimConfig& config) {
    config.enforce_caps(model.num_inputs(), model.num_outputs());
    if (config.num_codes < 1) throw std::invalid_argument("num_codes must be >= 1");
    const int m_count = config.num_messages();

    // cumulative distribution for inverse-CDF symbol sampling
    std::vector<double> cdf(model.num_inputs());
    double acc = 0.0;
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        acc += model.p[x];
        cdf[x] = acc;
    }
    cdf.back() = 1.0;

    auto value_for_code = [&](int index, int* zero_flag) {
        detail::SplitMix64 rng(detail::substream_seed(config.seed, static_cast<std::uint64_t>(index)));
        Codebook code;
        code.n = config.n;
        code.codewords.assign(m_count, std::vector<int>(config.n));
        for (auto& cw : code.codewords) {
            for (int i = 0; i < config.n; ++i) {
                const double u = rng.next_double();
                int x = 0;
                while (u >= cdf[x] && x + 1 < static_cast<int>(cdf.size())) ++x;
                cw[i] = x;
            }
        }
        const double pe = exact_error_prob(code, model, decoder);
        if (pe <= 0.0) {
            *zero_flag = 1;
            return kLogZeroCap / config.n;
        }
        *zero_flag = 0;
        return -std::log(pe) / config.n;
    };

    std::vector<double> values(config.num_codes);
    std::vector<int> zero_flags(config.num_codes, 0);
    int workers = std::max(1, config.threads);
    workers = std::min(workers, 32);
    if (workers == 1) {
        for (int c = 0; c < config.num_codes; ++c) values[c] = value_for_code(c, &zero_flags[c]);
    } else {
        std::vector<std::future<void>> futures;
        const int chunk = (config.num_codes + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const int begin = t * chunk;
            const int end = std::min(config.num_codes, begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, [&, begin, end] {
                for (int c = begin; c < end; ++c) values[c] = value_for_code(c, &zero_flags[c]);
            }));
        }
        for (auto& f : futures) f.get();
    }

    // fixed-order reduction keeps results identical across worker counts
    TrcEstimate out;
    out.num_codes = config.num_codes;
    out.num_messages = m_count;
    double sum = 0.0;
    for (int c = 0; c < config.num_codes; ++c) {
        sum += values[c];
        out.zero_pe_codes += zero_flags[c];
    }
    out.estimate = sum / config.num_codes;
    double ss = 0.0;
    for (int c = 0; c < config.num_codes; ++c) {
        const double d = values[c] - out.estimate;
        ss += d * d;
    }
    if (config.num_codes > 1) {
        out.std_error = std::sqrt(ss / (config.num_codes - 1.0) / config.num_codes);
    }
    return out;
}

}  // namespace trcexp
