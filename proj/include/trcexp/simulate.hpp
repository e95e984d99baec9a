#ifndef TRCEXP_SIMULATE_HPP
#define TRCEXP_SIMULATE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "trcexp/channel.hpp"

namespace trcexp {

struct Codebook {
    int n = 1;                                // blocklength
    std::vector<std::vector<int>> codewords;  // M codewords of length n

    std::size_t size() const { return codewords.size(); }
};

// Exact enumeration is bounded by n * |X|^n * |Y|^n <= 1e6 (n <= 8 for binary).
inline constexpr double kSimEnumerationCap = 1e6;

struct SimConfig {
    int n = 4;
    double rate_nats = 0.1;  // M = max(2, ceil(exp(n * rate)))
    int num_codes = 100;
    std::uint64_t seed = 1;
    int threads = 1;  // worker count; results are scheduling-independent

    int num_messages() const;
    void enforce_caps(std::size_t nx, std::size_t ny) const;  // throws when exceeded
};

// Posterior of message m under the generalized likelihood decoder,
//   Wt^beta(y|x_m) / sum_m' Wt^beta(y|x_m'),
// computed in log domain. Requires finite beta; all-zero scores fall back to
// the uniform posterior (all_zero flag set when provided).
double gld_posterior(const Codebook& code, const DecoderSpec& decoder, std::span<const int> y,
                     std::size_t m);
std::vector<double> gld_posterior_all(const Codebook& code, const DecoderSpec& decoder,
                                      std::span<const int> y, bool* all_zero = nullptr);

// Exact error probability of the code under the GLD:
//   (1/M) sum_m sum_{m' != m} sum_y W(y|x_m) posterior(m'|y),
// enumerated over all y in Y^n. beta = inf decodes by argmax with uniform
// tie-splitting.
double exact_error_prob(const Codebook& code, const ChannelModel& model,
                        const DecoderSpec& decoder);

struct TrcEstimate {
    double estimate = 0.0;  // mean of -ln P_e(C)/n over sampled codes
    double std_error = 0.0;
    int zero_pe_codes = 0;  // codes whose -ln P_e was capped at 700 nats
    int num_codes = 0;
    int num_messages = 0;
};

// Monte-Carlo estimate of -E ln P_e / n over codebooks drawn i.i.d. from P^n.
// Each code uses a counter-based substream of (seed, code index), so results
// are bit-identical across runs and worker counts.
TrcEstimate trc_estimate(const ChannelModel& model, const DecoderSpec& decoder,
                         const SimConfig& config);

namespace detail {

// splitmix64; deterministic across platforms
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace detail

}  // namespace trcexp

#endif
