#ifndef TRCEXP_CHANNEL_HPP
#define TRCEXP_CHANNEL_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "trcexp/logspace.hpp"

namespace trcexp {

// row-major conditional probability matrix, m[x][y] = Pr(y | x)
using Matrix = std::vector<std::vector<double>>;

// Centralized tolerance knobs: one per concern.
inline constexpr double kValidationTol = 1e-12;  // stochasticity checks
inline constexpr double kIdentityTol = 1e-10;    // algebraic identity tests
inline constexpr double kOptimizerTol = 1e-8;    // scalar optimizer convergence

// A discrete memoryless channel W(y|x) together with the input distribution
// P(x) of the i.i.d. random-coding ensemble. All rates and exponents are in
// nats.
struct ChannelModel {
    std::vector<std::string> input_alphabet;
    std::vector<std::string> output_alphabet;
    Matrix w;               // w[x][y]
    std::vector<double> p;  // p[x]

    std::size_t num_inputs() const { return w.size(); }
    std::size_t num_outputs() const { return w.empty() ? 0 : w[0].size(); }
};

// Decoding metric: score of (x-row, y) is w_tilde[x][y], applied with inverse
// temperature beta. beta = +inf selects the deterministic metric maximizer.
struct DecoderSpec {
    Matrix w_tilde;
    double beta = kPosInf;

    bool deterministic() const { return std::isinf(beta); }
};

// Returns the empty list iff the model satisfies all invariants; otherwise one
// human-readable violation per failed predicate, naming the offending entry.
std::vector<std::string> validate_channel(const ChannelModel& model);

// Hard errors for a decoder attached to the given model (shape, beta domain).
std::vector<std::string> validate_decoder(const ChannelModel& model, const DecoderSpec& decoder);

// Soft diagnostics: metric rows that are not probability distributions. The
// metric only needs to be positive where it is used, so these never reject.
std::vector<std::string> decoder_warnings(const DecoderSpec& decoder);

DecoderSpec matched_decoder(const ChannelModel& model);

// W-tilde identical to W and beta = +inf.
bool is_matched(const ChannelModel& model, const DecoderSpec& decoder);

ChannelModel make_bsc(double crossover, double p0 = 0.5);

}  // namespace trcexp

#endif
