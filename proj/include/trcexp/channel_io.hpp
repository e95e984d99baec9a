#ifndef TRCEXP_CHANNEL_IO_HPP
#define TRCEXP_CHANNEL_IO_HPP

#include <string>
#include <vector>

#include "trcexp/channel.hpp"

namespace trcexp {

// Parsed channel file: model, decoder, and soft diagnostics.
struct ChannelFile {
    ChannelModel model;
    DecoderSpec decoder;
    std::vector<std::string> warnings;
};

// JSON schema (all probabilities linear, rates in nats):
//   {
//     "input_alphabet":  ["0", "1"],          // optional labels
//     "output_alphabet": ["0", "1"],          // optional labels
//     "W":       [[0.9, 0.1], [0.1, 0.9]],    // required, rows over y
//     "P":       [0.5, 0.5],                  // optional, default uniform
//     "W_tilde": [[...], [...]],              // optional, default W
//     "beta":    1.0                          // optional number or "inf" (default)
//   }
// Malformed files raise std::runtime_error naming the field; validation
// violations are aggregated into a single std::invalid_argument.
ChannelFile parse_channel_file(const std::string& path);
ChannelFile parse_channel_json(const std::string& text, const std::string& origin = "<string>");

}  // namespace trcexp

#endif
