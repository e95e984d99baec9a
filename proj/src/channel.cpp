#include "trcexp/channel.hpp"

#include <cmath>
#include <sstream>

namespace trcexp {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::vector<std::string> validate_channel(const ChannelModel& model) {
    std::vector<std::string> violations;
    const std::size_t nx = model.w.size();
    if (nx == 0) {
        violations.push_back("W has no rows");
        return violations;
    }
    const std::size_t ny = model.w[0].size();
    if (ny == 0) violations.push_back("W row 0 is empty");
    for (std::size_t x = 0; x < nx; ++x) {
        const auto& row = model.w[x];
        if (row.size() != ny) {
            violations.push_back("W row " + std::to_string(x) + " has " +
                                 std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(ny));
            continue;
        }
        double sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            if (!(row[y] >= 0.0)) {
                violations.push_back("W(" + std::to_string(y) + "|" + std::to_string(x) +
                                     ") = " + fmt(row[y]) + " is negative");
            }
            sum += row[y];
        }
        if (std::abs(sum - 1.0) > kValidationTol) {
            violations.push_back("row " + std::to_string(x) + " sums to " + fmt(sum));
        }
    }
    if (model.p.size() != nx) {
        violations.push_back("P has " + std::to_string(model.p.size()) + " entries, expected " +
                             std::to_string(nx));
    } else {
        double sum = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            if (!(model.p[x] >= 0.0)) {
                violations.push_back("P(" + std::to_string(x) + ") = " + fmt(model.p[x]) +
                                     " is negative");
            }
            sum += model.p[x];
        }
        if (std::abs(sum - 1.0) > kValidationTol) {
            violations.push_back("input distribution sums to " + fmt(sum));
        }
    }
    if (!model.input_alphabet.empty() && model.input_alphabet.size() != nx) {
        violations.push_back("input alphabet size " + std::to_string(model.input_alphabet.size()) +
                             " does not match W rows " + std::to_string(nx));
    }
    if (!model.output_alphabet.empty() && model.output_alphabet.size() != ny) {
        violations.push_back("output alphabet size " +
                             std::to_string(model.output_alphabet.size()) +
                             " does not match W columns " + std::to_string(ny));
    }
    return violations;
}

std::vector<std::string> validate_decoder(const ChannelModel& model, const DecoderSpec& decoder) {
    std::vector<std::string> violations;
    if (decoder.w_tilde.size() != model.w.size()) {
        violations.push_back("W_tilde has " + std::to_string(decoder.w_tilde.size()) +
                             " rows, expected " + std::to_string(model.w.size()));
        return violations;
    }
    for (std::size_t x = 0; x < decoder.w_tilde.size(); ++x) {
        if (decoder.w_tilde[x].size() != model.num_outputs()) {
            violations.push_back("W_tilde row " + std::to_string(x) + " has " +
                                 std::to_string(decoder.w_tilde[x].size()) +
                                 " entries, expected " + std::to_string(model.num_outputs()));
        }
        for (std::size_t y = 0; y < decoder.w_tilde[x].size(); ++y) {
            if (!(decoder.w_tilde[x][y] >= 0.0)) {
                violations.push_back("W_tilde(" + std::to_string(y) + "|" + std::to_string(x) +
                                     ") = " + fmt(decoder.w_tilde[x][y]) + " is negative");
            }
        }
    }
    if (!(decoder.beta > 0.0)) {
        violations.push_back("beta = " + fmt(decoder.beta) + " is not positive");
    }
    return violations;
}

std::vector<std::string> decoder_warnings(const DecoderSpec& decoder) {
    std::vector<std::string> warnings;
    for (std::size_t x = 0; x < decoder.w_tilde.size(); ++x) {
        double sum = 0.0;
        for (double v : decoder.w_tilde[x]) sum += v;
        if (std::abs(sum - 1.0) > kValidationTol) {
            warnings.push_back("metric row " + std::to_string(x) + " sums to " + fmt(sum) +
                               " (not a probability distribution)");
        }
    }
    return warnings;
}

DecoderSpec matched_decoder(const ChannelModel& model) {
    return DecoderSpec{model.w, kPosInf};
}

bool is_matched(const ChannelModel& model, const DecoderSpec& decoder) {
    return decoder.deterministic() && decoder.w_tilde == model.w;
}

ChannelModel make_bsc(double crossover, double p0) {
    ChannelModel model;
    model.input_alphabet = {"0", "1"};
    model.output_alphabet = {"0", "1"};
    model.w = {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}};
    model.p = {p0, 1.0 - p0};
    return model;
}

}  // namespace trcexp
