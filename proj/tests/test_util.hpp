#ifndef TRCEXP_TEST_UTIL_HPP
#define TRCEXP_TEST_UTIL_HPP

#include <vector>

#include "trcexp/channel.hpp"
#include "trcexp/simulate.hpp"

namespace trcexp::testutil {

// strictly positive random channel, deterministic across platforms
inline ChannelModel random_channel(detail::SplitMix64& rng, std::size_t nx, std::size_t ny,
                                   bool uniform_p = false) {
    ChannelModel model;
    model.input_alphabet.resize(nx);
    model.output_alphabet.resize(ny);
    for (std::size_t x = 0; x < nx; ++x) model.input_alphabet[x] = std::to_string(x);
    for (std::size_t y = 0; y < ny; ++y) model.output_alphabet[y] = std::to_string(y);
    model.w.assign(nx, std::vector<double>(ny));
    for (std::size_t x = 0; x < nx; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            model.w[x][y] = 0.05 + rng.next_double();
            sum += model.w[x][y];
        }
        for (std::size_t y = 0; y < ny; ++y) model.w[x][y] /= sum;
    }
    if (uniform_p) {
        model.p.assign(nx, 1.0 / static_cast<double>(nx));
    } else {
        model.p.assign(nx, 0.0);
        double sum = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            model.p[x] = 0.05 + rng.next_double();
            sum += model.p[x];
        }
        for (std::size_t x = 0; x < nx; ++x) model.p[x] /= sum;
    }
    return model;
}

inline std::vector<double> random_distribution(detail::SplitMix64& rng, std::size_t n) {
    std::vector<double> p(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = 0.01 + rng.next_double();
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// z-channel: input 0 passes clean, input 1 flips with the given probability
inline ChannelModel make_z_channel(double flip) {
    ChannelModel model;
    model.input_alphabet = {"0", "1"};
    model.output_alphabet = {"0", "1"};
    model.w = {{1.0, 0.0}, {flip, 1.0 - flip}};
    model.p = {0.5, 0.5};
    return model;
}

inline ChannelModel make_noiseless_binary() {
    ChannelModel model;
    model.input_alphabet = {"0", "1"};
    model.output_alphabet = {"0", "1"};
    model.w = {{1.0, 0.0}, {0.0, 1.0}};
    model.p = {0.5, 0.5};
    return model;
}

}  // namespace trcexp::testutil

#endif
