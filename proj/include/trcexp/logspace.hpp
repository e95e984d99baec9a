#ifndef TRCEXP_LOGSPACE_HPP
#define TRCEXP_LOGSPACE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace trcexp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Natural logarithm of a nonnegative quantity; -inf encodes log(0).
// Combinators are written so that two valid operands never produce NaN.
struct LogValue {
    double v = kNegInf;

    static LogValue from_linear(double x) {
        if (x < 0.0) throw std::domain_error("LogValue: negative linear value");
        return LogValue{x == 0.0 ? kNegInf : std::log(x)};
    }
    static LogValue from_log(double l) { return LogValue{l}; }

    double log() const { return v; }
    double linear() const { return std::exp(v); }
    bool is_zero() const { return v == kNegInf; }

    // product of the underlying quantities
    LogValue operator*(LogValue o) const {
        if (is_zero() || o.is_zero()) return LogValue{kNegInf};
        return LogValue{v + o.v};
    }
    // power with a finite exponent; c == 0 gives the empty product
    LogValue pow(double c) const {
        if (c == 0.0) return LogValue{0.0};
        return LogValue{c * v};
    }
};

// c * l with the convention 0 * (+-inf) = 0, used for exponents that switch
// whole factors off.
inline double mulexp(double c, double l) {
    if (c == 0.0) return 0.0;
    return c * l;
}

// ln sum_i exp(terms[i]), max-shifted. All-(-inf) input returns -inf; any
// +inf term dominates. Empty input is a caller error.
inline double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) throw std::invalid_argument("log_sum_exp: empty reduction");
    double m = kNegInf;
    for (double t : terms) {
        if (t > m) m = t;
    }
    if (m == kNegInf) return kNegInf;
    if (m == kPosInf) return kPosInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

inline double log_sum_exp(std::initializer_list<double> terms) {
    return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

inline double log_sum_exp(const std::vector<LogValue>& terms) {
    std::vector<double> raw(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) raw[i] = terms[i].v;
    return log_sum_exp(std::span<const double>(raw));
}

// Streaming variant for hot loops that do not want to materialize a vector.
class LogSumAccumulator {
  public:
    void add(double term) { terms_.push_back(term); }
    bool empty() const { return terms_.empty(); }
    double result() const { return log_sum_exp(std::span<const double>(terms_)); }

  private:
    std::vector<double> terms_;
};

}  // namespace trcexp

#endif
