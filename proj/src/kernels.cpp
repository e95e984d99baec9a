#include "trcexp/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "trcexp/logspace.hpp"

namespace trcexp {

double a_value(const ChannelModel& model, const Matrix& metric, std::size_t y, double r) {
    if (!(r > 0.0)) throw std::domain_error("a_value: r must be > 0");
    if (metric.size() != model.num_inputs()) {
        throw std::invalid_argument("a_value: metric shape mismatch");
    }
    LogSumAccumulator acc;
    for (std::size_t x = 0; x < model.num_inputs(); ++x) {
        const double px = model.p[x];
        if (px == 0.0) continue;
        const double m = metric[x][y];
        // zero metric entries contribute 0 to the sum
        acc.add(m == 0.0 ? kNegInf : std::log(px) + std::log(m) / r);
    }
    return acc.result();
}

double collective_factor_log(const ChannelModel& model, const Matrix& metric, std::size_t y,
                             double lambda) {
    if (lambda < 0.0) throw std::domain_error("collective_factor_log: lambda must be >= 0");
    if (lambda == 0.0) {
        double best = kNegInf;
        for (std::size_t x = 0; x < model.num_inputs(); ++x) {
            if (model.p[x] == 0.0) continue;
            const double m = metric[x][y];
            const double lm = m == 0.0 ? kNegInf : std::log(m);
            if (lm > best) best = lm;
        }
        return best;
    }
    if (std::isinf(lambda)) {
        double mean = 0.0;
        for (std::size_t x = 0; x < model.num_inputs(); ++x) {
            const double px = model.p[x];
            if (px == 0.0) continue;
            const double m = metric[x][y];
            if (m == 0.0) return kNegInf;
            mean += px * std::log(m);
        }
        return mean;
    }
    return lambda * a_value(model, metric, y, lambda);
}

double kl_divergence(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size()) throw std::invalid_argument("kl_divergence: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        if (p[i] == 0.0) return kPosInf;
        sum += q[i] * std::log(q[i] / p[i]);
    }
    return sum;
}

double weighted_conditional_divergence(const Matrix& q_y_given_x, const Matrix& w,
                                       std::span<const double> q_x) {
    if (q_y_given_x.size() != w.size() || q_y_given_x.size() != q_x.size()) {
        throw std::invalid_argument("weighted_conditional_divergence: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t x = 0; x < q_x.size(); ++x) {
        if (q_x[x] == 0.0) continue;
        if (q_y_given_x[x].size() != w[x].size()) {
            throw std::invalid_argument("weighted_conditional_divergence: row size mismatch");
        }
        sum += q_x[x] * kl_divergence(q_y_given_x[x], w[x]);
        if (std::isinf(sum)) return kPosInf;
    }
    return sum;
}

double j_divergence(const Matrix& q_joint, std::span<const double> p) {
    const std::size_t nx = q_joint.size();
    if (nx != p.size()) throw std::invalid_argument("j_divergence: dimension mismatch");
    std::vector<double> q_x(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        if (q_joint[x].size() != nx) throw std::invalid_argument("j_divergence: not square");
        for (double v : q_joint[x]) q_x[x] += v;
    }
    // E_Q ln[ Q(x,x') / (Q_X(x) P(x')) ]
    double sum = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            const double qv = q_joint[x][xp];
            if (qv == 0.0) continue;
            if (p[xp] == 0.0) return kPosInf;
            sum += qv * std::log(qv / (q_x[x] * p[xp]));
        }
    }
    return sum;
}

double tilted_min(std::span<const double> p, std::span<const double> f) {
    if (p.size() != f.size()) throw std::invalid_argument("tilted_min: dimension mismatch");
    LogSumAccumulator acc;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        acc.add(std::log(p[x]) - f[x]);
    }
    return -acc.result();
}

}  // namespace trcexp
