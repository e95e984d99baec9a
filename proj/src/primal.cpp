#include "trcexp/primal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "trcexp/kernels.hpp"
#include "trcexp/logspace.hpp"
#include "trcexp/scalar_opt.hpp"

namespace trcexp {

std::vector<double> JointXXPrime::marginal_x() const {
    std::vector<double> m(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) m[x] += (*this)(x, xp);
    }
    return m;
}

std::vector<double> JointXXPrime::marginal_xp() const {
    std::vector<double> m(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) m[xp] += (*this)(x, xp);
    }
    return m;
}

std::vector<std::string> JointXXPrime::validate() const {
    std::vector<std::string> violations;
    if (q.size() != nx * nx) {
        violations.push_back("joint has " + std::to_string(q.size()) + " entries, expected " +
                             std::to_string(nx * nx));
        return violations;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] >= 0.0)) violations.push_back("entry " + std::to_string(i) + " is negative");
        sum += q[i];
    }
    if (std::abs(sum - 1.0) > kValidationTol) {
        violations.push_back("joint sums to " + std::to_string(sum));
    }
    return violations;
}

namespace {

// iterate over all integer compositions of `total` into `parts` slots
template <typename Fn>
void for_each_composition(int total, int parts, Fn&& fn) {
    std::vector<int> counts(parts, 0);
    std::function<void(int, int)> rec = [&](int slot, int remaining) {
        if (slot == parts - 1) {
            counts[slot] = remaining;
            fn(counts);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            counts[slot] = k;
            rec(slot + 1, remaining - k);
        }
    };
    rec(0, total);
}

double safe_log(double v) { return v == 0.0 ? kNegInf : std::log(v); }

// lambda-dual of alpha normalized by beta:
//   inf_{u > 0} [ sum_y q_y(y) * u A(y, u) + u R ]
// u A(y,u) is the collective factor log on the metric, convex in u, so the
// objective is convex; scanned on a log grid and golden-refined.
double alpha_bar(const ChannelModel& model, const Matrix& metric, std::span<const double> q_y,
                 double rate) {
    auto psi = [&](double u) {
        double v = u * rate;
        for (std::size_t y = 0; y < q_y.size(); ++y) {
            if (q_y[y] == 0.0) continue;
            v += q_y[y] * collective_factor_log(model, metric, y, u);
        }
        return v;
    };
    // u -> 0 endpoint: best single-letter score; u -> inf only matters at R=0
    double best = 0.0;
    for (std::size_t y = 0; y < q_y.size(); ++y) {
        if (q_y[y] == 0.0) continue;
        best += q_y[y] * collective_factor_log(model, metric, y, 0.0);
    }
    if (rate == 0.0) {
        double tail = 0.0;
        for (std::size_t y = 0; y < q_y.size(); ++y) {
            if (q_y[y] == 0.0) continue;
            tail += q_y[y] * collective_factor_log(model, metric, y, kPosInf);
            if (tail == kNegInf) break;
        }
        best = std::min(best, tail);
    }
    auto grid = logspace(1e-4, 1e4, 160);
    auto scanned = grid_then_golden_min(psi, grid, 1e-12);
    return std::min(best, scanned.value);
}

struct CellCandidate {
    std::vector<int> counts;  // conditional over y, multiples of 1/resolution
    double kl = 0.0;          // KL(t || W(.|x)), +inf when off the support
    double la = 0.0;          // sum_y t(y) ln Wt(y|x)
    double lb = 0.0;          // sum_y t(y) ln Wt(y|x')
};

struct Cell {
    std::size_t x = 0;
    std::size_t xp = 0;
    double weight = 0.0;  // Q_XX'(x, x')
    int weight_int = 0;   // resolution * weight
    std::vector<CellCandidate> candidates;  // ascending by kl, +inf excluded
    double min_kl = kPosInf;
    double max_lb = kNegInf;  // over candidates, for completion upper bounds
    double min_la = kPosInf;  // over candidates, for completion lower bounds
};

// memoized alpha_bar over the integer Q_Y lattice (entries sum to resolution^2);
// binary outputs use a flat array since qy[0] determines the point
class AlphaTable {
  public:
    AlphaTable(const ChannelModel& model, const Matrix& metric, double rate, int denom)
        : model_(model), metric_(metric), rate_(rate), denom_(denom) {
        if (model.num_outputs() == 2) {
            flat_.assign(denom + 1, std::numeric_limits<double>::quiet_NaN());
        }
    }

    double at(const std::vector<int>& qy_counts) {
        if (!flat_.empty()) {
            double& slot = flat_[qy_counts[0]];
            if (std::isnan(slot)) slot = compute(qy_counts);
            return slot;
        }
        std::uint64_t key = 0;
        for (int c : qy_counts) key = key * static_cast<std::uint64_t>(denom_ + 1) + c;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double v = compute(qy_counts);
        cache_.emplace(key, v);
        return v;
    }

  private:
    double compute(const std::vector<int>& qy_counts) const {
        std::vector<double> qy(qy_counts.size());
        for (std::size_t y = 0; y < qy.size(); ++y) {
            qy[y] = static_cast<double>(qy_counts[y]) / denom_;
        }
        return alpha_bar(model_, metric_, qy, rate_);
    }

    const ChannelModel& model_;
    const Matrix& metric_;
    double rate_;
    int denom_;
    std::vector<double> flat_;
    std::unordered_map<std::uint64_t, double> cache_;
};

// depth-first minimization over the conditional tensor. Pruning combines a
// suffix lower bound on the remaining weighted KL mass with a lower bound on
// the bracket term built from completion bounds for the two decoder scores
// and the simplex-vertex minimum of alpha_bar (alpha_bar is concave in Q_Y,
// so its minimum over the lattice sits at a vertex).
class GammaSearch {
  public:
    GammaSearch(std::vector<Cell> cells, AlphaTable& alpha, double beta, std::size_t ny,
                double alpha_min)
        : cells_(std::move(cells)), alpha_(alpha), beta_(beta), alpha_min_(alpha_min) {
        const std::size_t n = cells_.size();
        suffix_min_kl_.assign(n + 1, 0.0);
        suffix_max_gb_.assign(n + 1, 0.0);
        suffix_min_ga_.assign(n + 1, 0.0);
        for (std::size_t i = n; i-- > 0;) {
            suffix_min_kl_[i] = suffix_min_kl_[i + 1] + cells_[i].weight * cells_[i].min_kl;
            suffix_max_gb_[i] =
                suffix_max_gb_[i + 1] +
                (cells_[i].max_lb == kNegInf ? kNegInf : cells_[i].weight * cells_[i].max_lb);
            suffix_min_ga_[i] =
                suffix_min_ga_[i + 1] +
                (cells_[i].min_la == kNegInf ? kNegInf : cells_[i].weight * cells_[i].min_la);
        }
        qy_.assign(ny, 0);
    }

    double run() {
        best_ = kPosInf;
        descend(0, 0.0, 0.0, 0.0);
        return best_;
    }

  private:
    // lower bound on the bracket (in alpha_bar units) for any completion with
    // score bounds ga >= ga_lb and gb <= gb_ub
    double bracket_floor(double ga_lb, double gb_ub) const {
        const double need = std::max(ga_lb, alpha_min_);
        if (need == kNegInf) return 0.0;
        if (gb_ub == kNegInf) return kPosInf;
        return std::max(0.0, need - gb_ub);
    }

    void descend(std::size_t i, double kl_acc, double ga, double gb) {
        if (kl_acc + suffix_min_kl_[i] >= best_) return;
        if (i == cells_.size()) {
            finish(kl_acc, ga, gb);
            return;
        }
        const Cell& cell = cells_[i];
        for (const auto& cand : cell.candidates) {
            const double kl_next = kl_acc + cell.weight * cand.kl;
            // ascending by kl: everything after is at least as costly
            if (kl_next + suffix_min_kl_[i + 1] >= best_) break;
            const double ga_next = ga + (cand.la == kNegInf ? kNegInf : cell.weight * cand.la);
            const double gb_next = gb + (cand.lb == kNegInf ? kNegInf : cell.weight * cand.lb);
            const double floor = bracket_floor(ga_next + suffix_min_ga_[i + 1],
                                               gb_next + suffix_max_gb_[i + 1]);
            if (std::isinf(beta_)) {
                if (floor > 1e-12) continue;  // no feasible completion
            } else if (kl_next + suffix_min_kl_[i + 1] + beta_ * floor >= best_) {
                continue;
            }
            for (std::size_t y = 0; y < qy_.size(); ++y) {
                qy_[y] += cell.weight_int * cand.counts[y];
            }
            descend(i + 1, kl_next, ga_next, gb_next);
            for (std::size_t y = 0; y < qy_.size(); ++y) {
                qy_[y] -= cell.weight_int * cand.counts[y];
            }
        }
    }

    void finish(double kl_acc, double ga, double gb) {
        const double ab = alpha_.at(qy_);
        double total;
        if (std::isinf(beta_)) {
            // deterministic decoder: the positive part becomes a hard
            // constraint max{E ln Wt(Y|X), alpha_bar} <= E ln Wt(Y|X')
            const double need = std::max(ga, ab);
            if (!(gb >= need - 1e-12)) return;
            total = kl_acc;
        } else {
            const double need = std::max(beta_ * ga, beta_ * ab);
            double bracket;
            if (gb == kNegInf) {
                bracket = need == kNegInf ? 0.0 : kPosInf;
            } else {
                bracket = std::max(0.0, need - beta_ * gb);
            }
            if (bracket == kPosInf) return;
            total = kl_acc + bracket;
        }
        if (total < best_) best_ = total;
    }

    std::vector<Cell> cells_;
    AlphaTable& alpha_;
    double beta_;
    double alpha_min_;
    std::vector<int> qy_;
    std::vector<double> suffix_min_kl_;
    std::vector<double> suffix_max_gb_;
    std::vector<double> suffix_min_ga_;
    double best_ = kPosInf;
};

// candidate conditionals for a cell (x, x'): one entry per grid point with a
// finite KL against W(.|x)
std::vector<CellCandidate> cell_candidates(const ChannelModel& model, const DecoderSpec& decoder,
                                           std::size_t x, std::size_t xp, int resolution) {
    const std::size_t ny = model.num_outputs();
    std::vector<CellCandidate> out;
    for_each_composition(resolution, static_cast<int>(ny), [&](const std::vector<int>& counts) {
        CellCandidate cand;
        cand.counts = counts;
        cand.la = 0.0;
        cand.lb = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            if (counts[y] == 0) continue;
            const double t = static_cast<double>(counts[y]) / resolution;
            if (model.w[x][y] == 0.0) {
                cand.kl = kPosInf;
                break;
            }
            cand.kl += t * std::log(t / model.w[x][y]);
            const double la_term = safe_log(decoder.w_tilde[x][y]);
            const double lb_term = safe_log(decoder.w_tilde[xp][y]);
            cand.la = (cand.la == kNegInf || la_term == kNegInf) ? kNegInf : cand.la + t * la_term;
            cand.lb = (cand.lb == kNegInf || lb_term == kNegInf) ? kNegInf : cand.lb + t * lb_term;
        }
        if (cand.kl < kPosInf) out.push_back(std::move(cand));
    });
    std::sort(out.begin(), out.end(),
              [](const CellCandidate& a, const CellCandidate& b) { return a.kl < b.kl; });
    return out;
}

// exact minimum of alpha_bar over the Q_Y simplex: concave, so at a vertex
double alpha_vertex_min(AlphaTable& alpha, std::size_t ny, int denom) {
    double lo = kPosInf;
    for (std::size_t y = 0; y < ny; ++y) {
        std::vector<int> vertex(ny, 0);
        vertex[y] = denom;
        lo = std::min(lo, alpha.at(vertex));
    }
    return lo;
}

double gamma_impl(const ChannelModel& model, const DecoderSpec& decoder, const JointXXPrime& q,
                  AlphaTable& alpha, double alpha_min,
                  const std::vector<std::vector<CellCandidate>>& candidate_table,
                  const std::vector<int>& q_counts) {
    const std::size_t nx = model.num_inputs();
    std::vector<Cell> cells;
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            const double w = q(x, xp);
            if (w == 0.0) continue;  // zero-mass cells touch nothing
            Cell cell;
            cell.x = x;
            cell.xp = xp;
            cell.weight = w;
            cell.weight_int = q_counts[x * nx + xp];
            cell.candidates = candidate_table[x * nx + xp];
            if (cell.candidates.empty()) return kPosInf;
            cell.min_kl = cell.candidates.front().kl;
            for (const auto& cand : cell.candidates) {
                cell.max_lb = std::max(cell.max_lb, cand.lb);
                cell.min_la = std::min(cell.min_la, cand.la);
            }
            cells.push_back(std::move(cell));
        }
    }
    // heavier cells first: their KL spread prunes best
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.x * 100 + a.xp < b.x * 100 + b.xp;
    });
    GammaSearch search(std::move(cells), alpha, decoder.beta, model.num_outputs(), alpha_min);
    return search.run();
}

void check_alphabets(const ChannelModel& model, const GridSpec& grid) {
    if (model.num_inputs() > grid.max_alphabet || model.num_outputs() > grid.max_alphabet) {
        throw std::invalid_argument("alphabet exceeds the grid oracle cap of " +
                                    std::to_string(grid.max_alphabet) +
                                    " (combinatorial blowup)");
    }
}

}  // namespace

double alpha_dual(const ChannelModel& model, const DecoderSpec& decoder,
                  std::span<const double> q_y, double rate) {
    if (rate < 0.0) throw std::domain_error("alpha_dual: rate must be >= 0");
    if (q_y.size() != model.num_outputs()) {
        throw std::invalid_argument("alpha_dual: q_y dimension mismatch");
    }
    const double bar = alpha_bar(model, decoder.w_tilde, q_y, rate);
    return decoder.deterministic() ? bar : decoder.beta * bar;
}

double f_q(const JointXXPrime& q, std::span<const double> p) {
    const auto qx = q.marginal_x();
    const double d = kl_divergence(qx, p);
    Matrix joint(q.nx, std::vector<double>(q.nx));
    for (std::size_t x = 0; x < q.nx; ++x) {
        for (std::size_t xp = 0; xp < q.nx; ++xp) joint[x][xp] = q(x, xp);
    }
    const double j = j_divergence(joint, p);
    return d + std::max(d, j);
}

double gamma_value(const ChannelModel& model, const DecoderSpec& decoder, const JointXXPrime& q,
                   double rate, const GridSpec& grid) {
    check_alphabets(model, grid);
    const std::size_t nx = model.num_inputs();
    const int denom = grid.resolution * grid.resolution;
    AlphaTable alpha(model, decoder.w_tilde, rate, denom);
    const double alpha_min = alpha_vertex_min(alpha, model.num_outputs(), denom);
    std::vector<std::vector<CellCandidate>> table(nx * nx);
    std::vector<int> q_counts(nx * nx);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            table[x * nx + xp] = cell_candidates(model, decoder, x, xp, grid.resolution);
            // nearest integer bookkeeping for the Q_Y lattice
            q_counts[x * nx + xp] =
                static_cast<int>(std::lround(q(x, xp) * grid.resolution));
        }
    }
    return gamma_impl(model, decoder, q, alpha, alpha_min, table, q_counts);
}

PrimalResult primal_bound(const ChannelModel& model, const DecoderSpec& decoder, double rate,
                          const GridSpec& grid, int threads) {
    if (rate < 0.0) throw std::domain_error("primal_bound: rate must be >= 0");
    check_alphabets(model, grid);
    const std::size_t nx = model.num_inputs();
    const int res = grid.resolution;
    const std::size_t stride = nx * nx;

    // enumerate the joint Q_XX' lattice once, flattened
    std::vector<int> joints;
    std::size_t joint_count = 0;
    for_each_composition(res, static_cast<int>(stride), [&](const std::vector<int>& c) {
        joints.insert(joints.end(), c.begin(), c.end());
        ++joint_count;
    });

    std::vector<std::vector<CellCandidate>> candidate_table(nx * nx);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t xp = 0; xp < nx; ++xp) {
            candidate_table[x * nx + xp] = cell_candidates(model, decoder, x, xp, res);
        }
    }

    const double slack = grid.delta() * std::log(static_cast<double>(nx));

    struct Best {
        double value = kPosInf;
        std::size_t index = 0;
        double value_strict = kPosInf;
        std::size_t count = 0;
        std::size_t count_strict = 0;
    };

    auto scan = [&](std::size_t begin, std::size_t end) {
        Best local;
        AlphaTable alpha(model, decoder.w_tilde, rate, res * res);
        const double alpha_min = alpha_vertex_min(alpha, model.num_outputs(), res * res);
        std::vector<int> counts(stride);
        for (std::size_t i = begin; i < end; ++i) {
            std::copy_n(joints.begin() + i * stride, stride, counts.begin());
            JointXXPrime q{nx, std::vector<double>(stride)};
            for (std::size_t k = 0; k < stride; ++k) {
                q.q[k] = static_cast<double>(counts[k]) / res;
            }
            const auto qx = q.marginal_x();
            const double d = kl_divergence(qx, model.p);
            if (std::isinf(d)) continue;
            Matrix jm(nx, std::vector<double>(nx));
            for (std::size_t x = 0; x < nx; ++x) {
                for (std::size_t xp = 0; xp < nx; ++xp) jm[x][xp] = q(x, xp);
            }
            const double j = j_divergence(jm, model.p);
            if (std::isinf(j)) continue;
            const double f = d + std::max(d, j);
            const bool strict = f <= 2.0 * rate;
            const bool slacked = f <= 2.0 * rate + slack;
            if (!slacked) continue;
            local.count += 1;
            local.count_strict += strict ? 1 : 0;
            const double g =
                gamma_impl(model, decoder, q, alpha, alpha_min, candidate_table, counts);
            const double objective = g + j + d - rate;
            if (objective < local.value) {
                local.value = objective;
                local.index = i;
            }
            if (strict && objective < local.value_strict) local.value_strict = objective;
        }
        return local;
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, 16);

    std::vector<Best> partials;
    if (workers == 1 || joint_count < 64) {
        partials.push_back(scan(0, joint_count));
    } else {
        std::vector<std::future<Best>> futures;
        const std::size_t chunk = (joint_count + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(joint_count, begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, scan, begin, end));
        }
        for (auto& f : futures) partials.push_back(f.get());
    }

    // deterministic reduction: value first, grid index breaks ties
    Best best;
    for (const auto& part : partials) {
        best.count += part.count;
        best.count_strict += part.count_strict;
        if (part.value < best.value ||
            (part.value == best.value && part.count > 0 && part.index < best.index)) {
            best.value = part.value;
            best.index = part.index;
        }
        best.value_strict = std::min(best.value_strict, part.value_strict);
    }

    PrimalResult result;
    result.value = best.value;
    result.value_strict = best.value_strict;
    result.feasible_count = best.count;
    result.feasible_count_strict = best.count_strict;
    result.argmin = JointXXPrime{nx, std::vector<double>(stride, 0.0)};
    if (best.count > 0) {
        for (std::size_t k = 0; k < stride; ++k) {
            result.argmin.q[k] = static_cast<double>(joints[best.index * stride + k]) / res;
        }
    } else {
        result.warnings.push_back("empty feasible grid at rate " + std::to_string(rate) +
                                  "; +inf sentinel returned");
    }
    return result;
}

}  // namespace trcexp
