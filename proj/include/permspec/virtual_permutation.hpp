#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/laws.hpp"
#include "permspec/rng.hpp"

namespace permspec {

// The sequence of insertion choices (m_1..m_N), m_j in {1..j}.
struct CrpTrace {
    std::vector<std::uint32_t> choices;

    std::uint32_t size() const { return static_cast<std::uint32_t>(choices.size()); }

    void validate() const {
        for (std::size_t j = 0; j < choices.size(); ++j) {
            if (choices[j] < 1 || choices[j] > j + 1)
                throw parameter_error("CrpTrace: m_j out of range at j=" + std::to_string(j + 1));
        }
    }
};

// A permutation as ordered cycles; cycles listed by increasing smallest
// element, each cycle starting at its smallest element. Within a cycle each
// element maps to the next one (wrapping).
struct CycleDecomposition {
    std::uint32_t n = 0;
    std::vector<std::vector<std::uint32_t>> cycles;

    std::uint32_t cycle_count() const { return static_cast<std::uint32_t>(cycles.size()); }

    // successor array: sigma[i-1] = image of i
    std::vector<std::uint32_t> successors() const {
        std::vector<std::uint32_t> succ(n, 0);
        for (const auto& c : cycles) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                succ[c[i] - 1] = c[(i + 1) % c.size()];
            }
        }
        return succ;
    }

    // Canonical text form, e.g. "(1 3 7 4 5)(2 8)(6)".
    std::string to_string() const {
        std::string out;
        for (const auto& c : cycles) {
            out += '(';
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (i) out += ' ';
                out += std::to_string(c[i]);
            }
            out += ')';
        }
        return out;
    }
};

namespace detail {

// Rebuild canonical cycles from a successor array.
inline CycleDecomposition cycles_from_successors(const std::vector<std::uint32_t>& succ) {
    const std::uint32_t n = static_cast<std::uint32_t>(succ.size());
    CycleDecomposition out;
    out.n = n;
    std::vector<bool> seen(n + 1, false);
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (seen[i]) continue;
        std::vector<std::uint32_t> cycle;
        std::uint32_t cur = i;
        while (!seen[cur]) {
            seen[cur] = true;
            cycle.push_back(cur);
            cur = succ[cur - 1];
        }
        out.cycles.push_back(std::move(cycle));
    }
    return out;
}

// One CRP step: draw m_j for a given j. One uniform per step.
inline std::uint32_t crp_choice(double theta, std::uint32_t j, RandomStream& stream) {
    if (j == 1) return 1;
    const double x = stream.u01() * (theta + j - 1.0);
    if (x < theta) return j;
    std::uint32_t k = 1 + static_cast<std::uint32_t>(x - theta);
    if (k > j - 1) k = j - 1;
    return k;
}

}  // namespace detail

inline CrpTrace sample_crp_prefix(double theta, std::uint32_t N, RandomStream& stream) {
    if (!(theta > 0)) throw parameter_error("sample_crp_prefix: theta must be > 0");
    if (N == 0) throw parameter_error("sample_crp_prefix: N must be >= 1");
    CrpTrace t;
    t.choices.resize(N);
    for (std::uint32_t j = 1; j <= N; ++j) t.choices[j - 1] = detail::crp_choice(theta, j, stream);
    return t;
}

// Build sigma_N by the insertion rules: m_j = j adds the fixed point j,
// otherwise j is inserted just before m_j in the cycle containing m_j.
inline CycleDecomposition crp_to_permutation(const CrpTrace& trace) {
    trace.validate();
    const std::uint32_t n = trace.size();
    std::vector<std::uint32_t> succ(n + 1, 0), pred(n + 1, 0);
    for (std::uint32_t j = 1; j <= n; ++j) {
        const std::uint32_t m = trace.choices[j - 1];
        if (m == j) {
            succ[j] = j;
            pred[j] = j;
        } else {
            const std::uint32_t p = pred[m];
            succ[p] = j;
            succ[j] = m;
            pred[m] = j;
            pred[j] = p;
        }
    }
    std::vector<std::uint32_t> s(succ.begin() + 1, succ.end());
    return detail::cycles_from_successors(s);
}

// pi_{N1,N2}: remove the elements strictly larger than N2.
inline CycleDecomposition project(const CycleDecomposition& sigma, std::uint32_t N2) {
    if (N2 > sigma.n) throw parameter_error("project: N2 must be <= N");
    CycleDecomposition out;
    out.n = N2;
    for (const auto& c : sigma.cycles) {
        std::vector<std::uint32_t> kept;
        for (std::uint32_t e : c)
            if (e <= N2) kept.push_back(e);
        if (!kept.empty()) out.cycles.push_back(std::move(kept));
    }
    return out;
}

// theta^(c-1) / ((theta+1)(theta+2)...(theta+N-1))
inline double ewens_probability(const CycleDecomposition& sigma, double theta) {
    if (!(theta > 0)) throw parameter_error("ewens_probability: theta must be > 0");
    double prob = std::pow(theta, static_cast<double>(sigma.cycle_count()) - 1.0);
    for (std::uint32_t j = 1; j < sigma.n; ++j) prob /= (theta + j);
    return prob;
}

struct CycleStatistics {
    std::vector<std::uint32_t> lengths;  // ordered by increasing smallest element
    std::vector<std::uint32_t> counts;   // counts[k] = a_{N,k}, index 0 unused
};

inline CycleStatistics cycle_statistics(const CycleDecomposition& sigma) {
    CycleStatistics st;
    st.counts.assign(sigma.n + 1, 0);
    for (const auto& c : sigma.cycles) {
        st.lengths.push_back(static_cast<std::uint32_t>(c.size()));
        st.counts[c.size()] += 1;
    }
    return st;
}

// Feller coupling: independent xi_r ~ Bernoulli(theta/(theta+r-1)), xi_1 = 1.
// b[k] counts spacings of size k between consecutive ones in (xi_1..xi_N, 1);
// c[k] is the same without the appended final one. k0 is the spacing from the
// last one to position N+1, the unique k with b[k] = c[k] + 1.
struct FellerSequence {
    std::vector<std::uint8_t> xi;       // xi[r-1], r = 1..N
    std::vector<std::uint32_t> b;       // b[k], index 0 unused, size N+1
    std::vector<std::uint32_t> c;       // c[k]
    std::uint32_t k0 = 0;
};

inline FellerSequence sample_feller(double theta, std::uint32_t N, RandomStream& stream) {
    if (!(theta > 0)) throw parameter_error("sample_feller: theta must be > 0");
    if (N == 0) throw parameter_error("sample_feller: N must be >= 1");
    FellerSequence f;
    f.xi.resize(N);
    f.b.assign(N + 1, 0);
    f.c.assign(N + 1, 0);
    f.xi[0] = 1;
    for (std::uint32_t r = 2; r <= N; ++r)
        f.xi[r - 1] = stream.u01() * (theta + r - 1.0) < theta ? 1 : 0;
    std::uint32_t last = 1;
    for (std::uint32_t r = 2; r <= N; ++r) {
        if (f.xi[r - 1]) {
            f.b[r - last] += 1;
            f.c[r - last] += 1;
            last = r;
        }
    }
    f.k0 = N + 1 - last;
    f.b[f.k0] += 1;
    return f;
}

namespace detail {

// Shared CRP insertion walk. Calls on_insert(j, cycle_index, created) for
// each element; cycle indices are assigned in creation order, which is the
// increasing-smallest-element order.
template <typename OnInsert>
void crp_visit(double theta, std::uint32_t from_j, std::uint32_t to_N, RandomStream& stream,
               std::vector<std::uint32_t>& cycle_of, std::uint32_t& num_cycles, OnInsert&& on_insert) {
    cycle_of.resize(to_N);
    for (std::uint32_t j = from_j; j <= to_N; ++j) {
        const std::uint32_t m = crp_choice(theta, j, stream);
        if (m == j) {
            cycle_of[j - 1] = num_cycles;
            on_insert(j, num_cycles, true);
            ++num_cycles;
        } else {
            const std::uint32_t c = cycle_of[m - 1];
            cycle_of[j - 1] = c;
            on_insert(j, c, false);
        }
    }
}

}  // namespace detail

// One Ewens(theta) virtual-permutation trajectory, extendable in N, carrying
// the coupled quantities y_{N,m} = l_{N,m}/N, their suprema s_m, and
// checkpointed snapshots. When a law is attached, the per-element draws z_j
// are accumulated into per-cycle products (log-modulus and angle sums), so
// spectra along the trajectory are coupled exactly as the model prescribes.
class VirtualTrajectory {
public:
    struct Checkpoint {
        std::uint64_t n;
        std::vector<double> y;
    };

    explicit VirtualTrajectory(double theta, std::optional<DistributionSpec> law = std::nullopt)
        : theta_(theta), law_(std::move(law)) {
        if (!(theta > 0)) throw parameter_error("VirtualTrajectory: theta must be > 0");
        if (law_) law_->validate();
    }

    std::uint32_t size() const { return n_; }
    double theta() const { return theta_; }

    void extend(std::uint32_t to_N, RandomStream& stream) {
        if (to_N < n_) throw parameter_error("VirtualTrajectory::extend: cannot shrink");
        if (to_N == n_) return;
        choices_.reserve(to_N);
        detail::crp_visit(theta_, n_ + 1, to_N, stream, cycle_of_, num_cycles_,
                          [&](std::uint32_t j, std::uint32_t c, bool created) {
                              if (created) {
                                  lengths_.push_back(0);
                                  sup_ratio_.push_back(0.0);
                                  if (law_) {
                                      cyc_log_.push_back(0.0);
                                      cyc_ang_.push_back(0.0);
                                  }
                              }
                              lengths_[c] += 1;
                              const double ratio = static_cast<double>(lengths_[c]) / j;
                              if (ratio > sup_ratio_[c]) sup_ratio_[c] = ratio;
                              if (law_) {
                                  const ZLogDraw z = sample_z_log(*law_, stream);
                                  cyc_log_[c] += z.log_modulus;
                                  cyc_ang_[c] += z.angle;
                              }
                          });
        n_ = to_N;
    }

    const std::vector<std::uint64_t>& cycle_lengths() const { return lengths_; }
    const std::vector<double>& sup_ratio() const { return sup_ratio_; }

    std::vector<double> y_current() const {
        std::vector<double> y(lengths_.size());
        for (std::size_t m = 0; m < lengths_.size(); ++m)
            y[m] = static_cast<double>(lengths_[m]) / n_;
        return y;
    }

    void checkpoint() { checkpoints_.push_back({n_, y_current()}); }
    const std::vector<Checkpoint>& checkpoints() const { return checkpoints_; }

    // Limit estimate: the value at the largest computed N.
    std::vector<double> y_limit() const { return y_current(); }

    // Per-cycle product data (law must be attached).
    double cycle_log_modulus(std::size_t m) const { return cyc_log_.at(m); }
    double cycle_angle(std::size_t m) const {
        double a = cyc_ang_.at(m);
        a -= std::floor(a);
        return a;
    }

    bool has_law() const { return law_.has_value(); }

private:
    double theta_;
    std::optional<DistributionSpec> law_;
    std::uint32_t n_ = 0;
    std::uint32_t num_cycles_ = 0;
    std::vector<std::uint32_t> choices_;
    std::vector<std::uint32_t> cycle_of_;
    std::vector<std::uint64_t> lengths_;
    std::vector<double> sup_ratio_;
    std::vector<double> cyc_log_, cyc_ang_;
    std::vector<Checkpoint> checkpoints_;
};

// Reusable cycle-length sampler for Monte Carlo loops: one CRP pass per call,
// buffers reused across calls.
class CrpCycleSampler {
public:
    CrpCycleSampler(double theta, std::uint32_t N) : theta_(theta), n_(N) {
        if (!(theta > 0)) throw parameter_error("CrpCycleSampler: theta must be > 0");
        if (N == 0) throw parameter_error("CrpCycleSampler: N must be >= 1");
    }

    const std::vector<std::uint32_t>& sample_lengths(RandomStream& stream) {
        lengths_.clear();
        std::uint32_t num_cycles = 0;
        detail::crp_visit(theta_, 1, n_, stream, cycle_of_, num_cycles,
                          [&](std::uint32_t, std::uint32_t c, bool created) {
                              if (created) lengths_.push_back(0);
                              lengths_[c] += 1;
                          });
        return lengths_;
    }

    std::uint32_t n() const { return n_; }
    double theta() const { return theta_; }

private:
    double theta_;
    std::uint32_t n_;
    std::vector<std::uint32_t> cycle_of_;
    std::vector<std::uint32_t> lengths_;
};

// Circle construction: PD(theta) circle perimeters, i.i.d. uniform points on
// the disjoint union, sigma_N read off by counterclockwise succession.
// theta = 0 uses the single unit circle, giving one N-cycle.
inline CycleDecomposition sample_circle_construction(double theta, std::uint32_t N,
                                                     RandomStream& stream, double tol = 1e-12) {
    if (!(theta >= 0)) throw parameter_error("sample_circle_construction: theta must be >= 0");
    if (N == 0) throw parameter_error("sample_circle_construction: N must be >= 1");
    std::vector<double> lambda;
    if (theta == 0.0) {
        lambda = {1.0};
    } else {
        lambda = sample_poisson_dirichlet(theta, stream, tol).weights;
    }
    std::vector<double> cum(lambda.size());
    std::partial_sum(lambda.begin(), lambda.end(), cum.begin());

    struct Point {
        double pos;
        std::uint32_t idx;
    };
    std::vector<std::vector<Point>> circles(lambda.size());
    std::uint32_t extra = 0;  // points falling in the truncated tail: own circles
    std::vector<std::vector<Point>> tail_circles;
    for (std::uint32_t k = 1; k <= N; ++k) {
        const double u = stream.u01();
        const double pos = stream.u01();
        auto it = std::lower_bound(cum.begin(), cum.end(), u);
        if (it == cum.end()) {
            tail_circles.push_back({{pos, k}});
            ++extra;
        } else {
            circles[static_cast<std::size_t>(it - cum.begin())].push_back({pos, k});
        }
    }
    (void)extra;
    std::vector<std::uint32_t> succ(N, 0);
    auto close_circle = [&](std::vector<Point>& pts) {
        if (pts.empty()) return;
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.pos < b.pos; });
        for (std::size_t i = 0; i < pts.size(); ++i)
            succ[pts[i].idx - 1] = pts[(i + 1) % pts.size()].idx;
    };
    for (auto& pts : circles) close_circle(pts);
    for (auto& pts : tail_circles) close_circle(pts);
    return detail::cycles_from_successors(succ);
}

}  // namespace permspec
