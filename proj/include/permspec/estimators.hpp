#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/laws.hpp"
#include "permspec/special.hpp"
#include "permspec/spectrum.hpp"
#include "permspec/test_functions.hpp"

namespace permspec {

struct TestReport {
    std::string description;
    double statistic = 0.0;
    double threshold = 0.0;
    std::uint64_t n = 0;
    bool passed = false;
};

inline TestReport make_report(std::string description, double statistic, double threshold,
                              std::uint64_t n) {
    TestReport r;
    r.description = std::move(description);
    r.statistic = statistic;
    r.threshold = threshold;
    r.n = n;
    r.passed = statistic <= threshold;
    return r;
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

namespace detail {

inline void check_window_covers(const EigenPointMeasure& m, double a, double b) {
    if (!m.window || m.window->first > a + 1e-12 || m.window->second < b - 1e-12)
        throw parameter_error("estimator window exceeds the sample generation window");
}

}  // namespace detail

// Unbiased mean point count in [a,b] over angle-measure samples.
inline MeanEstimate count_in_window(std::span<const EigenPointMeasure> samples, double a, double b) {
    if (!(a <= b)) throw parameter_error("count_in_window: need a <= b");
    if (samples.empty()) throw parameter_error("count_in_window: no samples");
    double sum = 0.0, sum2 = 0.0;
    for (const auto& m : samples) {
        detail::check_window_covers(m, a, b);
        double c = 0.0;
        for (const auto& atom : m.atoms)
            if (atom.x >= a && atom.x <= b) c += static_cast<double>(atom.mult);
        sum += c;
        sum2 += c * c;
    }
    const double n = static_cast<double>(samples.size());
    MeanEstimate est;
    est.n = samples.size();
    est.mean = sum / n;
    const double var = std::max(0.0, sum2 / n - est.mean * est.mean);
    est.std_error = std::sqrt(var / n);
    return est;
}

// Streaming accumulator equivalent of count_in_window, for sample counts too
// large to keep in memory.
class WindowCountAccumulator {
public:
    WindowCountAccumulator(double a, double b) : a_(a), b_(b) {
        if (!(a <= b)) throw parameter_error("WindowCountAccumulator: need a <= b");
    }
    void add(const EigenPointMeasure& m) {
        detail::check_window_covers(m, a_, b_);
        double c = 0.0;
        for (const auto& atom : m.atoms)
            if (atom.x >= a_ && atom.x <= b_) c += static_cast<double>(atom.mult);
        add_count(c);
    }
    void add_count(double c) {
        sum_ += c;
        sum2_ += c * c;
        ++n_;
    }
    MeanEstimate estimate() const {
        if (n_ == 0) throw parameter_error("WindowCountAccumulator: no samples");
        MeanEstimate est;
        est.n = n_;
        const double n = static_cast<double>(n_);
        est.mean = sum_ / n;
        est.std_error = std::sqrt(std::max(0.0, sum2_ / n - est.mean * est.mean) / n);
        return est;
    }

private:
    double a_, b_;
    double sum_ = 0.0, sum2_ = 0.0;
    std::uint64_t n_ = 0;
};

struct SeparationBin {
    double lo, hi;
};

struct PairCorrelationEstimate {
    std::vector<SeparationBin> bins;
    std::vector<double> value;      // estimate of the bin-average of phi_theta
    std::vector<double> std_error;
    std::uint64_t n = 0;
};

// Windowed pair-correlation estimator: for each separation bin, the count of
// ordered pairs (x_i, x_j), i != j, with x_i in the window and x_j - x_i in
// the bin, divided by window length * bin length, averaged over samples.
class PairCorrelationAccumulator {
public:
    PairCorrelationAccumulator(std::vector<SeparationBin> bins, double window_lo, double window_hi)
        : bins_(std::move(bins)), wlo_(window_lo), whi_(window_hi) {
        if (!(wlo_ < whi_)) throw parameter_error("pair correlation: bad window");
        for (const auto& b : bins_) {
            if (!(b.lo < b.hi)) throw parameter_error("pair correlation: bad bin");
            if (b.lo <= 0.0 && b.hi >= 0.0)
                throw parameter_error("pair correlation: bins must exclude 0 (the diagonal)");
        }
        sum_.assign(bins_.size(), 0.0);
        sum2_.assign(bins_.size(), 0.0);
    }

    void add(const EigenPointMeasure& m) {
        double need_lo = wlo_, need_hi = whi_;
        for (const auto& b : bins_) {
            need_lo = std::min(need_lo, wlo_ + std::min(0.0, b.lo));
            need_hi = std::max(need_hi, whi_ + std::max(0.0, b.hi));
        }
        detail::check_window_covers(m, need_lo, need_hi);
        std::vector<double> counts(bins_.size(), 0.0);
        for (const auto& ai : m.atoms) {
            if (ai.x < wlo_ || ai.x > whi_) continue;
            for (const auto& aj : m.atoms) {
                const double sep = aj.x - ai.x;
                double pairs = static_cast<double>(ai.mult) * static_cast<double>(aj.mult);
                if (&ai == &aj) pairs = static_cast<double>(ai.mult) * (static_cast<double>(ai.mult) - 1.0);
                if (pairs <= 0.0) continue;
                for (std::size_t b = 0; b < bins_.size(); ++b)
                    if (sep > bins_[b].lo && sep < bins_[b].hi) counts[b] += pairs;
            }
        }
        for (std::size_t b = 0; b < bins_.size(); ++b) {
            const double v = counts[b] / ((whi_ - wlo_) * (bins_[b].hi - bins_[b].lo));
            sum_[b] += v;
            sum2_[b] += v * v;
        }
        ++n_;
    }

    PairCorrelationEstimate estimate() const {
        if (n_ == 0) throw parameter_error("pair correlation: no samples");
        PairCorrelationEstimate est;
        est.bins = bins_;
        est.n = n_;
        const double n = static_cast<double>(n_);
        for (std::size_t b = 0; b < bins_.size(); ++b) {
            const double mean = sum_[b] / n;
            est.value.push_back(mean);
            est.std_error.push_back(std::sqrt(std::max(0.0, sum2_[b] / n - mean * mean) / n));
        }
        return est;
    }

private:
    std::vector<SeparationBin> bins_;
    double wlo_, whi_;
    std::vector<double> sum_, sum2_;
    std::uint64_t n_ = 0;
};

inline PairCorrelationEstimate pair_correlation_estimate(std::span<const EigenPointMeasure> samples,
                                                         std::vector<SeparationBin> bins,
                                                         double window_lo, double window_hi) {
    PairCorrelationAccumulator acc(std::move(bins), window_lo, window_hi);
    for (const auto& m : samples) acc.add(m);
    return acc.estimate();
}

// One-sample Kolmogorov-Smirnov against a reference CDF; asymptotic critical
// value c(alpha)/sqrt(n).
namespace detail {

inline void require_finite(const std::vector<double>& samples, const char* who) {
    for (double v : samples)
        if (std::isnan(v)) throw parameter_error(std::string(who) + ": samples contain NaN");
}

}  // namespace detail

inline TestReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                          double alpha, std::string description = "ks") {
    const std::size_t n = samples.size();
    if (n < 50) throw parameter_error("ks_test: need n >= 50 for the asymptotic threshold");
    detail::require_finite(samples, "ks_test");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return make_report(std::move(description), d, ks_critical_constant(alpha) / std::sqrt(n), n);
}

inline TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha,
                                std::string description = "ks2") {
    if (a.size() < 50 || b.size() < 50) throw parameter_error("ks_two_sample: need n >= 50");
    detail::require_finite(a, "ks_two_sample");
    detail::require_finite(b, "ks_two_sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        // step over entire tie groups so D is measured between distinct values
        double v;
        if (i == a.size())
            v = b[j];
        else if (j == b.size())
            v = a[i];
        else
            v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double threshold = ks_critical_constant(alpha) * std::sqrt((na + nb) / (na * nb));
    return make_report(std::move(description), d, threshold, a.size() + b.size());
}

// Pearson chi-square of observed counts against expected counts.
inline TestReport chi_square(std::span<const double> observed, std::span<const double> expected,
                             double alpha, std::string description = "chi2") {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw parameter_error("chi_square: need matching category counts, >= 2 categories");
    double total = 0.0, stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0)) throw parameter_error("chi_square: expected counts must be positive");
        total += observed[i];
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    if (total < 50) throw parameter_error("chi_square: need total count >= 50");
    const double df = static_cast<double>(observed.size()) - 1.0;
    return make_report(std::move(description), stat, chi_square_quantile(df, alpha), static_cast<std::uint64_t>(total));
}

// Two-sample chi-square homogeneity test; categories with pooled expected
// count below 5 are merged (in index order) into a trailing bucket.
inline TestReport chi_square_two_sample(std::span<const double> counts1, std::span<const double> counts2,
                                        double alpha, std::string description = "chi2-2s") {
    if (counts1.size() != counts2.size() || counts1.size() < 2)
        throw parameter_error("chi_square_two_sample: need matching categories");
    double n1 = 0.0, n2 = 0.0;
    for (double c : counts1) n1 += c;
    for (double c : counts2) n2 += c;
    if (n1 < 50 || n2 < 50) throw parameter_error("chi_square_two_sample: need n >= 50 per sample");
    std::vector<double> o1, o2;
    double pool1 = 0.0, pool2 = 0.0;
    for (std::size_t i = 0; i < counts1.size(); ++i) {
        const double pooled = (counts1[i] + counts2[i]);
        if (pooled * std::min(n1, n2) / (n1 + n2) < 5.0) {
            pool1 += counts1[i];
            pool2 += counts2[i];
        } else {
            o1.push_back(counts1[i]);
            o2.push_back(counts2[i]);
        }
    }
    if (pool1 + pool2 > 0) {
        o1.push_back(pool1);
        o2.push_back(pool2);
    }
    if (o1.size() < 2) throw parameter_error("chi_square_two_sample: too few usable categories");
    double stat = 0.0;
    for (std::size_t i = 0; i < o1.size(); ++i) {
        const double p = (o1[i] + o2[i]) / (n1 + n2);
        const double e1 = n1 * p, e2 = n2 * p;
        stat += (o1[i] - e1) * (o1[i] - e1) / e1 + (o2[i] - e2) * (o2[i] - e2) / e2;
    }
    const double df = static_cast<double>(o1.size()) - 1.0;
    return make_report(std::move(description), stat, chi_square_quantile(df, alpha),
                       static_cast<std::uint64_t>(n1 + n2));
}

// One draw of X = sum_m y_m eps_m, GEM(theta) sticks, fair coins; the limit
// law is Beta(theta/2, theta/2). Truncation adds at most tail_mass.
inline double beta_identity_sample(double theta, RandomStream& stream, double tol = 1e-12) {
    if (!(theta > 0)) throw parameter_error("beta_identity_sample: theta must be > 0");
    double remaining = 1.0, x = 0.0;
    const double inv_theta = 1.0 / theta;
    while (remaining >= tol) {
        const double b = 1.0 - std::pow(stream.u01_open(), inv_theta);
        const double y = remaining * b;
        remaining *= (1.0 - b);
        if (stream.next_u64() & 1ull) x += y;
    }
    return x;
}

// One draw of the integral of f against the alpha=1 limit measure
// sum_m x_m * (uniform circle of radius e^{rho S_1^(m)}): PD(theta) weights,
// i.i.d. Cauchy log-radii; the angular average of our descriptors is the arc
// length, the radial part evaluates on the circle.
inline double cauchy_limit_integral(double theta, double rho, const TestFn& f, RandomStream& stream,
                                    double tol = 1e-12) {
    if (!(theta > 0) || !(rho > 0)) throw parameter_error("cauchy_limit_integral: theta, rho > 0");
    validate_testfn(f);
    const GemWeights pd = sample_poisson_dirichlet(theta, stream, tol);
    const auto arc = angular_arc(f);
    const double angular = arc ? (arc->second - arc->first) : 1.0;
    double total = 0.0;
    for (double x : pd.weights) {
        const double log_r = rho * sample_stable(1.0, stream);
        total += x * radial_eval(f, log_r) * angular;
    }
    return total;
}

// Integral of f against mu(M) for one finite sample, from cycle data.
// Radial descriptors use the per-cycle closed form; angular parts walk the
// atoms of the cycle (all on one circle).
inline double integrate_mu(const CycleData& data, const TestFn& f) {
    validate_testfn(f);
    double total = 0.0;
    const bool radial = is_radial(f);
    for (const auto& c : data.cycles) {
        const double root_lm = c.log_modulus / static_cast<double>(c.len);
        const double rv = radial_eval(f, root_lm);
        if (rv == 0.0) continue;
        if (radial) {
            total += static_cast<double>(c.len) * rv;
        } else {
            for (std::uint64_t j = 0; j < c.len; ++j) {
                const double ang = (c.angle + static_cast<double>(j)) / static_cast<double>(c.len);
                total += rv * angular_eval(f, ang);
            }
        }
    }
    return total;
}

// Prop-3.9-style check: the law of (1/N) int f dmu(M_N) at the largest N in
// the schedule against G_theta * f(0), G_theta ~ Beta(theta/2, theta/2)
// realized as sum y_m eps_m. Two-sample KS at level alpha_level.
inline TestReport dirac_mass_limit_check(double theta, double alpha, double rho, const TestFn& f,
                                         std::span<const std::uint32_t> n_schedule,
                                         std::size_t n_rep, double alpha_level,
                                         RandomStream& stream) {
    if (!(alpha < 1.0)) throw parameter_error("dirac_mass_limit_check: needs alpha < 1");
    if (n_schedule.empty()) throw parameter_error("dirac_mass_limit_check: empty schedule");
    const std::uint32_t n_big = *std::max_element(n_schedule.begin(), n_schedule.end());
    const double f0 = radial_eval(f, -std::numeric_limits<double>::infinity());
    FiniteSpectrumSampler sampler(theta, n_big, DistributionSpec::log_stable(alpha, rho));
    std::vector<double> sim(n_rep), ref(n_rep);
    for (std::size_t i = 0; i < n_rep; ++i) {
        const CycleData& data = sampler.sample(stream);
        sim[i] = integrate_mu(data, f) / static_cast<double>(n_big);
        ref[i] = beta_identity_sample(theta, stream, 1e-10) * f0;
    }
    return ks_two_sample(std::move(sim), std::move(ref), alpha_level, "dirac-mass-limit ks");
}

}  // namespace permspec
