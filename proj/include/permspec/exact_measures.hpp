#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/laws.hpp"
#include "permspec/special.hpp"
#include "permspec/stable.hpp"
#include "permspec/test_functions.hpp"

namespace permspec {

// t_{N,k,theta} = N(N-1)...(N-k+1) / ((N-1+theta)...(N-k+theta)), in log space.
inline double coefficient_t(std::uint64_t N, std::uint64_t k, double theta) {
    if (!(theta > 0)) throw parameter_error("coefficient_t: theta must be > 0");
    if (k < 1 || k > N) throw parameter_error("coefficient_t: need 1 <= k <= N");
    double log_t = 0.0;
    for (std::uint64_t j = 1; j <= k; ++j) {
        log_t += std::log(static_cast<double>(N + 1 - j)) - std::log(static_cast<double>(N - j) + theta);
    }
    return std::exp(log_t);
}

// v_{k,theta} = 1 + sup_N t_{N,k,theta}: 2 for theta >= 1, else the closed
// form 1 + k! Gamma(theta) / Gamma(k+theta) (the supremum sits at N = k).
inline double coefficient_v(std::uint64_t k, double theta) {
    if (!(theta > 0)) throw parameter_error("coefficient_v: theta must be > 0");
    if (k < 1) throw parameter_error("coefficient_v: need k >= 1");
    if (theta >= 1.0) return 2.0;
    return 1.0 + std::exp(std::lgamma(static_cast<double>(k) + 1.0) + std::lgamma(theta) -
                          std::lgamma(static_cast<double>(k) + theta));
}

// theta * sum_k w_k L_k, with w_k = t_{N,k,theta} for finite N and w_k = 1
// for the limit measure; the limit is truncated at k_max (its total mass is
// infinite, tail handling is up to the integrand's decay in k).
struct MixtureMeasure {
    struct Term {
        std::uint64_t k;
        double weight;
    };
    std::vector<Term> terms;
    std::string law_tag;
    bool truncated = false;  // true for the N = infinity measure
};

inline MixtureMeasure mean_measure(std::optional<std::uint64_t> N, double theta,
                                   const DistributionSpec& law, std::uint64_t k_max = 10000) {
    if (!(theta > 0)) throw parameter_error("mean_measure: theta must be > 0");
    law.validate();
    MixtureMeasure out;
    out.law_tag = format_law(law);
    if (N) {
        if (*N == 0) throw parameter_error("mean_measure: N must be >= 1");
        for (std::uint64_t k = 1; k <= *N; ++k) out.terms.push_back({k, theta * coefficient_t(*N, k, theta)});
    } else {
        out.truncated = true;
        for (std::uint64_t k = 1; k <= k_max; ++k) out.terms.push_back({k, theta});
    }
    return out;
}

struct IntegralResult {
    double value = 0.0;
    double abs_error = 0.0;
};

namespace detail {

// Radial law of L_k: point mass at log-modulus 0 for unit-modulus laws,
// rho k^{(1-alpha)/alpha} S_alpha for the log-stable law.
inline IntegralResult lk_radial_integral(const DistributionSpec& law, std::uint64_t k,
                                         const TestFn& f) {
    if (law.unit_modulus()) return {radial_eval(f, 0.0), 0.0};
    const double scale = law.rho * std::pow(static_cast<double>(k), (1.0 - law.alpha) / law.alpha);
    if (const auto* ri = std::get_if<FnRadialInterval>(&f)) {
        const double hi = std::log(ri->r2) / scale;
        if (ri->r1 <= 0.0) return {stable_cdf(hi, law.alpha), 1e-12};
        const double lo = std::log(ri->r1) / scale;
        return {stable_interval_prob(lo, hi, law.alpha), 1e-12};
    }
    if (std::holds_alternative<FnOne>(f) || std::holds_alternative<FnAngularInterval>(f))
        return {1.0, 0.0};
    // Smooth radial descriptors: Riemann-Stieltjes against the stable CDF.
    double lo_r = 0.0, hi_r = 0.0;
    double left_mass = 0.0;  // contribution of the region where f = 1 identically
    if (const auto* pl = std::get_if<FnRadialPlateau>(&f)) {
        left_mass = stable_cdf(std::log(pl->c) / scale, law.alpha);
        lo_r = pl->c;
        hi_r = 2.0 * pl->c;
    } else {
        const auto& bp = std::get<FnSmoothBump>(f);
        lo_r = bp.a;
        hi_r = bp.b;
    }
    const double s_lo = std::log(lo_r) / scale, s_hi = std::log(hi_r) / scale;
    const int n = 400;
    double total = 0.0;
    double prev_cdf = stable_cdf(s_lo, law.alpha);
    for (int i = 1; i <= n; ++i) {
        const double s1 = s_lo + (s_hi - s_lo) * i / n;
        const double sm = s_lo + (s_hi - s_lo) * (i - 0.5) / n;
        const double cdf1 = stable_cdf(s1, law.alpha);
        total += radial_eval(f, scale * sm) * (cdf1 - prev_cdf);
        prev_cdf = cdf1;
    }
    const double err = 4.0 * (prev_cdf - stable_cdf(s_lo, law.alpha)) / (n * n) + 1e-10;
    return {left_mass + total, err};
}

// Angle mass of an arc [a1,a2) under the angle law of L_k.
inline double lk_angular_arc_mass(const DistributionSpec& law, std::uint64_t k, double a1, double a2) {
    if (!law.discrete()) return a2 - a1;  // uniform angle
    const std::vector<double> p = law.angle_probabilities();
    const std::uint64_t r = p.size();
    const std::vector<double> q = convolution_power_on_roots(p, k);
    double mass = 0.0;
    for (std::uint64_t s = 0; s < r; ++s) {
        if (q[s] == 0.0) continue;
        for (std::uint64_t j = 0; j < k; ++j) {
            const double ang = (static_cast<double>(s) / r + static_cast<double>(j)) / k;
            if (ang >= a1 && ang < a2) mass += q[s] / static_cast<double>(k);
        }
    }
    return mass;
}

}  // namespace detail

// Integral of a single descriptor against L_k: exact for discrete laws,
// closed-form stable CDF for log-stable radial indicators, quadrature with a
// reported error estimate for the smooth radial descriptors.
inline IntegralResult integral_against_Lk(const DistributionSpec& law, std::uint64_t k,
                                          const TestFn& f) {
    if (k == 0) throw parameter_error("integral_against_Lk: k must be >= 1");
    law.validate();
    validate_testfn(f);
    const IntegralResult radial = detail::lk_radial_integral(law, k, f);
    const auto arc = angular_arc(f);
    const double angular = arc ? detail::lk_angular_arc_mass(law, k, arc->first, arc->second) : 1.0;
    return {radial.value * angular, radial.abs_error * angular};
}

// Families (lambda_{k,r}) of nonnegative integers with sum r*lambda = q; for
// finite N additionally sum k*lambda <= N.
struct LambdaFamily {
    struct Entry {
        std::uint64_t k, r, lambda;
    };
    std::vector<Entry> entries;

    std::uint64_t weighted_r_sum() const {
        std::uint64_t s = 0;
        for (const auto& e : entries) s += e.r * e.lambda;
        return s;
    }
    std::uint64_t weighted_k_sum() const {
        std::uint64_t s = 0;
        for (const auto& e : entries) s += e.k * e.lambda;
        return s;
    }
};

namespace detail {

// Visit every family with pairs (k,r) in lexicographic order. k ranges over
// 1..k_limit, r over 1..q_rem; finite n_rem prunes on sum k*lambda.
template <typename Visitor>
void lambda_families_visit(std::uint64_t q, std::optional<std::uint64_t> n_limit,
                           std::uint64_t k_limit, LambdaFamily& current, std::uint64_t k_from,
                           std::uint64_t r_from, std::uint64_t q_rem, std::uint64_t n_rem,
                           Visitor&& visit) {
    if (q_rem == 0) {
        visit(static_cast<const LambdaFamily&>(current));
        return;
    }
    for (std::uint64_t k = k_from; k <= k_limit; ++k) {
        if (n_limit && k > n_rem) break;
        const std::uint64_t r_start = (k == k_from) ? r_from : 1;
        for (std::uint64_t r = r_start; r <= q_rem; ++r) {
            const std::uint64_t lambda_max_r = q_rem / r;
            const std::uint64_t lambda_max_n = n_limit ? n_rem / k : lambda_max_r;
            const std::uint64_t lambda_max = std::min(lambda_max_r, lambda_max_n);
            for (std::uint64_t lam = 1; lam <= lambda_max; ++lam) {
                current.entries.push_back({k, r, lam});
                lambda_families_visit(q, n_limit, k_limit, current, k, r + 1, q_rem - r * lam,
                                      n_rem - k * lam, visit);
                current.entries.pop_back();
            }
        }
    }
}

}  // namespace detail

inline std::vector<LambdaFamily> enumerate_lambda_families(std::uint64_t q,
                                                           std::optional<std::uint64_t> N,
                                                           std::uint64_t k_max = 0) {
    if (q == 0 || q > 4) throw capability_error("enumerate_lambda_families: q must be in 1..4");
    if (!N && k_max == 0)
        throw parameter_error("enumerate_lambda_families: k_max required when N is infinite");
    const std::uint64_t k_limit = N ? (k_max ? std::min(*N, k_max) : *N) : k_max;
    std::vector<LambdaFamily> out;
    LambdaFamily cur;
    detail::lambda_families_visit(q, N, k_limit, cur, 1, 1, q, N ? *N : 0,
                                  [&](const LambdaFamily& fam) {
                                      out.push_back(fam);
                                      if (out.size() > 2000000)
                                          throw capability_error("enumerate_lambda_families: too many families");
                                  });
    return out;
}

// u_{N,theta}^{[lambda_k]} = 1_{sum k lambda_k <= N}
//   (prod_{j=1}^{sum k lambda_k} (N+1-j)/(N+theta-j)) theta^{sum lambda_k} / prod k^{lambda_k}
inline double u_coefficient(std::uint64_t N, double theta,
                            const std::map<std::uint64_t, std::uint64_t>& lambda) {
    if (!(theta > 0)) throw parameter_error("u_coefficient: theta must be > 0");
    std::uint64_t k_sum = 0, l_sum = 0;
    double log_kpow = 0.0;
    for (const auto& [k, lam] : lambda) {
        if (k == 0) throw parameter_error("u_coefficient: k must be >= 1");
        k_sum += k * lam;
        l_sum += lam;
        log_kpow += lam * std::log(static_cast<double>(k));
    }
    if (k_sum > N) return 0.0;
    double log_val = l_sum * std::log(theta) - log_kpow;
    for (std::uint64_t j = 1; j <= k_sum; ++j)
        log_val += std::log(static_cast<double>(N + 1 - j)) - std::log(static_cast<double>(N - j) + theta);
    return std::exp(log_val);
}

namespace detail {

// Circular arcs as unions of at most two [lo,hi) segments inside [0,1).
struct ArcSet {
    double seg[2][2];
    int count = 0;

    static ArcSet full() {
        ArcSet s;
        s.seg[0][0] = 0.0;
        s.seg[0][1] = 1.0;
        s.count = 1;
        return s;
    }
    static ArcSet shifted_arc(double a1, double a2, double shift) {
        // the set {u : u + shift in [a1,a2) mod 1}
        double lo = a1 - shift, hi = a2 - shift;
        lo -= std::floor(lo);
        hi = lo + (a2 - a1);
        ArcSet s;
        if (hi <= 1.0) {
            s.seg[0][0] = lo;
            s.seg[0][1] = hi;
            s.count = 1;
        } else {
            s.seg[0][0] = 0.0;
            s.seg[0][1] = hi - 1.0;
            s.seg[1][0] = lo;
            s.seg[1][1] = 1.0;
            s.count = 2;
        }
        return s;
    }
    ArcSet intersect(const ArcSet& o) const {
        ArcSet out;
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < o.count; ++j) {
                const double lo = std::max(seg[i][0], o.seg[j][0]);
                const double hi = std::min(seg[i][1], o.seg[j][1]);
                if (hi > lo) {
                    if (out.count >= 2) {
                        // intersections of unions of 2 arcs can have up to 4
                        // pieces in general; with a full-circle operand this
                        // does not occur for our inputs
                        throw capability_error("ArcSet: intersection too fragmented");
                    }
                    out.seg[out.count][0] = lo;
                    out.seg[out.count][1] = hi;
                    out.count += 1;
                }
            }
        return out;
    }
    double measure() const {
        double m = 0.0;
        for (int i = 0; i < count; ++i) m += seg[i][1] - seg[i][0];
        return m;
    }
};

struct BlockKey {
    std::uint64_t k;
    std::vector<int> fn_indices;  // ordered assignment of test functions
    bool operator<(const BlockKey& o) const {
        if (k != o.k) return k < o.k;
        return fn_indices < o.fn_indices;
    }
};

// sum over ordered tuples of distinct z_1..z_r in U_k of the expectation of
// the product of angular parts, the radial part factored out by the caller.
inline double block_angular_factor(const DistributionSpec& law, std::uint64_t k,
                                   std::span<const TestFn* const> fns) {
    const std::uint64_t r = fns.size();
    bool any_angular = false;
    for (const auto* f : fns)
        if (!is_radial(*f)) any_angular = true;
    auto falling = [](std::uint64_t k_, std::uint64_t r_) {
        double v = 1.0;
        for (std::uint64_t i = 0; i < r_; ++i) v *= static_cast<double>(k_ - i);
        return v;
    };
    if (!any_angular) return (r <= k) ? falling(k, r) : 0.0;
    if (r > k) return 0.0;
    if (r == 1) {
        // L_k is invariant under multiplication by k-th roots of unity, so
        // every rotated copy integrates to the same arc mass
        const auto arc = angular_arc(*fns[0]);
        return static_cast<double>(k) * lk_angular_arc_mass(law, k, arc->first, arc->second);
    }
    if (falling(k, r) > 2e6)
        throw capability_error("q_correlation: angular blocks of this size need too many root tuples");

    // enumerate ordered distinct tuples (c_1..c_r) in (Z/k)^r
    std::vector<std::uint64_t> c(r, 0);
    std::vector<bool> used(k, false);
    double total = 0.0;

    // angle mass of the intersection set, as a function of the base angle set
    const bool discrete = law.discrete();
    std::vector<double> base_p;
    std::uint64_t base_r = 1;
    if (discrete) {
        base_p = convolution_power_on_roots(law.angle_probabilities(), k);
        base_r = base_p.size();
    }

    std::function<void(std::uint64_t)> rec = [&](std::uint64_t depth) {
        if (depth == r) {
            if (discrete) {
                double m = 0.0;
                for (std::uint64_t s = 0; s < base_r; ++s) {
                    if (base_p[s] == 0.0) continue;
                    for (std::uint64_t j = 0; j < k; ++j) {
                        const double w_ang = (static_cast<double>(s) / base_r + static_cast<double>(j)) / k;
                        double prod = 1.0;
                        for (std::uint64_t i = 0; i < r && prod != 0.0; ++i)
                            prod *= angular_eval(*fns[i], w_ang + static_cast<double>(c[i]) / k);
                        m += base_p[s] / static_cast<double>(k) * prod;
                    }
                }
                total += m;
            } else {
                ArcSet set = ArcSet::full();
                for (std::uint64_t i = 0; i < r; ++i) {
                    const auto arc = angular_arc(*fns[i]);
                    if (!arc) continue;
                    set = set.intersect(
                        ArcSet::shifted_arc(arc->first, arc->second, static_cast<double>(c[i]) / k));
                }
                total += set.measure();
            }
            return;
        }
        for (std::uint64_t v = 0; v < k; ++v) {
            if (used[v]) continue;
            used[v] = true;
            c[depth] = v;
            rec(depth + 1);
            used[v] = false;
        }
    };
    rec(0);
    return total;
}

}  // namespace detail

// The q-correlation measure integrated against a product test function
// f_1 x ... x f_q, evaluated from the lambda-family expansion. Supports
// q <= 3 with indicator descriptors; any law for purely radial descriptors,
// discrete laws and the uniform circle when angular descriptors appear.
inline IntegralResult q_correlation(std::optional<std::uint64_t> N, double theta,
                                    const DistributionSpec& law, std::uint64_t q,
                                    std::span<const TestFn> fns, std::uint64_t k_max = 0) {
    if (q == 0 || q > 3) throw capability_error("q_correlation: q must be in 1..3");
    if (fns.size() != q) throw parameter_error("q_correlation: need one descriptor per coordinate");
    if (!(theta > 0)) throw parameter_error("q_correlation: theta must be > 0");
    law.validate();
    for (const auto& f : fns) {
        validate_testfn(f);
        if (!is_indicator(f)) throw capability_error("q_correlation: indicator descriptors only");
    }
    bool any_angular = false;
    for (const auto& f : fns)
        if (!is_radial(f)) any_angular = true;
    if (any_angular && law.kind == DistributionSpec::Kind::LogStable)
        throw capability_error("q_correlation: angular descriptors need a discrete or uniform law");
    if (!N && k_max == 0) throw parameter_error("q_correlation: k_max required when N is infinite");
    const std::uint64_t k_limit = N ? (k_max ? std::min(*N, k_max) : *N) : k_max;

    // radial integrals per (k, subset of descriptors): product of indicators
    // is the indicator of the interval intersection
    auto radial_interval_of = [&](std::uint64_t mask) -> std::pair<double, double> {
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < q; ++i) {
            if (!(mask & (1ull << i))) continue;
            if (const auto* ri = std::get_if<FnRadialInterval>(&fns[i])) {
                lo = std::max(lo, ri->r1);
                hi = std::min(hi, ri->r2);
            }
        }
        return {lo, hi};
    };
    std::vector<std::vector<double>> radial_table(1ull << q);
    double radial_err = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << q); ++mask) {
        radial_table[mask].assign(k_limit + 1, 1.0);
        const auto [lo, hi] = radial_interval_of(mask);
        for (std::uint64_t k = 1; k <= k_limit; ++k) {
            if (hi <= lo) {
                radial_table[mask][k] = 0.0;
                continue;
            }
            if (law.unit_modulus()) {
                radial_table[mask][k] = (lo < 1.0 && 1.0 < hi) ? 1.0 : 0.0;
            } else {
                if (!std::isfinite(hi) && lo == 0.0) {
                    radial_table[mask][k] = 1.0;
                } else {
                    const IntegralResult r =
                        detail::lk_radial_integral(law, k, TestFn{FnRadialInterval{lo, std::isfinite(hi) ? hi : 1e300}});
                    radial_table[mask][k] = r.value;
                    radial_err = std::max(radial_err, r.abs_error);
                }
            }
        }
    }

    // prefix products prod_{j=1}^{s} (N+1-j)/(N+theta-j)
    const std::uint64_t s_max = std::min<std::uint64_t>(N ? *N : 0, q * k_limit);
    std::vector<double> T(N ? s_max + 1 : 1, 1.0);
    if (N) {
        for (std::uint64_t s = 1; s <= s_max; ++s)
            T[s] = T[s - 1] * static_cast<double>(*N + 1 - s) / (static_cast<double>(*N - s) + theta);
    }

    std::vector<int> perm(q);
    std::map<detail::BlockKey, double> angular_cache;

    double total = 0.0;
    LambdaFamily cur;
    detail::lambda_families_visit(q, N, k_limit, cur, 1, 1, q, N ? *N : 0, [&](const LambdaFamily& fam) {
        const std::uint64_t ks = fam.weighted_k_sum();
        double coeff = N ? (ks <= s_max ? T[ks] : 0.0) : 1.0;
        if (coeff == 0.0) return;
        for (const auto& e : fam.entries) {
            double lf = 1.0;  // lambda!
            for (std::uint64_t i = 2; i <= e.lambda; ++i) lf *= static_cast<double>(i);
            double rf = 1.0;  // r!
            for (std::uint64_t i = 2; i <= e.r; ++i) rf *= static_cast<double>(i);
            coeff *= std::pow(theta / (rf * static_cast<double>(e.k)), static_cast<double>(e.lambda)) / lf;
        }
        // slots in canonical order
        std::vector<std::pair<std::uint64_t, std::uint64_t>> slots;  // (k, r)
        for (const auto& e : fam.entries)
            for (std::uint64_t c = 0; c < e.lambda; ++c) slots.emplace_back(e.k, e.r);

        std::iota(perm.begin(), perm.end(), 0);
        double sym_sum = 0.0;
        do {
            double prod = 1.0;
            std::size_t pos = 0;
            for (const auto& [k, r] : slots) {
                // radial part
                std::uint64_t mask = 0;
                for (std::uint64_t i = 0; i < r; ++i) mask |= 1ull << perm[pos + i];
                const double radial = radial_table[mask][k];
                if (radial == 0.0) {
                    prod = 0.0;
                    break;
                }
                // angular part
                detail::BlockKey key{k, std::vector<int>(perm.begin() + pos, perm.begin() + pos + r)};
                auto it = angular_cache.find(key);
                double angular;
                if (it != angular_cache.end()) {
                    angular = it->second;
                } else {
                    std::vector<const TestFn*> assigned(r);
                    for (std::uint64_t i = 0; i < r; ++i) assigned[i] = &fns[perm[pos + i]];
                    angular = detail::block_angular_factor(law, k, assigned);
                    angular_cache.emplace(std::move(key), angular);
                }
                prod *= radial * angular;
                if (prod == 0.0) break;
                pos += r;
            }
            sym_sum += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += coeff * sym_sum;
    });
    return {total, radial_err * 10.0};
}

// Bound on the tail theta * sum_{k > k_max} w_k int f dL_k dropped by a
// truncated limit mixture. The finite-N weights are dominated by v_{k,theta},
// so the same bound covers mu-tilde-N integrals uniformly in N. Estimated
// from the local decay rate of int f dL_k; +inf when the decay is too slow
// to sum (the measure is genuinely infinite on that test function).
inline double mixture_tail_bound(const DistributionSpec& law, double theta, std::uint64_t k_max,
                                 const TestFn& f) {
    if (k_max < 4) throw parameter_error("mixture_tail_bound: k_max too small");
    const double v1 = integral_against_Lk(law, k_max, f).value;
    const double v0 = integral_against_Lk(law, k_max / 2, f).value;
    const double vcap = coefficient_v(k_max, theta);
    if (v1 <= 0.0) return 0.0;
    if (v0 <= 0.0 || v1 >= v0) return std::numeric_limits<double>::infinity();
    const double b = std::log(v1 / v0) / std::log(2.0);
    if (!(b < -1.0)) return std::numeric_limits<double>::infinity();
    return vcap * theta * v1 * static_cast<double>(k_max) / (-b - 1.0);
}

// E(theta,r,s) = Gamma(r+1) Gamma(s+theta) theta / (Gamma(r+s+theta) (r+s)),
// the paper's factorials of non-integers read as Gamma(x+1).
inline double gem_moment(double theta, double r, double s) {
    if (!(theta > 0)) throw parameter_error("gem_moment: theta must be > 0");
    if (!(r >= 0) || !(s >= 0) || !(r + s > 0)) throw parameter_error("gem_moment: need r,s >= 0, r+s > 0");
    return theta * std::exp(std::lgamma(r + 1.0) + std::lgamma(s + theta) - std::lgamma(r + s + theta)) /
           (r + s);
}

// Probability that the cycle supports are exactly the consecutive blocks of
// sizes (l_1..l_p): theta^{p-1}/((theta+1)...(theta+N-1)) prod (l_n - 1)!.
inline double pd_partition_expectation(double theta, std::uint64_t N,
                                       std::span<const std::uint64_t> lengths) {
    if (!(theta >= 0)) throw parameter_error("pd_partition_expectation: theta must be >= 0");
    std::uint64_t sum = 0;
    for (std::uint64_t l : lengths) {
        if (l == 0) throw parameter_error("pd_partition_expectation: lengths must be >= 1");
        sum += l;
    }
    if (sum != N) throw parameter_error("pd_partition_expectation: lengths must sum to N");
    const std::uint64_t p = lengths.size();
    if (theta == 0.0) return (p == 1 && lengths[0] == N) ? 1.0 : 0.0;
    double log_val = (static_cast<double>(p) - 1.0) * std::log(theta);
    for (std::uint64_t j = 1; j < N; ++j) log_val -= std::log(theta + static_cast<double>(j));
    for (std::uint64_t l : lengths) log_val += std::lgamma(static_cast<double>(l));
    return std::exp(log_val);
}

// phi_theta(x) = theta/(theta+1) + (theta/x^2) sum_{1 <= a <= |x|} a (1 - a/|x|)^{theta-1}.
// Infinite at integer x for theta < 1 (integrable singularity of the density).
inline double pair_correlation_phi(double theta, double x) {
    if (!(theta > 0)) throw parameter_error("pair_correlation_phi: theta must be > 0");
    if (x == 0.0) throw parameter_error("pair_correlation_phi: x must be nonzero");
    const double ax = std::fabs(x);
    double sum = 0.0;
    for (std::uint64_t a = 1; a <= static_cast<std::uint64_t>(ax); ++a) {
        sum += static_cast<double>(a) * std::pow(1.0 - static_cast<double>(a) / ax, theta - 1.0);
    }
    return theta / (theta + 1.0) + theta / (ax * ax) * sum;
}

// Atom expansion of a discrete-law mixture: angle -> mass, angles as reduced
// fractions. Used to compare against the exhaustive enumeration.
inline std::map<std::pair<std::uint64_t, std::uint64_t>, double> discrete_mixture_atoms(
    const MixtureMeasure& mix, const DistributionSpec& law) {
    if (!law.discrete()) throw parameter_error("discrete_mixture_atoms: law must be discrete");
    const std::vector<double> p = law.angle_probabilities();
    const std::uint64_t r = p.size();
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> atoms;
    for (const auto& term : mix.terms) {
        const std::vector<double> q = convolution_power_on_roots(p, term.k);
        for (std::uint64_t s = 0; s < r; ++s) {
            if (q[s] == 0.0) continue;
            for (std::uint64_t j = 0; j < term.k; ++j) {
                std::uint64_t num = s + j * r, den = r * term.k;
                const std::uint64_t g = std::gcd(num, den);
                if (g) {
                    num /= g;
                    den /= g;
                }
                atoms[{num, den}] += term.weight * q[s] / static_cast<double>(term.k);
            }
        }
    }
    return atoms;
}

}  // namespace permspec
