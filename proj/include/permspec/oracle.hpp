#pragma once

// Brute-force ground truth: exhaustive enumeration over S_N (N <= 8) with
// exact Ewens weights in rational arithmetic, and exact eigen-atom
// bookkeeping for laws supported on roots of unity.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/virtual_permutation.hpp"

namespace permspec::oracle {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw parameter_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static Rational make(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 a = n < 0 ? -n : n;
        __int128 g = gcd128(a, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw numerical_error("Rational: overflow");
        Rational r;
        r.num = static_cast<std::int64_t>(n);
        r.den = static_cast<std::int64_t>(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    Rational operator+(const Rational& o) const {
        return make(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                    static_cast<__int128>(den) * o.den);
    }
    Rational operator-(const Rational& o) const {
        return make(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                    static_cast<__int128>(den) * o.den);
    }
    Rational operator*(const Rational& o) const {
        return make(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
    }
    Rational operator/(const Rational& o) const {
        if (o.num == 0) throw parameter_error("Rational: division by zero");
        return make(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const {
        return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
    }
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct WeightedPermutationTable {
    std::uint32_t n = 0;
    Rational theta;
    std::vector<std::pair<CycleDecomposition, Rational>> rows;
};

inline WeightedPermutationTable enumerate_ewens(std::uint32_t N, Rational theta) {
    if (N == 0 || N > 8) throw capability_error("enumerate_ewens: N must be in 1..8");
    if (!(Rational(0) < theta)) throw parameter_error("enumerate_ewens: theta must be > 0");
    WeightedPermutationTable table;
    table.n = N;
    table.theta = theta;
    Rational denom(1);
    for (std::uint32_t j = 1; j < N; ++j) denom *= (theta + Rational(j));
    std::vector<std::uint32_t> images(N);
    std::iota(images.begin(), images.end(), 1);
    do {
        const auto sigma = detail::cycles_from_successors(images);
        Rational weight(1);
        for (std::uint32_t c = 1; c < sigma.cycle_count(); ++c) weight *= theta;
        table.rows.emplace_back(sigma, weight / denom);
    } while (std::next_permutation(images.begin(), images.end()));
    return table;
}

// Exact cycle-type distribution (lengths sorted decreasing).
inline std::map<std::vector<std::uint32_t>, Rational> cycle_type_distribution(
    const WeightedPermutationTable& table) {
    std::map<std::vector<std::uint32_t>, Rational> out;
    for (const auto& [sigma, prob] : table.rows) {
        std::vector<std::uint32_t> type;
        for (const auto& c : sigma.cycles) type.push_back(static_cast<std::uint32_t>(c.size()));
        std::sort(type.begin(), type.end(), std::greater<>());
        auto [it, inserted] = out.emplace(std::move(type), prob);
        if (!inserted) it->second += prob;
    }
    return out;
}

// A law supported on the r-th roots of unity with rational weights.
struct RationalLaw {
    std::uint64_t r = 1;
    std::vector<Rational> p = {Rational(1)};

    void validate() const {
        if (r == 0 || p.size() != r) throw parameter_error("RationalLaw: p must have length r");
        Rational sum(0);
        for (const auto& v : p) sum += v;
        if (!(sum == Rational(1))) throw parameter_error("RationalLaw: p must sum to 1");
    }
};

inline std::vector<Rational> rational_convolution_power(const std::vector<Rational>& p,
                                                        std::uint64_t l) {
    const std::size_t r = p.size();
    std::vector<Rational> result(r, Rational(0)), base = p;
    result[0] = Rational(1);
    while (l > 0) {
        if (l & 1) {
            std::vector<Rational> c(r, Rational(0));
            for (std::size_t i = 0; i < r; ++i) {
                if (result[i].num == 0) continue;
                for (std::size_t j = 0; j < r; ++j) c[(i + j) % r] += result[i] * base[j];
            }
            result = std::move(c);
        }
        l >>= 1;
        if (l > 0) {
            std::vector<Rational> c(r, Rational(0));
            for (std::size_t i = 0; i < r; ++i) {
                if (base[i].num == 0) continue;
                for (std::size_t j = 0; j < r; ++j) c[(i + j) % r] += base[i] * base[j];
            }
            base = std::move(c);
        }
    }
    return result;
}

// Eigen-atom angle as a reduced fraction of a turn.
using Angle = std::pair<std::uint64_t, std::uint64_t>;

inline Angle reduced_angle(std::uint64_t num, std::uint64_t den) {
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

// Exact expectation of mu(M_N) for a roots-of-unity law: map angle -> mass.
inline std::map<Angle, Rational> exact_mean_measure(const WeightedPermutationTable& table,
                                                    const RationalLaw& law) {
    law.validate();
    std::map<Angle, Rational> atoms;
    // cache convolution powers per cycle length
    std::vector<std::vector<Rational>> conv(table.n + 1);
    for (std::uint32_t l = 1; l <= table.n; ++l) conv[l] = rational_convolution_power(law.p, l);
    for (const auto& [sigma, prob] : table.rows) {
        for (const auto& cyc : sigma.cycles) {
            const std::uint64_t l = cyc.size();
            const auto& q = conv[l];
            for (std::uint64_t s = 0; s < law.r; ++s) {
                if (q[s].num == 0) continue;
                const Rational mass = prob * q[s];  // each of the l roots is one eigenvalue
                for (std::uint64_t j = 0; j < l; ++j) {
                    auto key = reduced_angle(s + j * law.r, law.r * l);
                    auto [it, inserted] = atoms.emplace(key, mass);
                    if (!inserted) it->second += mass;
                }
            }
        }
    }
    return atoms;
}

// Indicator of an arc [a1, a2) of the circle (angles in turns); nullopt is
// the constant function 1.
struct ArcIndicator {
    Rational a1, a2;
};
using OracleFn = std::optional<ArcIndicator>;

inline bool arc_contains(const OracleFn& f, const Angle& angle) {
    if (!f) return true;
    const Rational a(static_cast<std::int64_t>(angle.first), static_cast<std::int64_t>(angle.second));
    return f->a1 <= a && a < f->a2;
}

// Exact integral of f against the exact mean measure.
inline Rational exact_mean_integral(const WeightedPermutationTable& table, const RationalLaw& law,
                                    const OracleFn& f) {
    Rational total(0);
    for (const auto& [angle, mass] : exact_mean_measure(table, law)) {
        if (arc_contains(f, angle)) total += mass;
    }
    return total;
}

// Exact 2-correlation integral: expectation over the Ewens table of
// sum_{i != j} f1(x_i) f2(x_j) over ordered pairs of distinct eigen-atom
// indices. Within a cycle the atoms are the l distinct roots sharing one
// rotation; across cycles the products are independent.
inline Rational exact_correlation2(const WeightedPermutationTable& table, const RationalLaw& law,
                                   const OracleFn& f1, const OracleFn& f2) {
    if (table.n > 6) throw capability_error("exact_correlation2: N must be <= 6");
    law.validate();
    std::vector<std::vector<Rational>> conv(table.n + 1);
    for (std::uint32_t l = 1; l <= table.n; ++l) conv[l] = rational_convolution_power(law.p, l);

    // per cycle length l: single-atom integrals sum_i E[f(x_i)] and the
    // within-cycle ordered-pair sum E[sum_{i != j} f1(x_i) f2(x_j)]
    auto single_sum = [&](std::uint64_t l, const OracleFn& f) {
        Rational total(0);
        const auto& q = conv[l];
        for (std::uint64_t s = 0; s < law.r; ++s) {
            if (q[s].num == 0) continue;
            for (std::uint64_t j = 0; j < l; ++j) {
                if (arc_contains(f, reduced_angle(s + j * law.r, law.r * l)))
                    total += q[s] / Rational(static_cast<std::int64_t>(l));
            }
        }
        return total;
    };
    auto pair_sum = [&](std::uint64_t l) {
        Rational total(0);
        const auto& q = conv[l];
        for (std::uint64_t s = 0; s < law.r; ++s) {
            if (q[s].num == 0) continue;
            for (std::uint64_t j = 0; j < l; ++j) {
                if (!arc_contains(f1, reduced_angle(s + j * law.r, law.r * l))) continue;
                for (std::uint64_t j2 = 0; j2 < l; ++j2) {
                    if (j2 == j) continue;
                    if (arc_contains(f2, reduced_angle(s + j2 * law.r, law.r * l))) total += q[s];
                }
            }
        }
        return total;
    };

    Rational grand(0);
    for (const auto& [sigma, prob] : table.rows) {
        Rational term(0);
        const auto& cycles = sigma.cycles;
        std::vector<Rational> s1, s2;
        for (const auto& c : cycles) {
            const std::uint64_t l = c.size();
            s1.push_back(single_sum(l, f1) * Rational(static_cast<std::int64_t>(l)));
            s2.push_back(single_sum(l, f2) * Rational(static_cast<std::int64_t>(l)));
        }
        for (std::size_t m = 0; m < cycles.size(); ++m) {
            for (std::size_t m2 = 0; m2 < cycles.size(); ++m2) {
                if (m == m2) continue;
                term += s1[m] * s2[m2];
            }
            term += pair_sum(cycles[m].size());
        }
        grand += prob * term;
    }
    return grand;
}

}  // namespace permspec::oracle
