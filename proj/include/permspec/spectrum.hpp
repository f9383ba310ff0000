#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/laws.hpp"
#include "permspec/stable.hpp"
#include "permspec/test_functions.hpp"
#include "permspec/virtual_permutation.hpp"

namespace permspec {

// Per-cycle data for one matrix: cycle length and the product Z_m of the
// matrix entries along the cycle, stored as (log|Z_m|, arg(Z_m)/2pi).
struct CycleData {
    struct Cycle {
        std::uint64_t len;
        double log_modulus;
        double angle;  // in [0,1)
    };
    std::uint64_t n = 0;
    std::vector<Cycle> cycles;
};

// Finite multiset of spectral atoms; either points in C (stored in polar
// form) or real positions on the angle line.
struct EigenPointMeasure {
    enum class Kind { Complex, Angle };
    struct Atom {
        double x;            // Complex: log-modulus. Angle: position.
        double y;            // Complex: angle in [0,1). Angle: unused (0).
        std::uint64_t mult;
    };

    Kind kind = Kind::Complex;
    std::vector<Atom> atoms;
    std::optional<std::pair<double, double>> window;
    bool infinite_atom_at_zero = false;
    double truncation_bound = 0.0;  // bound on the expected points lost to truncation

    std::uint64_t total_multiplicity() const {
        std::uint64_t t = 0;
        for (const auto& a : atoms) t += a.mult;
        return t;
    }

    std::complex<double> complex_value(const Atom& a) const {
        const double m = std::exp(a.x);
        return {m * std::cos(2.0 * PI * a.y), m * std::sin(2.0 * PI * a.y)};
    }
};

namespace detail {

// Sort and merge coinciding atoms. Identical floating-point representations
// merge exactly (the DiracOne paths produce bit-identical root angles);
// a 1e-12 tolerance absorbs double-rounding of equal rationals reached by
// different arithmetic routes, including the 1-vs-0 angle wrap.
inline void merge_atoms(std::vector<EigenPointMeasure::Atom>& atoms, bool angle_wraps) {
    if (atoms.empty()) return;
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    std::vector<EigenPointMeasure::Atom> merged;
    merged.push_back(atoms[0]);
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        auto& last = merged.back();
        if (std::fabs(atoms[i].x - last.x) <= 1e-12 && std::fabs(atoms[i].y - last.y) <= 1e-12) {
            last.mult += atoms[i].mult;
        } else {
            merged.push_back(atoms[i]);
        }
    }
    if (angle_wraps && merged.size() >= 2) {
        auto& first = merged.front();
        auto& last = merged.back();
        if (std::fabs(first.x - last.x) <= 1e-12 && std::fabs((1.0 - last.y) + first.y) <= 1e-12) {
            first.mult += last.mult;
            merged.pop_back();
        }
    }
    atoms = std::move(merged);
}

}  // namespace detail

// The atoms |Z_m|^{1/l_m} e^{2 pi i (angle+j)/l_m}, j = 0..l_m-1, per cycle.
inline EigenPointMeasure eigenvalues_from_cycles(const CycleData& data) {
    EigenPointMeasure out;
    out.kind = EigenPointMeasure::Kind::Complex;
    for (const auto& c : data.cycles) {
        if (c.len == 0) throw parameter_error("eigenvalues_from_cycles: zero cycle length");
        const double lm = c.log_modulus / static_cast<double>(c.len);
        for (std::uint64_t j = 0; j < c.len; ++j) {
            const double ang = (c.angle + static_cast<double>(j)) / static_cast<double>(c.len);
            out.atoms.push_back({lm, ang, 1});
        }
    }
    detail::merge_atoms(out.atoms, /*angle_wraps=*/true);
    return out;
}

// Dense N x N matrix with M_{jk} = z_j when j = sigma(k), row-major storage.
struct DenseMatrix {
    std::uint32_t n = 0;
    std::vector<std::complex<double>> a;

    std::complex<double>& at(std::uint32_t row, std::uint32_t col) { return a[row * n + col]; }
    const std::complex<double>& at(std::uint32_t row, std::uint32_t col) const { return a[row * n + col]; }

    DenseMatrix operator*(const DenseMatrix& o) const {
        DenseMatrix r;
        r.n = n;
        r.a.assign(static_cast<std::size_t>(n) * n, {0.0, 0.0});
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t k = 0; k < n; ++k) {
                const std::complex<double> v = at(i, k);
                if (v == std::complex<double>{0.0, 0.0}) continue;
                for (std::uint32_t j = 0; j < n; ++j) r.at(i, j) += v * o.at(k, j);
            }
        return r;
    }

    std::complex<double> trace() const {
        std::complex<double> t = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) t += at(i, i);
        return t;
    }
};

inline DenseMatrix build_matrix(const CycleDecomposition& sigma, std::span<const std::complex<double>> z) {
    if (z.size() != sigma.n) throw parameter_error("build_matrix: need one entry per element");
    for (const auto& v : z)
        if (v == std::complex<double>{0.0, 0.0}) throw parameter_error("build_matrix: entries must be nonzero");
    DenseMatrix m;
    m.n = sigma.n;
    m.a.assign(static_cast<std::size_t>(sigma.n) * sigma.n, {0.0, 0.0});
    const auto succ = sigma.successors();
    for (std::uint32_t k = 1; k <= sigma.n; ++k) {
        const std::uint32_t j = succ[k - 1];  // j = sigma(k)
        m.at(j - 1, k - 1) = z[j - 1];
    }
    return m;
}

// Tr(M^k) = sum over cycles with l_m | k of l_m Z_m^{k/l_m}.
inline std::complex<double> trace_power(const CycleData& data, std::uint64_t k) {
    if (k == 0) throw parameter_error("trace_power: k must be >= 1");
    std::complex<double> total = 0.0;
    for (const auto& c : data.cycles) {
        if (k % c.len != 0) continue;
        const double p = static_cast<double>(k / c.len);
        const double mod = std::exp(p * c.log_modulus);
        const double ang = 2.0 * PI * p * c.angle;
        total += static_cast<double>(c.len) * std::complex<double>{mod * std::cos(ang), mod * std::sin(ang)};
    }
    return total;
}

// Cycle products computed from explicit entries z.
inline CycleData make_cycle_data(const CycleDecomposition& sigma, std::span<const std::complex<double>> z) {
    if (z.size() != sigma.n) throw parameter_error("make_cycle_data: need one entry per element");
    CycleData out;
    out.n = sigma.n;
    for (const auto& c : sigma.cycles) {
        double lm = 0.0, ang = 0.0;
        for (std::uint32_t e : c) {
            const auto& v = z[e - 1];
            if (v == std::complex<double>{0.0, 0.0})
                throw parameter_error("make_cycle_data: entries must be nonzero");
            lm += std::log(std::abs(v));
            ang += std::arg(v) / (2.0 * PI);
        }
        ang -= std::floor(ang);
        if (ang >= 1.0) ang = 0.0;
        out.cycles.push_back({c.size(), lm, ang});
    }
    return out;
}

// Cycle products drawn by the per-variant closed-form shortcuts.
inline CycleData sample_cycle_data(const DistributionSpec& law, std::span<const std::uint32_t> lengths,
                                   RandomStream& stream) {
    CycleData out;
    std::uint64_t n = 0;
    for (std::uint32_t l : lengths) {
        const CycleProduct cp = sample_cycle_product(law, l, stream);
        out.cycles.push_back({l, cp.log_modulus, cp.angle});
        n += l;
    }
    out.n = n;
    return out;
}

// Faithful finite-N sampler: one CRP pass per sample with one z draw per
// element, accumulated into per-cycle products. Buffers are reused.
class FiniteSpectrumSampler {
public:
    FiniteSpectrumSampler(double theta, std::uint32_t N, DistributionSpec law)
        : theta_(theta), n_(N), law_(std::move(law)) {
        if (!(theta > 0)) throw parameter_error("FiniteSpectrumSampler: theta must be > 0");
        if (N == 0) throw parameter_error("FiniteSpectrumSampler: N must be >= 1");
        law_.validate();
    }

    const CycleData& sample(RandomStream& stream) {
        data_.n = n_;
        data_.cycles.clear();
        std::uint32_t num_cycles = 0;
        detail::crp_visit(theta_, 1, n_, stream, cycle_of_, num_cycles,
                          [&](std::uint32_t, std::uint32_t c, bool created) {
                              if (created) data_.cycles.push_back({0, 0.0, 0.0});
                              auto& cyc = data_.cycles[c];
                              cyc.len += 1;
                              const ZLogDraw z = sample_z_log(law_, stream);
                              cyc.log_modulus += z.log_modulus;
                              cyc.angle += z.angle;
                          });
        for (auto& cyc : data_.cycles) {
            cyc.angle -= std::floor(cyc.angle);
            if (cyc.angle >= 1.0) cyc.angle = 0.0;
        }
        return data_;
    }

private:
    double theta_;
    std::uint32_t n_;
    DistributionSpec law_;
    std::vector<std::uint32_t> cycle_of_;
    CycleData data_;
};

// tau_N(M_N) restricted to a window: the points (gamma_m + k)/y_m with
// y_m = l_m/N. Over one full period of length N the point count is exactly N.
inline EigenPointMeasure scaled_eigenangles(const CycleData& data, std::uint64_t N,
                                            std::pair<double, double> window) {
    if (window.second < window.first) throw parameter_error("scaled_eigenangles: bad window");
    std::uint64_t total = 0;
    for (const auto& c : data.cycles) total += c.len;
    if (total != N) throw parameter_error("scaled_eigenangles: cycle lengths must sum to N");
    EigenPointMeasure out;
    out.kind = EigenPointMeasure::Kind::Angle;
    out.window = window;
    for (const auto& c : data.cycles) {
        const double y = static_cast<double>(c.len) / static_cast<double>(N);
        const double k_lo = std::ceil(window.first * y - c.angle - 1e-12);
        const double k_hi = std::floor(window.second * y - c.angle + 1e-12);
        for (double k = k_lo; k <= k_hi; k += 1.0) {
            const double pos = (c.angle + k) / y;
            if (pos < window.first - 1e-9 || pos > window.second + 1e-9) continue;
            out.atoms.push_back({pos, 0.0, 1});
        }
    }
    detail::merge_atoms(out.atoms, /*angle_wraps=*/false);
    return out;
}

// One draw of tau_infinity(theta, L) restricted to a window: GEM(theta)
// weights truncated at tol, an independent shift chi_m per cycle. When the
// shift law has an atom at zero and the window contains zero, the measure has
// an infinite atom there: flagged, not emitted. A truncated tail cycle can
// contribute a window point only if chi_m <= A y_m or 1 - chi_m <= A y_m, so
// the expected number of missed points is at most 2A * tail_mass for the
// uniform shift law (A = max |window endpoint|).
inline EigenPointMeasure sample_tau_infinity(double theta, const ShiftLaw& shift,
                                             std::pair<double, double> window, double tol,
                                             RandomStream& stream) {
    if (window.second < window.first) throw parameter_error("sample_tau_infinity: bad window");
    const GemWeights gem = sample_gem(theta, stream, tol);
    EigenPointMeasure out;
    out.kind = EigenPointMeasure::Kind::Angle;
    out.window = window;
    out.truncation_bound =
        2.0 * std::max(std::fabs(window.first), std::fabs(window.second)) * gem.tail_mass;
    const bool zero_in_window = window.first <= 0.0 && window.second >= 0.0;
    if (shift.discrete() && zero_in_window) out.infinite_atom_at_zero = true;
    for (double y : gem.weights) {
        const double chi = shift.sample(stream);
        const double k_lo = std::ceil(window.first * y - chi - 1e-12);
        const double k_hi = std::floor(window.second * y - chi + 1e-12);
        for (double k = k_lo; k <= k_hi; k += 1.0) {
            if (chi + k == 0.0) continue;  // the (possibly infinite) atom at zero
            const double pos = (chi + k) / y;
            if (pos < window.first - 1e-9 || pos > window.second + 1e-9) continue;
            out.atoms.push_back({pos, 0.0, 1});
        }
    }
    detail::merge_atoms(out.atoms, /*angle_wraps=*/false);
    return out;
}

struct MuInfinitySample {
    EigenPointMeasure measure;
    double expected_tail;  // bound on the expected count lost to k > k_max; may be +inf
};

namespace detail {

// L_k mass of a radially symmetric region.
inline double lk_region_mass(const DistributionSpec& law, std::uint64_t k, const Region& region) {
    if (law.unit_modulus()) return region_contains_log(region, 0.0) ? 1.0 : 0.0;
    const double scale = law.rho * std::pow(static_cast<double>(k), (1.0 - law.alpha) / law.alpha);
    auto prob_in = [&](double r1, double r2) {
        const double lo = r1 <= 0.0 ? -std::numeric_limits<double>::infinity() : std::log(r1) / scale;
        const double hi = std::log(r2) / scale;
        if (r1 <= 0.0) return stable_cdf(hi, law.alpha);
        return stable_interval_prob(lo, hi, law.alpha);
    };
    if (const auto* a = std::get_if<Annulus>(&region)) return prob_in(a->r1, a->r2);
    const auto& o = std::get<OutsideBand>(region);
    return 1.0 - prob_in(o.R1, o.R2);
}

}  // namespace detail

// One draw of mu_infinity restricted to a radially symmetric region:
// a_k ~ Poisson(theta/k) cycles per length k <= k_max, each contributing its
// k roots when the root modulus falls in the region.
inline MuInfinitySample sample_mu_infinity(double theta, const DistributionSpec& law,
                                           const Region& region, std::uint64_t k_max,
                                           RandomStream& stream) {
    if (!(theta > 0)) throw parameter_error("sample_mu_infinity: theta must be > 0");
    if (k_max == 0) throw parameter_error("sample_mu_infinity: k_max must be >= 1");
    law.validate();

    // Hypothesis checks: the region must avoid where the mass accumulates.
    if (law.kind == DistributionSpec::Kind::LogStable) {
        if (law.alpha == 1.0)
            throw parameter_error(
                "sample_mu_infinity: alpha = 1 admits no point-process limit away from a circle");
        if (law.alpha < 1.0) {
            const auto* a = std::get_if<Annulus>(&region);
            if (!a || !(a->r1 > 0.0) || !std::isfinite(a->r2))
                throw parameter_error(
                    "sample_mu_infinity: alpha < 1 requires a bounded annulus excluding zero");
        } else {
            // limiting radius R = exp(E log|Z|) = 1
            if (const auto* o = std::get_if<OutsideBand>(&region)) {
                if (!(o->R1 < 1.0 && 1.0 < o->R2))
                    throw parameter_error("sample_mu_infinity: region must exclude a neighborhood of |z| = 1");
            } else {
                const auto& a = std::get<Annulus>(region);
                if (a.r1 < 1.0 && a.r2 > 1.0)
                    throw parameter_error("sample_mu_infinity: region must exclude a neighborhood of |z| = 1");
            }
        }
    }

    MuInfinitySample out;
    out.measure.kind = EigenPointMeasure::Kind::Complex;
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        const std::uint64_t a_k = stream.poisson(theta / static_cast<double>(k));
        for (std::uint64_t p = 0; p < a_k; ++p) {
            const CycleProduct cp = sample_cycle_product(law, k, stream);
            const double root_lm = cp.log_modulus / static_cast<double>(k);
            if (!region_contains_log(region, root_lm)) continue;
            for (std::uint64_t j = 0; j < k; ++j) {
                const double ang = (cp.angle + static_cast<double>(j)) / static_cast<double>(k);
                out.measure.atoms.push_back({root_lm, ang, 1});
            }
        }
    }
    detail::merge_atoms(out.measure.atoms, /*angle_wraps=*/true);

    // Tail estimate theta * sum_{k > k_max} L_k(region) from the local decay
    // rate of L_k(region); +inf when the decay is too slow to sum.
    const double v1 = detail::lk_region_mass(law, k_max, region);
    const double v0 = detail::lk_region_mass(law, std::max<std::uint64_t>(1, k_max / 2), region);
    if (v1 <= 0.0) {
        out.expected_tail = 0.0;
    } else if (v0 <= 0.0 || v1 >= v0) {
        out.expected_tail = std::numeric_limits<double>::infinity();
    } else {
        const double b = std::log(v1 / v0) / std::log(2.0);  // local exponent
        out.expected_tail = (b < -1.0)
                                ? theta * v1 * static_cast<double>(k_max) / (-b - 1.0)
                                : std::numeric_limits<double>::infinity();
    }
    return out;
}

inline std::optional<double> smallest_positive_point(const EigenPointMeasure& measure) {
    if (measure.kind != EigenPointMeasure::Kind::Angle)
        throw parameter_error("smallest_positive_point: needs an angle measure");
    std::optional<double> best;
    for (const auto& a : measure.atoms) {
        if (a.x > 0.0 && (!best || a.x < *best)) best = a.x;
    }
    return best;
}

}  // namespace permspec
