#pragma once

// Verification-only spectral route: dense characteristic polynomial plus
// simultaneous root iteration. Shares no code with the cycle-structure path
// in spectrum.hpp, so agreement between the two is a meaningful check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/spectrum.hpp"

namespace permspec::oracle {

// Monic characteristic polynomial coefficients (c[0] multiplies lambda^{n-1},
// c[n-1] is the constant term) by the Faddeev-LeVerrier trace recursion.
inline std::vector<std::complex<double>> char_poly(const DenseMatrix& a) {
    const std::uint32_t n = a.n;
    std::vector<std::complex<double>> c(n);
    DenseMatrix m = a;
    c[0] = -m.trace();
    for (std::uint32_t k = 2; k <= n; ++k) {
        DenseMatrix shifted = m;
        for (std::uint32_t i = 0; i < n; ++i) shifted.at(i, i) += c[k - 2];
        m = a * shifted;
        c[k - 1] = -m.trace() / static_cast<double>(k);
    }
    return c;
}

inline std::complex<double> poly_eval(const std::vector<std::complex<double>>& c,
                                      std::complex<double> x) {
    std::complex<double> v = 1.0;
    for (const auto& ci : c) v = v * x + ci;
    return v;
}

// Durand-Kerner simultaneous iteration for all roots of a monic polynomial.
inline std::vector<std::complex<double>> durand_kerner(const std::vector<std::complex<double>>& c,
                                                       int max_iter = 600) {
    const std::size_t n = c.size();
    double radius = 1.0;
    for (const auto& ci : c) radius = std::max(radius, std::abs(ci));
    radius = 1.0 + radius;
    std::vector<std::complex<double>> z(n);
    const std::complex<double> seed{0.4, 0.9};
    std::complex<double> w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        w *= seed;
        z[i] = w * radius / std::abs(w);
    }
    for (int it = 0; it < max_iter; ++it) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (denom == std::complex<double>{0.0, 0.0}) {
                z[i] += std::complex<double>{1e-8, 1e-8};
                continue;
            }
            const std::complex<double> step = poly_eval(c, z[i]) / denom;
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step < 1e-15 * radius) break;
    }
    return z;
}

inline std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& a) {
    return durand_kerner(char_poly(a));
}

// Expand prod (x - root)^mult into monic coefficients.
inline std::vector<std::complex<double>> poly_from_atoms(
    const std::vector<std::pair<std::complex<double>, std::uint64_t>>& atoms) {
    std::vector<std::complex<double>> c;  // coefficients after the leading 1
    for (const auto& [root, mult] : atoms) {
        for (std::uint64_t m = 0; m < mult; ++m) {
            c.push_back({0.0, 0.0});
            for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= root * c[i - 1];
            c[0] -= root;
        }
    }
    return c;
}

// Greedy nearest matching between a predicted atom multiset and a root list;
// returns the largest matching distance.
inline double match_distance(const EigenPointMeasure& predicted,
                             std::vector<std::complex<double>> roots) {
    if (predicted.kind != EigenPointMeasure::Kind::Complex)
        throw parameter_error("match_distance: needs a complex measure");
    double worst = 0.0;
    for (const auto& atom : predicted.atoms) {
        const std::complex<double> v = predicted.complex_value(atom);
        for (std::uint64_t m = 0; m < atom.mult; ++m) {
            if (roots.empty()) throw parameter_error("match_distance: multiplicity mismatch");
            std::size_t best = 0;
            double best_d = std::abs(v - roots[0]);
            for (std::size_t i = 1; i < roots.size(); ++i) {
                const double d = std::abs(v - roots[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            worst = std::max(worst, best_d);
            roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(best));
        }
    }
    if (!roots.empty()) throw parameter_error("match_distance: multiplicity mismatch");
    return worst;
}

}  // namespace permspec::oracle
