#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/rng.hpp"
#include "permspec/special.hpp"

namespace permspec {

// The law L of the matrix entries. Four variants cover every case analyzed:
//   DiracOne       z = 1
//   RootsOfUnity   z = e^{2 pi i j/r} with probability p[j]
//   UniformCircle  z uniform on the unit circle
//   LogStable      z = e^{i Theta + rho S_alpha}, Theta uniform on [0,2pi),
//                  S_alpha standard symmetric stable (CF exp(-|t|^alpha))
struct DistributionSpec {
    enum class Kind { DiracOne, RootsOfUnity, UniformCircle, LogStable };

    Kind kind = Kind::DiracOne;
    std::uint32_t r = 1;         // RootsOfUnity order
    std::vector<double> p;       // RootsOfUnity angle probabilities, length r
    double alpha = 2.0;          // LogStable index
    double rho = 1.0;            // LogStable scale

    static DistributionSpec dirac_one() { return {}; }

    static DistributionSpec uniform_circle() {
        DistributionSpec s;
        s.kind = Kind::UniformCircle;
        return s;
    }

    static DistributionSpec roots_of_unity(std::uint32_t r, std::vector<double> p) {
        DistributionSpec s;
        s.kind = Kind::RootsOfUnity;
        s.r = r;
        s.p = std::move(p);
        s.validate();
        return s;
    }

    static DistributionSpec log_stable(double alpha, double rho) {
        DistributionSpec s;
        s.kind = Kind::LogStable;
        s.alpha = alpha;
        s.rho = rho;
        s.validate();
        return s;
    }

    void validate() const {
        switch (kind) {
            case Kind::DiracOne:
            case Kind::UniformCircle:
                return;
            case Kind::RootsOfUnity: {
                if (r == 0 || p.size() != r)
                    throw parameter_error("RootsOfUnity: p must have length r >= 1");
                double sum = 0.0;
                for (double v : p) {
                    if (!(v >= 0.0)) throw parameter_error("RootsOfUnity: probabilities must be >= 0");
                    sum += v;
                }
                if (std::fabs(sum - 1.0) > 1e-12)
                    throw parameter_error("RootsOfUnity: probabilities must sum to 1");
                return;
            }
            case Kind::LogStable:
                if (!(alpha > 0.0) || !(alpha <= 2.0))
                    throw parameter_error("LogStable: alpha must be in (0,2]");
                if (!(rho > 0.0)) throw parameter_error("LogStable: rho must be > 0");
                return;
        }
    }

    bool unit_modulus() const { return kind != Kind::LogStable; }

    // Discrete on a finite set of angles.
    bool discrete() const { return kind == Kind::DiracOne || kind == Kind::RootsOfUnity; }

    // Angle probability vector on Z/r for discrete laws.
    std::vector<double> angle_probabilities() const {
        if (kind == Kind::DiracOne) return {1.0};
        if (kind == Kind::RootsOfUnity) return p;
        throw parameter_error("angle_probabilities: law is not discrete");
    }
};

// CLI text form: "dirac1" | "uniform" | "roots:p0,p1,..." | "log-stable:alpha=A,rho=R"
inline DistributionSpec parse_law(const std::string& text) {
    if (text == "dirac1") return DistributionSpec::dirac_one();
    if (text == "uniform") return DistributionSpec::uniform_circle();
    auto starts_with = [&](const char* prefix) { return text.rfind(prefix, 0) == 0; };
    if (starts_with("roots:")) {
        std::vector<double> p;
        std::stringstream ss(text.substr(6));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                p.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw parameter_error("parse_law: bad probability '" + item + "'");
            }
        }
        if (p.empty()) throw parameter_error("parse_law: roots law needs probabilities");
        const std::uint32_t r = static_cast<std::uint32_t>(p.size());
        return DistributionSpec::roots_of_unity(r, std::move(p));
    }
    if (starts_with("log-stable:")) {
        double alpha = std::nan(""), rho = std::nan("");
        std::stringstream ss(text.substr(11));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw parameter_error("parse_law: expected key=value in '" + item + "'");
            const std::string key = item.substr(0, eq);
            double value;
            try {
                value = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw parameter_error("parse_law: bad value in '" + item + "'");
            }
            if (key == "alpha")
                alpha = value;
            else if (key == "rho")
                rho = value;
            else
                throw parameter_error("parse_law: unknown key '" + key + "'");
        }
        if (std::isnan(alpha) || std::isnan(rho))
            throw parameter_error("parse_law: log-stable needs alpha and rho");
        return DistributionSpec::log_stable(alpha, rho);
    }
    throw parameter_error("parse_law: unrecognized law '" + text + "'");
}

inline std::string format_law(const DistributionSpec& law) {
    switch (law.kind) {
        case DistributionSpec::Kind::DiracOne:
            return "dirac1";
        case DistributionSpec::Kind::UniformCircle:
            return "uniform";
        case DistributionSpec::Kind::RootsOfUnity: {
            std::string out = "roots:";
            char buf[64];
            for (std::size_t i = 0; i < law.p.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", law.p[i]);
                out += (i ? "," : "") + std::string(buf);
            }
            return out;
        }
        case DistributionSpec::Kind::LogStable: {
            char buf[96];
            std::snprintf(buf, sizeof buf, "log-stable:alpha=%.17g,rho=%.17g", law.alpha, law.rho);
            return buf;
        }
    }
    return "";
}

// GEM stick-breaking weights, truncated once the residual stick is below tol.
struct GemWeights {
    std::vector<double> weights;
    double tail_mass = 0.0;
};

inline GemWeights sample_gem(double theta, RandomStream& stream, double tol = 1e-12) {
    if (!std::isfinite(theta) || !(theta > 0)) throw parameter_error("sample_gem: theta must be finite and > 0");
    if (!(tol > 0) || !(tol < 1)) throw parameter_error("sample_gem: tol must be in (0,1)");
    GemWeights out;
    double remaining = 1.0;
    const double inv_theta = 1.0 / theta;
    while (remaining >= tol) {
        // Beta(1,theta) via inversion: survival (1-x)^theta
        const double b = 1.0 - std::pow(stream.u01_open(), inv_theta);
        out.weights.push_back(remaining * b);
        remaining *= (1.0 - b);
        if (out.weights.size() > 100000000)
            throw numerical_error("sample_gem: truncation did not terminate");
    }
    out.tail_mass = remaining;
    return out;
}

inline GemWeights sample_poisson_dirichlet(double theta, RandomStream& stream, double tol = 1e-12) {
    GemWeights out = sample_gem(theta, stream, tol);
    std::sort(out.weights.begin(), out.weights.end(), std::greater<double>());
    return out;
}

// Standard symmetric alpha-stable sample, CF exp(-|t|^alpha).
// Chambers-Mallows-Stuck transform; alpha = 1 uses the Cauchy branch directly.
inline double sample_stable(double alpha, RandomStream& stream) {
    if (!(alpha > 0.0) || !(alpha <= 2.0)) throw parameter_error("sample_stable: alpha must be in (0,2]");
    const double u = PI * (stream.u01_open() - 0.5);  // uniform on (-pi/2, pi/2)
    if (alpha == 1.0) return std::tan(u);
    const double w = stream.exponential();
    const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
    const double t = std::pow(std::cos(u * (1.0 - alpha)) / w, (1.0 - alpha) / alpha);
    return s * t;
}

inline std::complex<double> sample_z(const DistributionSpec& law, RandomStream& stream) {
    using Kind = DistributionSpec::Kind;
    switch (law.kind) {
        case Kind::DiracOne:
            return {1.0, 0.0};
        case Kind::UniformCircle: {
            const double a = 2.0 * PI * stream.u01();
            return {std::cos(a), std::sin(a)};
        }
        case Kind::RootsOfUnity: {
            double u = stream.u01();
            std::uint32_t j = law.r - 1;
            for (std::uint32_t i = 0; i < law.r; ++i) {
                u -= law.p[i];
                if (u < 0) {
                    j = i;
                    break;
                }
            }
            const double a = 2.0 * PI * j / law.r;
            return {std::cos(a), std::sin(a)};
        }
        case Kind::LogStable: {
            const double a = 2.0 * PI * stream.u01();
            const double m = std::exp(law.rho * sample_stable(law.alpha, stream));
            return {m * std::cos(a), m * std::sin(a)};
        }
    }
    throw parameter_error("sample_z: invalid law");
}

// One draw from L in log-polar coordinates (log|z|, arg(z)/2pi). Same
// randomness usage as sample_z; keeps heavy-tailed moduli finite where
// exp(rho S_alpha) would overflow.
struct ZLogDraw {
    double log_modulus;
    double angle;  // in [0,1)
};

inline ZLogDraw sample_z_log(const DistributionSpec& law, RandomStream& stream) {
    using Kind = DistributionSpec::Kind;
    switch (law.kind) {
        case Kind::DiracOne:
            return {0.0, 0.0};
        case Kind::UniformCircle:
            return {0.0, stream.u01()};
        case Kind::RootsOfUnity: {
            double u = stream.u01();
            std::uint32_t j = law.r - 1;
            for (std::uint32_t i = 0; i < law.r; ++i) {
                u -= law.p[i];
                if (u < 0) {
                    j = i;
                    break;
                }
            }
            return {0.0, static_cast<double>(j) / law.r};
        }
        case Kind::LogStable: {
            const double a = stream.u01();
            return {law.rho * sample_stable(law.alpha, stream), a};
        }
    }
    throw parameter_error("sample_z_log: invalid law");
}

// l-fold cyclic convolution power of p on Z/r, by squaring.
inline std::vector<double> convolution_power_on_roots(const std::vector<double>& p, std::uint64_t l) {
    if (l == 0) throw parameter_error("convolution_power_on_roots: l must be >= 1");
    const std::size_t r = p.size();
    if (r == 0) throw parameter_error("convolution_power_on_roots: empty vector");
    auto conv = [r](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(r, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            if (a[i] == 0.0) continue;
            for (std::size_t j = 0; j < r; ++j) {
                c[(i + j) % r] += a[i] * b[j];
            }
        }
        return c;
    };
    std::vector<double> result(r, 0.0);
    result[0] = 1.0;
    std::vector<double> base = p;
    while (l > 0) {
        if (l & 1) result = conv(result, base);
        l >>= 1;
        if (l > 0) base = conv(base, base);
    }
    return result;
}

// Average of d consecutive convolution powers starting at the k-th.
inline std::vector<double> cesaro_convolution(const std::vector<double>& p, std::uint64_t k,
                                              std::uint64_t d) {
    if (k == 0 || d == 0) throw parameter_error("cesaro_convolution: k and d must be >= 1");
    const std::size_t r = p.size();
    std::vector<double> cur = convolution_power_on_roots(p, k);
    std::vector<double> acc(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) acc[i] = cur[i] / static_cast<double>(d);
    auto conv = [r](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(r, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            if (a[i] == 0.0) continue;
            for (std::size_t j = 0; j < r; ++j) c[(i + j) % r] += a[i] * b[j];
        }
        return c;
    };
    for (std::uint64_t t = 1; t < d; ++t) {
        cur = conv(cur, p);
        for (std::size_t i = 0; i < r; ++i) acc[i] += cur[i] / static_cast<double>(d);
    }
    return acc;
}

// Law of the cycle phase shift chi: uniform on {j/r} for finite r, uniform
// on [0,1) when r = 0 (the continuous case).
struct ShiftLaw {
    std::uint64_t r = 0;

    bool discrete() const { return r != 0; }

    double sample(RandomStream& stream) const {
        if (r == 0) return stream.u01();
        return static_cast<double>(stream.below(r)) / static_cast<double>(r);
    }
};

struct LimitShift {
    std::optional<std::uint64_t> r;  // r(L); nullopt means infinity
    ShiftLaw shift;                  // D(L)
};

// r(L): the smallest r such that L is carried by the r-th roots of unity,
// computed structurally; D(L) uniform on that group (or on the circle).
inline LimitShift limit_shift_law(const DistributionSpec& law) {
    using Kind = DistributionSpec::Kind;
    switch (law.kind) {
        case Kind::DiracOne:
            return {1, ShiftLaw{1}};
        case Kind::RootsOfUnity: {
            for (std::uint32_t d = 1; d <= law.r; ++d) {
                if (law.r % d != 0) continue;
                const std::uint32_t step = law.r / d;
                bool carried = true;
                for (std::uint32_t j = 0; j < law.r; ++j) {
                    if (law.p[j] > 0.0 && j % step != 0) {
                        carried = false;
                        break;
                    }
                }
                if (carried) return {d, ShiftLaw{d}};
            }
            return {law.r, ShiftLaw{law.r}};  // unreachable: d = r always works
        }
        case Kind::UniformCircle:
        case Kind::LogStable:
            return {std::nullopt, ShiftLaw{0}};
    }
    throw parameter_error("limit_shift_law: invalid law");
}

// Distribution of (log|Z|, arg(Z)/2pi mod 1) for Z a product of l i.i.d.
// draws from L, via the closed-form shortcuts per variant.
struct CycleProduct {
    double log_modulus = 0.0;
    double angle = 0.0;  // in [0,1)
};

inline CycleProduct sample_cycle_product(const DistributionSpec& law, std::uint64_t l,
                                         RandomStream& stream) {
    if (l == 0) throw parameter_error("sample_cycle_product: l must be >= 1");
    using Kind = DistributionSpec::Kind;
    switch (law.kind) {
        case Kind::DiracOne:
            return {0.0, 0.0};
        case Kind::UniformCircle:
            return {0.0, stream.u01()};
        case Kind::RootsOfUnity: {
            const std::vector<double> q = convolution_power_on_roots(law.p, l);
            double u = stream.u01();
            std::uint32_t s = law.r - 1;
            for (std::uint32_t i = 0; i < law.r; ++i) {
                u -= q[i];
                if (u < 0) {
                    s = i;
                    break;
                }
            }
            return {0.0, static_cast<double>(s) / law.r};
        }
        case Kind::LogStable: {
            const double lm =
                law.rho * std::pow(static_cast<double>(l), 1.0 / law.alpha) * sample_stable(law.alpha, stream);
            return {lm, stream.u01()};
        }
    }
    throw parameter_error("sample_cycle_product: invalid law");
}

}  // namespace permspec
