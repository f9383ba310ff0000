#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "permspec/errors.hpp"

namespace permspec {

inline constexpr double PI = 3.14159265358979323846;
inline constexpr double EULER_GAMMA = 0.57721566490153286061;

// Regularized lower incomplete gamma P(a,x). Series for x < a+1, Lentz
// continued fraction otherwise (classic gammp/gammq split).
inline double gamma_p(double a, double x) {
    if (!(a > 0) || !(x >= 0)) throw parameter_error("gamma_p: need a > 0, x >= 0");
    if (x == 0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

// Chi-square CDF with df degrees of freedom.
inline double chi_square_cdf(double x, double df) {
    if (x <= 0) return 0.0;
    return gamma_p(df / 2.0, x / 2.0);
}

// Upper quantile: smallest x with P(Chi2_df <= x) >= 1 - alpha. Bisection.
inline double chi_square_quantile(double df, double alpha) {
    if (!(df > 0) || !(alpha > 0) || !(alpha < 1))
        throw parameter_error("chi_square_quantile: bad arguments");
    double lo = 0.0, hi = df + 10.0;
    while (chi_square_cdf(hi, df) < 1.0 - alpha) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi_square_cdf(mid, df) < 1.0 - alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw parameter_error("incomplete_beta: need a,b > 0");
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    auto cont_frac = [](double a_, double b_, double x_) {
        const double tiny = 1e-300;
        double c = 1.0, d = 1.0 - (a_ + b_) * x_ / (a_ + 1.0);
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m < 500; ++m) {
            const double m2 = 2.0 * m;
            double aa = m * (b_ - m) * x_ / ((a_ + m2 - 1.0) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (a_ + b_ + m) * x_ / ((a_ + m2) * (a_ + m2 + 1.0));
            d = 1.0 + aa * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < 1e-16) break;
        }
        return h;
    };
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * cont_frac(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     cont_frac(b, a, 1.0 - x) / b;
}

inline double beta_cdf(double x, double a, double b) { return incomplete_beta(a, b, x); }

// Asymptotic one-sided Kolmogorov critical constant: D* = c(alpha)/sqrt(n)
// with c(alpha) = sqrt(-ln(alpha/2)/2) (one-term Kolmogorov tail).
inline double ks_critical_constant(double alpha) {
    if (!(alpha > 0) || !(alpha < 1)) throw parameter_error("ks_critical_constant: bad alpha");
    return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

// Adaptive Simpson quadrature for smooth 1-D integrands.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    auto simpson = [](double fa, double fm, double fb, double h) {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    };
    struct Rec {
        double a, b, fa, fm, fb, whole;
        int depth;
    };
    const double m0 = 0.5 * (a + b);
    double fa = f(a), fm = f(m0), fb = f(b);
    double total = 0.0;
    Rec stack[128];
    int top = 0;
    stack[top++] = {a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), 0};
    while (top > 0) {
        Rec r = stack[--top];
        const double m = 0.5 * (r.a + r.b);
        const double lm = 0.5 * (r.a + m), rm = 0.5 * (m + r.b);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(r.fa, flm, r.fm, m - r.a);
        const double right = simpson(r.fm, frm, r.fb, r.b - m);
        const double delta = left + right - r.whole;
        if (r.depth >= max_depth || std::fabs(delta) <= 15.0 * tol) {
            total += left + right + delta / 15.0;
        } else {
            stack[top++] = {r.a, m, r.fa, flm, r.fm, left, r.depth + 1};
            stack[top++] = {m, r.b, r.fm, frm, r.fb, right, r.depth + 1};
        }
    }
    return total;
}

}  // namespace permspec
