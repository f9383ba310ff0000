#pragma once

// The verification suites behind `permspec verify`: each suite checks one of
// the statistical/exact contracts of the library at its stated tolerance and
// reports one line per criterion. All randomness derives from the given seed,
// so reports are byte-reproducible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "permspec/dense_oracle.hpp"
#include "permspec/estimators.hpp"
#include "permspec/exact_measures.hpp"
#include "permspec/gap_solver.hpp"
#include "permspec/oracle.hpp"
#include "permspec/spectrum.hpp"
#include "permspec/virtual_permutation.hpp"

namespace permspec::verify {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline CriterionResult criterion(std::string name, bool passed, std::string detail) {
    return {std::move(name), passed, std::move(detail)};
}

struct LawPair {
    DistributionSpec law;
    oracle::RationalLaw rlaw;
};

inline std::vector<LawPair> oracle_laws() {
    using oracle::Rational;
    std::vector<LawPair> out;
    out.push_back({DistributionSpec::dirac_one(), oracle::RationalLaw{}});
    out.push_back({DistributionSpec::roots_of_unity(2, {0.5, 0.5}),
                   {2, {Rational(1, 2), Rational(1, 2)}}});
    out.push_back({DistributionSpec::roots_of_unity(3, {0.5, 0.25, 0.25}),
                   {3, {Rational(1, 2), Rational(1, 4), Rational(1, 4)}}});
    out.push_back({DistributionSpec::roots_of_unity(4, {0.125, 0.375, 0.25, 0.25}),
                   {4, {Rational(1, 8), Rational(3, 8), Rational(1, 4), Rational(1, 4)}}});
    return out;
}

}  // namespace detail

// Closed-form measures match exhaustive Ewens enumeration for N <= 6,
// theta in {1/2, 1, 2}, DiracOne and RootsOfUnity(2..4), to 1e-12.
inline std::vector<CriterionResult> suite_oracle(std::uint64_t) {
    using oracle::Rational;
    const std::vector<Rational> thetas = {Rational(1, 2), Rational(1), Rational(2)};
    const auto laws = detail::oracle_laws();
    double worst_mean = 0.0, worst_q1 = 0.0, worst_q2 = 0.0, worst_u = 0.0, worst_p = 0.0;

    const oracle::ArcIndicator arc1{Rational(5, 64), Rational(37, 64)};
    const oracle::ArcIndicator arc2{Rational(21, 64), Rational(53, 64)};
    const TestFn f1 = FnAngularInterval{5.0 / 64.0, 37.0 / 64.0};
    const TestFn f2 = FnAngularInterval{21.0 / 64.0, 53.0 / 64.0};

    for (const auto& theta : thetas) {
        for (std::uint32_t N = 2; N <= 6; ++N) {
            const auto table = oracle::enumerate_ewens(N, theta);
            const double th = theta.to_double();
            for (const auto& [law, rlaw] : laws) {
                // mean measure, atom by atom
                const auto exact = oracle::exact_mean_measure(table, rlaw);
                const auto approx = discrete_mixture_atoms(mean_measure(N, th, law), law);
                if (exact.size() != approx.size()) worst_mean = 1.0;
                for (const auto& [angle, mass] : exact) {
                    const auto it = approx.find(angle);
                    if (it == approx.end()) {
                        worst_mean = 1.0;
                        continue;
                    }
                    worst_mean = std::max(worst_mean, std::fabs(it->second - mass.to_double()));
                }
                // 1-correlation
                {
                    const TestFn fns[1] = {f1};
                    const double got = q_correlation(N, th, law, 1, fns).value;
                    const double expect = oracle::exact_mean_integral(table, rlaw, arc1).to_double();
                    worst_q1 = std::max(worst_q1, std::fabs(got - expect));
                }
                // 2-correlation: an arc pair and the total-mass configuration
                {
                    const TestFn fns[2] = {f1, f2};
                    const double got = q_correlation(N, th, law, 2, fns).value;
                    const double expect = oracle::exact_correlation2(table, rlaw, arc1, arc2).to_double();
                    worst_q2 = std::max(worst_q2, std::fabs(got - expect));
                    const TestFn ones[2] = {FnOne{}, FnOne{}};
                    const double mass = q_correlation(N, th, law, 2, ones).value;
                    worst_q2 = std::max(worst_q2, std::fabs(mass - double(N) * double(N - 1)));
                }
            }
            // u coefficients against falling-factorial expectations
            const std::vector<std::map<std::uint64_t, std::uint64_t>> lambdas = {
                {{1, 1}}, {{2, 1}}, {{1, 2}}, {{1, 1}, {2, 1}}, {{2, 2}}, {{static_cast<std::uint64_t>(N), 1}}};
            for (const auto& lambda : lambdas) {
                Rational expected(0);
                for (const auto& [sigma, prob] : table.rows) {
                    const auto st = cycle_statistics(sigma);
                    Rational ff(1);
                    for (const auto& [k, lam] : lambda) {
                        const std::int64_t a = k <= N ? st.counts[k] : 0;
                        for (std::uint64_t i = 0; i < lam; ++i) ff *= Rational(a - std::int64_t(i));
                    }
                    expected += prob * ff;
                }
                worst_u = std::max(worst_u,
                                   std::fabs(u_coefficient(N, th, lambda) - expected.to_double()));
            }
            // Block-support probabilities over all compositions of N
            std::vector<std::uint64_t> comp;
            std::function<void(std::uint64_t)> rec = [&](std::uint64_t rem) {
                if (rem == 0) {
                    Rational direct(0);
                    for (const auto& [sigma, prob] : table.rows) {
                        bool match = sigma.cycle_count() == comp.size();
                        std::uint32_t start = 1;
                        for (std::size_t i = 0; match && i < comp.size(); ++i) {
                            const auto& c = sigma.cycles[i];
                            if (c.size() != comp[i]) {
                                match = false;
                                break;
                            }
                            for (std::uint32_t e : c)
                                if (e < start || e >= start + comp[i]) match = false;
                            start += std::uint32_t(comp[i]);
                        }
                        if (match) direct += prob;
                    }
                    worst_p = std::max(worst_p, std::fabs(pd_partition_expectation(th, N, comp) -
                                                          direct.to_double()));
                    return;
                }
                for (std::uint64_t l = 1; l <= rem; ++l) {
                    comp.push_back(l);
                    rec(rem - l);
                    comp.pop_back();
                }
            };
            rec(N);
        }
    }
    std::vector<CriterionResult> out;
    out.push_back(detail::criterion("oracle-mean-measure", worst_mean <= 1e-12,
                                    detail::fmt("max|diff|=%.3g tol=1e-12", worst_mean)));
    out.push_back(detail::criterion("oracle-1-correlation", worst_q1 <= 1e-12,
                                    detail::fmt("max|diff|=%.3g tol=1e-12", worst_q1)));
    out.push_back(detail::criterion("oracle-2-correlation", worst_q2 <= 1e-12,
                                    detail::fmt("max|diff|=%.3g tol=1e-12", worst_q2)));
    out.push_back(detail::criterion("oracle-u-coefficient", worst_u <= 1e-12,
                                    detail::fmt("max|diff|=%.3g tol=1e-12", worst_u)));
    out.push_back(detail::criterion("oracle-partition-probability", worst_p <= 1e-12,
                                    detail::fmt("max|diff|=%.3g tol=1e-12", worst_p)));
    return out;
}

// The cycle-structure spectrum equals the dense-matrix oracle on 200 random
// instances at N <= 8, tolerance 1e-9.
inline std::vector<CriterionResult> suite_spectral(std::uint64_t seed) {
    RandomStream rng(seed, 2001);
    double worst_eigen = 0.0, worst_trace = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint32_t n = 2 + std::uint32_t(rng.below(7));
        const auto sigma = crp_to_permutation(sample_crp_prefix(1.0, n, rng));
        std::vector<std::complex<double>> z(n);
        for (auto& v : z) v = sample_z(DistributionSpec::uniform_circle(), rng);
        const auto data = make_cycle_data(sigma, z);
        const auto predicted = eigenvalues_from_cycles(data);
        const auto m = build_matrix(sigma, z);
        worst_eigen = std::max(worst_eigen, oracle::match_distance(predicted, oracle::dense_eigenvalues(m)));
        auto mp = m;
        for (std::uint64_t k = 1; k <= 12; ++k) {
            worst_trace = std::max(worst_trace, std::abs(trace_power(data, k) - mp.trace()));
            mp = mp * m;
        }
    }
    std::vector<CriterionResult> out;
    out.push_back(detail::criterion("spectral-eigenvalues", worst_eigen <= 1e-9,
                                    detail::fmt("max|diff|=%.3g tol=1e-9", worst_eigen)));
    out.push_back(detail::criterion("spectral-traces", worst_trace <= 1e-9,
                                    detail::fmt("max|diff|=%.3g tol=1e-9", worst_trace)));
    return out;
}

// Bulk concentration near |z| = 1 for the log-normal modulus: the fraction
// outside the log-band 0.1 is below 0.05 at N = 1e5 and decreasing in N.
inline std::vector<CriterionResult> suite_bulk(std::uint64_t seed) {
    const std::uint32_t stages[3] = {1000, 10000, 100000};
    double frac[3] = {0.0, 0.0, 0.0};
    const int n_traj = 10;
    for (int t = 0; t < n_traj; ++t) {
        RandomStream rng(seed, 3001 + std::uint64_t(t));
        VirtualTrajectory traj(1.0, DistributionSpec::log_stable(2.0, 1.0));
        for (int s = 0; s < 3; ++s) {
            traj.extend(stages[s], rng);
            const auto& lengths = traj.cycle_lengths();
            double outside = 0.0;
            for (std::size_t m = 0; m < lengths.size(); ++m) {
                const double root_lm = traj.cycle_log_modulus(m) / double(lengths[m]);
                if (std::fabs(root_lm) > 0.1) outside += double(lengths[m]);
            }
            frac[s] += outside / double(stages[s]) / n_traj;
        }
    }
    const bool monotone = frac[0] > frac[1] && frac[1] > frac[2];
    const bool small = frac[2] < 0.05;
    return {detail::criterion(
        "bulk-concentration", monotone && small,
        detail::fmt("fractions N=1e3:%.4f 1e4:%.4f 1e5:%.4f (monotone, last < 0.05)", frac[0], frac[1],
                    frac[2]))};
}

// Unit intensity of the rescaled eigenangles, finite N and the limit
// process, 1e6 samples each, 4 sigma.
inline std::vector<CriterionResult> suite_correlation1(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    int idx = 0;
    for (std::uint32_t N : {10u, 100u}) {
        RandomStream rng(seed, 4001 + 10 * std::uint64_t(idx++));
        CrpCycleSampler sampler(1.0, N);
        WindowCountAccumulator acc(0.0, 1.0);
        for (int i = 0; i < 1000000; ++i) {
            const auto& lengths = sampler.sample_lengths(rng);
            const auto data = sample_cycle_data(DistributionSpec::uniform_circle(), lengths, rng);
            acc.add(scaled_eigenangles(data, N, {-0.25, 1.25}));
        }
        const auto est = acc.estimate();
        const double z = std::fabs(est.mean - 1.0) / est.std_error;
        out.push_back(detail::criterion(detail::fmt("correlation1-finite-N%u", N), z <= 4.0,
                                        detail::fmt("mean=%.5f z=%.2f (4 sigma)", est.mean, z)));
    }
    {
        RandomStream rng(seed, 4002);
        WindowCountAccumulator acc(0.0, 1.0);
        for (int i = 0; i < 1000000; ++i)
            acc.add(sample_tau_infinity(1.0, ShiftLaw{0}, {-0.25, 1.25}, 1e-10, rng));
        const auto est = acc.estimate();
        const double z = std::fabs(est.mean - 1.0) / est.std_error;
        out.push_back(detail::criterion("correlation1-limit", z <= 4.0,
                                        detail::fmt("mean=%.5f z=%.2f (4 sigma)", est.mean, z)));
    }
    return out;
}

// The windowed pair-correlation estimator over tau-infinity samples matches
// the bin averages of phi_theta, 4 sigma, theta in {1, 2}.
inline std::vector<CriterionResult> suite_pair(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    const std::vector<SeparationBin> bins = {{0.2, 0.8}, {1.4, 1.6}, {2.2, 2.8}};
    int idx = 0;
    for (double theta : {1.0, 2.0}) {
        RandomStream rng(seed, 5001 + std::uint64_t(idx++));
        PairCorrelationAccumulator acc(bins, 0.0, 10.0);
        for (int i = 0; i < 1000000; ++i)
            acc.add(sample_tau_infinity(theta, ShiftLaw{0}, {-0.5, 13.0}, 1e-10, rng));
        const auto est = acc.estimate();
        for (std::size_t b = 0; b < bins.size(); ++b) {
            double target;
            if (bins[b].hi <= 1.0) {
                target = theta / (theta + 1.0);  // no lattice term below separation 1
            } else {
                target = adaptive_simpson([&](double x) { return pair_correlation_phi(theta, x); },
                                          bins[b].lo, bins[b].hi) /
                         (bins[b].hi - bins[b].lo);
            }
            const double z = std::fabs(est.value[b] - target) / est.std_error[b];
            out.push_back(detail::criterion(
                detail::fmt("pair-theta%.0f-bin(%.1f,%.1f)", theta, bins[b].lo, bins[b].hi), z <= 4.0,
                detail::fmt("est=%.4f target=%.4f z=%.2f (4 sigma)", est.value[b], target, z)));
        }
    }
    return out;
}

// The three routes to the gap distribution agree.
inline std::vector<CriterionResult> suite_gap(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    int idx = 0;
    for (double theta : {0.5, 1.0, 2.0}) {
        const auto gv = solve_volterra(theta, 5e-4, 6.0);
        const auto gf = fourier_gap(theta, 4000.0, 200000, 5.0, 0.02);
        double sup = 0.0;
        for (std::size_t i = 0; i < gf.values.size(); ++i)
            sup = std::max(sup, std::fabs(gf.values[i] - gv.value_at(gf.x_at(i))));
        out.push_back(detail::criterion(detail::fmt("gap-volterra-vs-fourier-theta%.1f", theta),
                                        sup <= 1e-3, detail::fmt("sup|diff|=%.3g tol=1e-3", sup)));

        double worst_res = 0.0;
        for (double x : {1.30025, 2.50025, 3.70025})
            worst_res = std::max(worst_res, volterra_residual(gv, theta, x));
        out.push_back(detail::criterion(detail::fmt("gap-volterra-residual-theta%.1f", theta),
                                        worst_res <= 1e-6,
                                        detail::fmt("max residual=%.3g tol=1e-6", worst_res)));

        RandomStream rng(seed, 6001 + std::uint64_t(idx++));
        const std::size_t n_mc = 1000000;
        const auto mc = mc_gap(theta, n_mc, 1e-10, 0.5, 4.0, rng);
        double worst_z = 0.0;
        for (double x : {0.5, 1.0, 2.0, 4.0}) {
            const double ref_v = gv.value_at(x), ref_f = gf.value_at(x);
            const double se = std::sqrt(std::max(ref_v * (1.0 - ref_v), 1e-12) / double(n_mc));
            worst_z = std::max(worst_z, std::fabs(mc.value_at(x) - ref_v) / se);
            worst_z = std::max(worst_z, std::fabs(mc.value_at(x) - ref_f) / se);
        }
        out.push_back(detail::criterion(detail::fmt("gap-mc-theta%.1f", theta), worst_z <= 4.0,
                                        detail::fmt("max z=%.2f (4 binomial sigma)", worst_z)));
    }
    return out;
}

// The scaled smallest eigenangle at N = 1e4 against the limit sampler,
// two-sample KS at alpha = 0.01, n = 1e5.
inline std::vector<CriterionResult> suite_smallest(std::uint64_t seed) {
    const std::uint32_t N = 10000;
    const std::size_t n = 100000;
    RandomStream r1(seed, 7001), r2(seed, 7002);
    CrpCycleSampler sampler(1.0, N);
    std::vector<double> finite(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& lengths = sampler.sample_lengths(r1);
        const auto data = sample_cycle_data(DistributionSpec::uniform_circle(), lengths, r1);
        const auto m = scaled_eigenangles(data, N, {0.0, 64.0});
        const auto s = smallest_positive_point(m);
        finite[i] = s ? *s : 64.0;
    }
    std::vector<double> limit = mc_gap_samples(1.0, n, 1e-10, r2);
    const auto rep = ks_two_sample(std::move(finite), std::move(limit), 0.01, "smallest-angle");
    return {detail::criterion("smallest-angle-ks", rep.passed,
                              detail::fmt("D=%.5f threshold=%.5f n=1e5", rep.statistic, rep.threshold))};
}

// sum y_m eps_m follows Beta(theta/2, theta/2), KS at 0.01.
inline std::vector<CriterionResult> suite_beta(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    int idx = 0;
    for (double theta : {1.0, 2.0}) {
        RandomStream rng(seed, 8001 + std::uint64_t(idx++));
        std::vector<double> s(100000);
        for (auto& v : s) v = beta_identity_sample(theta, rng, 1e-10);
        const auto rep = ks_test(std::move(s),
                                 [theta](double x) { return beta_cdf(std::clamp(x, 0.0, 1.0), theta / 2.0, theta / 2.0); },
                                 0.01, "beta identity");
        out.push_back(detail::criterion(detail::fmt("beta-identity-theta%.0f", theta), rep.passed,
                                        detail::fmt("D=%.5f threshold=%.5f", rep.statistic, rep.threshold)));
    }
    return out;
}

// The Feller coupling reproduces the cycle-type law at N=5 and the theta/k
// spacing intensity at large N.
inline std::vector<CriterionResult> suite_feller(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    using oracle::Rational;
    int idx = 0;
    for (const auto& theta : {Rational(1, 2), Rational(1), Rational(2)}) {
        const auto types = oracle::cycle_type_distribution(oracle::enumerate_ewens(5, theta));
        RandomStream rng(seed, 9001 + std::uint64_t(idx++));
        const int n = 100000;
        std::map<std::vector<std::uint32_t>, double> counts;
        for (int i = 0; i < n; ++i) {
            const auto f = sample_feller(theta.to_double(), 5, rng);
            std::vector<std::uint32_t> type;
            for (std::uint32_t k = 5; k >= 1; --k)
                for (std::uint32_t c = 0; c < f.b[k]; ++c) type.push_back(k);
            counts[type] += 1;
        }
        std::vector<double> obs, expect;
        for (const auto& [type, p] : types) {
            obs.push_back(counts[type]);
            expect.push_back(p.to_double() * n);
        }
        const auto rep = chi_square(obs, expect, 0.01, "feller cycle type");
        out.push_back(detail::criterion(detail::fmt("feller-type-theta%.3g", theta.to_double()), rep.passed,
                                        detail::fmt("chi2=%.2f threshold=%.2f", rep.statistic, rep.threshold)));
    }
    {
        const double theta = 1.0;
        RandomStream rng(seed, 9100);
        const int n = 10000;
        const std::uint32_t N = 10000;
        double mean[5] = {0}, mean2[5] = {0};
        for (int i = 0; i < n; ++i) {
            const auto f = sample_feller(theta, N, rng);
            for (std::uint32_t k = 1; k <= 5; ++k) {
                mean[k - 1] += f.b[k];
                mean2[k - 1] += double(f.b[k]) * f.b[k];
            }
        }
        double worst_z = 0.0;
        for (std::uint32_t k = 1; k <= 5; ++k) {
            const double m = mean[k - 1] / n;
            const double se = std::sqrt((mean2[k - 1] / n - m * m) / n);
            worst_z = std::max(worst_z, std::fabs(m - theta / k) / se);
        }
        out.push_back(detail::criterion("feller-intensity", worst_z <= 3.0,
                                        detail::fmt("max z=%.2f (3 sigma) for k=1..5 at N=1e4", worst_z)));
    }
    return out;
}

// Cesaro averages of convolution powers flatten onto the carrying subgroup,
// exactly computed Fourier coefficients.
inline std::vector<CriterionResult> suite_cesaro(std::uint64_t) {
    struct Case {
        DistributionSpec law;
        std::uint64_t expect_r;
    };
    std::vector<Case> cases;
    for (std::uint32_t r = 2; r <= 6; ++r) {
        std::vector<double> p(r);
        double sum = 0.0;
        for (std::uint32_t j = 0; j < r; ++j) sum += j + 1.0;
        for (std::uint32_t j = 0; j < r; ++j) p[j] = (j + 1.0) / sum;
        cases.push_back({DistributionSpec::roots_of_unity(r, p), r});
    }
    cases.push_back({DistributionSpec::roots_of_unity(4, {0.7, 0.0, 0.3, 0.0}), 2});
    cases.push_back({DistributionSpec::roots_of_unity(6, {0.6, 0.0, 0.0, 0.4, 0.0, 0.0}), 2});
    cases.push_back({DistributionSpec::roots_of_unity(6, {0.5, 0.0, 0.3, 0.0, 0.2, 0.0}), 3});
    cases.push_back({DistributionSpec::roots_of_unity(5, {0.6, 0.4, 0.0, 0.0, 0.0}), 5});

    auto max_dev = [](const DistributionSpec& law, std::uint64_t r_of, std::uint64_t kd) {
        const auto ces = cesaro_convolution(law.p, kd, kd);
        const std::size_t r = law.p.size();
        double dev = 0.0;
        for (std::size_t q = 0; q < r; ++q) {
            std::complex<double> hat = 0.0;
            for (std::size_t j = 0; j < r; ++j)
                hat += ces[j] * std::exp(std::complex<double>(0.0, 2.0 * PI * double(j) * double(q) / double(r)));
            const double target = (q % r_of == 0) ? 1.0 : 0.0;
            dev = std::max(dev, std::abs(hat - target));
        }
        return dev;
    };

    bool ok = true;
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto shift = limit_shift_law(c.law);
        if (!shift.r || *shift.r != c.expect_r) ok = false;
        const double d256 = max_dev(c.law, c.expect_r, 256);
        const double d16 = max_dev(c.law, c.expect_r, 16);
        worst = std::max(worst, d256);
        if (d256 > 1e-2 || !(d256 < d16)) ok = false;
    }
    return {detail::criterion("cesaro-uniformization", ok,
                              detail::fmt("max deviation at (256,256)=%.3g tol=1e-2, decreasing", worst))};
}

// Translation invariance of the count-vector law at N=100.
inline std::vector<CriterionResult> suite_translation(std::uint64_t seed) {
    const double shift = 0.37;
    const std::uint32_t N = 100;
    const int n = 100000;
    RandomStream r1(seed, 11001), r2(seed, 11002);
    CrpCycleSampler s1(1.0, N), s2(1.0, N);
    std::map<std::vector<int>, std::size_t> index;
    std::vector<double> c1, c2;
    auto category = [&](const CycleData& data, double lo) {
        const auto m = scaled_eigenangles(data, N, {lo, lo + 5.0});
        std::vector<int> v(5, 0);
        for (const auto& a : m.atoms) {
            const int b = int(std::floor(a.x - lo));
            if (b >= 0 && b < 5) v[std::size_t(b)] += int(a.mult);
        }
        auto [it, inserted] = index.emplace(std::move(v), index.size());
        if (inserted) {
            c1.push_back(0);
            c2.push_back(0);
        }
        return it->second;
    };
    for (int i = 0; i < n; ++i) {
        const auto d1 = sample_cycle_data(DistributionSpec::uniform_circle(), s1.sample_lengths(r1), r1);
        c1[category(d1, 0.0)] += 1;
        const auto d2 = sample_cycle_data(DistributionSpec::uniform_circle(), s2.sample_lengths(r2), r2);
        c2[category(d2, shift)] += 1;
    }
    const auto rep = chi_square_two_sample(c1, c2, 0.01, "translation");
    return {detail::criterion("translation-invariance", rep.passed,
                              detail::fmt("chi2=%.2f threshold=%.2f", rep.statistic, rep.threshold))};
}

// For alpha = 1/4 the normalized integral of a compactly supported f with
// f(0) = 1 has mean tending to 1/2.
inline std::vector<CriterionResult> suite_collapse(std::uint64_t seed) {
    RandomStream rng(seed, 12001);
    const std::uint32_t N = 10000;
    const int n = 5000;
    FiniteSpectrumSampler sampler(1.0, N, DistributionSpec::log_stable(0.25, 1.0));
    const TestFn f = FnRadialPlateau{1.0};
    double mean = 0.0, mean2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = integrate_mu(sampler.sample(rng), f) / double(N);
        mean += v;
        mean2 += v * v;
    }
    mean /= n;
    const double se = std::sqrt((mean2 / n - mean * mean) / n);
    const double z = std::fabs(mean - 0.5) / se;
    return {detail::criterion("collapse-half-dirac", z <= 4.0,
                              detail::fmt("mean=%.4f z=%.2f (4 sigma) at N=1e4", mean, z))};
}

std::string format_report(const std::string& suite, std::uint64_t seed,
                          const std::vector<CriterionResult>& results);

// Rerunning a suite with the same seed gives byte-identical reports.
inline std::vector<CriterionResult> suite_determinism(std::uint64_t seed) {
    const auto a1 = format_report("beta", seed, suite_beta(seed));
    const auto a2 = format_report("beta", seed, suite_beta(seed));
    const auto b1 = format_report("cesaro", seed, suite_cesaro(seed));
    const auto b2 = format_report("cesaro", seed, suite_cesaro(seed));
    const bool ok = (a1 == a2) && (b1 == b2);
    return {detail::criterion("determinism-reports", ok,
                              ok ? "reruns byte-identical" : "reruns differ")};
}

inline const std::vector<std::pair<std::string, std::vector<CriterionResult> (*)(std::uint64_t)>>&
suites() {
    static const std::vector<std::pair<std::string, std::vector<CriterionResult> (*)(std::uint64_t)>> table = {
        {"oracle", &suite_oracle},       {"spectral", &suite_spectral},
        {"bulk", &suite_bulk},           {"correlation1", &suite_correlation1},
        {"pair", &suite_pair},           {"gap", &suite_gap},
        {"smallest", &suite_smallest},   {"beta", &suite_beta},
        {"feller", &suite_feller},       {"cesaro", &suite_cesaro},
        {"translation", &suite_translation}, {"collapse", &suite_collapse},
        {"determinism", &suite_determinism},
    };
    return table;
}

inline std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "all") {
        std::vector<CriterionResult> out;
        for (const auto& [n, fn] : suites()) {
            auto r = fn(seed);
            out.insert(out.end(), r.begin(), r.end());
        }
        return out;
    }
    for (const auto& [n, fn] : suites()) {
        if (n == name) return fn(seed);
    }
    throw parameter_error("unknown verify suite '" + name + "'");
}

inline std::string format_report(const std::string& suite, std::uint64_t seed,
                                 const std::vector<CriterionResult>& results) {
    std::string out = "# permspec verify suite=" + suite + " seed=" + std::to_string(seed) + "\n";
    std::size_t passed = 0;
    for (const auto& r : results) {
        out += (r.passed ? "PASS " : "FAIL ") + r.name + " | " + r.detail + "\n";
        if (r.passed) ++passed;
    }
    out += "RESULT " + std::string(passed == results.size() ? "PASS" : "FAIL") + " (" +
           std::to_string(passed) + "/" + std::to_string(results.size()) + ")\n";
    return out;
}

}  // namespace permspec::verify
