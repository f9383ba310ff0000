#include <cmath>

#include "doctest.h"
#include "permspec/estimators.hpp"
#include "permspec/exact_measures.hpp"
#include "permspec/gap_solver.hpp"
#include "permspec/spectrum.hpp"

using namespace permspec;

TEST_CASE("ks calibration and power") {
    SUBCASE("rejection rate near alpha under the null") {
        RandomStream rng(80);
        int rejections = 0;
        const int reps = 1000;
        for (int r = 0; r < reps; ++r) {
            std::vector<double> s(200);
            for (auto& v : s) v = rng.u01();
            if (!ks_test(std::move(s), [](double x) { return std::clamp(x, 0.0, 1.0); }, 0.01).passed)
                ++rejections;
        }
        CHECK(rejections <= 30);  // 1% nominal with slack for the asymptotic threshold
    }
    SUBCASE("shifted alternative is rejected") {
        RandomStream rng(81);
        std::vector<double> s(5000);
        for (auto& v : s) v = 0.1 + 0.9 * rng.u01();
        CHECK(!ks_test(std::move(s), [](double x) { return std::clamp(x, 0.0, 1.0); }, 0.01).passed);
    }
    SUBCASE("degenerate inputs") {
        std::vector<double> s(10, 0.5);
        CHECK_THROWS_AS(ks_test(std::move(s), [](double) { return 0.5; }, 0.01), parameter_error);
    }
}

TEST_CASE("chi-square on uniform cells") {
    RandomStream rng(82);
    std::vector<double> counts(10, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[std::size_t(rng.below(10))] += 1.0;
    std::vector<double> expected(10, n / 10.0);
    CHECK(chi_square(counts, expected, 0.01).passed);
}

TEST_CASE("count in window") {
    RandomStream rng(83);
    std::vector<EigenPointMeasure> samples;
    for (int i = 0; i < 2000; ++i)
        samples.push_back(sample_tau_infinity(1.5, ShiftLaw{0}, {0.0, 4.0}, 1e-10, rng));
    SUBCASE("degenerate window counts nothing") {
        const auto est = count_in_window(samples, 1.0, 1.0);
        CHECK(est.mean == 0.0);
    }
    SUBCASE("intensity is Lebesgue") {
        const auto est = count_in_window(samples, 0.5, 3.5);
        CHECK(std::fabs(est.mean - 3.0) < 3.5 * est.std_error);
    }
    SUBCASE("window beyond generation is rejected") {
        CHECK_THROWS_AS(count_in_window(samples, 0.0, 5.0), parameter_error);
    }
}

TEST_CASE("pair correlation estimator") {
    SUBCASE("bins touching zero are rejected") {
        CHECK_THROWS_AS(PairCorrelationAccumulator({{-0.1, 0.1}}, 0.0, 1.0), parameter_error);
    }
    SUBCASE("plateau value theta/(theta+1) inside (0,1) and symmetry") {
        const double theta = 2.0;
        RandomStream rng(84);
        PairCorrelationAccumulator acc({{0.2, 0.8}, {-0.8, -0.2}}, 0.0, 8.0);
        for (int i = 0; i < 30000; ++i)
            acc.add(sample_tau_infinity(theta, ShiftLaw{0}, {-1.0, 9.0}, 1e-10, rng));
        const auto est = acc.estimate();
        CHECK(std::fabs(est.value[0] - theta / (theta + 1.0)) < 4.0 * est.std_error[0]);
        CHECK(std::fabs(est.value[1] - theta / (theta + 1.0)) < 4.0 * est.std_error[1]);
        CHECK(std::fabs(est.value[0] - est.value[1]) <
              4.0 * std::hypot(est.std_error[0], est.std_error[1]));
    }
    SUBCASE("bin away from the plateau matches the quadrature of phi") {
        const double theta = 1.0;
        RandomStream rng(85);
        PairCorrelationAccumulator acc({{1.4, 1.6}}, 0.0, 8.0);
        for (int i = 0; i < 60000; ++i)
            acc.add(sample_tau_infinity(theta, ShiftLaw{0}, {-1.0, 10.0}, 1e-10, rng));
        const auto est = acc.estimate();
        const double target =
            adaptive_simpson([&](double x) { return pair_correlation_phi(theta, x); }, 1.4, 1.6) / 0.2;
        CHECK(std::fabs(est.value[0] - target) < 4.0 * est.std_error[0]);
    }
}

TEST_CASE("beta identity samples") {
    SUBCASE("mean one half by symmetry") {
        RandomStream rng(86);
        const int n = 100000;
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += beta_identity_sample(0.7, rng, 1e-10);
        CHECK(std::fabs(mean / n - 0.5) < 3.5 * std::sqrt(0.25 / n));
    }
    SUBCASE("theta=2 is uniform, theta=1 is arcsine") {
        RandomStream rng(87);
        std::vector<double> s2(100000), s1(100000);
        for (auto& v : s2) v = beta_identity_sample(2.0, rng, 1e-10);
        for (auto& v : s1) v = beta_identity_sample(1.0, rng, 1e-10);
        CHECK(ks_test(std::move(s2), [](double x) { return std::clamp(x, 0.0, 1.0); }, 0.01).passed);
        CHECK(ks_test(std::move(s1),
                      [](double x) { return 2.0 / PI * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0))); },
                      0.01)
                  .passed);
        // and the generic incomplete-beta CDF agrees with the arcsine form
        CHECK(beta_cdf(0.3, 0.5, 0.5) == doctest::Approx(2.0 / PI * std::asin(std::sqrt(0.3))).epsilon(1e-10));
    }
}

TEST_CASE("cauchy limit integral") {
    SUBCASE("f == 1 integrates to one") {
        RandomStream rng(88);
        for (int i = 0; i < 50; ++i) {
            const double v = cauchy_limit_integral(1.0, 0.5, TestFn{FnOne{}}, rng, 1e-12);
            CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("matches the finite-N law for a smooth radial bump") {
        const double theta = 1.0, rho = 0.5;
        const TestFn bump = FnSmoothBump{0.4, 2.5};
        const std::uint32_t N = 4000;
        const int n = 4000;
        RandomStream r1(89), r2(90);
        FiniteSpectrumSampler sampler(theta, N, DistributionSpec::log_stable(1.0, rho));
        std::vector<double> finite(n), limit(n);
        for (int i = 0; i < n; ++i) {
            finite[i] = integrate_mu(sampler.sample(r1), bump) / double(N);
            limit[i] = cauchy_limit_integral(theta, rho, bump, r2, 1e-10);
        }
        CHECK(ks_two_sample(std::move(finite), std::move(limit), 0.01, "cauchy limit").passed);
    }
}

TEST_CASE("dirac mass collapse for alpha < 1") {
    RandomStream rng(91);
    const std::uint32_t schedule[3] = {100, 1000, 4000};
    const auto rep = dirac_mass_limit_check(2.0, 0.25, 1.0, TestFn{FnRadialPlateau{1.0}}, schedule, 4000,
                                            0.01, rng);
    CHECK(rep.passed);

    SUBCASE("the mean tends to f(0)/2") {
        RandomStream r(92);
        FiniteSpectrumSampler sampler(1.0, 4000, DistributionSpec::log_stable(0.25, 1.0));
        const int n = 3000;
        double mean = 0.0, mean2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = integrate_mu(sampler.sample(r), TestFn{FnRadialPlateau{1.0}}) / 4000.0;
            mean += v;
            mean2 += v * v;
        }
        mean /= n;
        const double se = std::sqrt((mean2 / n - mean * mean) / n);
        CHECK(std::fabs(mean - 0.5) < 4.0 * se + 2e-3);
    }
}

TEST_CASE("annulus counts converge to the limit point process for alpha < 1") {
    // law of mu(M_N) restricted to an annulus away from zero vs mu_infinity
    const double theta = 1.0;
    const auto law = DistributionSpec::log_stable(0.25, 1.0);
    const Annulus region{0.5, 2.0};
    const std::uint32_t N = 10000;
    const int n = 4000;
    RandomStream r1(95), r2(96);
    CrpCycleSampler lengths(theta, N);
    std::vector<double> finite(n), limit(n);
    for (int i = 0; i < n; ++i) {
        const auto& ls = lengths.sample_lengths(r1);
        const auto data = sample_cycle_data(law, ls, r1);
        double count = 0.0;
        for (const auto& c : data.cycles) {
            if (region_contains_log(region, c.log_modulus / double(c.len))) count += double(c.len);
        }
        finite[i] = count;
        limit[i] = double(sample_mu_infinity(theta, law, Region{region}, 2000, r2).measure.total_multiplicity());
    }
    CHECK(ks_two_sample(std::move(finite), std::move(limit), 0.01, "annulus counts").passed);
}

TEST_CASE("pair correlation wrapper over a sample vector") {
    RandomStream rng(97);
    std::vector<EigenPointMeasure> samples;
    for (int i = 0; i < 5000; ++i)
        samples.push_back(sample_tau_infinity(1.0, ShiftLaw{0}, {-1.0, 5.0}, 1e-10, rng));
    const auto est = pair_correlation_estimate(samples, {{0.2, 0.8}}, 0.0, 4.0);
    CHECK(std::fabs(est.value[0] - 0.5) < 4.5 * est.std_error[0]);
}

TEST_CASE("translation invariance of the scaled angle process") {
    const double shift = 0.37;
    const std::uint32_t N = 100;
    const int n = 20000;
    RandomStream r1(93), r2(94);
    FiniteSpectrumSampler sampler1(1.0, N, DistributionSpec::uniform_circle());
    FiniteSpectrumSampler sampler2(1.0, N, DistributionSpec::uniform_circle());
    // count-vector categories over 5 unit bins, hashed to an index
    std::map<std::vector<int>, std::size_t> index;
    std::vector<double> c1, c2;
    auto category = [&](const CycleData& data, double lo) {
        const auto m = scaled_eigenangles(data, N, {lo, lo + 5.0});
        std::vector<int> v(5, 0);
        for (const auto& a : m.atoms) {
            const int b = int(std::floor(a.x - lo));
            if (b >= 0 && b < 5) v[std::size_t(b)] += int(a.mult);
        }
        auto [it, inserted] = index.emplace(v, index.size());
        if (inserted) {
            c1.push_back(0);
            c2.push_back(0);
        }
        return it->second;
    };
    for (int i = 0; i < n; ++i) {
        c1[category(sampler1.sample(r1), 0.0)] += 1;
        c2[category(sampler2.sample(r2), shift)] += 1;
    }
    CHECK(chi_square_two_sample(c1, c2, 0.01, "translation invariance").passed);
}
