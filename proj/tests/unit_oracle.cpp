#include <numeric>

#include "doctest.h"
#include "permspec/exact_measures.hpp"
#include "permspec/oracle.hpp"

using namespace permspec;
using oracle::Rational;

TEST_CASE("rational arithmetic") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a * b == Rational(1, 18));
    CHECK(a - b == Rational(1, 6));
    CHECK(a / b == Rational(2));
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(2, -4).to_double() == doctest::Approx(-0.5));
}

TEST_CASE("ewens enumeration") {
    const auto t31 = oracle::enumerate_ewens(3, Rational(1));
    CHECK(t31.rows.size() == 6);
    for (const auto& [sigma, p] : t31.rows) CHECK(p == Rational(1, 6));

    const auto t22 = oracle::enumerate_ewens(2, Rational(2));
    for (const auto& [sigma, p] : t22.rows) {
        if (sigma.cycle_count() == 2)
            CHECK(p == Rational(2, 3));
        else
            CHECK(p == Rational(1, 3));
    }

    for (auto theta : {Rational(1, 2), Rational(1), Rational(2)}) {
        const auto table = oracle::enumerate_ewens(6, theta);
        Rational total(0);
        for (const auto& [sigma, p] : table.rows) total += p;
        CHECK(total == Rational(1));
    }
    CHECK_THROWS_AS(oracle::enumerate_ewens(9, Rational(1)), capability_error);
}

TEST_CASE("exact mean measure") {
    SUBCASE("N=1 returns the law itself") {
        const auto table = oracle::enumerate_ewens(1, Rational(1));
        oracle::RationalLaw law{2, {Rational(1, 4), Rational(3, 4)}};
        const auto atoms = oracle::exact_mean_measure(table, law);
        CHECK(atoms.at({0, 1}) == Rational(1, 4));
        CHECK(atoms.at({1, 2}) == Rational(3, 4));
    }
    SUBCASE("N=3, theta=1, DiracOne: hand-computed atoms") {
        const auto table = oracle::enumerate_ewens(3, Rational(1));
        const auto atoms = oracle::exact_mean_measure(table, oracle::RationalLaw{});
        CHECK(atoms.at({0, 1}) == Rational(11, 6));
        CHECK(atoms.at({1, 2}) == Rational(1, 2));
        CHECK(atoms.at({1, 3}) == Rational(1, 3));
        CHECK(atoms.at({2, 3}) == Rational(1, 3));
    }
    SUBCASE("total mass N") {
        const auto table = oracle::enumerate_ewens(5, Rational(1, 2));
        oracle::RationalLaw law{3, {Rational(1, 2), Rational(1, 3), Rational(1, 6)}};
        Rational total(0);
        for (const auto& [angle, mass] : oracle::exact_mean_measure(table, law)) total += mass;
        CHECK(total == Rational(5));
    }
}

TEST_CASE("exact mean measure matches the closed-form mixture") {
    for (auto theta : {Rational(1, 2), Rational(1), Rational(2)}) {
        for (std::uint32_t N : {3u, 4u, 6u}) {
            const auto table = oracle::enumerate_ewens(N, theta);
            oracle::RationalLaw rlaw{4, {Rational(1, 2), Rational(0), Rational(1, 4), Rational(1, 4)}};
            const auto exact = oracle::exact_mean_measure(table, rlaw);
            std::vector<double> p;
            for (const auto& v : rlaw.p) p.push_back(v.to_double());
            const auto mix = mean_measure(N, theta.to_double(), DistributionSpec::roots_of_unity(4, p));
            const auto approx = discrete_mixture_atoms(mix, DistributionSpec::roots_of_unity(4, p));
            CHECK(exact.size() == approx.size());
            for (const auto& [angle, mass] : exact) {
                REQUIRE(approx.count(angle) == 1);
                CHECK(approx.at(angle) == doctest::Approx(mass.to_double()).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("u coefficient against falling-factorial expectations") {
    for (auto theta : {Rational(1, 2), Rational(1), Rational(2)}) {
        const auto table = oracle::enumerate_ewens(5, theta);
        const std::vector<std::map<std::uint64_t, std::uint64_t>> lambdas = {
            {{1, 1}}, {{2, 1}}, {{1, 2}}, {{1, 1}, {2, 1}}, {{2, 2}}, {{5, 1}}, {{3, 1}, {2, 1}}};
        for (const auto& lambda : lambdas) {
            Rational expected(0);
            for (const auto& [sigma, prob] : table.rows) {
                const auto st = cycle_statistics(sigma);
                Rational ff(1);
                for (const auto& [k, lam] : lambda) {
                    std::uint32_t a = k <= 5 ? st.counts[k] : 0;
                    for (std::uint64_t i = 0; i < lam; ++i) {
                        ff *= Rational(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(i));
                    }
                }
                expected += prob * ff;
            }
            CHECK(u_coefficient(5, theta.to_double(), lambda) ==
                  doctest::Approx(expected.to_double()).epsilon(1e-12));
        }
    }
    SUBCASE("closed-form special values") {
        std::map<std::uint64_t, std::uint64_t> empty;
        CHECK(u_coefficient(6, 1.7, empty) == doctest::Approx(1.0));
        for (std::uint64_t k = 1; k <= 5; ++k) {
            CHECK(u_coefficient(5, 1.0, {{k, 1}}) == doctest::Approx(1.0 / double(k)).epsilon(1e-12));
        }
        CHECK(u_coefficient(5, 2.0, {{6, 1}}) == 0.0);
    }
}

TEST_CASE("exact pair correlation") {
    SUBCASE("f == 1 gives N(N-1)") {
        const auto table = oracle::enumerate_ewens(4, Rational(1, 2));
        const auto v = oracle::exact_correlation2(table, oracle::RationalLaw{}, std::nullopt, std::nullopt);
        CHECK(v == Rational(12));
    }
    SUBCASE("matches q_correlation for discrete laws") {
        oracle::ArcIndicator arc1{Rational(5, 64), Rational(37, 64)};
        oracle::ArcIndicator arc2{Rational(21, 64), Rational(53, 64)};
        const TestFn f1 = FnAngularInterval{5.0 / 64.0, 37.0 / 64.0};
        const TestFn f2 = FnAngularInterval{21.0 / 64.0, 53.0 / 64.0};
        for (auto theta : {Rational(1, 2), Rational(1), Rational(2)}) {
            for (std::uint32_t N : {2u, 3u, 5u}) {
                const auto table = oracle::enumerate_ewens(N, theta);
                // DiracOne
                {
                    const auto exact = oracle::exact_correlation2(table, oracle::RationalLaw{}, arc1, arc2);
                    const TestFn fns[2] = {f1, f2};
                    const auto got = q_correlation(N, theta.to_double(), DistributionSpec::dirac_one(), 2, fns);
                    CHECK(got.value == doctest::Approx(exact.to_double()).epsilon(1e-12));
                }
                // RootsOfUnity(3)
                {
                    oracle::RationalLaw rlaw{3, {Rational(1, 2), Rational(1, 3), Rational(1, 6)}};
                    const auto exact = oracle::exact_correlation2(table, rlaw, arc1, arc2);
                    const auto law = DistributionSpec::roots_of_unity(3, {0.5, 1.0 / 3.0, 1.0 / 6.0});
                    const TestFn fns[2] = {f1, f2};
                    const auto got = q_correlation(N, theta.to_double(), law, 2, fns);
                    CHECK(got.value == doctest::Approx(exact.to_double()).epsilon(1e-11));
                }
            }
        }
    }
}

TEST_CASE("suffix-sum permutation identity over compositions") {
    // sum over sigma in S_p of 1/prod_n (suffix sums of permuted lengths)
    // equals 1 / prod_n l_n; checked exactly for all compositions of N <= 8
    for (std::uint64_t N = 1; N <= 8; ++N) {
        std::vector<std::uint64_t> comp;
        std::function<void(std::uint64_t)> rec = [&](std::uint64_t rem) {
            if (rem == 0) {
                std::vector<std::size_t> idx(comp.size());
                std::iota(idx.begin(), idx.end(), 0);
                Rational total(0);
                std::sort(idx.begin(), idx.end());
                do {
                    Rational prod(1);
                    for (std::size_t n = 0; n < idx.size(); ++n) {
                        std::int64_t suffix = 0;
                        for (std::size_t m = n; m < idx.size(); ++m)
                            suffix += static_cast<std::int64_t>(comp[idx[m]]);
                        prod *= Rational(suffix);
                    }
                    total += Rational(1) / prod;
                } while (std::next_permutation(idx.begin(), idx.end()));
                Rational direct(1);
                for (std::uint64_t l : comp) direct *= Rational(static_cast<std::int64_t>(l));
                CHECK(total == Rational(1) / direct);
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
