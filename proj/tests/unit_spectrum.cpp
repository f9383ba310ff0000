#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "doctest.h"
#include "permspec/dense_oracle.hpp"
#include "permspec/estimators.hpp"
#include "permspec/exact_measures.hpp"
#include "permspec/spectrum.hpp"

using namespace permspec;
using Cx = std::complex<double>;

namespace {

CycleDecomposition from_cycles(std::uint32_t n, std::vector<std::vector<std::uint32_t>> cycles) {
    CycleDecomposition d;
    d.n = n;
    d.cycles = std::move(cycles);
    return d;
}

}  // namespace

TEST_CASE("eigenvalues from cycles") {
    SUBCASE("single 2-cycle with Z=4 gives +-2") {
        CycleData data;
        data.n = 2;
        data.cycles = {{2, std::log(4.0), 0.0}};
        const auto m = eigenvalues_from_cycles(data);
        REQUIRE(m.atoms.size() == 2);
        CHECK(m.complex_value(m.atoms[0]).real() == doctest::Approx(2.0));
        CHECK(m.complex_value(m.atoms[1]).real() == doctest::Approx(-2.0));
        CHECK(m.total_multiplicity() == 2);
    }
    SUBCASE("dirac entries on an l-cycle give the l-th roots of unity") {
        CycleData data;
        data.n = 6;
        data.cycles = {{6, 0.0, 0.0}};
        const auto m = eigenvalues_from_cycles(data);
        REQUIRE(m.atoms.size() == 6);
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(m.atoms[j].x == 0.0);
            CHECK(m.atoms[j].y == doctest::Approx(j / 6.0));
        }
    }
    SUBCASE("identical atoms across cycles merge with multiplicity") {
        CycleData data;
        data.n = 4;
        data.cycles = {{2, 0.0, 0.0}, {2, 0.0, 0.0}};
        const auto m = eigenvalues_from_cycles(data);
        REQUIRE(m.atoms.size() == 2);
        CHECK(m.atoms[0].mult == 2);
        CHECK(m.atoms[1].mult == 2);
    }
}

TEST_CASE("build matrix") {
    SUBCASE("N=1") {
        const auto sigma = from_cycles(1, {{1}});
        const Cx z[1] = {Cx(5, 0)};
        const auto m = build_matrix(sigma, z);
        CHECK(m.at(0, 0) == Cx(5, 0));
    }
    SUBCASE("transposition traces") {
        const auto sigma = from_cycles(2, {{1, 2}});
        const Cx a(0.3, 1.1), b(-0.7, 0.2);
        const Cx z[2] = {a, b};
        const auto m = build_matrix(sigma, z);
        CHECK(std::abs(m.trace()) < 1e-15);
        CHECK(std::abs((m * m).trace() - 2.0 * a * b) < 1e-15);
    }
    SUBCASE("one nonzero per row and column") {
        RandomStream rng(50);
        const auto sigma = crp_to_permutation(sample_crp_prefix(1.0, 50, rng));
        std::vector<Cx> z(50);
        for (auto& v : z) v = sample_z(DistributionSpec::uniform_circle(), rng);
        const auto m = build_matrix(sigma, z);
        for (std::uint32_t i = 0; i < 50; ++i) {
            int row = 0, col = 0;
            for (std::uint32_t j = 0; j < 50; ++j) {
                if (m.at(i, j) != Cx(0, 0)) ++row;
                if (m.at(j, i) != Cx(0, 0)) ++col;
            }
            CHECK(row == 1);
            CHECK(col == 1);
        }
    }
    SUBCASE("zero entries rejected") {
        const auto sigma = from_cycles(2, {{1, 2}});
        const Cx z[2] = {Cx(0, 0), Cx(1, 0)};
        CHECK_THROWS_AS(build_matrix(sigma, z), parameter_error);
    }
}

TEST_CASE("trace power") {
    SUBCASE("no divisor, empty sum") {
        CycleData data;
        data.n = 5;
        data.cycles = {{5, 0.2, 0.3}};
        CHECK(std::abs(trace_power(data, 3)) == 0.0);
    }
    SUBCASE("(12)(3) at k=2") {
        const auto sigma = from_cycles(3, {{1, 2}, {3}});
        const Cx z[3] = {Cx(1.2, 0.4), Cx(-0.3, 0.9), Cx(0.5, -1.0)};
        const auto data = make_cycle_data(sigma, z);
        const Cx expect = 2.0 * z[0] * z[1] + z[2] * z[2];
        CHECK(std::abs(trace_power(data, 2) - expect) < 1e-12);
    }
    SUBCASE("against dense matrix powers") {
        RandomStream rng(51);
        for (int rep = 0; rep < 30; ++rep) {
            const std::uint32_t n = 2 + std::uint32_t(rng.below(7));
            const auto sigma = crp_to_permutation(sample_crp_prefix(1.0, n, rng));
            std::vector<Cx> z(n);
            for (auto& v : z) v = sample_z(DistributionSpec::uniform_circle(), rng);
            const auto data = make_cycle_data(sigma, z);
            auto m = build_matrix(sigma, z);
            const auto base = m;
            for (std::uint64_t k = 1; k <= 12; ++k) {
                CHECK(std::abs(trace_power(data, k) - m.trace()) < 1e-10);
                m = m * base;
            }
        }
    }
}

TEST_CASE("cycle path equals the dense spectrum") {
    SUBCASE("random unit-modulus instances match root isolation") {
        RandomStream rng(52);
        for (int rep = 0; rep < 40; ++rep) {
            const std::uint32_t n = 2 + std::uint32_t(rng.below(7));
            const auto sigma = crp_to_permutation(sample_crp_prefix(1.0, n, rng));
            std::vector<Cx> z(n);
            for (auto& v : z) v = sample_z(DistributionSpec::uniform_circle(), rng);
            const auto predicted = eigenvalues_from_cycles(make_cycle_data(sigma, z));
            const auto roots = oracle::dense_eigenvalues(build_matrix(sigma, z));
            CHECK(oracle::match_distance(predicted, roots) < 1e-9);
        }
    }
    SUBCASE("rational-angle entries: characteristic polynomial comparison, all of S_4") {
        std::vector<std::uint32_t> images(4);
        std::iota(images.begin(), images.end(), 1);
        // fourth roots of unity as entries
        const std::vector<Cx> z = {Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)};
        do {
            const auto sigma = detail::cycles_from_successors(images);
            const auto predicted = eigenvalues_from_cycles(make_cycle_data(sigma, z));
            std::vector<std::pair<Cx, std::uint64_t>> atoms;
            for (const auto& a : predicted.atoms) atoms.emplace_back(predicted.complex_value(a), a.mult);
            const auto from_atoms = oracle::poly_from_atoms(atoms);
            const auto from_dense = oracle::char_poly(build_matrix(sigma, z));
            REQUIRE(from_atoms.size() == from_dense.size());
            for (std::size_t i = 0; i < from_atoms.size(); ++i)
                CHECK(std::abs(from_atoms[i] - from_dense[i]) < 1e-12);
        } while (std::next_permutation(images.begin(), images.end()));
    }
    SUBCASE("dirac entries: characteristic polynomial comparison, all of S_5") {
        std::vector<std::uint32_t> images(5);
        std::iota(images.begin(), images.end(), 1);
        std::vector<Cx> z(5, Cx(1, 0));
        do {
            const auto sigma = detail::cycles_from_successors(images);
            const auto predicted = eigenvalues_from_cycles(make_cycle_data(sigma, z));
            std::vector<std::pair<Cx, std::uint64_t>> atoms;
            for (const auto& a : predicted.atoms) atoms.emplace_back(predicted.complex_value(a), a.mult);
            const auto from_atoms = oracle::poly_from_atoms(atoms);
            const auto from_dense = oracle::char_poly(build_matrix(sigma, z));
            REQUIRE(from_atoms.size() == from_dense.size());
            for (std::size_t i = 0; i < from_atoms.size(); ++i)
                CHECK(std::abs(from_atoms[i] - from_dense[i]) < 1e-9);
        } while (std::next_permutation(images.begin(), images.end()));
    }
}

TEST_CASE("scaled eigenangles") {
    SUBCASE("single N-cycle with dirac entries gives the integers") {
        CycleData data;
        data.n = 10;
        data.cycles = {{10, 0.0, 0.0}};
        const auto m = scaled_eigenangles(data, 10, {-3.5, 3.5});
        REQUIRE(m.atoms.size() == 7);
        for (int k = -3; k <= 3; ++k) CHECK(m.atoms[std::size_t(k + 3)].x == doctest::Approx(double(k)));
    }
    SUBCASE("identity permutation collapses to a single atom at 0") {
        CycleData data;
        data.n = 8;
        for (int i = 0; i < 8; ++i) data.cycles.push_back({1, 0.0, 0.0});
        const auto m = scaled_eigenangles(data, 8, {-0.4, 0.4});
        REQUIRE(m.atoms.size() == 1);
        CHECK(m.atoms[0].x == 0.0);
        CHECK(m.atoms[0].mult == 8);
    }
    SUBCASE("full-period count is N") {
        RandomStream rng(53);
        FiniteSpectrumSampler sampler(1.0, 100, DistributionSpec::uniform_circle());
        for (int rep = 0; rep < 50; ++rep) {
            const auto& data = sampler.sample(rng);
            const auto m = scaled_eigenangles(data, 100, {0.0, 100.0});
            // count points in [0, 100): one full period of length N
            std::uint64_t count = 0;
            for (const auto& a : m.atoms)
                if (a.x < 100.0 - 1e-9) count += a.mult;
            CHECK(count == 100);
        }
    }
    SUBCASE("rescaled positions reproduce the eigenangles") {
        RandomStream rng(54);
        FiniteSpectrumSampler sampler(1.0, 12, DistributionSpec::uniform_circle());
        const auto& data = sampler.sample(rng);
        const auto scaled = scaled_eigenangles(data, 12, {0.0, 12.0});
        const auto eigen = eigenvalues_from_cycles(data);
        std::vector<double> a, b;
        for (const auto& at : scaled.atoms) {
            if (at.x >= 12.0 - 1e-9) continue;
            double frac = at.x / 12.0;
            frac -= std::floor(frac);
            for (std::uint64_t m = 0; m < at.mult; ++m) a.push_back(frac);
        }
        for (const auto& at : eigen.atoms)
            for (std::uint64_t m = 0; m < at.mult; ++m) b.push_back(at.y);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("tau infinity sampler") {
    SUBCASE("dirac shift flags the infinite atom and emits k/y points") {
        RandomStream rng(55);
        const auto m = sample_tau_infinity(1.0, ShiftLaw{1}, {-5.0, 5.0}, 1e-10, rng);
        CHECK(m.infinite_atom_at_zero);
        for (const auto& a : m.atoms) CHECK(a.x != 0.0);
    }
    SUBCASE("uniform shift has Lebesgue intensity") {
        RandomStream rng(56);
        WindowCountAccumulator acc(0.25, 2.75);
        for (int i = 0; i < 20000; ++i) acc.add(sample_tau_infinity(1.0, ShiftLaw{0}, {0.0, 3.0}, 1e-10, rng));
        const auto est = acc.estimate();
        CHECK(std::fabs(est.mean - 2.5) < 3.5 * est.std_error);
    }
    SUBCASE("degenerate window") {
        RandomStream rng(57);
        const auto m = sample_tau_infinity(1.0, ShiftLaw{0}, {0.0, 0.0}, 1e-10, rng);
        CHECK(m.atoms.empty());
        CHECK(!m.infinite_atom_at_zero);
    }
}

TEST_CASE("tau infinity translation invariance") {
    // count-vector law over unit bins is unchanged by a window shift
    const double shift = 0.37;
    const int n = 20000;
    RandomStream r1(64), r2(65);
    std::map<std::vector<int>, std::size_t> index;
    std::vector<double> c1, c2;
    auto category = [&](const EigenPointMeasure& m, double lo) {
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
        c1[category(sample_tau_infinity(1.0, ShiftLaw{0}, {0.0, 5.0}, 1e-10, r1), 0.0)] += 1;
        c2[category(sample_tau_infinity(1.0, ShiftLaw{0}, {shift, shift + 5.0}, 1e-10, r2), shift)] += 1;
    }
    CHECK(chi_square_two_sample(c1, c2, 0.01, "tau-infinity translation").passed);
}

TEST_CASE("mu infinity sampler") {
    SUBCASE("region outside the support is empty") {
        RandomStream rng(58);
        const auto s = sample_mu_infinity(1.0, DistributionSpec::dirac_one(), Annulus{2.0, 3.0}, 100, rng);
        CHECK(s.measure.atoms.empty());
        CHECK(s.expected_tail == 0.0);
    }
    SUBCASE("hypothesis violations are rejected") {
        RandomStream rng(59);
        CHECK_THROWS_AS(
            sample_mu_infinity(1.0, DistributionSpec::log_stable(2.0, 1.0), Annulus{0.5, 2.0}, 100, rng),
            parameter_error);
        CHECK_THROWS_AS(
            sample_mu_infinity(1.0, DistributionSpec::log_stable(1.0, 1.0), Annulus{1.5, 2.0}, 100, rng),
            parameter_error);
        CHECK_THROWS_AS(
            sample_mu_infinity(1.0, DistributionSpec::log_stable(0.5, 1.0), OutsideBand{0.5, 2.0}, 100, rng),
            parameter_error);
    }
    SUBCASE("log-normal case matches theta * sum L_k(region)") {
        const auto law = DistributionSpec::log_stable(2.0, 1.0);
        const OutsideBand region{0.5, 2.0};
        const double theta = 1.3;
        double expect = 0.0;
        for (std::uint64_t k = 1; k <= 400; ++k)
            expect += theta * (1.0 - integral_against_Lk(law, k, TestFn{FnRadialInterval{0.5, 2.0}}).value);
        RandomStream rng(60);
        const int n = 4000;
        double mean = 0.0, mean2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto s = sample_mu_infinity(theta, law, Region{region}, 400, rng);
            const double c = double(s.measure.total_multiplicity());
            mean += c;
            mean2 += c * c;
        }
        mean /= n;
        const double se = std::sqrt((mean2 / n - mean * mean) / n);
        CHECK(std::fabs(mean - expect) < 3.5 * se);
    }
    SUBCASE("alpha < 1/2 annulus mass is finite and matches the truncated sum") {
        const auto law = DistributionSpec::log_stable(0.25, 1.0);
        const Annulus region{0.5, 2.0};
        const double theta = 2.0;
        double expect = 0.0;
        for (std::uint64_t k = 1; k <= 300; ++k)
            expect += theta * integral_against_Lk(law, k, TestFn{FnRadialInterval{0.5, 2.0}}).value;
        RandomStream rng(61);
        const int n = 4000;
        double mean = 0.0, mean2 = 0.0;
        double tail = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto s = sample_mu_infinity(theta, law, Region{region}, 300, rng);
            mean += double(s.measure.total_multiplicity());
            mean2 += double(s.measure.total_multiplicity()) * s.measure.total_multiplicity();
            tail = s.expected_tail;
        }
        mean /= n;
        const double se = std::sqrt((mean2 / n - mean * mean) / n);
        CHECK(std::isfinite(tail));
        CHECK(std::fabs(mean - expect) < 3.5 * se + tail);
    }
}

TEST_CASE("smallest positive point") {
    EigenPointMeasure m;
    m.kind = EigenPointMeasure::Kind::Angle;
    m.atoms = {{-1.0, 0, 1}, {0.25, 0, 1}, {3.0, 0, 1}};
    CHECK(*smallest_positive_point(m) == doctest::Approx(0.25));
    m.atoms.clear();
    CHECK(!smallest_positive_point(m).has_value());
    m.kind = EigenPointMeasure::Kind::Complex;
    CHECK_THROWS_AS(smallest_positive_point(m), parameter_error);
}

TEST_CASE("faithful sampler and shortcut sampler agree in law") {
    // smallest positive scaled eigenangle at N=50, uniform entries
    const std::uint32_t N = 50;
    const int n = 20000;
    RandomStream r1(62), r2(63);
    FiniteSpectrumSampler faithful(1.0, N, DistributionSpec::uniform_circle());
    CrpCycleSampler lengths(1.0, N);
    std::vector<double> a, b;
    for (int i = 0; i < n; ++i) {
        {
            const auto& data = faithful.sample(r1);
            const auto m = scaled_eigenangles(data, N, {0.0, double(N)});
            const auto s = smallest_positive_point(m);
            a.push_back(s ? *s : double(N));
        }
        {
            const auto& ls = lengths.sample_lengths(r2);
            const auto data = sample_cycle_data(DistributionSpec::uniform_circle(), ls, r2);
            const auto m = scaled_eigenangles(data, N, {0.0, double(N)});
            const auto s = smallest_positive_point(m);
            b.push_back(s ? *s : double(N));
        }
    }
    CHECK(ks_two_sample(std::move(a), std::move(b), 0.01, "faithful vs shortcut").passed);
}
