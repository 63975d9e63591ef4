#include <doctest.h>

#include "salem/dyadic.hpp"
#include "salem/io.hpp"
#include "salem/rng.hpp"

#include <cmath>

using namespace salem;

namespace {
Rational rat(long p, long q) { return Rational(p, q); }

CantorSpec spec(long p, long q, int depth) { return CantorSpec{rat(p, q), depth}; }
}  // namespace

TEST_CASE("cantor_intervals hand-unrolled stages") {
    auto one = cantor_intervals(spec(1, 3, 1));
    REQUIRE(one.size() == 2);
    CHECK(one[0].lo == rat(0, 1));
    CHECK(one[0].hi == rat(1, 3));
    CHECK(one[1].lo == rat(2, 3));
    CHECK(one[1].hi == rat(1, 1));

    auto zero = cantor_intervals(spec(1, 3, 0));
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].lo == rat(0, 1));
    CHECK(zero[0].hi == rat(1, 1));

    auto two = cantor_intervals(spec(1, 4, 2));
    REQUIRE(two.size() == 4);
    CHECK(two[0].lo == rat(0, 1));
    CHECK(two[0].hi == rat(1, 16));
    CHECK(two[1].lo == rat(3, 16));
    CHECK(two[1].hi == rat(1, 4));
    CHECK(two[2].lo == rat(3, 4));
    CHECK(two[2].hi == rat(13, 16));
    CHECK(two[3].lo == rat(15, 16));
    CHECK(two[3].hi == rat(1, 1));

    // common length xi^n, disjoint, sorted
    for (int n = 0; n <= 6; ++n) {
        auto ivals = cantor_intervals(spec(1, 3, n));
        Rational len = 1;
        for (int k = 0; k < n; ++k) len /= 3;
        for (std::size_t i = 0; i < ivals.size(); ++i) {
            CHECK(ivals[i].hi - ivals[i].lo == len);
            if (i) CHECK(ivals[i].lo > ivals[i - 1].hi);
        }
    }
}

TEST_CASE("cantor spec validation") {
    CHECK_THROWS_AS(cantor_intervals(spec(1, 2, 3)), InvalidSpec);
    CHECK_THROWS_AS(cantor_intervals(spec(0, 1, 3)), InvalidSpec);
    CHECK_THROWS_AS(cantor_intervals(spec(-1, 3, 3)), InvalidSpec);
    CHECK_THROWS_AS(cantor_intervals(spec(2, 3, 3)), InvalidSpec);
    CHECK_THROWS_AS(cantor_intervals(spec(1, 3, 27)), ResourceLimit);
    CHECK(spec(1, 4, 1).beta() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(spec(1, 16, 1).gamma() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(spec(1, 3, 1).gamma() == 1.0);
}

TEST_CASE("cantor cdf resolves periodic orbits exactly") {
    CantorMeasure third{rat(1, 3)};
    CHECK(third.cdf(rat(0, 1)) == rat(0, 1));
    CHECK(third.cdf(rat(1, 1)) == rat(1, 1));
    CHECK(third.cdf(rat(1, 2)) == rat(1, 2));
    CHECK(third.cdf(rat(1, 4)) == rat(1, 3));  // orbit 1/4 -> 3/4 -> 1/4

    CantorMeasure quarter{rat(1, 4)};
    CHECK(quarter.cdf(rat(3, 16)) == rat(1, 4));
    CHECK(quarter.cdf(rat(1, 4)) == rat(1, 2));
    CHECK(quarter.cdf(rat(1, 16)) == rat(1, 4));
}

TEST_CASE("survivor intervals carry exact masses 2^-k") {
    for (auto [p, q] : {std::pair<long, long>{1, 3}, {1, 4}, {1, 16}}) {
        CantorMeasure cm{rat(p, q)};
        for (int k = 0; k <= 6; ++k) {
            Rational expect(1, BigInt(1) << k);
            for (const auto& iv : cantor_intervals(spec(p, q, k)))
                CHECK(cm.mass_interval(iv.lo, iv.hi) == expect);
        }
    }
}

TEST_CASE("cantor_flow masses, gaps, and totals") {
    auto quarter = cantor_flow(spec(1, 4, 6));
    CHECK(quarter.root_mass() == rat(1, 1));
    CHECK(quarter.mass(2, 1) == rat(1, 2));  // [0, 1/4) holds the left branch
    CHECK(quarter.frostman_exponent() == doctest::Approx(0.5));

    auto third = cantor_flow(spec(1, 3, 6));
    CHECK(third.root_mass() == rat(1, 1));
    // [1/2, 9/16) sits inside the first removed gap (1/3, 2/3)
    CHECK(third.range_mass(4, 8, 9) == rat(0, 1));
    CHECK(third.mass(1, 1) == rat(1, 2));
}

TEST_CASE("flow_check exact additivity and fault injection") {
    auto report = flow_check(cantor_flow(spec(1, 3, 8)));
    CHECK(report.max_violation == 0.0);
    CHECK(report.passed);
    CHECK(!report.negative_mass);

    CHECK(flow_check(lebesgue_flow(6)).passed);

    auto levels = lebesgue_flow(3).levels();
    levels[3][2].second += rat(1, 1000000);
    auto broken = flow_check(TreeFlowMeasure(1.0, 1.0, std::move(levels)));
    CHECK(!broken.passed);
    CHECK(broken.max_violation == doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("frostman_check: equality cases and failure mode") {
    auto third = cantor_flow(spec(1, 3, 10));
    auto fr = frostman_check(third, spec(1, 3, 10).beta(), 1.0, 2000, 7);
    CHECK(fr.worst_dyadic_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fr.passed_dyadic);
    CHECK(fr.passed_general);
    CHECK(fr.passed);

    auto leb = frostman_check(lebesgue_flow(10), 1.0, 1.0, 2000, 7);
    CHECK(leb.worst_dyadic_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(leb.passed);

    // alpha above beta must fail at deep intervals
    auto bad = frostman_check(cantor_flow(spec(1, 4, 12)), 0.6, 1.0, 500, 7);
    CHECK(!bad.passed_dyadic);
}

TEST_CASE("n_approximation atoms and mass preservation") {
    auto leb2 = n_approximation(lebesgue_flow(2), 2);
    REQUIRE(leb2.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(leb2.t[i] == doctest::Approx(0.25 * double(i + 1)).epsilon(1e-15));
        CHECK(leb2.w[i] == 0.25);
    }

    auto third = cantor_flow(spec(1, 3, 4));
    auto t1 = n_approximation(third, 1);
    REQUIRE(t1.size() == 2);
    CHECK(t1.t[0] == 0.5);
    CHECK(t1.t[1] == 1.0);
    CHECK(t1.w[0] == 0.5);
    CHECK(t1.w[1] == 0.5);

    auto t0 = n_approximation(third, 0);
    REQUIRE(t0.size() == 1);
    CHECK(t0.t[0] == 1.0);
    CHECK(t0.w[0] == 1.0);

    for (int n = 0; n <= 4; ++n) {
        auto th = n_approximation(third, n);
        double sum = 0;
        for (double w : th.w) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(th.total_mass == 1.0);
    }
    CHECK_THROWS_AS(n_approximation(third, 5), InvalidSpec);
}

TEST_CASE("interval_mass conventions and Frostman-style bounds") {
    auto leb2 = n_approximation(lebesgue_flow(2), 2);
    CHECK(interval_mass(leb2, 0.0, 0.5) == 0.25);  // half-open: atom at 1/2 excluded
    CHECK(interval_mass(leb2, 0.0, 1.0) == doctest::Approx(1.0));  // closed at 1
    CHECK(interval_mass(leb2, 0.5, 0.75) == 0.25);

    const int n = 8;
    const double N = 256.0;
    auto theta = n_approximation(cantor_flow(spec(1, 4, n)), n);
    const double alpha = 0.5;
    for (int s = 0; s < 300; ++s) {
        double a = philox_unit(99, 1, std::uint64_t(s));
        double len = philox_unit(99, 2, std::uint64_t(s));
        if (s % 2 == 0) len /= N;  // exercise the |I| < 1/N branch
        double b = std::min(1.0, a + len);
        double m = interval_mass(theta, a, b);
        if (b - a < 1.0 / N)
            CHECK(m <= std::pow(1.0 / N, alpha) + 1e-12);
        else
            CHECK(m <= 3.0 * std::pow(b - a, alpha) + 1e-12);
    }
}

TEST_CASE("three_cover geometry") {
    auto ks = three_cover(0.3, 0.55);
    for (const auto& k : ks) CHECK(k.level == 2);
    CHECK(ks[0].j == 2);
    CHECK(ks[1].j == 3);
    CHECK(ks[2].j == 4);

    auto whole = three_cover(0.0, 1.0);
    for (const auto& k : whole) CHECK(k.level == 0);

    auto dyadic = three_cover(0.25, 0.5);
    bool contains_self = false;
    for (const auto& k : dyadic)
        if (k.lo_d() == 0.25 && k.hi_d() == 0.5) contains_self = true;
    CHECK(contains_self);

    CHECK_THROWS_AS(three_cover(0.4, 0.4), InvalidSpec);

    for (int s = 0; s < 100; ++s) {
        double a = 0.999 * philox_unit(5, 1, std::uint64_t(s));
        double b = std::min(1.0, a + 1e-6 + philox_unit(5, 2, std::uint64_t(s)) * (1.0 - a));
        auto cover = three_cover(a, b);
        const double len = std::ldexp(1.0, -cover[0].level);
        CHECK(len <= (b - a) * (1 + 1e-12));
        CHECK(len > (b - a) / 2 * (1 - 1e-12));
        CHECK(cover[0].lo_d() <= a + 1e-15);
        CHECK(cover[2].hi_d() >= b - 1e-15);
        for (int i = 0; i < 2; ++i) {
            CHECK(cover[i + 1].level == cover[i].level);
            CHECK(cover[i + 1].j >= cover[i].j);
            CHECK(cover[i + 1].j - cover[i].j <= 1);
        }
    }
}

TEST_CASE("flow text round-trip") {
    auto flow = cantor_flow(spec(1, 4, 5));
    auto back = flow_from_text(flow_to_text(flow));
    CHECK(back.max_depth() == flow.max_depth());
    CHECK(back.frostman_exponent() == flow.frostman_exponent());
    CHECK(back.frostman_constant() == flow.frostman_constant());
    for (int n = 0; n <= flow.max_depth(); ++n) {
        REQUIRE(back.level(n).size() == flow.level(n).size());
        for (std::size_t i = 0; i < flow.level(n).size(); ++i) {
            CHECK(back.level(n)[i].first == flow.level(n)[i].first);
            CHECK(back.level(n)[i].second == flow.level(n)[i].second);
        }
    }
    CHECK_THROWS_AS(flow_from_text("garbage"), InvalidSpec);
}

TEST_CASE("rational parse/format round-trip") {
    CHECK(parse_rational("1/3") == rat(1, 3));
    CHECK(format_rational(rat(22, 7)) == "22/7");
    CHECK(parse_rational(format_rational(rat(-5, 9))) == rat(-5, 9));
}
