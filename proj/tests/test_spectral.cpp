#include <doctest.h>

#include "salem/dyadic.hpp"
#include "salem/spectral.hpp"
#include "salem/walks.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <string>
#include <vector>

using namespace salem;

namespace {

Rational rat(long p, long q) { return Rational(BigInt(p), BigInt(q)); }

AtomicMeasure level_atoms(int n) { return n_approximation(lebesgue_flow(n), n); }

// binomial average of cos(u P_h / sqrt(N)) over the 2^h sign patterns of h steps
double char_by_binomial(double u, std::uint64_t n_steps, std::uint64_t h) {
    double acc = 0.0;
    double binom = 1.0;  // C(h, 0)
    for (std::uint64_t k = 0; k <= h; ++k) {
        const double p = 2.0 * double(k) - double(h);
        acc += binom * std::cos(u * p / std::sqrt(double(n_steps)));
        binom = binom * double(h - k) / double(k + 1);
    }
    return acc / std::exp2(double(h));
}

// exhaustive tail probability P{|theta-hat o S|^2 > threshold} over all words
double exhaustive_tail_fraction(int n, double u, double threshold,
                                const AtomicMeasure& theta) {
    const std::uint64_t N = std::uint64_t(1) << n;
    std::uint64_t hits = 0;
    for (std::uint64_t w = 0; w < (std::uint64_t(1) << N); ++w) {
        std::complex<double> z = 0.0;
        std::int64_t p = 0;
        std::size_t a = 0;
        for (std::uint64_t j = 1; j <= N; ++j) {
            p += (w >> (j - 1)) & 1 ? 1 : -1;
            while (a < theta.size() &&
                   std::llround(theta.t[a] * double(N)) == std::int64_t(j)) {
                const double phase = u * double(p) / std::sqrt(double(N));
                z += theta.w[a] * std::complex<double>(std::cos(phase), std::sin(phase));
                ++a;
            }
        }
        if (std::norm(z) > threshold) ++hits;
    }
    return double(hits) / double(std::uint64_t(1) << N);
}

SpectrumSample synthetic_spectrum(int k_lo, int k_hi,
                                  const std::function<double(double)>& sup_of_center) {
    SpectrumSample s;
    s.valid_u_max = 1e12;
    s.total_mass = 1.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        EnvelopeBlock b;
        b.u_lo = std::ldexp(1.0, k);
        b.u_hi = std::ldexp(1.0, k + 1);
        b.sup_abs = sup_of_center(std::sqrt(b.u_lo * b.u_hi));
        s.envelope.push_back(b);
    }
    return s;
}

}  // namespace

TEST_CASE("transform_at point values") {
    auto single = make_atomic({{0.3, 0.7}});
    CHECK(std::abs(transform_at(single, 0.0)) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(std::abs(transform_at(single, 17.0)) == doctest::Approx(0.7).epsilon(1e-14));

    auto antipodal = make_atomic({{0.0, 0.5}, {0.5, 0.5}});
    CHECK(std::abs(transform_at(antipodal, 2.0 * M_PI)) <= 1e-15);

    auto nu = level_atoms(5);
    for (double u : {0.0, 1.0, 7.7, 300.0})
        CHECK(std::abs(transform_at(nu, u)) <= nu.total_mass + 1e-14);

    CHECK_THROWS_AS(transform_at(nu, std::nan("")), InvalidSpec);
    CHECK_THROWS_AS(transform_at(nu, INFINITY), InvalidSpec);
}

TEST_CASE("uniform atoms reproduce the Dirichlet kernel") {
    const int n = 6;
    const double N = 64.0;
    auto nu = level_atoms(n);
    // full period: every phase is a multiple of 2*pi
    CHECK(std::abs(transform_at(nu, 2.0 * M_PI * N)) == doctest::Approx(1.0).epsilon(1e-12));
    const double u = 3.7;
    const double closed = std::abs(std::sin(u / 2.0) / (N * std::sin(u / (2.0 * N))));
    CHECK(std::abs(transform_at(nu, u)) == doctest::Approx(closed).epsilon(1e-11));
}

TEST_CASE("transform_grid matches pointwise evaluation and builds the envelope") {
    auto nu = make_atomic({{0.0, 0.25}, {0.25, 0.25}, {0.625, 0.3}, {1.0, 0.2}});
    std::vector<double> grid = {0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 9.7};
    auto s = transform_grid(nu, grid);
    REQUIRE(s.grid.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(s.values[i] == transform_at(nu, grid[i]));

    REQUIRE(s.envelope.size() == 5);
    const double expected_lo[] = {0.0, 1.0, 2.0, 4.0, 8.0};
    const double expected_hi[] = {1.0, 2.0, 4.0, 8.0, 16.0};
    for (std::size_t b = 0; b < 5; ++b) {
        CHECK(s.envelope[b].u_lo == expected_lo[b]);
        CHECK(s.envelope[b].u_hi == expected_hi[b]);
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const bool inside = grid[i] >= s.envelope[b].u_lo &&
                                (grid[i] < s.envelope[b].u_hi ||
                                 (b == 0 && grid[i] < 1.0));
            if (inside) sup = std::max(sup, std::abs(s.values[i]));
        }
        CHECK(s.envelope[b].sup_abs == sup);
    }

    CHECK_THROWS_AS(transform_grid(nu, {}), InvalidSpec);
    CHECK_THROWS_AS(transform_grid(nu, {2.0, 1.0}), InvalidSpec);
    CHECK_THROWS_AS(transform_grid(nu, {-1.0, 2.0}), InvalidSpec);
}

TEST_CASE("char_exact against direct binomial averaging") {
    CHECK(char_exact(0.0, 64, 7) == 1.0);
    CHECK(char_exact(1.3, 16, 1) == doctest::Approx(std::cos(1.3 / 4.0)).epsilon(1e-15));
    CHECK(char_exact(2.0, 4, 2) ==
          doctest::Approx(std::cos(1.0) * std::cos(1.0)).epsilon(1e-15));
    for (std::uint64_t N : {4ull, 16ull, 64ull})
        for (std::uint64_t h : {1ull, 2ull, 3ull, 4ull})
            for (double u : {0.5, 2.0})
                CHECK(char_exact(u, N, h) ==
                      doctest::Approx(char_by_binomial(u, N, h)).epsilon(1e-12));
    CHECK_THROWS_AS(char_exact(1.0, 8, 0), InvalidSpec);
    CHECK_THROWS_AS(char_exact(1.0, 8, 9), InvalidSpec);
}

TEST_CASE("exhaustive moments: frozen cases and the q=1 closed form") {
    auto theta2 = level_atoms(2);
    CHECK(moment_exact_small(2, 3, 0.0, theta2) == doctest::Approx(1.0).epsilon(1e-15));

    auto skew = make_atomic({{0.25, 0.5}, {0.75, 0.25}});
    CHECK(moment_exact_small(2, 2, 0.0, skew) ==
          doctest::Approx(std::pow(0.75, 4.0)).epsilon(1e-15));

    auto unit_end = make_atomic({{1.0, 1.0}});
    CHECK(moment_exact_small(3, 2, 4.2, unit_end) == doctest::Approx(1.0).epsilon(1e-14));

    for (int n : {2, 3, 4})
        for (double u : {0.9, 2.3}) {
            auto theta = level_atoms(n);
            const double ex = moment_exact_small(n, 1, u, theta);
            const double cf = moment_q1_closed_form(u, std::uint64_t(1) << n, theta);
            CHECK(ex == doctest::Approx(cf).epsilon(1e-10));
        }

    CHECK_THROWS_AS(moment_exact_small(5, 1, 1.0, level_atoms(5)), ResourceLimit);
    CHECK_THROWS_AS(moment_exact_small(2, 0, 1.0, theta2), InvalidSpec);
}

TEST_CASE("moment_mc: degenerate u and agreement with enumeration") {
    auto theta = level_atoms(3);
    auto zero_u = moment_mc(3, 2, 0.0, theta, 0.5, 500, 7);
    CHECK(zero_u.mean == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(zero_u.std_error <= 1e-10);
    REQUIRE(zero_u.exact.has_value());
    CHECK(*zero_u.exact == doctest::Approx(1.0).epsilon(1e-13));

    for (int q : {1, 2})
        for (double u : {0.7, 1.3, 2.0, 3.1, 5.5})
            for (std::uint64_t seed : {11ull, 12ull}) {
                auto est = moment_mc(3, q, u, theta, 0.5, 4000, seed);
                REQUIRE(est.exact.has_value());
                CHECK(std::abs(est.mean - *est.exact) <= 4.0 * est.std_error + 1e-12);
                CHECK(est.bound ==
                      doctest::Approx(std::pow(22.0 * q * std::pow(u, -1.0), double(q))));
            }

    CHECK_THROWS_AS(moment_mc(3, 0, 1.0, theta, 0.5, 100, 1), InvalidSpec);
    CHECK_THROWS_AS(moment_mc(3, 1, 1.0, theta, 0.5, 0, 1), InvalidSpec);
}

TEST_CASE("tail_mc: certain misses, default q, exhaustive cross-check") {
    auto theta = level_atoms(3);

    // threshold u^{-2a+e} = 4 exceeds total mass squared, so no trial can land above
    auto miss = tail_mc(3, 2.0, 3.0, 2, theta, 0.5, 2000, 5);
    CHECK(miss.threshold == doctest::Approx(4.0));
    CHECK(miss.p_hat == 0.0);
    CHECK(miss.passed);

    auto defaulted = tail_mc(3, 3.0, 1.0, 0, theta, 0.5, 100, 5);
    CHECK(defaulted.q == 6);

    const double u = 3.0, epsilon = 0.8, alpha = 0.5;
    auto rep = tail_mc(3, u, epsilon, 0, theta, alpha, 20000, 42);
    CHECK(rep.q == 8);
    CHECK(rep.threshold == doctest::Approx(std::pow(u, -2.0 * alpha + epsilon)));
    const double truth = exhaustive_tail_fraction(3, u, rep.threshold, theta);
    const double sigma = std::sqrt(truth * (1.0 - truth) / 20000.0);
    CHECK(std::abs(rep.p_hat - truth) <= 4.0 * sigma + 1e-12);
    CHECK(rep.passed);

    CHECK_THROWS_AS(tail_mc(3, 3.0, 0.0, 2, theta, 0.5, 100, 1), InvalidSpec);
}

TEST_CASE("integration by parts on point masses") {
    auto delta = make_atomic({{0.5, 1.0}});
    auto sq = parts_lemma_eval(
        delta, [](double t) { return t * t; }, [](double t) { return 2.0 * t; }, 1e-4);
    CHECK(sq.lhs == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sq.rhs == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(sq.rhs - sq.rhs_quadrature) <= 1e-6);

    auto two = make_atomic({{0.25, 0.5}, {0.75, 0.5}});
    for (int k = 1; k <= 5; ++k) {
        auto res = parts_lemma_eval(
            two, [k](double t) { return std::pow(t, double(k)); },
            [k](double t) { return double(k) * std::pow(t, double(k - 1)); }, 1e-4);
        const double denom = std::max({std::abs(res.lhs), std::abs(res.rhs), 1.0});
        CHECK(std::abs(res.lhs - res.rhs) / denom <= 1e-9);
        CHECK(std::abs(res.rhs - res.rhs_quadrature) <= 1e-5);
    }
    auto osc = parts_lemma_eval(
        level_atoms(4), [](double t) { return std::sin(7.0 * t); },
        [](double t) { return 7.0 * std::cos(7.0 * t); }, 1e-4);
    CHECK(std::abs(osc.lhs - osc.rhs) <= 1e-9);

    CHECK_THROWS_AS(parts_lemma_eval(delta, [](double) { return 0.0; },
                                     [](double) { return 0.0; }, 1e-3),
                    InvalidSpec);
    auto outside = make_atomic({{1.5, 1.0}});
    CHECK_THROWS_AS(parts_lemma_eval(outside, [](double) { return 0.0; },
                                     [](double) { return 0.0; }, 1e-4),
                    InvalidSpec);
}

TEST_CASE("geometric tail bound") {
    // single atom exactly at index r: the sum is its weight
    auto lone = make_atomic({{4.0 / 64.0, 0.7}});
    auto res = geometric_sum_bound(lone, 64, 4, 1.0, 0.5);
    CHECK(res.lhs == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(res.a == doctest::Approx(std::cos(1.0 / 8.0)));
    CHECK(res.lhs <= res.rhs);

    auto quarter = n_approximation(cantor_flow({rat(1, 4), 12}), 12);
    for (std::uint64_t r : {0ull, 2048ull}) {
        auto g = geometric_sum_bound(quarter, std::uint64_t(1) << 12, r, 12.0, 0.5);
        CHECK(g.lhs <= g.rhs);
    }

    auto flat = level_atoms(14);
    auto lb = geometric_sum_bound(flat, std::uint64_t(1) << 14, 0, 14.0, 1.0);
    CHECK(lb.lhs <= lb.rhs);
    CHECK(lb.rhs <= lb.simplified);
    CHECK(lb.simplified == doctest::Approx(11.0 / (14.0 * 14.0)));

    CHECK_THROWS_AS(geometric_sum_bound(lone, 4, 0, 4.0, 0.5), OutOfRegime);
    CHECK_THROWS_AS(geometric_sum_bound(lone, 64, 0, 1.0, 1.5), InvalidSpec);
    CHECK_THROWS_AS(geometric_sum_bound(lone, 64, 65, 1.0, 0.5), InvalidSpec);
}

TEST_CASE("off-diagonal energy") {
    auto pair_atoms = make_atomic({{0.0, 0.5}, {0.5, 0.5}});
    CHECK(energy_offdiag(pair_atoms, 0.5) ==
          doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(energy_offdiag(make_atomic({{0.3, 1.0}}), 0.5) == 0.0);

    // uniform atoms approximate the (finite) Riesz integral 2/((1-a)(2-a)) from below
    auto e8 = energy_offdiag(level_atoms(8), 0.5);
    auto e10 = energy_offdiag(level_atoms(10), 0.5);
    CHECK(e10 == doctest::Approx(8.0 / 3.0).epsilon(0.05));
    CHECK(e10 > e8);
    CHECK(e10 - e8 <= 0.15);

    AtomicMeasure dup;
    dup.t = {0.3, 0.3};
    dup.w = {0.5, 0.5};
    dup.total_mass = 1.0;
    CHECK_THROWS_AS(energy_offdiag(dup, 0.5), InvalidSpec);
    CHECK_THROWS_AS(energy_offdiag(pair_atoms, 1.0), InvalidSpec);
}

TEST_CASE("energy growth separates the two sides of the critical exponent") {
    // natural measure of the quarter Cantor set has similarity dimension 1/2
    std::vector<double> lo, hi;
    for (int d : {6, 8, 10, 12}) {
        auto atoms = n_approximation(cantor_flow({rat(1, 4), d}), d);
        lo.push_back(energy_offdiag(atoms, 0.25));
        hi.push_back(energy_offdiag(atoms, 0.75));
    }
    CHECK(lo.back() <= 1.5 * lo.front());     // below the dimension: bounded
    CHECK(hi.back() >= 2.0 * hi.front());     // above it: keeps growing
    for (std::size_t i = 1; i < hi.size(); ++i) CHECK(hi[i] > hi[i - 1]);
}

TEST_CASE("decay_fit on synthetic envelopes") {
    auto half = synthetic_spectrum(3, 12, [](double c) { return 5.0 * std::pow(c, -0.5); });
    auto fit = decay_fit(half);
    CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.blocks_used == 10);
    CHECK(fit.u_lo == 8.0);
    CHECK(fit.u_hi == 8192.0);

    auto flat = synthetic_spectrum(3, 10, [](double) { return 0.25; });
    auto ffit = decay_fit(flat);
    CHECK(ffit.exponent == 0.0);
    CHECK(ffit.r_squared == 1.0);

    auto wobble = synthetic_spectrum(3, 12, [](double c) {
        return std::pow(c, -0.3) * (2.0 + 0.25 * std::cos(std::log(c)));
    });
    CHECK(decay_fit(wobble).exponent == doctest::Approx(0.3).epsilon(0.2));

    auto scaled = synthetic_spectrum(3, 12, [](double c) {
        return 7.3 * std::pow(c, -0.3) * (2.0 + 0.25 * std::cos(std::log(c)));
    });
    CHECK(decay_fit(scaled).exponent ==
          doctest::Approx(decay_fit(wobble).exponent).epsilon(1e-9));

    // blocks below u_lo are ignored, not fitted
    auto with_low = synthetic_spectrum(0, 12, [](double c) { return 5.0 * std::pow(c, -0.5); });
    CHECK(decay_fit(with_low).exponent == fit.exponent);
    CHECK(decay_fit(with_low).blocks_used == fit.blocks_used);

    auto sparse = synthetic_spectrum(3, 5, [](double c) { return std::pow(c, -0.5); });
    CHECK_THROWS_AS(decay_fit(sparse), InvalidSpec);

    auto holed = synthetic_spectrum(3, 12, [](double c) {
        return c > 100.0 && c < 200.0 ? 0.0 : std::pow(c, -0.5);
    });
    auto hfit = decay_fit(holed);
    CHECK(hfit.blocks_dropped == 1);
    CHECK(hfit.blocks_used == 9);
}

TEST_CASE("pushout of grid measures along walks") {
    auto up = decode_code("11");
    auto mid = pushout_measure(up, make_atomic({{0.5, 1.0}}));
    REQUIRE(mid.size() == 1);
    CHECK(mid.t[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(mid.w[0] == 1.0);
    CHECK(mid.total_mass == 1.0);

    auto updown = pushout_measure(decode_code("10"),
                                  make_atomic({{0.5, 0.5}, {1.0, 0.5}}));
    REQUIRE(updown.size() == 2);
    CHECK(updown.t[0] == 0.0);
    CHECK(updown.t[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(updown.w[0] == 0.5);

    // coincident images merge: S(1/4) = S(3/4) = 1/2 for the word 1100
    auto merged = pushout_measure(decode_code("1100"), level_atoms(2));
    REQUIRE(merged.size() == 3);
    CHECK(merged.t[0] == 0.0);
    CHECK(merged.t[1] == doctest::Approx(0.5));
    CHECK(merged.t[2] == doctest::Approx(1.0));
    CHECK(merged.w[1] == doctest::Approx(0.5));
    CHECK(merged.total_mass == doctest::Approx(1.0));

    CHECK_THROWS_AS(pushout_measure(up, make_atomic({{0.3, 1.0}})), InvalidSpec);
}

TEST_CASE("decay pipeline regime handling and fit window") {
    auto ladder = build_ladder(7, 8, 10);
    auto flow = cantor_flow({rat(1, 4), 10});

    bool threw = false;
    try {
        decay_pipeline(ladder, flow, 500.0);
    } catch (const OutOfRegime& e) {
        threw = true;
        CHECK(std::string(e.what()).find("valid_u_max") != std::string::npos);
    }
    CHECK(threw);

    auto res = decay_pipeline(ladder, flow, 150.0);
    CHECK(res.spectrum.valid_u_max == doctest::Approx(2.0 * M_PI * 32.0));
    CHECK(res.fit.u_lo == 8.0);
    CHECK(res.fit.u_hi == 128.0);
    CHECK(res.fit.blocks_used == 4);
    for (const auto& b : res.spectrum.envelope) CHECK(b.uncertainty > 0.0);
    CHECK(std::isfinite(res.fit.exponent));

    CHECK_THROWS_AS(decay_pipeline(ladder, flow, 150.0, false, 200.0), InvalidSpec);
    CHECK_THROWS_AS(decay_pipeline(ladder, flow, 150.0, false, 8.0, 2), InvalidSpec);
}

TEST_CASE("band grids") {
    auto g = band_grid(12);
    REQUIRE(g.size() == 13);
    CHECK(g.front() == 12.0);
    CHECK(g.back() == 13.0);
    CHECK(g[1] == doctest::Approx(12.0 + 1.0 / 12.0));
    CHECK_THROWS_AS(band_grid(0), InvalidSpec);
}
