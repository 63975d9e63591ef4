#pragma once

#include "salem/dyadic.hpp"
#include "salem/walks.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace salem {

struct EnvelopeBlock {
    double u_lo = 0.0;       // dyadic block [2^k, 2^{k+1}); the sub-1 block is [0,1)
    double u_hi = 0.0;
    double sup_abs = 0.0;    // sup |transform| over grid points in the block
    double uncertainty = 0.0; // a-priori discretization error at u_hi (0 if not attached)
};

struct SpectrumSample {
    std::vector<double> grid;                  // sorted, u >= 0
    std::vector<std::complex<double>> values;  // transform at each grid point
    std::vector<EnvelopeBlock> envelope;
    double valid_u_max = 0.0;                  // discretization validity bound
    double total_mass = 0.0;
};

struct MomentEstimate {
    int n = 0;
    int q = 1;
    double u = 0.0;
    double alpha = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;       // estimate of E|transform(pushout)|^{2q}
    double std_error = 0.0;
    double bound = 0.0;      // (22 q u^{-2 alpha})^q
    std::optional<double> exact; // exhaustive value when 2^n <= 16
};

struct DecayFit {
    double exponent = 0.0;   // |transform| ~ u^{-exponent} on the fitted range
    double intercept = 0.0;
    double r_squared = 0.0;
    double u_lo = 0.0;
    double u_hi = 0.0;
    int blocks_used = 0;
    int blocks_dropped = 0;  // zero-envelope blocks skipped
    std::string method;
};

struct TailReport {
    int n = 0;
    double u = 0.0;
    double epsilon = 0.0;
    int q = 0;
    double alpha = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;  // u^{-2 alpha + epsilon}
    double p_hat = 0.0;      // empirical P{|transform|^2 > threshold}
    double chain = 0.0;      // empirical mean(F^q) / threshold^q
    double mc_error = 0.0;   // MC standard error of p_hat
    bool passed = false;     // p_hat <= chain + 3*mc_error
};

struct PartsLemmaResult {
    double lhs = 0.0;             // sum of weights * f(atom)
    double rhs = 0.0;             // M(1) f(1) - exact step-function integral of f' M
    double rhs_quadrature = 0.0;  // midpoint-rule cross-check of the integral
};

struct GeomBoundResult {
    double lhs = 0.0;        // sum_h c(r+h) a^h
    double rhs = 0.0;        // a^N + (1-a)/N^alpha + 3 Gamma(alpha+1)/(N log(1/a))^alpha
    double simplified = 0.0; // 11 u^{-2 alpha}
    double a = 0.0;          // cos(u/sqrt(N))
};

// Image of theta under the walk: atoms move to S(j/N), coincident values merge.
// Every atom of theta must sit on the walk's grid {j/N}.
AtomicMeasure pushout_measure(const WalkPath& path, const AtomicMeasure& theta);

// sum_j c_j e^{i u t_j}, fixed index order, pairwise accumulation.
std::complex<double> transform_at(const AtomicMeasure& nu, double u);

// Batched transform with per-dyadic-block envelope; valid_u_max is left infinite
// for the caller to tighten.
SpectrumSample transform_grid(const AtomicMeasure& nu, std::vector<double> grid);

// E[e^{i u S(h/N)}] = cos(u/sqrt(N))^h for a fair-coin walk.
double char_exact(double u, std::uint64_t n_steps, std::uint64_t h);

// Exhaustive E|sum_j c_j e^{i u S(j/N)}|^{2q} over all 2^N sign words, N = 2^n <= 16.
double moment_exact_small(int n, int q, double u, const AtomicMeasure& theta);

// Closed form for q = 1: sum_{j,k} c(j) c(k) cos(u/sqrt(N))^{|j-k|}.
double moment_q1_closed_form(double u, std::uint64_t n_steps, const AtomicMeasure& theta);

// Monte Carlo moment with per-trial counter-based seeding; deterministic
// reduction order regardless of worker count.
MomentEstimate moment_mc(int n, int q, double u, const AtomicMeasure& theta, double alpha,
                         int trials, std::uint64_t seed);

// Empirical tail of F = |transform|^2 against the threshold u^{-2 alpha + epsilon},
// with the matching q-th-moment Markov chain value on the same sample.
TailReport tail_mc(int n, double u, double epsilon, int q, const AtomicMeasure& theta,
                   double alpha, int trials, std::uint64_t seed);

// Integration by parts for atomic measures:
//   sum c_j f(t_j) = M(1) f(1) - integral_0^1 f'(t) M(t) dt,  M(t) = mass of [0, t].
// The integral is evaluated exactly over the inter-atom gaps (M is a step
// function); quad_step only controls the midpoint-rule cross-check.
PartsLemmaResult parts_lemma_eval(const AtomicMeasure& mu,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& f_prime,
                                  double quad_step);

// Geometric tail of the atom weights against the three-term envelope; requires
// a = cos(u/sqrt(N)) in (0,1).  Index r >= 0; terms run over atoms j = r+h >= max(r,1).
GeomBoundResult geometric_sum_bound(const AtomicMeasure& theta, std::uint64_t n_steps,
                                    std::uint64_t r, double u, double alpha);

// Off-diagonal discrete energy sum_{j != k} c_j c_k |t_j - t_k|^{-alpha}.
double energy_offdiag(const AtomicMeasure& mu, double alpha);

// OLS on log sup-envelope vs log block center over dyadic blocks inside
// [u_lo, valid_u_max]; needs >= 4 usable blocks.  The conservative variant fits
// envelope minus attached uncertainty.
DecayFit decay_fit(const SpectrumSample& spectrum, double u_lo = 8.0,
                   bool subtract_uncertainty = false);

struct DecayResult {
    SpectrumSample spectrum;
    DecayFit fit;
};

// End-to-end: finest ladder level + flow -> pushout transform on a log-spaced
// grid, envelope with a-priori uncertainties, and the decay fit.  valid_u_max is
// the lattice period 2*pi*sqrt(N) of the 1/sqrt(N)-valued walk; u_max beyond it
// throws.  conservative=true fits envelope minus uncertainty instead of raw.
DecayResult decay_pipeline(const RefinementLadder& ladder, const TreeFlowMeasure& flow,
                           double u_max, bool conservative = false, double u_lo = 8.0,
                           int points_per_octave = 64);

// Dense unit band u = n, n + 1/n, ..., n+1.
std::vector<double> band_grid(int n);

} // namespace salem
