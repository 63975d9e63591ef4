#include "salem/spectral.hpp"

#include "salem/numerics.hpp"
#include "salem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace salem {

namespace {

double ipow(double base, std::uint64_t e) {
    double acc = 1.0;
    while (e) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

std::complex<double> cis(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Map atoms of theta onto the grid {j/N}; throws when an atom sits off-grid.
std::vector<std::pair<std::uint64_t, double>> grid_atoms(const AtomicMeasure& theta,
                                                         std::uint64_t n_steps) {
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double x = theta.t[i] * double(n_steps);
        const double rounded = std::nearbyint(x);
        if (std::abs(x - rounded) > 1e-6 || rounded < 0.0 || rounded > double(n_steps))
            throw InvalidSpec("atom off the level-n grid: t=" + std::to_string(theta.t[i]));
        out.emplace_back(std::uint64_t(rounded), theta.w[i]);
    }
    return out;
}

} // namespace

AtomicMeasure pushout_measure(const WalkPath& path, const AtomicMeasure& theta) {
    const auto atoms = grid_atoms(theta, path.length());
    std::vector<std::pair<double, double>> moved;
    moved.reserve(atoms.size());
    for (const auto& [j, w] : atoms) moved.emplace_back(path.grid_value(j), w);
    AtomicMeasure out = make_atomic(std::move(moved));
    out.total_mass = theta.total_mass; // mass is preserved by definition of the image
    return out;
}

std::complex<double> transform_at(const AtomicMeasure& nu, double u) {
    if (!std::isfinite(u)) throw InvalidSpec("transform_at: non-finite frequency");
    std::vector<std::complex<double>> terms(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) terms[i] = nu.w[i] * cis(u * nu.t[i]);
    return pairwise_sum(terms);
}

SpectrumSample transform_grid(const AtomicMeasure& nu, std::vector<double> grid) {
    if (grid.empty()) throw InvalidSpec("transform_grid: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
            throw InvalidSpec("transform_grid: grid must be nonnegative and finite");
        if (i > 0 && grid[i] < grid[i - 1])
            throw InvalidSpec("transform_grid: grid must be sorted");
    }
    SpectrumSample s;
    s.grid = std::move(grid);
    s.values.resize(s.grid.size());
    s.total_mass = nu.total_mass;
    s.valid_u_max = std::numeric_limits<double>::infinity();
    parallel_for(s.grid.size(), [&](std::size_t i) { s.values[i] = transform_at(nu, s.grid[i]); });

    // dyadic blocks [2^k, 2^{k+1}); everything below 1 goes into [0, 1)
    int cur_block = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        const double u = s.grid[i];
        int k;
        if (u < 1.0) {
            k = std::numeric_limits<int>::min() + 1;
        } else {
            int ex;
            std::frexp(u, &ex);
            k = ex - 1;
        }
        if (s.envelope.empty() || k != cur_block) {
            EnvelopeBlock b;
            b.u_lo = k == std::numeric_limits<int>::min() + 1 ? 0.0 : std::ldexp(1.0, k);
            b.u_hi = k == std::numeric_limits<int>::min() + 1 ? 1.0 : std::ldexp(1.0, k + 1);
            s.envelope.push_back(b);
            cur_block = k;
        }
        s.envelope.back().sup_abs = std::max(s.envelope.back().sup_abs, std::abs(s.values[i]));
    }
    return s;
}

double char_exact(double u, std::uint64_t n_steps, std::uint64_t h) {
    if (n_steps == 0 || h < 1 || h > n_steps)
        throw InvalidSpec("char_exact: need 1 <= h <= N");
    return ipow(std::cos(u / std::sqrt(double(n_steps))), h);
}

double moment_exact_small(int n, int q, double u, const AtomicMeasure& theta) {
    if (n < 0 || n > 4)
        throw ResourceLimit("moment_exact_small: exhaustive enumeration needs 2^n <= 16");
    if (q < 1) throw InvalidSpec("moment_exact_small: q >= 1");
    const std::uint64_t N = std::uint64_t(1) << n;
    std::vector<double> c(N + 1, 0.0);
    for (const auto& [j, w] : grid_atoms(theta, N)) c[j] += w;

    // phase table for every reachable partial sum
    const double root = std::sqrt(double(N));
    std::vector<std::complex<double>> phase(2 * N + 1);
    for (std::uint64_t p = 0; p <= 2 * N; ++p)
        phase[p] = cis(u * (double(p) - double(N)) / root);

    const std::uint64_t words = std::uint64_t(1) << N;
    std::vector<double> vals(words);
    for (std::uint64_t w = 0; w < words; ++w) {
        std::complex<double> z = c[0];
        std::int64_t p = 0;
        for (std::uint64_t j = 1; j <= N; ++j) {
            p += (w >> (j - 1)) & 1 ? 1 : -1;
            if (c[j] != 0.0) z += c[j] * phase[std::size_t(p + std::int64_t(N))];
        }
        vals[w] = ipow(std::norm(z), std::uint64_t(q));
    }
    return pairwise_sum(vals) / double(words);
}

double moment_q1_closed_form(double u, std::uint64_t n_steps, const AtomicMeasure& theta) {
    const auto atoms = grid_atoms(theta, n_steps);
    const double a = std::cos(u / std::sqrt(double(n_steps)));
    std::vector<double> rows(atoms.size(), 0.0);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            const std::uint64_t d = atoms[i].first > atoms[k].first
                                        ? atoms[i].first - atoms[k].first
                                        : atoms[k].first - atoms[i].first;
            acc += atoms[k].second * ipow(a, d);
        }
        rows[i] = atoms[i].second * acc;
    }
    return pairwise_sum(rows);
}

namespace {

// One trial of |sum_j c_j e^{i u S(j/N)}|^2: sample the word, scan its bits once.
double trial_f(std::uint64_t n_steps, double u,
               const std::vector<std::pair<std::uint64_t, double>>& atoms,
               std::uint64_t seed, std::uint64_t stream) {
    const PackedBits word = sample_bits(n_steps, seed, stream);
    const double root = std::sqrt(double(n_steps));
    std::vector<std::complex<double>> terms;
    terms.reserve(atoms.size());
    std::uint64_t done = 0; // bits consumed
    std::int64_t ones = 0;
    for (const auto& [j, w] : atoms) {
        while (done + 64 <= j) {
            ones += std::popcount(word.words[done >> 6]);
            done += 64;
        }
        if (j > done) {
            // partial word: count bits [done, j)
            const std::uint64_t mask = (std::uint64_t(1) << (j - done)) - 1;
            ones += std::popcount((word.words[done >> 6] >> (done & 63)) & mask);
            done = j;
        }
        const std::int64_t p = 2 * ones - std::int64_t(j);
        terms.push_back(w * cis(u * double(p) / root));
    }
    return std::norm(pairwise_sum(terms));
}

} // namespace

MomentEstimate moment_mc(int n, int q, double u, const AtomicMeasure& theta, double alpha,
                         int trials, std::uint64_t seed) {
    if (n < 0 || n > 30) throw InvalidSpec("moment_mc: n outside [0, 30]");
    if (q < 1) throw InvalidSpec("moment_mc: q >= 1");
    if (trials < 1) throw InvalidSpec("moment_mc: need at least one trial");
    const std::uint64_t N = std::uint64_t(1) << n;
    const auto atoms = grid_atoms(theta, N);

    std::vector<double> vals(static_cast<std::size_t>(trials));
    parallel_for(std::size_t(trials), [&](std::size_t t) {
        vals[t] = ipow(trial_f(N, u, atoms, seed, t + 1), std::uint64_t(q));
    });

    MomentEstimate est;
    est.n = n;
    est.q = q;
    est.u = u;
    est.alpha = alpha;
    est.trials = trials;
    est.seed = seed;
    est.mean = pairwise_sum(vals) / double(trials);
    std::vector<double> devs(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double d = vals[i] - est.mean;
        devs[i] = d * d;
    }
    est.std_error = trials > 1
                        ? std::sqrt(pairwise_sum(devs) / double(trials - 1) / double(trials))
                        : 0.0;
    est.bound = ipow(22.0 * double(q) * std::pow(u, -2.0 * alpha), std::uint64_t(q));
    if (n <= 4) est.exact = moment_exact_small(n, q, u, theta);
    return est;
}

TailReport tail_mc(int n, double u, double epsilon, int q, const AtomicMeasure& theta,
                   double alpha, int trials, std::uint64_t seed) {
    if (epsilon <= 0.0) throw InvalidSpec("tail_mc: epsilon must be positive");
    if (q < 1) q = int(std::ceil(6.0 / epsilon));
    if (n < 0 || n > 30) throw InvalidSpec("tail_mc: n outside [0, 30]");
    if (trials < 1) throw InvalidSpec("tail_mc: need at least one trial");
    const std::uint64_t N = std::uint64_t(1) << n;
    const auto atoms = grid_atoms(theta, N);

    TailReport rep;
    rep.n = n;
    rep.u = u;
    rep.epsilon = epsilon;
    rep.q = q;
    rep.alpha = alpha;
    rep.trials = trials;
    rep.seed = seed;
    rep.threshold = std::pow(u, -2.0 * alpha + epsilon);

    std::vector<double> f(static_cast<std::size_t>(trials));
    parallel_for(std::size_t(trials), [&](std::size_t t) {
        f[t] = trial_f(N, u, atoms, seed, t + 1);
    });

    std::vector<double> indicator(f.size()), moment(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        indicator[i] = f[i] > rep.threshold ? 1.0 : 0.0;
        moment[i] = ipow(f[i], std::uint64_t(q));
    }
    rep.p_hat = pairwise_sum(indicator) / double(trials);
    rep.chain = pairwise_sum(moment) / double(trials) / ipow(rep.threshold, std::uint64_t(q));
    rep.mc_error = std::sqrt(std::max(rep.p_hat * (1.0 - rep.p_hat), 0.0) / double(trials));
    rep.passed = rep.p_hat <= rep.chain + 3.0 * rep.mc_error + 1e-15;
    return rep;
}

PartsLemmaResult parts_lemma_eval(const AtomicMeasure& mu,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& f_prime,
                                  double quad_step) {
    if (!(quad_step > 0.0 && quad_step <= 1e-4))
        throw InvalidSpec("parts_lemma_eval: quad_step must lie in (0, 1e-4]");
    for (const double t : mu.t)
        if (!(t >= 0.0 && t <= 1.0))
            throw InvalidSpec("parts_lemma_eval: atoms must lie in [0,1]");

    PartsLemmaResult res;
    const std::size_t m = mu.size();
    std::vector<double> lhs_terms(m);
    for (std::size_t i = 0; i < m; ++i) lhs_terms[i] = mu.w[i] * f(mu.t[i]);
    res.lhs = pairwise_sum(lhs_terms);

    // M(t) = mu[0, t] is a right-continuous step function: integrate f' M exactly
    // gap by gap via the antiderivative f.
    std::vector<double> cum(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        running += mu.w[i];
        cum[i] = running;
    }
    const double total = m == 0 ? 0.0 : cum.back();
    double integral = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double hi = i + 1 < m ? mu.t[i + 1] : 1.0;
        integral += cum[i] * (f(hi) - f(mu.t[i]));
    }
    res.rhs = total * f(1.0) - integral;

    // midpoint-rule cross-check of the same integral
    const std::uint64_t steps = std::uint64_t(std::ceil(1.0 / quad_step));
    const double h = 1.0 / double(steps);
    double quad = 0.0;
    std::size_t k = 0;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const double mid = (double(i) + 0.5) * h;
        while (k < m && mu.t[k] <= mid) ++k;
        const double mass_below = k == 0 ? 0.0 : cum[k - 1];
        quad += f_prime(mid) * mass_below * h;
    }
    res.rhs_quadrature = total * f(1.0) - quad;
    return res;
}

GeomBoundResult geometric_sum_bound(const AtomicMeasure& theta, std::uint64_t n_steps,
                                    std::uint64_t r, double u, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidSpec("geometric_sum_bound: alpha outside (0, 1]");
    if (r > n_steps) throw InvalidSpec("geometric_sum_bound: r beyond N");
    const double x = u / std::sqrt(double(n_steps));
    const double a = std::cos(x);
    if (!(u > 0.0) || !(x < M_PI / 2.0) || !(a > 0.0))
        throw OutOfRegime("geometric_sum_bound: need 0 < u/sqrt(N) < pi/2 so cos stays in (0,1)");

    GeomBoundResult res;
    res.a = a;
    const auto atoms = grid_atoms(theta, n_steps);
    const std::uint64_t j_lo = std::max<std::uint64_t>(r, 1);
    std::vector<double> terms;
    terms.reserve(atoms.size());
    for (const auto& [j, w] : atoms)
        if (j >= j_lo) terms.push_back(w * ipow(a, j - r));
    res.lhs = pairwise_sum(terms);

    const double n_d = double(n_steps);
    const double log_inv_a = -std::log(a);
    res.rhs = ipow(a, n_steps) + (1.0 - a) / std::pow(n_d, alpha) +
              3.0 * std::tgamma(alpha + 1.0) / std::pow(n_d * log_inv_a, alpha);
    res.simplified = 11.0 * std::pow(u, -2.0 * alpha);
    return res;
}

double energy_offdiag(const AtomicMeasure& mu, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("energy_offdiag: alpha outside (0, 1)");
    for (std::size_t i = 1; i < mu.size(); ++i)
        if (mu.t[i] == mu.t[i - 1])
            throw InvalidSpec("energy_offdiag: coincident atoms, merge first");
    const std::size_t m = mu.size();
    std::vector<double> rows(m, 0.0);
    parallel_for(m, [&](std::size_t j) {
        double acc = 0.0;
        for (std::size_t k = j + 1; k < m; ++k)
            acc += mu.w[j] * mu.w[k] * std::pow(std::abs(mu.t[j] - mu.t[k]), -alpha);
        rows[j] = acc;
    });
    return 2.0 * pairwise_sum(rows);
}

DecayFit decay_fit(const SpectrumSample& spectrum, double u_lo, bool subtract_uncertainty) {
    std::vector<double> xs, ys;
    DecayFit fit;
    fit.u_lo = std::numeric_limits<double>::infinity();
    fit.u_hi = 0.0;
    for (const auto& b : spectrum.envelope) {
        if (b.u_lo < u_lo || b.u_hi > spectrum.valid_u_max || b.u_lo <= 0.0) continue;
        const double value = subtract_uncertainty ? b.sup_abs - b.uncertainty : b.sup_abs;
        if (!(value > 0.0)) {
            ++fit.blocks_dropped;
            continue;
        }
        xs.push_back(std::log(std::sqrt(b.u_lo * b.u_hi)));
        ys.push_back(std::log(value));
        fit.u_lo = std::min(fit.u_lo, b.u_lo);
        fit.u_hi = std::max(fit.u_hi, b.u_hi);
        ++fit.blocks_used;
    }
    if (fit.blocks_used < 4)
        throw InvalidSpec("decay_fit: fewer than 4 dyadic envelope blocks in the fitted range");
    const LinFit ols = linear_fit(xs, ys);
    fit.exponent = -ols.slope;
    fit.intercept = ols.intercept;
    fit.r_squared = ols.r_squared;
    fit.method = subtract_uncertainty ? "ols-log-envelope-minus-uncertainty"
                                      : "ols-log-envelope";
    return fit;
}

std::vector<double> band_grid(int n) {
    if (n < 1) throw InvalidSpec("band_grid: n >= 1");
    std::vector<double> grid;
    grid.reserve(std::size_t(n) + 1);
    for (int k = 0; k <= n; ++k) grid.push_back(double(n) + double(k) / double(n));
    return grid;
}

DecayResult decay_pipeline(const RefinementLadder& ladder, const TreeFlowMeasure& flow,
                           double u_max, bool conservative, double u_lo,
                           int points_per_octave) {
    const WalkPath& path = ladder.finest();
    const std::uint64_t N = path.length();
    const double valid = 2.0 * M_PI * std::sqrt(double(N)); // lattice period of S-values
    if (!(u_max > 0.0) || u_max > valid)
        throw OutOfRegime("decay_pipeline: u_max beyond validity, valid_u_max = " +
                          std::to_string(valid));
    if (!(u_lo > 0.0 && u_lo < u_max)) throw InvalidSpec("decay_pipeline: need 0 < u_lo < u_max");
    if (points_per_octave < 4) throw InvalidSpec("decay_pipeline: grid too sparse");

    const int m = std::min(ladder.n_max, flow.max_depth());
    const AtomicMeasure theta = n_approximation(flow, m);
    const AtomicMeasure image = pushout_measure(path, theta);

    std::vector<double> grid;
    const double octaves = std::log2(u_max / u_lo);
    const std::size_t count = std::size_t(std::ceil(octaves * points_per_octave)) + 1;
    grid.reserve(count + 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = u_lo * std::exp2(double(i) / points_per_octave);
        if (u >= u_max) break;
        grid.push_back(u);
    }
    grid.push_back(u_max);

    DecayResult out;
    out.spectrum = transform_grid(image, std::move(grid));
    out.spectrum.valid_u_max = valid;

    // a-priori uncertainty: walk-limit gap (geometric extrapolation of measured
    // ladder distances) plus in-cell displacement at the theta resolution
    double delta_path = 0.0;
    if (!ladder.distances.empty()) {
        const double d_last = ladder.distances.back();
        double ratio = 1.0 / std::sqrt(2.0);
        if (ladder.distances.size() >= 2 && ladder.distances[ladder.distances.size() - 2] > 0.0)
            ratio = std::min(0.75, d_last / ladder.distances[ladder.distances.size() - 2]);
        delta_path = d_last * ratio / (1.0 - ratio);
    }
    const double cell = std::ldexp(1.0, -m);
    const double displacement = std::sqrt(2.4 * cell * double(m) * std::log(2.0));
    for (auto& b : out.spectrum.envelope)
        b.uncertainty = b.u_hi * (delta_path + displacement);

    out.fit = decay_fit(out.spectrum, std::max(u_lo, 1.0), conservative);
    return out;
}

} // namespace salem
