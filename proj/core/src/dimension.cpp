#include "salem/dimension.hpp"

#include "salem/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace salem {

std::vector<double> image_points(const WalkPath& path, const CantorSpec& spec, int m) {
    CantorSpec stage{spec.ratio, m};
    stage.validate();
    const std::uint64_t N = path.length();
    Rational res(1);
    for (int k = 0; k < m; ++k) res *= spec.ratio;
    if (res * N < 1)
        throw InvalidSpec("image_points: stage " + std::to_string(m) +
                          " is below the walk resolution");
    const auto intervals = cantor_intervals(stage);
    std::vector<double> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) {
        const Rational mid = (iv.lo + iv.hi) / 2;
        // nearest level-n dyadic point; at most 1/(2N) <= |J|/2 away, so inside J
        const BigInt j = BigInt((mid * N + Rational(1, 2)).convert_to<BigInt>());
        out.push_back(path.grid_value(j.convert_to<std::uint64_t>()));
    }
    return out;
}

BoxCountResult box_count(const std::vector<double>& points,
                         const std::vector<double>& scales) {
    if (points.empty()) throw InvalidSpec("box_count: no points");
    if (scales.size() < 4) throw InvalidSpec("box_count: need at least 4 scales");
    std::vector<double> sc = scales;
    std::sort(sc.rbegin(), sc.rend());
    for (const double s : sc)
        if (!(s > 0.0)) throw InvalidSpec("box_count: scales must be positive");
    if (sc.front() / sc.back() < 8.0 * (1.0 - 1e-12))
        throw InvalidSpec("box_count: scales must span at least 3 octaves");

    std::vector<double> pts = points;
    std::sort(pts.begin(), pts.end());

    BoxCountResult res;
    res.scales = sc;
    res.counts.reserve(sc.size());
    for (const double s : sc) {
        std::uint64_t count = 0;
        double prev_cell = std::numeric_limits<double>::quiet_NaN();
        for (const double p : pts) {
            const double cell = std::floor(p / s);
            if (count == 0 || cell != prev_cell) {
                ++count;
                prev_cell = cell;
            }
        }
        res.counts.push_back(count);
    }

    res.degenerate = pts.front() == pts.back();
    std::vector<double> xs, ys;
    xs.reserve(sc.size());
    ys.reserve(sc.size());
    for (std::size_t i = 0; i < sc.size(); ++i) {
        xs.push_back(std::log(1.0 / sc[i]));
        ys.push_back(std::log(double(res.counts[i])));
    }
    const LinFit fit = linear_fit(xs, ys);
    res.dimension = res.degenerate ? 0.0 : fit.slope;
    res.r_squared = res.degenerate ? 0.0 : fit.r_squared;
    return res;
}

CapacityResult capacity_dim(const TreeFlowMeasure& flow, const std::vector<int>& depths,
                            const std::vector<double>& alpha_grid) {
    if (depths.size() < 3) throw InvalidSpec("capacity_dim: need at least 3 depths");
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (depths[i] < 0 || depths[i] > flow.max_depth())
            throw InvalidSpec("capacity_dim: depth outside the flow");
        if (i > 0 && depths[i] <= depths[i - 1])
            throw InvalidSpec("capacity_dim: depths must increase");
    }
    if (alpha_grid.empty()) throw InvalidSpec("capacity_dim: empty alpha grid");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] > 0.0 && alpha_grid[i] < 1.0))
            throw InvalidSpec("capacity_dim: alpha grid must lie in (0, 1)");
        if (i > 0 && alpha_grid[i] <= alpha_grid[i - 1])
            throw InvalidSpec("capacity_dim: alpha grid must increase");
    }

    std::vector<AtomicMeasure> thetas;
    thetas.reserve(depths.size());
    for (const int d : depths) thetas.push_back(n_approximation(flow, d));

    CapacityResult res;
    res.alphas = alpha_grid;
    res.threshold = 0.2 * std::log(2.0);
    res.growth.reserve(alpha_grid.size());

    bool any_energy = false;
    for (const double alpha : alpha_grid) {
        std::vector<double> xs, ys;
        xs.reserve(depths.size());
        ys.reserve(depths.size());
        for (std::size_t i = 0; i < depths.size(); ++i) {
            const double e = energy_offdiag(thetas[i], alpha);
            if (e > 1e-200) any_energy = true;
            xs.push_back(double(depths[i]));
            ys.push_back(std::log(std::max(e, 1e-300)));
        }
        res.growth.push_back(linear_fit(xs, ys).slope);
    }

    if (!any_energy) { // e.g. a single-atom flow: nothing to grow
        res.crossover = alpha_grid.front();
        res.flagged = true;
        return res;
    }

    std::size_t first_growing = alpha_grid.size();
    for (std::size_t i = 0; i < alpha_grid.size(); ++i)
        if (res.growth[i] > res.threshold) {
            first_growing = i;
            break;
        }
    if (first_growing == alpha_grid.size()) {
        res.crossover = alpha_grid.back(); // bounded everywhere in the grid
        res.flagged = true;
    } else if (first_growing == 0) {
        res.crossover = alpha_grid.front(); // growing already at the grid start
        res.flagged = true;
    } else {
        const double a0 = alpha_grid[first_growing - 1], a1 = alpha_grid[first_growing];
        const double g0 = res.growth[first_growing - 1], g1 = res.growth[first_growing];
        res.crossover = a0 + (res.threshold - g0) * (a1 - a0) / (g1 - g0);
    }
    return res;
}

DimensionReport salem_report(const CantorSpec& spec, std::uint64_t seed, int n, double u_max) {
    spec.validate();
    if (n < 9 || n > 28)
        throw InvalidSpec("salem_report: depth n must lie in [9, 28] (ladder starts at 8)");
    if (!(u_max > 16.0)) throw InvalidSpec("salem_report: u_max too small to fit");

    DimensionReport rep;
    rep.ratio = format_rational(spec.ratio);
    rep.depth = n;
    rep.seed = seed;
    rep.u_max = u_max;
    rep.target_beta = spec.beta();
    rep.target_gamma = spec.gamma();

    CantorSpec flow_spec{spec.ratio, n};
    const TreeFlowMeasure flow = cantor_flow(flow_spec);
    rep.flow_report = flow_check(flow);
    rep.frostman = frostman_check(flow, spec.beta(), 1.0, 2000, seed);

    const RefinementLadder ladder = build_ladder(seed, 8, n);
    rep.ladder_distances = ladder.distances;
    const DecayResult decay = decay_pipeline(ladder, flow, u_max);
    rep.decay = decay.fit;
    rep.fourier_exponent = decay.fit.exponent;
    rep.fourier_dim_estimate = std::clamp(2.0 * decay.fit.exponent, 0.0, 1.0);

    int m = std::min(int(std::floor(double(n) * spec.beta() + 1e-9)), 12);
    if (m < 1) m = 1;
    rep.stage = m;
    const std::vector<double> pts = image_points(ladder.finest(), spec, m);

    const double gamma = std::max(spec.gamma(), 0.05);
    int k_hi = int(std::floor(double(m) / gamma)) - 1;
    const int k_lo = 3;
    if (k_hi < k_lo + 3) k_hi = k_lo + 3;
    std::vector<double> scales;
    for (int k = k_lo; k <= k_hi; ++k) scales.push_back(std::ldexp(1.0, -k));
    rep.box = box_count(pts, scales);

    // energy growth reads cleanest at stage-aligned depths; renormalization
    // transients at partial stages otherwise push the crossover upward
    const int d_hi = std::min(14, n);
    int stage_levels = 0;
    if (numerator(spec.ratio) == 1) {
        BigInt den = denominator(spec.ratio);
        int k = 0;
        while (den % 2 == 0) {
            den /= 2;
            ++k;
        }
        if (den == 1) stage_levels = k;
    }
    std::vector<int> depths;
    if (stage_levels >= 2 && 3 * stage_levels <= d_hi) {
        for (int d = stage_levels; d <= d_hi; d += stage_levels) depths.push_back(d);
    } else {
        const int d_lo = std::max(3, d_hi - 8);
        for (int d = d_lo; d <= d_hi; d += 2) depths.push_back(d);
    }
    std::vector<double> alpha_grid;
    for (int i = 2; i <= 18; ++i) alpha_grid.push_back(0.05 * double(i));
    rep.capacity = capacity_dim(flow, depths, alpha_grid);

    rep.salem_gap = std::abs(rep.fourier_dim_estimate - rep.box.dimension);
    rep.fourier_below_box = rep.fourier_dim_estimate <= rep.box.dimension + 0.1;
    rep.consistent = rep.fourier_below_box &&
                     std::abs(rep.box.dimension - rep.target_gamma) <= 0.15 &&
                     std::abs(rep.fourier_exponent - 0.5 * rep.target_gamma) <= 0.10;
    return rep;
}

} // namespace salem
