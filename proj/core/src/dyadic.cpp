#include "salem/dyadic.hpp"

#include "salem/numerics.hpp"
#include "salem/rng.hpp"

#include <algorithm>
#include <cmath>

namespace salem {

void validate_dyadic(const DyadicIndex& idx) {
    if (idx.level < 0 || idx.level > 62)
        throw InvalidSpec("dyadic level out of range: " + std::to_string(idx.level));
    if (idx.j < 1 || idx.j > (std::uint64_t(1) << idx.level))
        throw InvalidSpec("dyadic index out of range: j=" + std::to_string(idx.j) +
                          " at level " + std::to_string(idx.level));
}

double CantorSpec::beta() const {
    return std::log(2.0) / -std::log(to_double(ratio));
}

void CantorSpec::validate() const {
    if (!(ratio > 0 && ratio < Rational(1, 2)))
        throw InvalidSpec("cantor ratio must lie in (0, 1/2), got " + format_rational(ratio));
    if (depth < 0 || depth > 60)
        throw InvalidSpec("cantor depth must lie in [0, 60], got " + std::to_string(depth));
}

std::vector<RatInterval> cantor_intervals(const CantorSpec& spec) {
    spec.validate();
    if (spec.depth > 26)
        throw ResourceLimit("cantor_intervals: 2^" + std::to_string(spec.depth) +
                            " intervals exceed the enumeration budget");
    std::vector<RatInterval> cur{RatInterval{Rational(0), Rational(1)}};
    for (int k = 0; k < spec.depth; ++k) {
        std::vector<RatInterval> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            const Rational len = (iv.hi - iv.lo) * spec.ratio;
            next.push_back(RatInterval{iv.lo, iv.lo + len});
            next.push_back(RatInterval{iv.hi - len, iv.hi});
        }
        cur = std::move(next);
    }
    return cur;
}

CantorMeasure::CantorMeasure(Rational ratio) : xi_(std::move(ratio)) {
    if (!(xi_ > 0 && xi_ < Rational(1, 2)))
        throw InvalidSpec("cantor ratio must lie in (0, 1/2), got " + format_rational(xi_));
}

Rational CantorMeasure::cdf(const Rational& x) const {
    if (x <= 0) return Rational(0);
    if (x >= 1) return Rational(1);

    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = memo_.find(x); it != memo_.end()) return it->second;

    const Rational one(1);
    const Rational gap_lo = xi_;
    const Rational gap_hi = one - xi_;

    std::vector<std::pair<Rational, int>> chain; // (state, bump into next state)
    std::map<Rational, std::size_t> seen;
    Rational r = x;
    Rational val;
    bool approximate = false;

    while (true) {
        if (r <= 0) { val = Rational(0); break; }
        if (r >= 1) { val = Rational(1); break; }
        if (auto it = memo_.find(r); it != memo_.end()) { val = it->second; break; }
        if (r >= gap_lo && r <= gap_hi) { val = Rational(1, 2); break; }

        if (auto it = seen.find(r); it != seen.end()) {
            // Orbit returned to chain position i: F(r_i) = c + d*F(r_i), solve.
            const std::size_t i = it->second;
            Rational c(0), d(1);
            for (std::size_t k = i; k < chain.size(); ++k) {
                d /= 2;
                if (chain[k].second) c += d;
            }
            val = c / (one - d);
            Rational v = val;
            memo_.emplace(chain[i].first, v);
            for (std::size_t k = i; k + 1 < chain.size(); ++k) {
                v = v * 2 - chain[k].second;
                memo_.emplace(chain[k + 1].first, v);
            }
            chain.resize(i);
            break;
        }
        if (int(chain.size()) >= kMaxChain) {
            approximate = true;          // residual weight 2^-kMaxChain, take midpoint
            val = Rational(1, 2);
            break;
        }

        seen.emplace(r, chain.size());
        if (r < gap_lo) {
            chain.emplace_back(r, 0);
            r = r / xi_;
        } else {
            chain.emplace_back(r, 1);
            r = (r - one + xi_) / xi_;
        }
    }

    for (std::size_t k = chain.size(); k-- > 0;) {
        val = chain[k].second ? Rational((val + 1) / 2) : Rational(val / 2);
        if (!approximate) memo_.emplace(chain[k].first, val);
    }
    return val;
}

Rational CantorMeasure::mass_interval(const Rational& a, const Rational& b) const {
    if (a > b) throw InvalidSpec("mass_interval: a > b");
    return cdf(b) - cdf(a);
}

TreeFlowMeasure::TreeFlowMeasure(double frostman_exponent, double frostman_constant,
                                 std::vector<Level> levels)
    : alpha_(frostman_exponent), constant_(frostman_constant), levels_(std::move(levels)) {
    if (levels_.empty()) throw InvalidSpec("flow needs at least the root level");
    if (levels_.size() > 63) throw InvalidSpec("flow depth exceeds 62");
    if (!(alpha_ > 0.0 && alpha_ <= 1.0))
        throw InvalidSpec("frostman exponent must lie in (0, 1]");
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        const std::uint64_t cells = std::uint64_t(1) << n;
        std::uint64_t prev = 0;
        for (const auto& [j, m] : levels_[n]) {
            (void)m;
            if (j < 1 || j > cells)
                throw InvalidSpec("flow cell out of range at level " + std::to_string(n));
            if (j <= prev)
                throw InvalidSpec("flow cells must be strictly increasing within a level");
            prev = j;
        }
    }
}

const TreeFlowMeasure::Level& TreeFlowMeasure::level(int n) const {
    if (n < 0 || n > max_depth())
        throw InvalidSpec("flow level out of range: " + std::to_string(n));
    return levels_[std::size_t(n)];
}

namespace {
const Rational* find_entry(const TreeFlowMeasure::Level& lvl, std::uint64_t j) {
    auto it = std::lower_bound(lvl.begin(), lvl.end(), j,
                               [](const TreeFlowMeasure::Entry& e, std::uint64_t key) {
                                   return e.first < key;
                               });
    if (it == lvl.end() || it->first != j) return nullptr;
    return &it->second;
}
} // namespace

Rational TreeFlowMeasure::mass(int lvl, std::uint64_t j) const {
    const Rational* m = find_entry(level(lvl), j);
    return m ? *m : Rational(0);
}

Rational TreeFlowMeasure::range_mass(int grid_level, std::uint64_t lo_units,
                                     std::uint64_t hi_units) const {
    if (grid_level < 0 || grid_level > max_depth())
        throw InvalidSpec("range_mass: grid level out of range");
    const std::uint64_t span = std::uint64_t(1) << grid_level;
    if (lo_units > hi_units || hi_units > span)
        throw InvalidSpec("range_mass: bad unit range");
    if (lo_units == hi_units) return Rational(0);

    Rational total(0);
    std::vector<std::pair<int, std::uint64_t>> stack{{0, 1}};
    while (!stack.empty()) {
        const auto [lvl, j] = stack.back();
        stack.pop_back();
        const int shift = grid_level - lvl;
        const std::uint64_t cell_lo = (j - 1) << shift;
        const std::uint64_t cell_hi = j << shift;
        if (cell_hi <= lo_units || cell_lo >= hi_units) continue;
        const Rational* m = find_entry(levels_[std::size_t(lvl)], j);
        if (!m || *m == 0) continue;
        if (lo_units <= cell_lo && cell_hi <= hi_units) {
            total += *m;
            continue;
        }
        stack.emplace_back(lvl + 1, 2 * j);
        stack.emplace_back(lvl + 1, 2 * j - 1);
    }
    return total;
}

TreeFlowMeasure cantor_flow(const CantorSpec& spec) {
    spec.validate();
    CantorMeasure cm(spec.ratio);
    std::vector<TreeFlowMeasure::Level> levels(std::size_t(spec.depth) + 1);
    levels[0] = {{1, Rational(1)}};
    for (int n = 1; n <= spec.depth; ++n) {
        const auto& parents = levels[std::size_t(n - 1)];
        auto& out = levels[std::size_t(n)];
        out.reserve(parents.size() * 2);
        const BigInt den = BigInt(1) << n;
        for (const auto& [j, m] : parents) {
            const Rational lo(BigInt(j - 1), BigInt(1) << (n - 1));
            const Rational mid(2 * BigInt(j - 1) + 1, den);
            const Rational left = cm.cdf(mid) - cm.cdf(lo);
            const Rational right = m - left;   // keeps parent = sum of children exact
            if (left != 0) out.emplace_back(2 * j - 1, left);
            if (right != 0) out.emplace_back(2 * j, right);
        }
    }
    return TreeFlowMeasure(spec.beta(), 1.0, std::move(levels));
}

TreeFlowMeasure lebesgue_flow(int depth) {
    if (depth < 0 || depth > 20)
        throw ResourceLimit("lebesgue_flow: depth must lie in [0, 20]");
    std::vector<TreeFlowMeasure::Level> levels(std::size_t(depth) + 1);
    for (int n = 0; n <= depth; ++n) {
        const std::uint64_t cells = std::uint64_t(1) << n;
        const Rational m(1, BigInt(1) << n);
        levels[std::size_t(n)].reserve(cells);
        for (std::uint64_t j = 1; j <= cells; ++j)
            levels[std::size_t(n)].emplace_back(j, m);
    }
    return TreeFlowMeasure(1.0, 1.0, std::move(levels));
}

FlowCheckReport flow_check(const TreeFlowMeasure& flow) {
    FlowCheckReport rep;
    Rational worst(0);
    for (int n = 0; n <= flow.max_depth(); ++n)
        for (const auto& [j, m] : flow.level(n)) {
            (void)j;
            if (m < 0) rep.negative_mass = true;
        }
    for (int n = 0; n < flow.max_depth(); ++n) {
        const auto& parents = flow.level(n);
        const auto& children = flow.level(n + 1);
        std::size_t pi = 0, ci = 0;
        while (pi < parents.size() || ci < children.size()) {
            std::uint64_t key = UINT64_MAX;
            if (pi < parents.size()) key = parents[pi].first;
            if (ci < children.size()) key = std::min(key, (children[ci].first + 1) / 2);
            Rational parent_mass(0);
            if (pi < parents.size() && parents[pi].first == key)
                parent_mass = parents[pi++].second;
            Rational child_sum(0);
            while (ci < children.size() && (children[ci].first + 1) / 2 == key)
                child_sum += children[ci++].second;
            Rational gap = parent_mass - child_sum;
            if (gap < 0) gap = -gap;
            if (gap > worst) {
                worst = gap;
                rep.worst_level = n;
                rep.worst_j = key;
            }
        }
    }
    rep.max_violation = to_double(worst);
    rep.root_mass = to_double(flow.root_mass());
    rep.passed = rep.max_violation <= FlowCheckReport::kTolerance && !rep.negative_mass;
    return rep;
}

FrostmanReport frostman_check(const TreeFlowMeasure& flow, double alpha, double constant,
                              int samples, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidSpec("frostman_check: alpha outside (0, 1]");
    if (constant <= 0.0) throw InvalidSpec("frostman_check: constant must be positive");
    if (samples < 0) throw InvalidSpec("frostman_check: negative sample count");

    FrostmanReport rep;
    rep.alpha = alpha;
    rep.constant = constant;
    rep.samples = samples;

    for (int n = 0; n <= flow.max_depth(); ++n)
        for (const auto& [j, m] : flow.level(n)) {
            if (m == 0) continue;
            const double ratio = to_double(m) * std::exp2(double(n) * alpha);
            if (ratio > rep.worst_dyadic_ratio) {
                rep.worst_dyadic_ratio = ratio;
                rep.worst_dyadic = DyadicIndex{n, j};
            }
        }

    const int D = flow.max_depth();
    const std::uint64_t grid = (std::uint64_t(1) << D) + 1; // endpoints 0..2^D inclusive
    for (int s = 0; s < samples; ++s) {
        std::uint64_t counter = 0;
        auto draw = [&]() {
            // rejection sampling keeps the draw unbiased
            const std::uint64_t limit = (UINT64_MAX / grid) * grid;
            for (;;) {
                const auto words = philox_words(seed, std::uint64_t(s) + 1, counter++);
                for (const std::uint64_t w : {words[0], words[1]})
                    if (w < limit) return w % grid;
            }
        };
        std::uint64_t a = draw();
        std::uint64_t b = draw();
        while (b == a) b = draw();
        if (a > b) std::swap(a, b);
        const Rational mass = flow.range_mass(D, a, b);
        const double len = std::ldexp(double(b - a), -D);
        const double ratio = to_double(mass) / std::pow(len, alpha);
        if (ratio > rep.worst_general_ratio) {
            rep.worst_general_ratio = ratio;
            rep.worst_general_lo = std::ldexp(double(a), -D);
            rep.worst_general_hi = std::ldexp(double(b), -D);
        }
    }

    const double slack = 1.0 + 1e-12;
    rep.passed_dyadic = rep.worst_dyadic_ratio <= constant * slack;
    rep.passed_general = rep.worst_general_ratio <= 3.0 * constant * slack;
    rep.passed = rep.passed_dyadic && rep.passed_general;
    return rep;
}

AtomicMeasure make_atomic(std::vector<std::pair<double, double>> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    AtomicMeasure out;
    out.t.reserve(atoms.size());
    out.w.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size();) {
        const double pos = atoms[i].first;
        double weight = 0.0;
        while (i < atoms.size() && atoms[i].first == pos) weight += atoms[i++].second;
        out.t.push_back(pos);
        out.w.push_back(weight);
    }
    out.total_mass = pairwise_sum(out.w);
    return out;
}

AtomicMeasure n_approximation(const TreeFlowMeasure& flow, int n) {
    if (n < 0 || n > flow.max_depth())
        throw InvalidSpec("n_approximation: level " + std::to_string(n) +
                          " exceeds flow depth " + std::to_string(flow.max_depth()));
    AtomicMeasure out;
    const auto& lvl = flow.level(n);
    out.t.reserve(lvl.size());
    out.w.reserve(lvl.size());
    for (const auto& [j, m] : lvl) {
        if (m == 0) continue;
        out.t.push_back(std::ldexp(double(j), -n));
        out.w.push_back(to_double(m));
    }
    out.total_mass = to_double(flow.root_mass());
    return out;
}

double interval_mass(const AtomicMeasure& measure, double a, double b) {
    if (!(a <= b)) throw InvalidSpec("interval_mass: a > b");
    const auto lo = std::lower_bound(measure.t.begin(), measure.t.end(), a);
    const auto hi = b == 1.0 ? std::upper_bound(measure.t.begin(), measure.t.end(), b)
                             : std::lower_bound(measure.t.begin(), measure.t.end(), b);
    const std::size_t i0 = std::size_t(lo - measure.t.begin());
    const std::size_t i1 = std::size_t(hi - measure.t.begin());
    if (i1 <= i0) return 0.0;
    return pairwise_sum(measure.w.data() + i0, i1 - i0);
}

std::array<DyadicIndex, 3> three_cover(double a, double b) {
    if (!(a >= 0.0 && a < b && b <= 1.0))
        throw InvalidSpec("three_cover: need 0 <= a < b <= 1 with positive length");
    const double len = b - a;
    int lvl = 0;
    while (std::ldexp(1.0, -lvl) > len) {
        if (++lvl > 60) throw InvalidSpec("three_cover: interval too short");
    }
    const std::uint64_t cells = std::uint64_t(1) << lvl;
    std::uint64_t j1 = std::uint64_t(std::floor(a * double(cells))) + 1;
    if (j1 > cells) j1 = cells;
    std::array<DyadicIndex, 3> out;
    for (int i = 0; i < 3; ++i)
        out[std::size_t(i)] = DyadicIndex{lvl, std::min(j1 + std::uint64_t(i), cells)};
    return out;
}

} // namespace salem
