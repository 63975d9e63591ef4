#pragma once

#include "salem/errors.hpp"
#include "salem/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace salem {

// Dyadic interval I_{j,n} = [(j-1)/2^n, j/2^n), 1-based j, closed on the right when j = 2^n.
struct DyadicIndex {
    int level = 0;
    std::uint64_t j = 1;

    Rational lo() const { return Rational(BigInt(j) - 1, BigInt(1) << level); }
    Rational hi() const { return Rational(BigInt(j), BigInt(1) << level); }
    double lo_d() const { return std::ldexp(double(j - 1), -level); }
    double hi_d() const { return std::ldexp(double(j), -level); }
    bool closed_right() const { return j == (std::uint64_t(1) << level); }
    bool contains(double t) const {
        if (t < lo_d()) return false;
        return t < hi_d() || (closed_right() && t == hi_d());
    }
    bool operator==(const DyadicIndex& o) const { return level == o.level && j == o.j; }
};

void validate_dyadic(const DyadicIndex& idx); // throws InvalidSpec

// Cantor construction: keep the first and last xi-fraction of every interval, n times.
struct CantorSpec {
    Rational ratio;      // xi in (0, 1/2)
    int depth = 0;       // construction stage n

    double beta() const; // log 2 / log(1/xi), similarity dimension of C_xi
    double gamma() const { return std::min(1.0, 2.0 * beta()); }
    void validate() const;
};

// The 2^depth closed stage intervals, sorted, exact endpoints.
std::vector<RatInterval> cantor_intervals(const CantorSpec& spec);

// Exact distribution function of the natural measure on C_xi (mass split equally
// left/right at every stage).  cdf(x) = nu([0, x)); nu has no atoms, so this also
// gives closed-interval masses.  Self-similarity gives a three-branch descent:
//   r < xi           : F(r) = F(r/xi)/2
//   xi <= r <= 1-xi  : F(r) = 1/2
//   r > 1-xi         : F(r) = 1/2 + F((r-1+xi)/xi)/2
// Eventually-periodic orbits are resolved exactly by solving the induced affine
// fixed-point equation; non-terminating orbits are cut after kMaxChain steps,
// which pins the value to within 2^-kMaxChain (far below every tolerance used).
// Queries whose orbit reaches {0, 1} or the middle gap are exact; survivor
// endpoints always do.
class CantorMeasure {
  public:
    explicit CantorMeasure(Rational ratio);

    Rational cdf(const Rational& x) const;
    // nu([a,b)) = cdf(b) - cdf(a); equals nu([a,b]) since nu is atomless.
    Rational mass_interval(const Rational& a, const Rational& b) const;

    static constexpr int kMaxChain = 340;

  private:
    Rational xi_;
    mutable std::map<Rational, Rational> memo_;
    mutable std::mutex mutex_;
};

// Mass assignment on the dyadic tree with parent = sum of children ("flow" condition).
// Sparse: only cells of nonzero mass are stored, sorted by j within each level.
class TreeFlowMeasure {
  public:
    using Entry = std::pair<std::uint64_t, Rational>;
    using Level = std::vector<Entry>;

    TreeFlowMeasure(double frostman_exponent, double frostman_constant,
                    std::vector<Level> levels);

    int max_depth() const { return int(levels_.size()) - 1; }
    double frostman_exponent() const { return alpha_; }
    double frostman_constant() const { return constant_; }
    const Level& level(int n) const;
    const std::vector<Level>& levels() const { return levels_; }

    Rational mass(int level, std::uint64_t j) const; // 0 when absent
    Rational mass(const DyadicIndex& idx) const { return mass(idx.level, idx.j); }
    Rational root_mass() const { return mass(0, 1); }

    // Exact mass of [lo_units, hi_units) / 2^grid_level for grid_level <= max_depth.
    // Descends the tree; assumes absent cells carry no descendants (true for every
    // flow built by subdivision and for any flow passing flow_check).
    Rational range_mass(int grid_level, std::uint64_t lo_units, std::uint64_t hi_units) const;

  private:
    double alpha_;
    double constant_;
    std::vector<Level> levels_;
};

// Natural measure of C_xi as a dyadic flow down to level spec.depth, exponent beta.
TreeFlowMeasure cantor_flow(const CantorSpec& spec);

// Uniform measure: every level-n cell gets 2^-n.
TreeFlowMeasure lebesgue_flow(int depth);

struct FlowCheckReport {
    double max_violation = 0.0;   // max |parent - sum(children)|
    int worst_level = 0;          // parent level of the worst gap
    std::uint64_t worst_j = 1;
    double root_mass = 0.0;
    bool negative_mass = false;
    bool passed = false;
    static constexpr double kTolerance = 1e-12;
};

FlowCheckReport flow_check(const TreeFlowMeasure& flow);

struct FrostmanReport {
    double alpha = 0.0;
    double constant = 0.0;
    double worst_dyadic_ratio = 0.0;     // max mass(I)/|I|^alpha over stored cells
    DyadicIndex worst_dyadic{};
    double worst_general_ratio = 0.0;    // same over seeded grid-aligned intervals
    double worst_general_lo = 0.0;
    double worst_general_hi = 0.0;
    int samples = 0;
    bool passed_dyadic = false;          // <= C
    bool passed_general = false;         // <= 3C (three patching dyadic cells)
    bool passed = false;
};

// Dyadic cells are checked exhaustively against C; general intervals are sampled
// with endpoints on the finest grid so their mass decomposes exactly.
FrostmanReport frostman_check(const TreeFlowMeasure& flow, double alpha, double constant,
                              int samples, std::uint64_t seed);

// Finite atomic measure on the line: positions t (sorted, unique) with weights w.
struct AtomicMeasure {
    std::vector<double> t;
    std::vector<double> w;
    double total_mass = 0.0;

    std::size_t size() const { return t.size(); }
};

// Merge coincident positions, sort, fill total_mass (pairwise sum).
AtomicMeasure make_atomic(std::vector<std::pair<double, double>> atoms);

// Level-n atoms of a flow: weight of cell (j, n) placed at the right endpoint j/2^n.
AtomicMeasure n_approximation(const TreeFlowMeasure& flow, int n);

// Mass of [a, b); b = 1 also collects atoms sitting exactly at 1.
double interval_mass(const AtomicMeasure& measure, double a, double b);

// Three consecutive dyadic intervals of length l with |I|/2 < l <= |I| covering I,
// starting at the cell containing a.  Runs past 1 are clamped by repeating [.,1].
std::array<DyadicIndex, 3> three_cover(double a, double b);

} // namespace salem
