#pragma once

#include "salem/errors.hpp"
#include "salem/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace salem {

// Piecewise-linear walk on [0,1]: N steps of slope +-sqrt(N), bit 1 = up.
// Values are kept as integer partial sums P(j) = 2*ones(j) - j; the single
// division by sqrt(N) happens at evaluation, so grid values carry no
// accumulated rounding.
class WalkPath {
  public:
    WalkPath() = default;
    explicit WalkPath(PackedBits word);

    std::uint64_t length() const { return word_.n; }            // N
    int level() const { return level_; }                        // n when N = 2^n, else N
    const PackedBits& word() const { return word_; }
    bool bit(std::uint64_t i) const { return word_.get(i); }

    std::int64_t partial_sum(std::uint64_t j) const;             // P(j), 0 <= j <= N
    double grid_value(std::uint64_t j) const;                    // P(j)/sqrt(N)

    static constexpr std::uint64_t kDenseLimit = std::uint64_t(1) << 22;
    static constexpr int kCheckpointShift = 12;                  // stride 4096 bits

  private:
    PackedBits word_;
    int level_ = 0;
    double sqrt_n_ = 0.0;
    std::vector<std::int64_t> checkpoints_;    // ones-count at stride boundaries
    std::vector<std::int32_t> dense_;          // P(0..N) when N <= kDenseLimit
};

WalkPath decode_code(const std::string& word);   // chars '0'/'1'
WalkPath decode_code(PackedBits word);
std::string encode_path(const WalkPath& path);

// Linear interpolation of the walk at t in [0,1].
double walk_value(const WalkPath& path, double t);

// N fair bits; `stream` splits independent trials.
PackedBits sample_word(std::uint64_t n_bits, std::uint64_t seed, std::uint64_t stream = 0);

// Coupled walks x_{n_min}, ..., x_{n_max}: level n+1 halves every step of level n.
struct RefinementLadder {
    std::uint64_t seed = 0;
    int n_min = 0;
    int n_max = 0;
    std::string rule;                 // coupling rule identifier
    std::vector<WalkPath> levels;     // levels[k] has 2^(n_min+k) steps
    std::vector<double> distances;    // sup |x_{n+1} - x_n| per consecutive pair

    const WalkPath& finest() const { return levels.back(); }
    const WalkPath& at_level(int n) const;
};

// Each parent step splits into two child steps; the child pair either repeats the
// parent sign or flattens (one up, one down, random order), whichever options keep
// the exact discrepancy |S_child - S_parent| <= 1/sqrt(2^n) at all shared grid
// points (the "corridor").  At least one option is always available; when both
// are, a seeded bit decides.  Everything is deterministic in (seed, n_min, n_max).
RefinementLadder build_ladder(std::uint64_t seed, int n_min, int n_max);

// max over h in h_grid of  sup_t |S(t+h) - S(t)| / sqrt(2*C*h*log(1/h)),
// the sup taken over the walk's own grid.
double modulus_ratio(const WalkPath& path, double continuity_c,
                     const std::vector<double>& h_grid);

} // namespace salem
