#include "salem/walks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace salem {

namespace {
bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }
} // namespace

WalkPath::WalkPath(PackedBits word) : word_(std::move(word)) {
    const std::uint64_t n = word_.n;
    if (n == 0) throw InvalidSpec("walk code must be nonempty");
    if (n > (std::uint64_t(1) << 30)) throw ResourceLimit("walk code longer than 2^30 bits");
    if (is_pow2(n)) {
        level_ = 0;
        while ((std::uint64_t(1) << level_) != n) ++level_;
    } else {
        level_ = int(n); // non-dyadic lengths keep the raw length as their level tag
    }
    sqrt_n_ = std::sqrt(double(n));

    if (n <= kDenseLimit) {
        dense_.resize(n + 1);
        dense_[0] = 0;
        std::int32_t p = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            p += word_.get(i) ? 1 : -1;
            dense_[i + 1] = p;
        }
    } else {
        const std::uint64_t stride_words = std::uint64_t(1) << (kCheckpointShift - 6);
        const std::uint64_t blocks = n >> kCheckpointShift;
        checkpoints_.resize(blocks + 1);
        checkpoints_[0] = 0;
        std::int64_t ones = 0;
        for (std::uint64_t b = 0; b < blocks; ++b) {
            for (std::uint64_t w = 0; w < stride_words; ++w)
                ones += std::popcount(word_.words[b * stride_words + w]);
            checkpoints_[b + 1] = ones;
        }
    }
}

std::int64_t WalkPath::partial_sum(std::uint64_t j) const {
    if (j > length()) throw InvalidSpec("partial_sum: index beyond the walk");
    if (!dense_.empty()) return dense_[j];
    std::int64_t ones = checkpoints_[j >> kCheckpointShift];
    std::uint64_t base = (j >> kCheckpointShift) << kCheckpointShift;
    std::uint64_t wi = base >> 6;
    while (base + 64 <= j) {
        ones += std::popcount(word_.words[wi++]);
        base += 64;
    }
    if (j > base) ones += std::popcount(word_.words[wi] & ((std::uint64_t(1) << (j - base)) - 1));
    return 2 * ones - std::int64_t(j);
}

double WalkPath::grid_value(std::uint64_t j) const {
    return double(partial_sum(j)) / sqrt_n_;
}

WalkPath decode_code(const std::string& word) {
    if (word.empty()) throw InvalidSpec("empty walk code");
    PackedBits bits = PackedBits::zeros(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] == '1')
            bits.set(i, true);
        else if (word[i] != '0')
            throw InvalidSpec("walk code must consist of 0s and 1s");
    }
    return WalkPath(std::move(bits));
}

WalkPath decode_code(PackedBits word) {
    if (word.n == 0) throw InvalidSpec("empty walk code");
    return WalkPath(std::move(word));
}

std::string encode_path(const WalkPath& path) {
    std::string out(path.length(), '0');
    for (std::uint64_t i = 0; i < path.length(); ++i)
        if (path.bit(i)) out[i] = '1';
    return out;
}

double walk_value(const WalkPath& path, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("walk_value: t outside [0,1]");
    const std::uint64_t n = path.length();
    const double x = t * double(n);
    std::uint64_t j = std::uint64_t(x);
    if (j >= n) return path.grid_value(n);
    const double frac = x - double(j);
    const std::int64_t p = path.partial_sum(j);
    if (frac == 0.0) return path.grid_value(j);
    const double step = path.bit(j) ? 1.0 : -1.0;
    return (double(p) + frac * step) / std::sqrt(double(n));
}

PackedBits sample_word(std::uint64_t n_bits, std::uint64_t seed, std::uint64_t stream) {
    if (n_bits == 0) throw InvalidSpec("sample_word: need at least one bit");
    return sample_bits(n_bits, seed, stream);
}

const WalkPath& RefinementLadder::at_level(int n) const {
    if (n < n_min || n > n_max) throw InvalidSpec("ladder level out of range");
    return levels[std::size_t(n - n_min)];
}

namespace {

// Exact test (a + b*sqrt2)^2 <= 2, i.e. 2ab*sqrt2 <= 2 - a^2 - 2b^2 over Z[sqrt2].
bool corridor_ok(std::int64_t a, std::int64_t b) {
    const __int128 k = __int128(2) * a * b;
    const __int128 m = 2 - __int128(a) * a - 2 * __int128(b) * b;
    if (k <= 0 && m >= 0) return true;
    if (k > 0 && m < 0) return false;
    if (k > 0) return 2 * k * k <= m * m;
    return 2 * k * k >= m * m;
}

} // namespace

RefinementLadder build_ladder(std::uint64_t seed, int n_min, int n_max) {
    if (n_min < 1 || n_min >= n_max) throw InvalidSpec("build_ladder: need 1 <= n_min < n_max");
    if (n_max > 28) throw ResourceLimit("build_ladder: levels beyond 2^28 steps");

    RefinementLadder lad;
    lad.seed = seed;
    lad.n_min = n_min;
    lad.n_max = n_max;
    lad.rule = "corridor-bridge-v1";
    lad.levels.reserve(std::size_t(n_max - n_min) + 1);
    lad.levels.push_back(decode_code(sample_word(std::uint64_t(1) << n_min, seed,
                                                 std::uint64_t(n_min))));

    for (int n = n_min; n < n_max; ++n) {
        const WalkPath& parent = lad.levels.back();
        const std::uint64_t np = parent.length();
        PackedBits child = PackedBits::zeros(2 * np);
        BitSource rnd(seed, std::uint64_t(n) + 1);

        // discrepancy at shared grid points: D = A + B*sqrt2 with A = P_child(2j),
        // B = -P_parent(j); the corridor |D| <= sqrt2 is |S_child - S_parent| <= 1/sqrt(np)
        std::int64_t A = 0, B = 0;
        std::int64_t pc = 0, pp = 0;
        const double sc = std::sqrt(double(2 * np));
        const double sp = std::sqrt(double(np));
        double worst = 0.0;

        for (std::uint64_t j = 0; j < np; ++j) {
            const int s = parent.bit(j) ? 1 : -1;
            const bool ok_follow = corridor_ok(A + 2 * s, B - s);
            const bool ok_flat = corridor_ok(A, B - s);
            int sigma;
            if (ok_follow && ok_flat)
                sigma = rnd.next_bit() ? 2 * s : 0;
            else if (ok_follow)
                sigma = 2 * s;
            else if (ok_flat)
                sigma = 0;
            else
                throw std::logic_error("corridor admits no child step"); // provably unreachable

            bool b1, b2;
            if (sigma == 0) {
                b1 = rnd.next_bit();
                b2 = !b1;
            } else {
                b1 = b2 = sigma > 0;
            }
            child.set(2 * j, b1);
            child.set(2 * j + 1, b2);

            const std::int64_t pp_next = pp + s;
            pc += b1 ? 1 : -1;
            const double mid = std::abs(double(pc) / sc -
                                        0.5 * (double(pp) + double(pp_next)) / sp);
            pc += b2 ? 1 : -1;
            const double even = std::abs(double(pc) / sc - double(pp_next) / sp);
            worst = std::max(worst, std::max(mid, even));

            A += sigma;
            B -= s;
            pp = pp_next;
        }
        lad.distances.push_back(worst);
        lad.levels.push_back(decode_code(std::move(child)));
    }
    return lad;
}

double modulus_ratio(const WalkPath& path, double continuity_c,
                     const std::vector<double>& h_grid) {
    if (!(continuity_c > 1.0)) throw InvalidSpec("modulus_ratio: need C > 1");
    const std::uint64_t n = path.length();
    double best = 0.0;
    for (const double h : h_grid) {
        if (!(h > 0.0 && h <= 0.5)) throw InvalidSpec("modulus_ratio: h outside (0, 1/2]");
        const double denom = std::sqrt(2.0 * continuity_c * h * std::log(1.0 / h));
        double sup = 0.0;
        for (std::uint64_t i = 0; i <= n; ++i) {
            const double t = double(i) / double(n);
            if (t + h > 1.0) break;
            sup = std::max(sup, std::abs(walk_value(path, t + h) - walk_value(path, t)));
        }
        best = std::max(best, sup / denom);
    }
    return best;
}

} // namespace salem
