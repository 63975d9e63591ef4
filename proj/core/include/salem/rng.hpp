#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace salem {

// Counter-based generator (Philox4x32-10). A block is a pure function of
// (seed, stream, counter), so parallel consumers can draw independent bits
// in any order and still reproduce the same values.
std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t counter);

/// 128 random bits of (seed, stream, counter) packed into two words.
std::array<std::uint64_t, 2> philox_words(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t counter);

/// Uniform double in [0,1) from block `counter` (uses 53 bits of the first word).
double philox_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Sequential bit source over one (seed, stream) pair.
class BitSource {
  public:
    BitSource(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    bool next_bit();

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int used_ = 128;  // bits consumed from buf_
};

/// Bit string packed LSB-first into 64-bit words.
struct PackedBits {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> words;

    static PackedBits zeros(std::uint64_t n) {
        PackedBits b;
        b.n = n;
        b.words.assign((n + 63) / 64, 0);
        return b;
    }

    bool get(std::uint64_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }
    void set(std::uint64_t i, bool v) {
        std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (v)
            words[i >> 6] |= mask;
        else
            words[i >> 6] &= ~mask;
    }

    bool operator==(const PackedBits&) const = default;
};

/// N fair coin bits from the counter-based generator; `stream` splits
/// independent words (e.g. Monte Carlo trial index) deterministically.
PackedBits sample_bits(std::uint64_t n, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace salem
