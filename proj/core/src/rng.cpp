#include "salem/rng.hpp"

namespace salem {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::uint32_t k0,
                         std::uint32_t k1) {
    std::uint64_t p0 = std::uint64_t(kPhiloxM0) * x[0];
    std::uint64_t p1 = std::uint64_t(kPhiloxM1) * x[2];
    std::array<std::uint32_t, 4> y;
    y[0] = std::uint32_t(p1 >> 32) ^ x[1] ^ k0;
    y[1] = std::uint32_t(p1);
    y[2] = std::uint32_t(p0 >> 32) ^ x[3] ^ k1;
    y[3] = std::uint32_t(p0);
    x = y;
}

}  // namespace

std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t counter) {
    std::array<std::uint32_t, 4> x = {
        std::uint32_t(counter), std::uint32_t(counter >> 32),
        std::uint32_t(stream), std::uint32_t(stream >> 32)};
    std::uint32_t k0 = std::uint32_t(seed);
    std::uint32_t k1 = std::uint32_t(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(x, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

std::array<std::uint64_t, 2> philox_words(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t counter) {
    auto b = philox_block(seed, stream, counter);
    return {std::uint64_t(b[0]) | (std::uint64_t(b[1]) << 32),
            std::uint64_t(b[2]) | (std::uint64_t(b[3]) << 32)};
}

double philox_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    auto w = philox_words(seed, stream, counter);
    return double(w[0] >> 11) * 0x1.0p-53;
}

bool BitSource::next_bit() {
    if (used_ >= 128) {
        buf_ = philox_words(seed_, stream_, counter_++);
        used_ = 0;
    }
    bool bit = (buf_[used_ >> 6] >> (used_ & 63)) & 1u;
    ++used_;
    return bit;
}

PackedBits sample_bits(std::uint64_t n, std::uint64_t seed, std::uint64_t stream) {
    PackedBits out = PackedBits::zeros(n);
    std::uint64_t nwords = out.words.size();
    for (std::uint64_t i = 0; i + 1 < nwords; i += 2) {
        auto w = philox_words(seed, stream, i / 2);
        out.words[i] = w[0];
        out.words[i + 1] = w[1];
    }
    if (nwords % 2 == 1) out.words[nwords - 1] = philox_words(seed, stream, nwords / 2)[0];
    // Mask tail bits beyond n so packed equality matches bit-string equality.
    if (n % 64 != 0) out.words[nwords - 1] &= (std::uint64_t(1) << (n % 64)) - 1;
    return out;
}

}  // namespace salem
