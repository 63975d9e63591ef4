#pragma once

#include "salem/rng.hpp"

#include <cstdint>
#include <string>

namespace salem {

// Computable stand-in for incompressibility: a word passes when the in-repo
// compressor cannot shave more than slack(N) = 64 + 2*ceil(log2 N) bits off it.
struct DeficiencyReport {
    std::uint64_t n_bits = 0;          // N
    std::uint64_t compressed_bits = 0; // L_c, includes a 2-bit method tag
    std::int64_t deficiency = 0;       // N - L_c
    std::uint64_t slack = 0;
    std::string best_method;           // raw | rle | lz78
    bool incompressible_like = false;  // L_c >= N - slack
};

// Cost of the run-length branch: first-bit marker plus Elias-gamma run lengths.
std::uint64_t rle_cost_bits(const PackedBits& word);

// Cost of the dictionary branch: standard incremental phrase parse, each phrase
// emitted as (previous-phrase index, one literal bit).
std::uint64_t lz78_cost_bits(const PackedBits& word);

DeficiencyReport deficiency_proxy(const PackedBits& word);

} // namespace salem
