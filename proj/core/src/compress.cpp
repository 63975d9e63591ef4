#include "salem/compress.hpp"

#include "salem/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace salem {

namespace {
std::uint64_t elias_gamma_bits(std::uint64_t v) {
    // v >= 1 encoded in 2*floor(log2 v) + 1 bits
    return 2 * std::uint64_t(std::bit_width(v) - 1) + 1;
}

std::uint64_t ceil_log2(std::uint64_t v) {
    return v <= 1 ? 0 : std::uint64_t(std::bit_width(v - 1));
}
} // namespace

std::uint64_t rle_cost_bits(const PackedBits& word) {
    if (word.n == 0) throw InvalidSpec("rle_cost_bits: empty word");
    std::uint64_t cost = 1; // value of the first run
    std::uint64_t run = 1;
    bool cur = word.get(0);
    for (std::uint64_t i = 1; i < word.n; ++i) {
        const bool b = word.get(i);
        if (b == cur) {
            ++run;
        } else {
            cost += elias_gamma_bits(run);
            cur = b;
            run = 1;
        }
    }
    cost += elias_gamma_bits(run);
    return cost;
}

std::uint64_t lz78_cost_bits(const PackedBits& word) {
    if (word.n == 0) throw InvalidSpec("lz78_cost_bits: empty word");
    // phrase trie: key = node * 2 + bit, value = node id; id 0 is the empty phrase
    std::unordered_map<std::uint64_t, std::uint32_t> trie;
    trie.reserve(word.n / 8 + 16);
    std::uint64_t cost = 0;
    std::uint32_t next_id = 1;
    std::uint32_t node = 0;
    for (std::uint64_t i = 0; i < word.n; ++i) {
        const std::uint64_t key = std::uint64_t(node) * 2 + (word.get(i) ? 1 : 0);
        auto it = trie.find(key);
        if (it != trie.end()) {
            node = it->second;
            continue;
        }
        // emit (node index, literal bit); indices so far span [0, next_id)
        cost += ceil_log2(next_id) + 1;
        trie.emplace(key, next_id++);
        node = 0;
    }
    if (node != 0) cost += ceil_log2(next_id); // dangling prefix: index only
    return cost;
}

DeficiencyReport deficiency_proxy(const PackedBits& word) {
    if (word.n == 0) throw InvalidSpec("deficiency_proxy: empty word");
    DeficiencyReport rep;
    rep.n_bits = word.n;

    const std::uint64_t raw = word.n;
    const std::uint64_t rle = rle_cost_bits(word);
    const std::uint64_t lz = lz78_cost_bits(word);

    rep.compressed_bits = 2 + std::min({raw, rle, lz}); // 2 bits select the branch
    if (raw <= rle && raw <= lz)
        rep.best_method = "raw";
    else if (rle <= lz)
        rep.best_method = "rle";
    else
        rep.best_method = "lz78";

    rep.deficiency = std::int64_t(rep.n_bits) - std::int64_t(rep.compressed_bits);
    rep.slack = 64 + 2 * ceil_log2(rep.n_bits);
    rep.incompressible_like =
        rep.compressed_bits >= rep.n_bits - std::min(rep.n_bits, rep.slack);
    return rep;
}

} // namespace salem
