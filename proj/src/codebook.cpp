#include "drm/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace drm {

BitWord BitWord::parse(std::string_view text) {
    BitWord w;
    for (char ch : text) {
        if (ch == '|' || ch == ' ') continue;
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("BitWord: unexpected character '" + std::string(1, ch) + "'");
        }
        if (w.length == 32) throw std::invalid_argument("BitWord: more than 32 bits");
        w.value = (w.value << 1) | static_cast<std::uint32_t>(ch - '0');
        ++w.length;
    }
    return w;
}

std::string BitWord::to_string() const {
    std::string s(length, '0');
    for (unsigned i = 0; i < length; ++i) s[i] = bit(i) ? '1' : '0';
    return s;
}

unsigned bit_errors(const BitWord& a, const BitWord& b) {
    if (a.length != b.length) throw std::invalid_argument("bit_errors: length mismatch");
    return static_cast<unsigned>(std::popcount(a.value ^ b.value));
}

std::uint64_t factorial(unsigned n) {
    if (n > 20) throw std::invalid_argument("factorial: n > 20 overflows 64 bits");
    std::uint64_t f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

unsigned permutation_bits(unsigned K) {
    return static_cast<unsigned>(std::bit_width(factorial(K))) - 1;
}

PermutationMatrix::PermutationMatrix(std::vector<std::uint8_t> mapping) : mapping_(std::move(mapping)) {
    if (mapping_.empty()) throw std::invalid_argument("PermutationMatrix: empty mapping");
    std::vector<bool> seen(mapping_.size(), false);
    for (auto m : mapping_) {
        if (m >= mapping_.size() || seen[m]) {
            throw std::invalid_argument("PermutationMatrix: mapping is not a bijection");
        }
        seen[m] = true;
    }
}

PermutationMatrix PermutationMatrix::identity(std::size_t order) {
    std::vector<std::uint8_t> m(order);
    for (std::size_t i = 0; i < order; ++i) m[i] = static_cast<std::uint8_t>(i);
    return PermutationMatrix(std::move(m));
}

ComplexMatrix PermutationMatrix::to_matrix() const {
    ComplexMatrix m(order(), order());
    for (std::size_t i = 0; i < order(); ++i) m(i, mapping_[i]) = 1.0;
    return m;
}

PermutationMatrix lehmer_decode(std::uint64_t index, std::size_t K) {
    if (K == 0 || K > 20) throw std::invalid_argument("lehmer_decode: K must be in [1, 20]");
    if (index >= factorial(static_cast<unsigned>(K))) {
        throw std::invalid_argument("lehmer_decode: index " + std::to_string(index) +
                                    " >= K! for K = " + std::to_string(K));
    }
    std::vector<std::uint8_t> pool(K);
    for (std::size_t i = 0; i < K; ++i) pool[i] = static_cast<std::uint8_t>(i);
    std::vector<std::uint8_t> out;
    out.reserve(K);
    for (std::size_t i = 0; i < K; ++i) {
        const std::uint64_t place = factorial(static_cast<unsigned>(K - 1 - i));
        const auto digit = static_cast<std::size_t>(index / place);
        index %= place;
        out.push_back(pool[digit]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return PermutationMatrix(std::move(out));
}

std::uint64_t lehmer_encode(const PermutationMatrix& p) {
    const auto& m = p.mapping();
    const std::size_t K = m.size();
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < K; ++i) {
        std::uint64_t smaller_later = 0;
        for (std::size_t j = i + 1; j < K; ++j) smaller_later += m[j] < m[i];
        index += smaller_later * factorial(static_cast<unsigned>(K - 1 - i));
    }
    return index;
}

PskConstellation::PskConstellation(unsigned M, double phase_offset)
    : order_(M), bits_(0), phase_offset_(phase_offset), points_(M) {
    if (M < 2 || !std::has_single_bit(M)) {
        throw std::invalid_argument("PskConstellation: M must be a power of two >= 2");
    }
    bits_ = static_cast<unsigned>(std::countr_zero(M));
    for (unsigned m = 0; m < M; ++m) {
        const unsigned label = m ^ (m >> 1);
        const double angle = 2.0 * std::numbers::pi * m / M + phase_offset;
        // Exact values on the axes keep products of symbols on the grid.
        Complex s = std::polar(1.0, angle);
        if (phase_offset == 0.0) {
            if (m == 0) s = {1.0, 0.0};
            else if (4 * m == M) s = {0.0, 1.0};
            else if (2 * m == M) s = {-1.0, 0.0};
            else if (4 * m == 3 * M) s = {0.0, -1.0};
        }
        points_[label] = s;
    }
}

Complex PskConstellation::symbol_for_label(std::uint32_t label) const {
    if (label >= order_) throw std::invalid_argument("PskConstellation: label out of range");
    return points_[label];
}

std::optional<std::uint32_t> PskConstellation::label_of(Complex s, double tol) const {
    for (std::uint32_t l = 0; l < order_; ++l) {
        if (std::abs(points_[l] - s) <= tol) return l;
    }
    return std::nullopt;
}

Complex psk_modulate(const BitWord& bits, const PskConstellation& c) {
    if (bits.length != c.bits_per_symbol()) {
        throw std::invalid_argument("psk_modulate: expected " + std::to_string(c.bits_per_symbol()) +
                                    " bits, got " + std::to_string(bits.length));
    }
    return c.symbol_for_label(bits.value);
}

std::string_view to_string(PermutationPreset p) {
    return p == PermutationPreset::table1 ? "table1" : "lexicographic";
}

PermutationPreset parse_permutation_preset(std::string_view text) {
    if (text == "lexicographic") return PermutationPreset::lexicographic;
    if (text == "table1") return PermutationPreset::table1;
    throw std::invalid_argument("unknown permutation preset '" + std::string(text) + "'");
}

std::optional<std::size_t> PermutationSubset::index_of(const PermutationMatrix& p) const {
    auto it = std::find(selected.begin(), selected.end(), p);
    if (it == selected.end()) return std::nullopt;
    return static_cast<std::size_t>(it - selected.begin());
}

PermutationSubset build_permutation_subset(unsigned K, PermutationPreset preset) {
    if (K == 0 || K > 12) throw std::invalid_argument("build_permutation_subset: K must be in [1, 12]");
    PermutationSubset s;
    s.K = K;
    s.r1 = permutation_bits(K);
    s.preset = preset;
    if (preset == PermutationPreset::table1) {
        if (K != 3) throw std::invalid_argument("build_permutation_subset: table1 preset requires K = 3");
        // Lexicographic indices 0, 1, 2, 4.
        s.selected = {PermutationMatrix({0, 1, 2}), PermutationMatrix({0, 2, 1}),
                      PermutationMatrix({1, 0, 2}), PermutationMatrix({2, 0, 1})};
        return s;
    }
    const std::uint64_t count = std::uint64_t{1} << s.r1;
    s.selected.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) s.selected.push_back(lehmer_decode(i, K));
    return s;
}

unsigned bits_per_block(const PermutationSubset& subset, const PskConstellation& c) {
    return subset.r1 + subset.K * c.bits_per_symbol();
}

BlockMatrices bits_to_block(const BitWord& bits, const PermutationSubset& subset,
                            const PskConstellation& c) {
    const unsigned r = bits_per_block(subset, c);
    if (bits.length != r) {
        throw std::invalid_argument("bits_to_block: expected " + std::to_string(r) + " bits, got " +
                                    std::to_string(bits.length));
    }
    const unsigned q = c.bits_per_symbol();
    const std::uint32_t mask = (std::uint32_t{1} << q) - 1;
    const std::uint32_t perm_word = subset.r1 ? bits.value >> (r - subset.r1) : 0;
    const PermutationMatrix& Z = subset.selected.at(perm_word);

    std::vector<Complex> symbols(subset.K);
    for (unsigned k = 0; k < subset.K; ++k) {
        const unsigned shift = r - subset.r1 - (k + 1) * q;
        symbols[k] = c.symbol_for_label((bits.value >> shift) & mask);
    }
    ComplexMatrix X(subset.K, subset.K);
    for (unsigned i = 0; i < subset.K; ++i) {
        const auto col = Z.mapping()[i];
        X(i, col) = symbols[col];
    }
    return BlockMatrices{Z, std::move(symbols), std::move(X)};
}

BitWord block_to_bits(const BlockMatrices& block, const PermutationSubset& subset,
                      const PskConstellation& c) {
    const auto perm_index = subset.index_of(block.Z);
    if (!perm_index) {
        throw std::invalid_argument("block_to_bits: permutation is not in the selected subset");
    }
    if (block.symbols.size() != subset.K) {
        throw std::invalid_argument("block_to_bits: symbol count does not match K");
    }
    BitWord w{static_cast<std::uint32_t>(*perm_index), subset.r1};
    for (const Complex s : block.symbols) {
        const auto label = c.label_of(s);
        if (!label) throw std::invalid_argument("block_to_bits: symbol is not a constellation point");
        w.value = (w.value << c.bits_per_symbol()) | *label;
        w.length += c.bits_per_symbol();
    }
    return w;
}

std::vector<BlockMatrices> enumerate_codewords(const PermutationSubset& subset,
                                               const PskConstellation& c) {
    const unsigned r = bits_per_block(subset, c);
    if (r > 24) throw std::invalid_argument("enumerate_codewords: 2^r exceeds 2^24 candidates");
    std::vector<BlockMatrices> out;
    out.reserve(std::size_t{1} << r);
    for (std::uint32_t w = 0; w < (std::uint32_t{1} << r); ++w) {
        out.push_back(bits_to_block(BitWord{w, r}, subset, c));
    }
    return out;
}

}  // namespace drm
