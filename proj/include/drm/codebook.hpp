#pragma once

// Bit-to-codeword mapping: permutation matrices indexed by Lehmer code,
// Gray-labelled M-PSK, and the per-block information matrix X = Z * S.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drm/linalg.hpp"

namespace drm {

// A fixed-length bit string, most significant bit first. Bit 0 is the first
// transmitted bit.
struct BitWord {
    std::uint32_t value = 0;
    unsigned length = 0;

    // Accepts '0'/'1' characters; '|' and spaces are ignored as separators.
    static BitWord parse(std::string_view text);

    bool bit(unsigned i) const { return (value >> (length - 1 - i)) & 1u; }
    std::string to_string() const;

    bool operator==(const BitWord&) const = default;
};

// Hamming distance between equal-length words.
unsigned bit_errors(const BitWord& a, const BitWord& b);

std::uint64_t factorial(unsigned n);

// floor(log2(K!)), the number of bits carried by the permutation field.
unsigned permutation_bits(unsigned K);

class PermutationMatrix {
public:
    // Row i holds its single 1 in column mapping[i].
    explicit PermutationMatrix(std::vector<std::uint8_t> mapping);

    static PermutationMatrix identity(std::size_t order);

    std::size_t order() const noexcept { return mapping_.size(); }
    const std::vector<std::uint8_t>& mapping() const noexcept { return mapping_; }
    ComplexMatrix to_matrix() const;

    bool operator==(const PermutationMatrix&) const = default;

private:
    std::vector<std::uint8_t> mapping_;
};

// index-th permutation of (0, ..., K-1) in lexicographic order.
PermutationMatrix lehmer_decode(std::uint64_t index, std::size_t K);
std::uint64_t lehmer_encode(const PermutationMatrix& p);

class PskConstellation {
public:
    // Points exp(j(2 pi m / M + phase_offset)); point m carries Gray label m ^ (m >> 1).
    explicit PskConstellation(unsigned M, double phase_offset = 0.0);

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_; }
    double phase_offset() const noexcept { return phase_offset_; }
    const std::vector<Complex>& points() const noexcept { return points_; }

    Complex symbol_for_label(std::uint32_t label) const;
    // Label of the point within `tol` of s, if any.
    std::optional<std::uint32_t> label_of(Complex s, double tol = 1e-6) const;

private:
    unsigned order_;
    unsigned bits_;
    double phase_offset_;
    std::vector<Complex> points_;            // indexed by label
};

Complex psk_modulate(const BitWord& bits, const PskConstellation& c);

enum class PermutationPreset { lexicographic, table1 };

std::string_view to_string(PermutationPreset p);
PermutationPreset parse_permutation_preset(std::string_view text);

struct PermutationSubset {
    unsigned K = 0;
    unsigned r1 = 0;
    PermutationPreset preset = PermutationPreset::lexicographic;
    std::vector<PermutationMatrix> selected;  // indexed by the r1-bit word

    std::optional<std::size_t> index_of(const PermutationMatrix& p) const;
};

PermutationSubset build_permutation_subset(unsigned K, PermutationPreset preset);

struct BlockMatrices {
    PermutationMatrix Z;
    std::vector<Complex> symbols;  // diagonal of S, slot order
    ComplexMatrix X;
};

// r = r1 + K log2 M
unsigned bits_per_block(const PermutationSubset& subset, const PskConstellation& c);

BlockMatrices bits_to_block(const BitWord& bits, const PermutationSubset& subset,
                            const PskConstellation& c);
BitWord block_to_bits(const BlockMatrices& block, const PermutationSubset& subset,
                      const PskConstellation& c);

// All 2^r legitimate codewords; entry w is bits_to_block of the word with value w.
std::vector<BlockMatrices> enumerate_codewords(const PermutationSubset& subset,
                                               const PskConstellation& c);

}  // namespace drm
