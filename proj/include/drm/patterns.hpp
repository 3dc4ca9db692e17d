#pragma once

// RIS reflecting patterns, the equivalent channel they induce, and
// CSI-free pattern selection by max-min distance.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "drm/codebook.hpp"
#include "drm/linalg.hpp"

namespace drm {

// One diagonal reflection matrix. Unit n reflects with gain on[n] in {0, 1}
// and phase 2 pi * phase_index[n] / 2^phase_bits.
class ReflectingPattern {
public:
    ReflectingPattern(unsigned phase_bits, std::vector<bool> on, std::vector<std::uint32_t> phase_index);

    // "+-0" notation for 1-bit phase ('+' = 0, '-' = pi, '0' = OFF). For
    // phase_bits > 1 each unit is a hex digit of its phase index or '.' for OFF.
    static ReflectingPattern parse(std::string_view text, unsigned phase_bits = 1);
    std::string to_string() const;

    std::size_t units() const noexcept { return on_.size(); }
    unsigned phase_bits() const noexcept { return phase_bits_; }
    bool is_on(std::size_t n) const { return on_[n]; }
    std::uint32_t phase_index(std::size_t n) const { return phase_[n]; }
    double gain(std::size_t n) const { return on_[n] ? 1.0 : 0.0; }
    double phase(std::size_t n) const;

    // beta_n * exp(j theta_n)
    const std::vector<Complex>& diagonal() const noexcept { return diag_; }
    ComplexMatrix to_matrix() const { return ComplexMatrix::diagonal(diag_); }

    bool operator==(const ReflectingPattern& o) const {
        return phase_bits_ == o.phase_bits_ && on_ == o.on_ && phase_ == o.phase_;
    }

private:
    unsigned phase_bits_;
    std::vector<bool> on_;
    std::vector<std::uint32_t> phase_;
    std::vector<Complex> diag_;
};

struct PatternCandidateSet {
    std::size_t N = 0;
    unsigned phase_bits = 1;
    bool allow_off = false;
    std::vector<ReflectingPattern> patterns;  // enumeration order
};

inline constexpr std::size_t kDefaultPatternCap = std::size_t{1} << 20;

// Mixed-radix enumeration with unit 0 most significant. Per unit the states are
// phase indices 0..2^phase_bits-1, followed by OFF when allow_off is set.
PatternCandidateSet enumerate_patterns(std::size_t N, unsigned phase_bits, bool allow_off,
                                       std::size_t cap = kDefaultPatternCap);

// Position of `p` in the enumeration order of enumerate_patterns.
std::uint64_t enumeration_index(const ReflectingPattern& p, bool allow_off);

struct ChannelRealization {
    std::vector<Complex> h1;  // transmitter -> RIS, N
    ComplexMatrix H2;         // RIS -> receiver, Nr x N
    std::vector<Complex> hd;  // direct link, Nr

    std::size_t units() const noexcept { return h1.size(); }
    std::size_t receive_antennas() const noexcept { return hd.size(); }
    void validate() const;
};

// Column i is hd + H2 * Phi_i * h1.
ComplexMatrix build_equivalent_channel(const ChannelRealization& ch,
                                       const std::vector<ReflectingPattern>& selected);

// Same matrix assembled as Hd_stack + H2_stack * blockdiag(Phi) * blockdiag(h1).
ComplexMatrix build_equivalent_channel_stacked(const ChannelRealization& ch,
                                               const std::vector<ReflectingPattern>& selected);

// Minimum Euclidean distance between distinct products diag(Phi_i) * s over
// all selected patterns and constellation points.
double dmin(const std::vector<ReflectingPattern>& selected, const PskConstellation& c);

// Stepwise depletion down to K patterns. Each step removes one pattern that
// belongs to a closest pair: the one leaving the largest d_min, then the one
// leaving the fewest pairs at that distance, then the lowest index. Returns
// indices into candidates.patterns in ascending enumeration order.
std::vector<std::size_t> stepwise_depletion_indices(const PatternCandidateSet& candidates,
                                                    std::size_t K, const PskConstellation& c);

std::vector<ReflectingPattern> stepwise_depletion_select(const PatternCandidateSet& candidates,
                                                         std::size_t K, const PskConstellation& c);

}  // namespace drm
