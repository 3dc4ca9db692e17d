#include "drm/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace drm {
namespace {

constexpr double kSameProductTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

Complex unit_phase(std::uint32_t index, unsigned phase_bits) {
    const std::uint32_t levels = std::uint32_t{1} << phase_bits;
    // Exact values where the phase lands on an axis.
    if (index == 0) return {1.0, 0.0};
    if (2 * index == levels) return {-1.0, 0.0};
    if (4 * index == levels) return {0.0, 1.0};
    if (4 * index == 3 * levels) return {0.0, -1.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * index / levels);
}

// Minimum over valid product pairs between pattern a (symbol set c) and pattern b.
double pair_distance(const ReflectingPattern& a, const ReflectingPattern& b,
                     const PskConstellation& c, bool same_pattern) {
    const auto& da = a.diagonal();
    const auto& db = b.diagonal();
    const auto& pts = c.points();
    double best = kInf;
    for (std::size_t m = 0; m < pts.size(); ++m) {
        for (std::size_t q = same_pattern ? m + 1 : 0; q < pts.size(); ++q) {
            double acc = 0.0;
            for (std::size_t n = 0; n < da.size(); ++n) acc += std::norm(da[n] * pts[m] - db[n] * pts[q]);
            const double d = std::sqrt(acc);
            if (d > kSameProductTol) best = std::min(best, d);
        }
    }
    return best;
}

class PairTable {
public:
    PairTable(const std::vector<ReflectingPattern>& patterns, const PskConstellation& c)
        : n_(patterns.size()), d_(n_ * n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const double d = pair_distance(patterns[i], patterns[j], c, i == j);
                d_[i * n_ + j] = d;
                d_[j * n_ + i] = d;
            }
        }
    }

    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

    double dmin(const std::vector<std::size_t>& members) const {
        double best = kInf;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a; b < members.size(); ++b) {
                best = std::min(best, (*this)(members[a], members[b]));
            }
        }
        return best;
    }

private:
    std::size_t n_;
    std::vector<double> d_;
};

}  // namespace

ReflectingPattern::ReflectingPattern(unsigned phase_bits, std::vector<bool> on,
                                     std::vector<std::uint32_t> phase_index)
    : phase_bits_(phase_bits), on_(std::move(on)), phase_(std::move(phase_index)) {
    if (phase_bits_ < 1 || phase_bits_ > 8) {
        throw std::invalid_argument("ReflectingPattern: phase_bits must be in [1, 8]");
    }
    if (on_.empty() || on_.size() != phase_.size()) {
        throw std::invalid_argument("ReflectingPattern: gain and phase arrays must be non-empty and equal length");
    }
    diag_.resize(on_.size());
    for (std::size_t n = 0; n < on_.size(); ++n) {
        if (phase_[n] >= (std::uint32_t{1} << phase_bits_)) {
            throw std::invalid_argument("ReflectingPattern: phase index out of range");
        }
        if (!on_[n]) phase_[n] = 0;
        diag_[n] = on_[n] ? unit_phase(phase_[n], phase_bits_) : Complex{};
    }
}

double ReflectingPattern::phase(std::size_t n) const {
    return 2.0 * std::numbers::pi * phase_[n] / static_cast<double>(std::uint32_t{1} << phase_bits_);
}

ReflectingPattern ReflectingPattern::parse(std::string_view text, unsigned phase_bits) {
    std::vector<bool> on;
    std::vector<std::uint32_t> phase;
    for (char ch : text) {
        if (phase_bits == 1) {
            if (ch == '+' || ch == '-') {
                on.push_back(true);
                phase.push_back(ch == '-' ? 1u : 0u);
            } else if (ch == '0') {
                on.push_back(false);
                phase.push_back(0);
            } else {
                throw std::invalid_argument("ReflectingPattern: bad unit character '" + std::string(1, ch) + "'");
            }
        } else {
            if (ch == '.') {
                on.push_back(false);
                phase.push_back(0);
            } else if (std::isxdigit(static_cast<unsigned char>(ch))) {
                on.push_back(true);
                phase.push_back(static_cast<std::uint32_t>(std::stoul(std::string(1, ch), nullptr, 16)));
            } else {
                throw std::invalid_argument("ReflectingPattern: bad unit character '" + std::string(1, ch) + "'");
            }
        }
    }
    return ReflectingPattern(phase_bits, std::move(on), std::move(phase));
}

std::string ReflectingPattern::to_string() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(units());
    for (std::size_t n = 0; n < units(); ++n) {
        if (phase_bits_ == 1) {
            s.push_back(!on_[n] ? '0' : (phase_[n] ? '-' : '+'));
        } else {
            if (phase_[n] >= 16) throw std::invalid_argument("ReflectingPattern: phase index not representable");
            s.push_back(!on_[n] ? '.' : kHex[phase_[n]]);
        }
    }
    return s;
}

PatternCandidateSet enumerate_patterns(std::size_t N, unsigned phase_bits, bool allow_off,
                                       std::size_t cap) {
    if (N < 1) throw std::invalid_argument("enumerate_patterns: N must be >= 1");
    if (phase_bits < 1 || phase_bits > 8) throw std::invalid_argument("enumerate_patterns: phase_bits must be in [1, 8]");
    const std::uint64_t levels = std::uint64_t{1} << phase_bits;
    const std::uint64_t states = levels + (allow_off ? 1 : 0);
    std::uint64_t total = 1;
    for (std::size_t n = 0; n < N; ++n) {
        if (total > cap / states) {
            throw std::invalid_argument("enumerate_patterns: candidate count exceeds cap of " + std::to_string(cap));
        }
        total *= states;
    }

    PatternCandidateSet set{N, phase_bits, allow_off, {}};
    set.patterns.reserve(total);
    std::vector<bool> on(N);
    std::vector<std::uint32_t> phase(N);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rem = idx;
        for (std::size_t n = N; n-- > 0;) {
            const auto state = static_cast<std::uint32_t>(rem % states);
            rem /= states;
            on[n] = state < levels;
            phase[n] = on[n] ? state : 0;
        }
        set.patterns.emplace_back(phase_bits, on, phase);
    }
    return set;
}

std::uint64_t enumeration_index(const ReflectingPattern& p, bool allow_off) {
    const std::uint64_t levels = std::uint64_t{1} << p.phase_bits();
    const std::uint64_t states = levels + (allow_off ? 1 : 0);
    std::uint64_t idx = 0;
    for (std::size_t n = 0; n < p.units(); ++n) {
        if (!p.is_on(n) && !allow_off) throw std::invalid_argument("enumeration_index: OFF unit without allow_off");
        idx = idx * states + (p.is_on(n) ? p.phase_index(n) : levels);
    }
    return idx;
}

void ChannelRealization::validate() const {
    if (h1.empty() || hd.empty()) throw std::invalid_argument("ChannelRealization: empty link");
    if (H2.rows() != hd.size() || H2.cols() != h1.size()) {
        throw std::invalid_argument("ChannelRealization: H2 must be Nr x N");
    }
}

ComplexMatrix build_equivalent_channel(const ChannelRealization& ch,
                                       const std::vector<ReflectingPattern>& selected) {
    ch.validate();
    if (selected.empty()) throw std::invalid_argument("build_equivalent_channel: no patterns");
    const std::size_t N = ch.units();
    const std::size_t Nr = ch.receive_antennas();
    ComplexMatrix H(Nr, selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const auto& phi = selected[i].diagonal();
        if (phi.size() != N) throw std::invalid_argument("build_equivalent_channel: pattern size != N");
        for (std::size_t r = 0; r < Nr; ++r) {
            Complex acc = ch.hd[r];
            for (std::size_t n = 0; n < N; ++n) acc += ch.H2(r, n) * phi[n] * ch.h1[n];
            H(r, i) = acc;
        }
    }
    return H;
}

ComplexMatrix build_equivalent_channel_stacked(const ChannelRealization& ch,
                                               const std::vector<ReflectingPattern>& selected) {
    ch.validate();
    if (selected.empty()) throw std::invalid_argument("build_equivalent_channel_stacked: no patterns");
    const std::size_t N = ch.units();
    const std::size_t Nr = ch.receive_antennas();
    const std::size_t K = selected.size();

    ComplexMatrix Hd(Nr, K);
    ComplexMatrix H2s(Nr, K * N);
    ComplexMatrix Q(K * N, K * N);
    ComplexMatrix H1s(K * N, K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& phi = selected[k].diagonal();
        if (phi.size() != N) throw std::invalid_argument("build_equivalent_channel_stacked: pattern size != N");
        for (std::size_t r = 0; r < Nr; ++r) {
            Hd(r, k) = ch.hd[r];
            for (std::size_t n = 0; n < N; ++n) H2s(r, k * N + n) = ch.H2(r, n);
        }
        for (std::size_t n = 0; n < N; ++n) {
            Q(k * N + n, k * N + n) = phi[n];
            H1s(k * N + n, k) = ch.h1[n];
        }
    }
    return Hd + matmul(matmul(H2s, Q), H1s);
}

double dmin(const std::vector<ReflectingPattern>& selected, const PskConstellation& c) {
    if (selected.empty()) throw std::invalid_argument("dmin: no patterns");
    const std::size_t N = selected.front().units();
    for (const auto& p : selected) {
        if (p.units() != N) throw std::invalid_argument("dmin: patterns differ in unit count");
    }
    std::vector<std::size_t> all(selected.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const double d = PairTable(selected, c).dmin(all);
    if (!std::isfinite(d)) throw std::invalid_argument("dmin: fewer than two distinct products");
    return d;
}

std::vector<std::size_t> stepwise_depletion_indices(const PatternCandidateSet& candidates,
                                                    std::size_t K, const PskConstellation& c) {
    const auto& pats = candidates.patterns;
    if (K == 0) throw std::invalid_argument("stepwise_depletion_select: K must be >= 1");
    if (K > pats.size()) {
        throw std::invalid_argument("stepwise_depletion_select: K = " + std::to_string(K) +
                                    " exceeds candidate count " + std::to_string(pats.size()));
    }
    for (std::size_t i = 0; i < pats.size(); ++i) {
        for (std::size_t j = i + 1; j < pats.size(); ++j) {
            if (pats[i] == pats[j]) throw std::invalid_argument("stepwise_depletion_select: duplicate candidates");
        }
    }

    const PairTable table(pats, c);
    std::vector<std::size_t> remaining(pats.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    auto at_min = [](double d, double closest) { return d <= closest * (1.0 + 1e-12); };

    while (remaining.size() > K) {
        const std::size_t n = remaining.size();
        double closest = kInf;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) closest = std::min(closest, table(remaining[a], remaining[b]));

        // Pairs at the current minimum, and how many of them each member touches.
        std::vector<std::size_t> touching(n, 0);
        std::size_t total = 0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                if (!at_min(table(remaining[a], remaining[b]), closest)) continue;
                ++total;
                ++touching[a];
                if (b != a) ++touching[b];
            }
        }

        // Rank removals by resulting d_min, then by fewest pairs left at that
        // minimum, then by lowest enumeration index.
        std::size_t victim = 0;
        double best_d = -1.0;
        std::size_t best_left = 0;
        for (std::size_t pos = 0; pos < n; ++pos) {
            if (touching[pos] == 0) continue;
            double d = closest;
            std::size_t left = total - touching[pos];
            if (left == 0) {
                std::vector<std::size_t> rest = remaining;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
                d = table.dmin(rest);
                left = 0;
                for (std::size_t a = 0; a < rest.size(); ++a)
                    for (std::size_t b = a; b < rest.size(); ++b) left += at_min(table(rest[a], rest[b]), d);
            }
            const bool better = best_d < 0.0 || d > best_d * (1.0 + 1e-12) ||
                                (!(d < best_d * (1.0 - 1e-12)) && left < best_left);
            if (better) {
                victim = pos;
                best_d = d;
                best_left = left;
            }
        }
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    return remaining;
}

std::vector<ReflectingPattern> stepwise_depletion_select(const PatternCandidateSet& candidates,
                                                         std::size_t K, const PskConstellation& c) {
    std::vector<ReflectingPattern> out;
    for (auto i : stepwise_depletion_indices(candidates, K, c)) out.push_back(candidates.patterns[i]);
    return out;
}

}  // namespace drm
