#pragma once

// Monte Carlo BER sweeps for DRM and the coherent NDRM baseline.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "drm/codebook.hpp"
#include "drm/link.hpp"
#include "drm/patterns.hpp"

namespace drm {

enum class Scheme { drm, ndrm };
enum class SelectionMode { stepwise, random, explicit_list };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

struct SimConfig {
    Scheme scheme = Scheme::drm;
    std::size_t N = 4;
    std::size_t Nr = 4;
    unsigned K = 2;
    unsigned M = 2;
    PermutationPreset preset = PermutationPreset::lexicographic;
    SelectionMode selection = SelectionMode::stepwise;
    std::vector<std::string> explicit_patterns;  // used with explicit_list
    unsigned phase_bits = 1;
    bool allow_off = false;
    std::vector<double> snr_db = default_snr_grid();
    double eta = 0.0;
    std::size_t blocks_per_frame = 100;
    std::size_t frames = 1000;
    std::uint64_t seed = 1;
    bool noiseless = false;  // sigma^2 = 0 regardless of snr_db
    unsigned threads = 0;    // 0 = hardware concurrency

    static std::vector<double> default_snr_grid();  // 0, 2, ..., 30 dB

    // Throws ConfigError.
    void validate() const;
};

// "start:step:stop" (inclusive), a single value, or a comma list.
std::vector<double> parse_snr_list(std::string_view text);

struct BerRecord {
    Scheme scheme = Scheme::drm;
    unsigned K = 0;
    unsigned M = 0;
    std::size_t N = 0;
    std::size_t Nr = 0;
    double eta = 0.0;
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t blocks_counted = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const BerRecord&) const = default;
};

// Independent generator for one (frame, SNR point) work unit. The mapping is
// a pure function of its arguments.
Rng seed_stream(std::uint64_t master_seed, std::uint64_t frame_index, std::uint64_t snr_index);

// Patterns used by a configuration (stepwise, random, or the explicit list).
std::vector<ReflectingPattern> resolve_patterns(const SimConfig& cfg);

std::vector<BerRecord> run_ber_sweep(const SimConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "scheme,K,M,N,Nr,eta,snr_db,frames,blocks_counted,bit_errors,ber,seed";

// ber is printed as %.9e; other reals use the shortest round-trip form.
std::string format_csv(const std::vector<BerRecord>& records);
void write_csv(const std::vector<BerRecord>& records, const std::string& path);
std::vector<BerRecord> parse_csv(std::string_view text);
std::vector<BerRecord> read_csv(const std::string& path);

// "# <scheme> K=.. eta=.." header per scheme block, then "snr_db ber" lines.
void write_plot_pairs(const std::vector<BerRecord>& records, const std::string& path);

}  // namespace drm
