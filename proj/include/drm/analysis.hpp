#pragma once

// Closed-form rate and detection cost of differential reflecting modulation.

#include <cstdint>
#include <optional>
#include <string>

namespace drm {

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Rational reduced(std::uint64_t num, std::uint64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;
    bool operator==(const Rational&) const = default;
};

struct RateReport {
    unsigned K = 0;
    unsigned M = 0;
    std::optional<std::uint64_t> T;  // empty for the T -> infinity limit
    unsigned r1 = 0;                 // floor(log2 K!)
    unsigned r2 = 0;                 // K log2 M
    unsigned r = 0;
    Rational exact;                  // (T - 1) r / (T K), or r / K without T
    Rational asymptotic;             // r / K
    double stirling = 0.0;           // log2 M + floor(log2 sqrt(2 pi K) + K log2(K / e)) / K
};

// floor(log2 sqrt(2 pi K) + K log2(K / e)); may be negative for K = 1.
int stirling_permutation_bits(unsigned K);

// T must be >= 2 when given; std::nullopt evaluates the large-T limit.
RateReport transmission_rate(unsigned K, unsigned M, std::optional<std::uint64_t> T);

// 2^r (K^2 Nr + K^3) complex multiplications.
std::uint64_t detection_complexity(unsigned K, unsigned M, unsigned Nr);

// (2^floor(log2 K!) + M^K)(K^2 Nr + K^3), the alternative sum-form count.
std::uint64_t detection_complexity_sum_form(unsigned K, unsigned M, unsigned Nr);

}  // namespace drm
