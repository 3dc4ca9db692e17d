#include "drm/analysis.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "drm/codebook.hpp"

namespace drm {
namespace {

unsigned log2_order(unsigned M) {
    if (M < 2 || !std::has_single_bit(M)) throw std::invalid_argument("M must be a power of two >= 2");
    return static_cast<unsigned>(std::countr_zero(M));
}

std::uint64_t per_candidate_cost(unsigned K, unsigned Nr) {
    const std::uint64_t k = K;
    return k * k * Nr + k * k * k;
}

}  // namespace

Rational Rational::reduced(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    return g ? Rational{num / g, den / g} : Rational{0, 1};
}

std::string Rational::to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

int stirling_permutation_bits(unsigned K) {
    if (K == 0) throw std::invalid_argument("stirling_permutation_bits: K must be >= 1");
    const double k = K;
    return static_cast<int>(std::floor(std::log2(std::sqrt(2.0 * std::numbers::pi * k)) +
                                       k * std::log2(k / std::numbers::e)));
}

RateReport transmission_rate(unsigned K, unsigned M, std::optional<std::uint64_t> T) {
    if (K < 1 || K > 20) throw std::invalid_argument("transmission_rate: K must be in [1, 20]");
    if (T && *T < 2) throw std::invalid_argument("transmission_rate: T must be >= 2");
    RateReport rep;
    rep.K = K;
    rep.M = M;
    rep.T = T;
    rep.r1 = permutation_bits(K);
    rep.r2 = K * log2_order(M);
    rep.r = rep.r1 + rep.r2;
    rep.asymptotic = Rational::reduced(rep.r, K);
    rep.exact = T ? Rational::reduced((*T - 1) * rep.r, *T * K) : rep.asymptotic;
    rep.stirling = log2_order(M) + static_cast<double>(stirling_permutation_bits(K)) / K;
    return rep;
}

std::uint64_t detection_complexity(unsigned K, unsigned M, unsigned Nr) {
    if (K < 1 || Nr < 1) throw std::invalid_argument("detection_complexity: K and Nr must be >= 1");
    const unsigned r = permutation_bits(K) + K * log2_order(M);
    if (r >= 40) throw std::invalid_argument("detection_complexity: 2^r overflows");
    return (std::uint64_t{1} << r) * per_candidate_cost(K, Nr);
}

std::uint64_t detection_complexity_sum_form(unsigned K, unsigned M, unsigned Nr) {
    if (K < 1 || Nr < 1) throw std::invalid_argument("detection_complexity: K and Nr must be >= 1");
    const unsigned q = log2_order(M);
    if (K * q >= 40) throw std::invalid_argument("detection_complexity: M^K overflows");
    const std::uint64_t perms = std::uint64_t{1} << permutation_bits(K);
    const std::uint64_t symbols = std::uint64_t{1} << (K * q);
    return (perms + symbols) * per_candidate_cost(K, Nr);
}

}  // namespace drm
