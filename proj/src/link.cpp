#include "drm/link.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drm {

Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    const double re = dist(rng);
    const double im = dist(rng);
    return {re, im};
}

ChannelRealization draw_channel(std::size_t N, std::size_t Nr, Rng& rng) {
    if (N == 0 || Nr == 0) throw std::invalid_argument("draw_channel: N and Nr must be positive");
    std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
    auto cn = [&] {
        const double re = dist(rng);
        const double im = dist(rng);
        return Complex{re, im};
    };
    ChannelRealization ch{std::vector<Complex>(N), ComplexMatrix(Nr, N), std::vector<Complex>(Nr)};
    for (auto& v : ch.h1) v = cn();
    for (auto& v : ch.H2.data()) v = cn();
    for (auto& v : ch.hd) v = cn();
    return ch;
}

bool is_unit_monomial(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const std::size_t K = m.rows();
    std::vector<int> col_count(K, 0);
    for (std::size_t i = 0; i < K; ++i) {
        int row_count = 0;
        for (std::size_t j = 0; j < K; ++j) {
            const double mag = std::abs(m(i, j));
            if (mag <= tol) continue;
            if (std::abs(mag - 1.0) > tol) return false;
            ++row_count;
            ++col_count[j];
        }
        if (row_count != 1) return false;
    }
    for (int c : col_count) {
        if (c != 1) return false;
    }
    return true;
}

DifferentialState differential_encode(const DifferentialState& state, const BlockMatrices& X) {
    if (X.X.rows() != state.V.rows() || X.X.cols() != state.V.cols()) {
        throw std::invalid_argument("differential_encode: K mismatch between state and codeword");
    }
    if (!is_unit_monomial(X.X)) {
        throw std::invalid_argument("differential_encode: codeword is not permutation x unit-modulus diagonal");
    }
    return {matmul(state.V, X.X), state.t + 1};
}

std::vector<SlotSignal> slot_signals(const ComplexMatrix& V) {
    constexpr double tol = 1e-9;
    std::vector<SlotSignal> out;
    out.reserve(V.cols());
    for (std::size_t k = 0; k < V.cols(); ++k) {
        std::size_t found = V.rows();
        for (std::size_t i = 0; i < V.rows(); ++i) {
            if (std::abs(V(i, k)) <= tol) continue;
            if (found != V.rows()) {
                throw std::invalid_argument("slot_signals: column " + std::to_string(k) + " has several nonzeros");
            }
            found = i;
        }
        if (found == V.rows()) throw std::invalid_argument("slot_signals: column " + std::to_string(k) + " is zero");
        out.push_back({found, V(found, k)});
    }
    return out;
}

std::vector<SlotSignal> slot_signals(const DifferentialState& state) { return slot_signals(state.V); }

ReceivedBlock transmit_block(const ComplexMatrix& V, const ComplexMatrix& H, const NoiseModel& noise,
                             Rng& rng) {
    if (H.cols() != V.rows()) throw std::invalid_argument("transmit_block: H columns must equal K");
    if (noise.sigma2 < 0.0) throw std::invalid_argument("transmit_block: negative noise variance");
    const std::size_t Nr = H.rows();
    const auto slots = slot_signals(V);
    ComplexMatrix Y(Nr, V.cols());
    for (std::size_t k = 0; k < slots.size(); ++k) {
        for (std::size_t r = 0; r < Nr; ++r) Y(r, k) = H(r, slots[k].pattern) * slots[k].symbol;
    }
    if (noise.sigma2 > 0.0) {
        std::normal_distribution<double> dist(0.0, std::sqrt(noise.sigma2 / 2.0));
        for (std::size_t k = 0; k < slots.size(); ++k) {
            for (std::size_t r = 0; r < Nr; ++r) {
                const double re = dist(rng);
                const double im = dist(rng);
                Y(r, k) += Complex{re, im};
            }
        }
    }
    return {std::move(Y)};
}

CorrelationDetector::CorrelationDetector(const std::vector<BlockMatrices>& candidates,
                                         const simd::Kernels& kernels)
    : kernels_(&kernels), count_(candidates.size()) {
    if (candidates.empty()) throw std::invalid_argument("CorrelationDetector: empty candidate list");
    K_ = candidates.front().X.rows();
    stride_ = (count_ + 3) / 4 * 4;
    gather_.assign(K_ * stride_, 0);
    sym_re_.assign(K_ * stride_, 0.0);
    sym_im_.assign(K_ * stride_, 0.0);
    for (std::size_t c = 0; c < count_; ++c) {
        const ComplexMatrix& X = candidates[c].X;
        if (X.rows() != K_ || X.cols() != K_ || !is_unit_monomial(X)) {
            throw std::invalid_argument("CorrelationDetector: candidate " + std::to_string(c) +
                                        " is not a K x K unit monomial matrix");
        }
        const auto slots = slot_signals(X);
        for (std::size_t k = 0; k < K_; ++k) {
            const std::size_t e = k * stride_ + c;
            gather_[e] = static_cast<std::int32_t>(k * K_ + slots[k].pattern);
            sym_re_[e] = slots[k].symbol.real();
            sym_im_[e] = slots[k].symbol.imag();
        }
    }
    g_re_.assign(K_ * K_, 0.0);
    g_im_.assign(K_ * K_, 0.0);
    scores_.assign(count_, 0.0);
}

std::size_t CorrelationDetector::argmax(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != K_ || b.cols() != K_ || a.rows() != b.rows()) {
        throw std::invalid_argument("CorrelationDetector: operands must both be Nr x K");
    }
    kernels_->gram(a.data().data(), K_, b.data().data(), K_, a.rows(), g_re_.data(), g_im_.data());
    const simd::CandidateTable table{gather_.data(), sym_re_.data(), sym_im_.data(), count_, stride_, K_};
    kernels_->score(g_re_.data(), g_im_.data(), table, scores_.data());
    std::size_t best = 0;
    for (std::size_t c = 1; c < count_; ++c) {
        if (scores_[c] > scores_[best]) best = c;
    }
    return best;
}

std::size_t drm_detect_index(const ReceivedBlock& current, const ReceivedBlock& previous,
                             const std::vector<BlockMatrices>& candidates) {
    CorrelationDetector det(candidates);
    return det.argmax(current.Y, previous.Y);
}

BlockMatrices drm_detect(const ReceivedBlock& current, const ReceivedBlock& previous,
                         const std::vector<BlockMatrices>& candidates) {
    return candidates[drm_detect_index(current, previous, candidates)];
}

std::size_t drm_detect_frobenius_index(const ReceivedBlock& current, const ReceivedBlock& previous,
                                       const std::vector<BlockMatrices>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("drm_detect: empty candidate list");
    std::size_t best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double m = frobenius_norm_sq(current.Y - matmul(previous.Y, candidates[c].X));
        if (m < best_metric) {
            best_metric = m;
            best = c;
        }
    }
    return best;
}

std::vector<double> ndrm_metrics(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                                 const std::vector<BlockMatrices>& candidates) {
    CorrelationDetector det(candidates);
    det.argmax(received.Y, h_hat);
    // ||H X||_F = ||H||_F for unit monomial X.
    const double base = frobenius_norm_sq(received.Y) + frobenius_norm_sq(h_hat);
    std::vector<double> out(det.size());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = base - 2.0 * det.scores()[c];
    return out;
}

std::size_t ndrm_detect_index(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                              const std::vector<BlockMatrices>& candidates) {
    CorrelationDetector det(candidates);
    return det.argmax(received.Y, h_hat);
}

BlockMatrices ndrm_detect(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                          const std::vector<BlockMatrices>& candidates) {
    return candidates[ndrm_detect_index(received, h_hat, candidates)];
}

ChannelRealization perturb_csi(const ChannelRealization& ch, double eta, double sigma2, Rng& rng) {
    if (eta < 0.0) throw std::invalid_argument("perturb_csi: eta must be non-negative");
    if (sigma2 < 0.0) throw std::invalid_argument("perturb_csi: sigma2 must be non-negative");
    ChannelRealization out = ch;
    const double variance = eta * sigma2;
    if (variance == 0.0) return out;
    for (auto& v : out.H2.data()) v += complex_gaussian(rng, variance);
    for (auto& v : out.hd) v += complex_gaussian(rng, variance);
    for (auto& v : out.h1) v += complex_gaussian(rng, variance);
    return out;
}

}  // namespace drm
