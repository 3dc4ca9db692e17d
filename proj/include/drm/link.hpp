#pragma once

// Block transmission over the equivalent RIS channel: differential encoding,
// noisy reception, differential (CSI-free) and coherent ML detection.

#include <cstddef>
#include <random>
#include <vector>

#include "drm/codebook.hpp"
#include "drm/linalg.hpp"
#include "drm/patterns.hpp"
#include "drm/simd/kernels.hpp"

namespace drm {

using Rng = std::mt19937_64;

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
Complex complex_gaussian(Rng& rng, double variance);

// i.i.d. CN(0, 1) entries on all three links.
ChannelRealization draw_channel(std::size_t N, std::size_t Nr, Rng& rng);

struct DifferentialState {
    ComplexMatrix V;
    std::size_t t = 0;

    static DifferentialState initial(std::size_t K) { return {ComplexMatrix::identity(K), 0}; }
};

struct ReceivedBlock {
    ComplexMatrix Y;  // Nr x K, column k is slot k
};

struct NoiseModel {
    double sigma2 = 0.0;  // per-entry variance; SNR = 1 / sigma2
};

// True when m has one nonzero per row and column, each of modulus 1 (to tol).
bool is_unit_monomial(const ComplexMatrix& m, double tol = 1e-9);

DifferentialState differential_encode(const DifferentialState& state, const BlockMatrices& X);

struct SlotSignal {
    std::size_t pattern;  // row index of the nonzero entry
    Complex symbol;
};

std::vector<SlotSignal> slot_signals(const DifferentialState& state);
std::vector<SlotSignal> slot_signals(const ComplexMatrix& V);

// Y = H * V + N, built slot by slot from the activated pattern signatures.
ReceivedBlock transmit_block(const ComplexMatrix& V, const ComplexMatrix& H, const NoiseModel& noise,
                             Rng& rng);

// Scores every codeword by Re{tr(A^H B X)} using the SIMD kernels. The
// differential detector uses (A, B) = (Y_t, Y_{t-1}); the coherent detector
// uses (Y, H_hat). Holds scratch buffers, so one instance per thread.
class CorrelationDetector {
public:
    explicit CorrelationDetector(const std::vector<BlockMatrices>& candidates,
                                 const simd::Kernels& kernels = simd::active_kernels());

    std::size_t size() const noexcept { return count_; }
    std::size_t order() const noexcept { return K_; }

    // Fills scores() for the pair and returns the first maximiser.
    std::size_t argmax(const ComplexMatrix& a, const ComplexMatrix& b);
    const std::vector<double>& scores() const noexcept { return scores_; }

private:
    const simd::Kernels* kernels_;
    std::size_t count_ = 0;
    std::size_t stride_ = 0;
    std::size_t K_ = 0;
    std::vector<std::int32_t> gather_;
    std::vector<double> sym_re_;
    std::vector<double> sym_im_;
    std::vector<double> g_re_;
    std::vector<double> g_im_;
    std::vector<double> scores_;
};

// argmax_X Re{tr(Y_t^H Y_{t-1} X)}; ties go to the lowest index.
std::size_t drm_detect_index(const ReceivedBlock& current, const ReceivedBlock& previous,
                             const std::vector<BlockMatrices>& candidates);
BlockMatrices drm_detect(const ReceivedBlock& current, const ReceivedBlock& previous,
                         const std::vector<BlockMatrices>& candidates);

// argmin_X ||Y_t - Y_{t-1} X||_F^2 evaluated with explicit matrix products.
std::size_t drm_detect_frobenius_index(const ReceivedBlock& current, const ReceivedBlock& previous,
                                       const std::vector<BlockMatrices>& candidates);

// ||Y - H_hat X||_F^2 for every candidate, from the correlation form.
std::vector<double> ndrm_metrics(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                                 const std::vector<BlockMatrices>& candidates);

// argmin_X ||Y - H_hat X||_F^2; ties go to the lowest index.
std::size_t ndrm_detect_index(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                              const std::vector<BlockMatrices>& candidates);
BlockMatrices ndrm_detect(const ReceivedBlock& received, const ComplexMatrix& h_hat,
                          const std::vector<BlockMatrices>& candidates);

// Adds independent CN(0, eta * sigma2) errors to every entry of h1, H2, hd.
ChannelRealization perturb_csi(const ChannelRealization& ch, double eta, double sigma2, Rng& rng);

}  // namespace drm
