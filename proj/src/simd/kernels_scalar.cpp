#include "drm/simd/kernels.hpp"

namespace drm::simd {
namespace {

std::complex<double> dot_conj_scalar(const std::complex<double>* a, const std::complex<double>* b,
                                     std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

double norm_sq_scalar(const std::complex<double>* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    }
    return acc;
}

void gram_scalar(const std::complex<double>* a, std::size_t ka, const std::complex<double>* b,
                 std::size_t kb, std::size_t rows, double* out_re, double* out_im) {
    for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = 0; j < kb; ++j) {
            double re = 0.0;
            double im = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                const auto x = a[r * ka + i];
                const auto y = b[r * kb + j];
                re += x.real() * y.real() + x.imag() * y.imag();
                im += x.real() * y.imag() - x.imag() * y.real();
            }
            out_re[i * kb + j] = re;
            out_im[i * kb + j] = im;
        }
    }
}

void score_scalar(const double* g_re, const double* g_im, const CandidateTable& t, double* out) {
    for (std::size_t c = 0; c < t.count; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < t.slots; ++k) {
            const std::size_t e = k * t.stride + c;
            const std::int32_t idx = t.gather_index[e];
            acc = acc + (g_re[idx] * t.sym_re[e] - g_im[idx] * t.sym_im[e]);
        }
        out[c] = acc;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", dot_conj_scalar, norm_sq_scalar, gram_scalar, score_scalar};
    return k;
}

}  // namespace drm::simd
