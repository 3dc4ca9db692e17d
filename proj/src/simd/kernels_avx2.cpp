// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include "drm/simd/kernels.hpp"

namespace drm::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Interleaved [re0 im0 re1 im1]. Accumulates re*re' and im*im' products in
// separate registers, then combines lanes.
std::complex<double> dot_conj(const std::complex<double>* a, const std::complex<double>* b,
                              std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc_same = _mm256_setzero_pd();  // ar*br, ai*bi
    __m256d acc_cross = _mm256_setzero_pd();  // ar*bi, ai*br
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        acc_same = _mm256_fmadd_pd(va, vb, acc_same);
        acc_cross = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_cross);
    }
    alignas(32) double s[4];
    alignas(32) double x[4];
    _mm256_store_pd(s, acc_same);
    _mm256_store_pd(x, acc_cross);
    double re = (s[0] + s[2]) + (s[1] + s[3]);
    double im = (x[0] + x[2]) - (x[1] + x[3]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

double norm_sq(const std::complex<double>* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    const std::size_t len = 2 * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        const __m256d v0 = _mm256_loadu_pd(p + i);
        const __m256d v1 = _mm256_loadu_pd(p + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= len; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < len; ++i) acc += p[i] * p[i];
    return acc;
}

// Each output column j is accumulated for two rows of `a` columns at once:
// lanes hold (i, i+1) pairs so one broadcast of b[r][j] serves both.
void gram(const std::complex<double>* a, std::size_t ka, const std::complex<double>* b,
          std::size_t kb, std::size_t rows, double* out_re, double* out_im) {
    const double* pa = reinterpret_cast<const double*>(a);
    for (std::size_t j = 0; j < kb; ++j) {
        std::size_t i = 0;
        for (; i + 2 <= ka; i += 2) {
            __m256d acc_same = _mm256_setzero_pd();
            __m256d acc_cross = _mm256_setzero_pd();
            for (std::size_t r = 0; r < rows; ++r) {
                const __m256d va = _mm256_loadu_pd(pa + 2 * (r * ka + i));
                const std::complex<double> y = b[r * kb + j];
                const __m256d vb = _mm256_setr_pd(y.real(), y.imag(), y.real(), y.imag());
                const __m256d vbs = _mm256_setr_pd(y.imag(), y.real(), y.imag(), y.real());
                acc_same = _mm256_fmadd_pd(va, vb, acc_same);
                acc_cross = _mm256_fmadd_pd(va, vbs, acc_cross);
            }
            alignas(32) double s[4];
            alignas(32) double x[4];
            _mm256_store_pd(s, acc_same);
            _mm256_store_pd(x, acc_cross);
            out_re[i * kb + j] = s[0] + s[1];
            out_im[i * kb + j] = x[0] - x[1];
            out_re[(i + 1) * kb + j] = s[2] + s[3];
            out_im[(i + 1) * kb + j] = x[2] - x[3];
        }
        for (; i < ka; ++i) {
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

// Four candidates per iteration. No FMA here: the result must match the
// scalar reference bit for bit so detection decisions never depend on ISA.
void score(const double* g_re, const double* g_im, const CandidateTable& t, double* out) {
    std::size_t c = 0;
    for (; c + 4 <= t.count; c += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < t.slots; ++k) {
            const std::size_t e = k * t.stride + c;
            const __m128i idx =
                _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.gather_index + e));
            const __m256d gr = _mm256_i32gather_pd(g_re, idx, 8);
            const __m256d gi = _mm256_i32gather_pd(g_im, idx, 8);
            const __m256d sr = _mm256_loadu_pd(t.sym_re + e);
            const __m256d si = _mm256_loadu_pd(t.sym_im + e);
            const __m256d term = _mm256_sub_pd(_mm256_mul_pd(gr, sr), _mm256_mul_pd(gi, si));
            acc = _mm256_add_pd(acc, term);
        }
        _mm256_storeu_pd(out + c, acc);
    }
    for (; c < t.count; ++c) {
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

const Kernels& table() {
    static const Kernels k{"avx2", dot_conj, norm_sq, gram, score};
    return k;
}

}  // namespace drm::simd::avx2
