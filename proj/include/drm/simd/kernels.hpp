#pragma once

// Inner-loop kernels with a portable scalar reference and optional AVX2
// variants. The active table is chosen once at startup from CPU features;
// the DRM_SIMD environment variable ("scalar" or "avx2") overrides it.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace drm::simd {

// Candidate codewords in structure-of-arrays form for the correlation scorer.
// For slot k and candidate c, entry k * stride + c holds the flat index
// (k * K + row) into the K x K correlation matrix and the symbol at that slot.
struct CandidateTable {
    const std::int32_t* gather_index = nullptr;
    const double* sym_re = nullptr;
    const double* sym_im = nullptr;
    std::size_t count = 0;
    std::size_t stride = 0;  // >= count, multiple of 4
    std::size_t slots = 0;
};

struct Kernels {
    std::string_view name;

    // sum_i conj(a[i]) * b[i]
    std::complex<double> (*dot_conj)(const std::complex<double>* a, const std::complex<double>* b,
                                     std::size_t n);

    // sum_i |a[i]|^2
    double (*norm_sq)(const std::complex<double>* a, std::size_t n);

    // out = a^H * b for column-major views: a is rows x ka, b is rows x kb,
    // both row-major with leading dimension ka / kb. out is ka x kb row-major,
    // split into real and imaginary planes.
    void (*gram)(const std::complex<double>* a, std::size_t ka, const std::complex<double>* b,
                 std::size_t kb, std::size_t rows, double* out_re, double* out_im);

    // score[c] = sum_k Re(G[gather_index[k][c]] * sym[k][c]). The per-candidate
    // evaluation order is fixed so every variant is bit-identical to scalar.
    void (*score)(const double* g_re, const double* g_im, const CandidateTable& table,
                  double* out);
};

const Kernels& scalar_kernels();

// nullptr when this build or CPU lacks AVX2+FMA.
const Kernels* avx2_kernels();

const Kernels& active_kernels();

}  // namespace drm::simd
