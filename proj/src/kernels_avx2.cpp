// AVX2+FMA kernels. One __m256d holds two interleaved complex doubles.
// This translation unit is compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never hands out this table unless CPUID reports both features.

#if defined(__x86_64__)

#include <immintrin.h>

#include "cvq/kernels.hpp"

namespace cvq::kernels {

namespace {

// (a0, a1) * c for two packed complex values and one broadcast complex:
//   re' = re*cr - im*ci,  im' = im*cr + re*ci
inline __m256d cmul_bcast(__m256d a, __m256d c_re, __m256d c_im) {
    __m256d a_swap = _mm256_permute_pd(a, 0b0101);
    return _mm256_fmaddsub_pd(a, c_re, _mm256_mul_pd(a_swap, c_im));
}

// elementwise product of two packed complex pairs
inline __m256d cmul_pair(__m256d a, __m256d b) {
    __m256d b_re = _mm256_movedup_pd(b);
    __m256d b_im = _mm256_permute_pd(b, 0b1111);
    __m256d a_swap = _mm256_permute_pd(a, 0b0101);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline double* as_d(cdouble* p) { return reinterpret_cast<double*>(p); }
inline const double* as_d(const cdouble* p) { return reinterpret_cast<const double*>(p); }

void diag_phase_avx2(cdouble* amps, std::size_t len, std::size_t dim, std::size_t stride,
                     const cdouble* table) {
    const std::size_t block = dim * stride;
    if (stride == 1) {
        // contiguous run over levels; phase varies per element
        for (std::size_t base = 0; base < len; base += block) {
            double* row = as_d(amps + base);
            std::size_t n = 0;
            for (; n + 2 <= dim; n += 2) {
                __m256d v = _mm256_loadu_pd(row + 2 * n);
                __m256d p = _mm256_loadu_pd(as_d(table + n));
                _mm256_storeu_pd(row + 2 * n, cmul_pair(v, p));
            }
            for (; n < dim; ++n) {
                const cdouble p = table[n];
                const cdouble a = amps[base + n];
                amps[base + n] = {a.real() * p.real() - a.imag() * p.imag(),
                                  a.real() * p.imag() + a.imag() * p.real()};
            }
        }
        return;
    }
    for (std::size_t base = 0; base < len; base += block) {
        for (std::size_t n = 0; n < dim; ++n) {
            const __m256d p_re = _mm256_set1_pd(table[n].real());
            const __m256d p_im = _mm256_set1_pd(table[n].imag());
            double* row = as_d(amps + base + n * stride);
            std::size_t j = 0;
            for (; j + 2 <= stride; j += 2) {
                __m256d v = _mm256_loadu_pd(row + 2 * j);
                _mm256_storeu_pd(row + 2 * j, cmul_bcast(v, p_re, p_im));
            }
            for (; j < stride; ++j) {
                const cdouble p = table[n];
                cdouble& a = *(amps + base + n * stride + j);
                a = {a.real() * p.real() - a.imag() * p.imag(),
                     a.real() * p.imag() + a.imag() * p.real()};
            }
        }
    }
}

// out = U * in, U column-major m x m. Vectorized over pairs of output rows.
void matvec_colmajor(const cdouble* u, const cdouble* in, cdouble* out, std::size_t m) {
    const std::size_t m2 = m & ~std::size_t{1};
    for (std::size_t r = 0; r < m2; r += 2) {
        _mm256_storeu_pd(as_d(out + r), _mm256_setzero_pd());
    }
    double tail_re = 0.0, tail_im = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
        const __m256d c_re = _mm256_set1_pd(in[n].real());
        const __m256d c_im = _mm256_set1_pd(in[n].imag());
        const double* col = as_d(u + n * m);
        for (std::size_t r = 0; r < m2; r += 2) {
            __m256d v = _mm256_loadu_pd(col + 2 * r);
            __m256d acc = _mm256_loadu_pd(as_d(out + r));
            acc = _mm256_add_pd(acc, cmul_bcast(v, c_re, c_im));
            _mm256_storeu_pd(as_d(out + r), acc);
        }
        if (m & 1) {
            const cdouble uc = u[n * m + (m - 1)];
            const cdouble c = in[n];
            tail_re += uc.real() * c.real() - uc.imag() * c.imag();
            tail_im += uc.real() * c.imag() + uc.imag() * c.real();
        }
    }
    if (m & 1) {
        out[m - 1] = {tail_re, tail_im};
    }
}

void strided_dense_avx2(cdouble* amps, std::size_t len, std::size_t dim, std::size_t stride,
                        const cdouble* u, cdouble* scratch) {
    cdouble* in = scratch;
    cdouble* out = scratch + dim;
    const std::size_t block = dim * stride;
    for (std::size_t outer = 0; outer < len; outer += block) {
        for (std::size_t j = 0; j < stride; ++j) {
            const std::size_t base = outer + j;
            for (std::size_t n = 0; n < dim; ++n) {
                in[n] = amps[base + n * stride];
            }
            matvec_colmajor(u, in, out, dim);
            for (std::size_t n = 0; n < dim; ++n) {
                amps[base + n * stride] = out[n];
            }
        }
    }
}

void indexed_dense_avx2(cdouble* amps, const std::size_t* idx, std::size_t m,
                        const cdouble* u, cdouble* scratch) {
    cdouble* in = scratch;
    cdouble* out = scratch + m;
    for (std::size_t i = 0; i < m; ++i) {
        in[i] = amps[idx[i]];
    }
    matvec_colmajor(u, in, out, m);
    for (std::size_t i = 0; i < m; ++i) {
        amps[idx[i]] = out[i];
    }
}

}  // namespace

namespace detail {

const KernelTable avx2_table = {
    &diag_phase_avx2,
    &strided_dense_avx2,
    &indexed_dense_avx2,
};

}  // namespace detail

}  // namespace cvq::kernels

#endif  // __x86_64__
