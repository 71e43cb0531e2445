// Scalar reference kernels. These define the semantics; the SIMD variants are
// checked against them.

#include "cvq/kernels.hpp"

namespace cvq::kernels {

namespace {

inline cdouble cmul(cdouble a, cdouble b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

void diag_phase_scalar(cdouble* amps, std::size_t len, std::size_t dim, std::size_t stride,
                       const cdouble* table) {
    const std::size_t block = dim * stride;
    for (std::size_t base = 0; base < len; base += block) {
        for (std::size_t n = 0; n < dim; ++n) {
            const cdouble p = table[n];
            cdouble* row = amps + base + n * stride;
            for (std::size_t j = 0; j < stride; ++j) {
                row[j] = cmul(row[j], p);
            }
        }
    }
}

void strided_dense_scalar(cdouble* amps, std::size_t len, std::size_t dim, std::size_t stride,
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
            for (std::size_t m = 0; m < dim; ++m) {
                out[m] = {0.0, 0.0};
            }
            // column-major accumulation: out += u_col(n) * in[n]
            for (std::size_t n = 0; n < dim; ++n) {
                const cdouble c = in[n];
                const cdouble* col = u + n * dim;
                for (std::size_t m = 0; m < dim; ++m) {
                    out[m] += cmul(col[m], c);
                }
            }
            for (std::size_t m = 0; m < dim; ++m) {
                amps[base + m * stride] = out[m];
            }
        }
    }
}

void indexed_dense_scalar(cdouble* amps, const std::size_t* idx, std::size_t m,
                          const cdouble* u, cdouble* scratch) {
    cdouble* in = scratch;
    cdouble* out = scratch + m;
    for (std::size_t i = 0; i < m; ++i) {
        in[i] = amps[idx[i]];
    }
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = {0.0, 0.0};
    }
    for (std::size_t n = 0; n < m; ++n) {
        const cdouble c = in[n];
        const cdouble* col = u + n * m;
        for (std::size_t i = 0; i < m; ++i) {
            out[i] += cmul(col[i], c);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        amps[idx[i]] = out[i];
    }
}

}  // namespace

namespace detail {

const KernelTable scalar_table = {
    &diag_phase_scalar,
    &strided_dense_scalar,
    &indexed_dense_scalar,
};

}  // namespace detail

}  // namespace cvq::kernels
