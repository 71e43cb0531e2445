#pragma once

// Inner-loop kernels for truncated-Fock-space state manipulation.
//
// Every kernel exists in a scalar reference form and, on x86-64, an AVX2+FMA
// form. The active variant is picked once at startup from CPUID, and can be
// forced with set_backend() or the CVQ_KERNEL_BACKEND environment variable
// ("scalar" | "avx2" | "auto"). The variants are equivalence-tested against
// each other; they may differ by FMA rounding only.
//
// Amplitude layout: a state over N modes with per-mode dimension `dim` is a
// dense vector of dim^N complex doubles, index = little-endian mixed radix of
// the photon numbers, so mode m occupies the digit with stride dim^m.

#include <cstddef>
#include <span>

#include "cvq/types.hpp"

namespace cvq::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

/// Backend in use for all subsequent kernel calls.
Backend active_backend();

/// Force a backend. Throws std::runtime_error if unsupported on this CPU.
void set_backend(Backend b);

// amps[g*dim*stride + n*stride + j] *= table[n]
// for all groups g, levels n < dim, offsets j < stride.
void diag_phase(std::span<cdouble> amps, std::size_t dim, std::size_t stride,
                std::span<const cdouble> table);

// Applies a dim x dim matrix (column-major: u[n*dim + m] = <m|U|n>) along the
// digit with the given stride, i.e. every slice {base + n*stride, n < dim}
// is replaced by U * slice. scratch must hold at least 2*dim entries.
void strided_dense(std::span<cdouble> amps, std::size_t dim, std::size_t stride,
                   std::span<const cdouble> u_colmajor, std::span<cdouble> scratch);

// Gathers amps[idx[0..m)], applies an m x m column-major matrix, scatters the
// result back. Used for the photon-number-conserving blocks of two-mode gates.
// scratch must hold at least 2*m entries.
void indexed_dense(std::span<cdouble> amps, std::span<const std::size_t> idx,
                   std::span<const cdouble> u_colmajor, std::span<cdouble> scratch);

namespace detail {

struct KernelTable {
    void (*diag_phase)(cdouble*, std::size_t, std::size_t, std::size_t, const cdouble*);
    void (*strided_dense)(cdouble*, std::size_t, std::size_t, std::size_t, const cdouble*,
                          cdouble*);
    void (*indexed_dense)(cdouble*, const std::size_t*, std::size_t, const cdouble*, cdouble*);
};

extern const KernelTable scalar_table;
#if defined(__x86_64__)
extern const KernelTable avx2_table;  // defined in kernels_avx2.cpp
#endif

}  // namespace detail

}  // namespace cvq::kernels
