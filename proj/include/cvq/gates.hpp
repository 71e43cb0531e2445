#pragma once

// The CV gate set on truncated Fock states: rotation, Kerr, displacement,
// squeezing, beamsplitter, and the position-quadrature expectation value.
//
// Convention: hbar = 2, so x = a + a^dag and a coherent state D(alpha)|0>
// has <x> = 2 Re alpha.
//
// Displacement and squeezing use exact closed-form Fock matrix elements built
// by stable two-index recurrences, not exponentials of truncated generators;
// the truncated matrices are sub-blocks of the infinite-dimensional unitaries,
// so they never increase the norm. Rotation and Kerr are diagonal and exactly
// unitary. The beamsplitter acts block-diagonally on total photon number,
// each block exponentiated exactly.

#include <cstddef>
#include <variant>
#include <vector>

#include "cvq/fock_state.hpp"
#include "cvq/types.hpp"

namespace cvq {

// ---- gate parameter bundle -------------------------------------------------

struct RotationGate {
    std::size_t mode;
    double phi;
};
struct DisplacementGate {
    std::size_t mode;
    cdouble alpha;
};
struct SqueezeGate {
    std::size_t mode;
    double r;    // magnitude, >= 0
    double phi;  // squeeze angle
};
struct BeamsplitterGate {
    std::size_t mode_a;
    std::size_t mode_b;
    double theta;
    double phi;
};
struct KerrGate {
    std::size_t mode;
    double kappa;
};

using GateParam =
    std::variant<RotationGate, DisplacementGate, SqueezeGate, BeamsplitterGate, KerrGate>;

// ---- Fock-basis matrix builders ---------------------------------------------

// All matrices are column-major: mat[n*dim + m] = <m|G|n>.

/// exp(i n phi) phase table.
std::vector<cdouble> rotation_phase_table(std::size_t dim, double phi);
/// exp(i kappa n^2) phase table.
std::vector<cdouble> kerr_phase_table(std::size_t dim, double kappa);
/// <m|D(alpha)|n> via the two-index recurrence.
std::vector<cdouble> displacement_matrix(std::size_t dim, cdouble alpha);
/// <m|S(r e^{i phi})|n> via the even/odd recurrence. Requires r >= 0.
std::vector<cdouble> squeeze_matrix(std::size_t dim, double r, double phi);

/// Per-total-photon-number blocks of exp(theta (e^{i phi} a^dag b - e^{-i phi} a b^dag)).
/// Block n couples |k, n-k> for k in [k_min, k_min + size); blocks with
/// n >= dim are restricted to the levels below the cutoff and the restricted
/// generator is exponentiated.
struct BeamsplitterBlocks {
    std::size_t dim;
    struct Block {
        std::size_t k_min;
        std::size_t size;
        std::vector<cdouble> u;  // column-major size x size
    };
    std::vector<Block> blocks;  // indexed by total photon number n = 0 .. 2(dim-1)
};
BeamsplitterBlocks beamsplitter_blocks(std::size_t dim, double theta, double phi);

// ---- gate application --------------------------------------------------------

void apply_rotation_inplace(FockState& state, std::size_t mode, double phi);
void apply_kerr_inplace(FockState& state, std::size_t mode, double kappa);
void apply_displacement_inplace(FockState& state, std::size_t mode, cdouble alpha);
void apply_squeeze_inplace(FockState& state, std::size_t mode, double r, double phi);
void apply_beamsplitter_inplace(FockState& state, std::size_t mode_a, std::size_t mode_b,
                                double theta, double phi);
void apply_gate_inplace(FockState& state, const GateParam& gate);

FockState apply_rotation(const FockState& state, std::size_t mode, double phi);
FockState apply_kerr(const FockState& state, std::size_t mode, double kappa);
FockState apply_displacement(const FockState& state, std::size_t mode, cdouble alpha);
FockState apply_squeeze(const FockState& state, std::size_t mode, double r, double phi);
FockState apply_beamsplitter(const FockState& state, std::size_t mode_a, std::size_t mode_b,
                             double theta, double phi);
FockState apply_gate(const FockState& state, const GateParam& gate);

// Applies a prebuilt dense single-mode matrix / prebuilt beamsplitter blocks.
// These are the entry points the compiled-circuit machinery uses so gate
// matrices can be built once and applied to many states.
void apply_single_mode_matrix_inplace(FockState& state, std::size_t mode,
                                      std::span<const cdouble> u_colmajor);
void apply_diag_table_inplace(FockState& state, std::size_t mode,
                              std::span<const cdouble> table);
void apply_beamsplitter_blocks_inplace(FockState& state, std::size_t mode_a, std::size_t mode_b,
                                       const BeamsplitterBlocks& blocks);

/// <psi|x_mode|psi> / <psi|psi> with x = a + a^dag. Throws std::domain_error
/// on a zero-norm state.
double expectation_x(const FockState& state, std::size_t mode);

}  // namespace cvq
