#pragma once

// CV neural-network layers: each layer is interferometer U1, per-mode squeeze,
// interferometer U2, per-mode displacement, per-mode Kerr activation, applied
// in that order. The interferometer is a rectangular mesh of beamsplitters on
// neighbouring mode pairs (0,1),(1,2),...,(N-2,N-1),(0,1),... followed by one
// rotation per mode, for N(N-1)+N real parameters; a full layer carries
// 2(N(N-1)+N) + 5N parameters (33 for N = 3).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cvq/fock_state.hpp"
#include "cvq/gates.hpp"

namespace cvq {

struct InterferometerParams {
    std::vector<double> bs_thetas;        // length N(N-1)/2
    std::vector<double> bs_phis;          // length N(N-1)/2
    std::vector<double> final_rotations;  // length N

    static InterferometerParams zeros(std::size_t num_modes);
    void validate(std::size_t num_modes) const;
};

struct LayerParams {
    InterferometerParams u1;
    std::vector<double> squeeze_r;    // trainable, may be negative; applied as
    std::vector<double> squeeze_phi;  // (|r|, phi+pi) when r < 0
    InterferometerParams u2;
    std::vector<double> disp_re;
    std::vector<double> disp_im;
    std::vector<double> kerr_kappa;

    static LayerParams zeros(std::size_t num_modes);
    void validate(std::size_t num_modes) const;
};

/// Mode pair of the k-th beamsplitter in the rectangular mesh.
std::pair<std::size_t, std::size_t> mesh_pair(std::size_t num_modes, std::size_t k);

std::size_t interferometer_param_count(std::size_t num_modes);
std::size_t layer_param_count(std::size_t num_modes);
/// Total trainable parameters of a depth-d_g stack: d_g * (2(N(N-1)+N) + 5N).
std::size_t param_count(std::size_t num_modes, std::size_t depth);

void apply_interferometer_inplace(FockState& state, const InterferometerParams& p);
FockState apply_interferometer(const FockState& state, const InterferometerParams& p);

void apply_layer_inplace(FockState& state, const LayerParams& p);
FockState apply_layer(const FockState& state, const LayerParams& p);

// ---- flat parameter vector ----------------------------------------------------

/// Layer parameters flattened for optimizers and finite differences.
/// Per-layer order: u1.bs_thetas, u1.bs_phis, u1.final_rotations, squeeze_r,
/// squeeze_phi, u2.bs_thetas, u2.bs_phis, u2.final_rotations, disp_re,
/// disp_im, kerr_kappa; layers are concatenated in depth order.
struct ParamVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

inline constexpr int kParamLayoutVersion = 1;

ParamVector pack_params(const std::vector<LayerParams>& layers);
std::vector<LayerParams> unpack_params(const ParamVector& params, std::size_t num_modes,
                                       std::size_t depth);
/// Unpacks a single layer from its slice of the flat vector.
LayerParams unpack_layer(std::span<const double> slice, std::size_t num_modes);

/// Random initialization: every angle (beamsplitter theta/phi, rotations,
/// squeeze phase, displacement phase) ~ U(-pi, pi); squeeze_r, the displacement
/// magnitude and kerr_kappa ~ N(0, scale). Deterministic for a given seed.
ParamVector init_params(std::size_t num_modes, std::size_t depth, std::uint64_t seed,
                        double scale = 0.05);

/// {"N":..,"d_g":..,"layout_version":..,"values":[...]}
std::string params_to_json(const ParamVector& params, std::size_t num_modes, std::size_t depth);
ParamVector params_from_json(const std::string& text, std::size_t* num_modes_out = nullptr,
                             std::size_t* depth_out = nullptr);

// ---- compiled form --------------------------------------------------------------

/// A layer with every gate matrix prebuilt for a fixed cutoff, so one layer
/// can be applied to many states without rebuilding matrices.
class CompiledLayer {
public:
    CompiledLayer(const LayerParams& p, std::size_t num_modes, std::size_t cutoff);
    void apply(FockState& state) const;
    std::size_t num_modes() const { return num_modes_; }
    std::size_t cutoff() const { return cutoff_; }

private:
    struct DiagOp {
        std::size_t mode;
        std::vector<cdouble> table;
    };
    struct DenseOp {
        std::size_t mode;
        std::vector<cdouble> u;
    };
    struct BsOp {
        std::size_t mode_a;
        std::size_t mode_b;
        BeamsplitterBlocks blocks;
    };
    using Op = std::variant<DiagOp, DenseOp, BsOp>;

    std::size_t num_modes_;
    std::size_t cutoff_;
    std::vector<Op> ops_;
};

/// A depth-d_g stack of compiled layers built from a flat parameter vector.
class CompiledStack {
public:
    CompiledStack(const ParamVector& params, std::size_t num_modes, std::size_t depth,
                  std::size_t cutoff);
    void apply(FockState& state) const;
    /// Applies layers [first_layer, depth) only.
    void apply_from(FockState& state, std::size_t first_layer) const;
    std::size_t depth() const { return layers_.size(); }
    const CompiledLayer& layer(std::size_t i) const { return layers_[i]; }

private:
    std::vector<CompiledLayer> layers_;
};

}  // namespace cvq
