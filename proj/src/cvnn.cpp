#include "cvq/cvnn.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cvq/rng.hpp"

namespace cvq {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + " contains a non-finite value");
        }
    }
}

void append(std::vector<double>& out, const std::vector<double>& v) {
    out.insert(out.end(), v.begin(), v.end());
}

std::vector<double> take(std::span<const double>& s, std::size_t count) {
    std::vector<double> v(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(count));
    s = s.subspan(count);
    return v;
}

}  // namespace

InterferometerParams InterferometerParams::zeros(std::size_t num_modes) {
    const std::size_t pairs = num_modes * (num_modes - 1) / 2;
    return InterferometerParams{std::vector<double>(pairs, 0.0), std::vector<double>(pairs, 0.0),
                                std::vector<double>(num_modes, 0.0)};
}

void InterferometerParams::validate(std::size_t num_modes) const {
    const std::size_t pairs = num_modes * (num_modes - 1) / 2;
    if (bs_thetas.size() != pairs || bs_phis.size() != pairs ||
        final_rotations.size() != num_modes) {
        throw std::invalid_argument("interferometer parameters sized for a different mode count");
    }
    check_finite(bs_thetas, "bs_thetas");
    check_finite(bs_phis, "bs_phis");
    check_finite(final_rotations, "final_rotations");
}

LayerParams LayerParams::zeros(std::size_t num_modes) {
    LayerParams p;
    p.u1 = InterferometerParams::zeros(num_modes);
    p.squeeze_r.assign(num_modes, 0.0);
    p.squeeze_phi.assign(num_modes, 0.0);
    p.u2 = InterferometerParams::zeros(num_modes);
    p.disp_re.assign(num_modes, 0.0);
    p.disp_im.assign(num_modes, 0.0);
    p.kerr_kappa.assign(num_modes, 0.0);
    return p;
}

void LayerParams::validate(std::size_t num_modes) const {
    u1.validate(num_modes);
    u2.validate(num_modes);
    if (squeeze_r.size() != num_modes || squeeze_phi.size() != num_modes ||
        disp_re.size() != num_modes || disp_im.size() != num_modes ||
        kerr_kappa.size() != num_modes) {
        throw std::invalid_argument("layer parameters sized for a different mode count");
    }
    check_finite(squeeze_r, "squeeze_r");
    check_finite(squeeze_phi, "squeeze_phi");
    check_finite(disp_re, "disp_re");
    check_finite(disp_im, "disp_im");
    check_finite(kerr_kappa, "kerr_kappa");
}

std::pair<std::size_t, std::size_t> mesh_pair(std::size_t num_modes, std::size_t k) {
    if (num_modes < 2) throw std::invalid_argument("mesh_pair: need at least two modes");
    const std::size_t a = k % (num_modes - 1);
    return {a, a + 1};
}

std::size_t interferometer_param_count(std::size_t num_modes) {
    return num_modes * (num_modes - 1) + num_modes;
}

std::size_t layer_param_count(std::size_t num_modes) {
    return 2 * interferometer_param_count(num_modes) + 5 * num_modes;
}

std::size_t param_count(std::size_t num_modes, std::size_t depth) {
    return depth * layer_param_count(num_modes);
}

void apply_interferometer_inplace(FockState& state, const InterferometerParams& p) {
    const std::size_t n = state.num_modes();
    p.validate(n);
    for (std::size_t k = 0; k < p.bs_thetas.size(); ++k) {
        const auto [a, b] = mesh_pair(n, k);
        apply_beamsplitter_inplace(state, a, b, p.bs_thetas[k], p.bs_phis[k]);
    }
    for (std::size_t m = 0; m < n; ++m) {
        apply_rotation_inplace(state, m, p.final_rotations[m]);
    }
}

FockState apply_interferometer(const FockState& state, const InterferometerParams& p) {
    FockState out = state;
    apply_interferometer_inplace(out, p);
    return out;
}

void apply_layer_inplace(FockState& state, const LayerParams& p) {
    CompiledLayer(p, state.num_modes(), state.cutoff()).apply(state);
}

FockState apply_layer(const FockState& state, const LayerParams& p) {
    FockState out = state;
    apply_layer_inplace(out, p);
    return out;
}

ParamVector pack_params(const std::vector<LayerParams>& layers) {
    ParamVector out;
    for (const auto& p : layers) {
        append(out.values, p.u1.bs_thetas);
        append(out.values, p.u1.bs_phis);
        append(out.values, p.u1.final_rotations);
        append(out.values, p.squeeze_r);
        append(out.values, p.squeeze_phi);
        append(out.values, p.u2.bs_thetas);
        append(out.values, p.u2.bs_phis);
        append(out.values, p.u2.final_rotations);
        append(out.values, p.disp_re);
        append(out.values, p.disp_im);
        append(out.values, p.kerr_kappa);
    }
    return out;
}

LayerParams unpack_layer(std::span<const double> slice, std::size_t num_modes) {
    if (slice.size() != layer_param_count(num_modes)) {
        throw std::invalid_argument("unpack_layer: slice length mismatch");
    }
    const std::size_t pairs = num_modes * (num_modes - 1) / 2;
    LayerParams p;
    p.u1.bs_thetas = take(slice, pairs);
    p.u1.bs_phis = take(slice, pairs);
    p.u1.final_rotations = take(slice, num_modes);
    p.squeeze_r = take(slice, num_modes);
    p.squeeze_phi = take(slice, num_modes);
    p.u2.bs_thetas = take(slice, pairs);
    p.u2.bs_phis = take(slice, pairs);
    p.u2.final_rotations = take(slice, num_modes);
    p.disp_re = take(slice, num_modes);
    p.disp_im = take(slice, num_modes);
    p.kerr_kappa = take(slice, num_modes);
    return p;
}

std::vector<LayerParams> unpack_params(const ParamVector& params, std::size_t num_modes,
                                       std::size_t depth) {
    const std::size_t per_layer = layer_param_count(num_modes);
    if (params.values.size() != per_layer * depth) {
        throw std::invalid_argument("unpack_params: expected " +
                                    std::to_string(per_layer * depth) + " values, got " +
                                    std::to_string(params.values.size()));
    }
    std::vector<LayerParams> layers;
    layers.reserve(depth);
    std::span<const double> s(params.values);
    for (std::size_t l = 0; l < depth; ++l) {
        layers.push_back(unpack_layer(s.subspan(l * per_layer, per_layer), num_modes));
    }
    return layers;
}

ParamVector init_params(std::size_t num_modes, std::size_t depth, std::uint64_t seed,
                        double scale) {
    if (scale < 0.0) throw std::invalid_argument("init_params: scale must be >= 0");
    Rng rng(seed);
    auto angle = [&rng] { return rng.uniform(-kPi, kPi); };

    std::vector<LayerParams> layers;
    layers.reserve(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        LayerParams p = LayerParams::zeros(num_modes);
        const std::size_t pairs = num_modes * (num_modes - 1) / 2;
        for (std::size_t k = 0; k < pairs; ++k) p.u1.bs_thetas[k] = angle();
        for (std::size_t k = 0; k < pairs; ++k) p.u1.bs_phis[k] = angle();
        for (std::size_t m = 0; m < num_modes; ++m) p.u1.final_rotations[m] = angle();
        for (std::size_t m = 0; m < num_modes; ++m) p.squeeze_r[m] = rng.normal(0.0, scale);
        for (std::size_t m = 0; m < num_modes; ++m) p.squeeze_phi[m] = angle();
        for (std::size_t k = 0; k < pairs; ++k) p.u2.bs_thetas[k] = angle();
        for (std::size_t k = 0; k < pairs; ++k) p.u2.bs_phis[k] = angle();
        for (std::size_t m = 0; m < num_modes; ++m) p.u2.final_rotations[m] = angle();
        for (std::size_t m = 0; m < num_modes; ++m) {
            const double mag = rng.normal(0.0, scale);
            const double ang = angle();
            p.disp_re[m] = mag * std::cos(ang);
            p.disp_im[m] = mag * std::sin(ang);
        }
        for (std::size_t m = 0; m < num_modes; ++m) p.kerr_kappa[m] = rng.normal(0.0, scale);
        layers.push_back(std::move(p));
    }
    return pack_params(layers);
}

std::string params_to_json(const ParamVector& params, std::size_t num_modes, std::size_t depth) {
    nlohmann::json j;
    j["N"] = num_modes;
    j["d_g"] = depth;
    j["layout_version"] = kParamLayoutVersion;
    j["values"] = params.values;
    return j.dump();
}

ParamVector params_from_json(const std::string& text, std::size_t* num_modes_out,
                             std::size_t* depth_out) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("layout_version").get<int>() != kParamLayoutVersion) {
        throw std::invalid_argument("params_from_json: unknown layout_version");
    }
    const std::size_t n = j.at("N").get<std::size_t>();
    const std::size_t d = j.at("d_g").get<std::size_t>();
    ParamVector p;
    p.values = j.at("values").get<std::vector<double>>();
    if (p.values.size() != param_count(n, d)) {
        throw std::invalid_argument("params_from_json: value count does not match N and d_g");
    }
    if (num_modes_out) *num_modes_out = n;
    if (depth_out) *depth_out = d;
    return p;
}

// ---- compiled form ------------------------------------------------------------

CompiledLayer::CompiledLayer(const LayerParams& p, std::size_t num_modes, std::size_t cutoff)
    : num_modes_(num_modes), cutoff_(cutoff) {
    p.validate(num_modes);

    auto add_interferometer = [this, num_modes, cutoff](const InterferometerParams& ip) {
        for (std::size_t k = 0; k < ip.bs_thetas.size(); ++k) {
            const auto [a, b] = mesh_pair(num_modes, k);
            ops_.push_back(BsOp{a, b, beamsplitter_blocks(cutoff, ip.bs_thetas[k], ip.bs_phis[k])});
        }
        for (std::size_t m = 0; m < num_modes; ++m) {
            ops_.push_back(DiagOp{m, rotation_phase_table(cutoff, ip.final_rotations[m])});
        }
    };

    add_interferometer(p.u1);
    for (std::size_t m = 0; m < num_modes; ++m) {
        double r = p.squeeze_r[m];
        double phi = p.squeeze_phi[m];
        if (r < 0.0) {  // S(-r, phi) = S(r, phi + pi)
            r = -r;
            phi += kPi;
        }
        ops_.push_back(DenseOp{m, squeeze_matrix(cutoff, r, phi)});
    }
    add_interferometer(p.u2);
    for (std::size_t m = 0; m < num_modes; ++m) {
        ops_.push_back(DenseOp{m, displacement_matrix(cutoff, {p.disp_re[m], p.disp_im[m]})});
    }
    for (std::size_t m = 0; m < num_modes; ++m) {
        ops_.push_back(DiagOp{m, kerr_phase_table(cutoff, p.kerr_kappa[m])});
    }
}

void CompiledLayer::apply(FockState& state) const {
    if (state.num_modes() != num_modes_ || state.cutoff() != cutoff_) {
        throw std::invalid_argument("CompiledLayer: state shape mismatch");
    }
    for (const Op& op : ops_) {
        std::visit(
            [&state](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, DiagOp>) {
                    apply_diag_table_inplace(state, o.mode, o.table);
                } else if constexpr (std::is_same_v<T, DenseOp>) {
                    apply_single_mode_matrix_inplace(state, o.mode, o.u);
                } else {
                    apply_beamsplitter_blocks_inplace(state, o.mode_a, o.mode_b, o.blocks);
                }
            },
            op);
    }
}

CompiledStack::CompiledStack(const ParamVector& params, std::size_t num_modes, std::size_t depth,
                             std::size_t cutoff) {
    const auto layers = unpack_params(params, num_modes, depth);
    layers_.reserve(depth);
    for (const auto& p : layers) {
        layers_.emplace_back(p, num_modes, cutoff);
    }
}

void CompiledStack::apply(FockState& state) const { apply_from(state, 0); }

void CompiledStack::apply_from(FockState& state, std::size_t first_layer) const {
    for (std::size_t l = first_layer; l < layers_.size(); ++l) {
        layers_[l].apply(state);
    }
}

}  // namespace cvq
