#include "cvq/discriminator.hpp"

#include <cmath>
#include <stdexcept>

#include "cvq/rng.hpp"

namespace cvq {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

ClassicalDiscriminator::LayerView ClassicalDiscriminator::layer_view(std::size_t layer) {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        offset += kLayerSizes[l + 1] * kLayerSizes[l] + kLayerSizes[l + 1];
    }
    return LayerView{offset, offset + kLayerSizes[layer + 1] * kLayerSizes[layer],
                     kLayerSizes[layer + 1], kLayerSizes[layer]};
}

std::size_t ClassicalDiscriminator::parameter_count() {
    std::size_t count = 0;
    for (std::size_t l = 0; l + 1 < kLayerSizes.size(); ++l) {
        count += kLayerSizes[l + 1] * kLayerSizes[l] + kLayerSizes[l + 1];
    }
    return count;
}

ClassicalDiscriminator::ClassicalDiscriminator() : params_(parameter_count(), 0.0) {}

ClassicalDiscriminator::ClassicalDiscriminator(std::uint64_t seed)
    : params_(parameter_count(), 0.0) {
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < kLayerSizes.size(); ++l) {
        const auto view = layer_view(l);
        const double bound =
            std::sqrt(6.0 / static_cast<double>(kLayerSizes[l] + kLayerSizes[l + 1]));
        for (std::size_t i = 0; i < view.rows * view.cols; ++i) {
            params_[view.w_offset + i] = rng.uniform(-bound, bound);
        }
        // biases stay zero
    }
}

double ClassicalDiscriminator::forward(std::span<const double> input) const {
    Trace trace;
    return forward(input, trace);
}

double ClassicalDiscriminator::forward(std::span<const double> input, Trace& trace) const {
    if (input.size() != kLayerSizes[0]) {
        throw std::invalid_argument("discriminator input must have length " +
                                    std::to_string(kLayerSizes[0]));
    }
    const std::size_t layers = kLayerSizes.size() - 1;
    trace.input.assign(input.begin(), input.end());
    trace.pre.assign(layers, {});
    trace.post.assign(layers, {});

    std::vector<double> act(input.begin(), input.end());
    for (std::size_t l = 0; l < layers; ++l) {
        const auto view = layer_view(l);
        std::vector<double> z(view.rows, 0.0);
        for (std::size_t r = 0; r < view.rows; ++r) {
            double acc = params_[view.b_offset + r];
            const double* w = params_.data() + view.w_offset + r * view.cols;
            for (std::size_t c = 0; c < view.cols; ++c) {
                acc += w[c] * act[c];
            }
            z[r] = acc;
        }
        trace.pre[l] = z;
        if (l + 1 < layers) {
            for (double& v : z) {
                if (v < 0.0) v *= kLeakySlope;
            }
        } else {
            z[0] = sigmoid(z[0]);
        }
        trace.post[l] = z;
        act = std::move(z);
    }
    trace.prob = act[0];
    return trace.prob;
}

void ClassicalDiscriminator::backward(const Trace& trace, double dprob,
                                      std::span<double> grad) const {
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("gradient buffer size mismatch");
    }
    const std::size_t layers = kLayerSizes.size() - 1;

    // output layer: d(prob)/dz = p (1 - p)
    const double p = trace.prob;
    std::vector<double> delta{dprob * p * (1.0 - p)};

    for (std::size_t l = layers; l-- > 0;) {
        const auto view = layer_view(l);
        const std::vector<double>& below = (l == 0) ? trace.input : trace.post[l - 1];
        for (std::size_t r = 0; r < view.rows; ++r) {
            grad[view.b_offset + r] += delta[r];
            double* gw = grad.data() + view.w_offset + r * view.cols;
            for (std::size_t c = 0; c < view.cols; ++c) {
                gw[c] += delta[r] * below[c];
            }
        }
        if (l == 0) break;
        std::vector<double> next(view.cols, 0.0);
        for (std::size_t c = 0; c < view.cols; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < view.rows; ++r) {
                acc += params_[view.w_offset + r * view.cols + c] * delta[r];
            }
            // through the leaky rectifier of layer l-1
            const double slope = trace.pre[l - 1][c] < 0.0 ? kLeakySlope : 1.0;
            next[c] = acc * slope;
        }
        delta = std::move(next);
    }
}

}  // namespace cvq
