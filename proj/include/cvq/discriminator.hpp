#pragma once

// Small dense classifier used as the hybrid model's discriminator:
// 3 -> 16 -> 8 -> 1 with leaky-rectifier (slope 0.2) hidden activations and a
// logistic sigmoid output. Parameters live in one flat vector so the Adam
// update and finite-difference checks can treat it like any other model.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cvq {

double sigmoid(double x);

class ClassicalDiscriminator {
public:
    static constexpr std::array<std::size_t, 4> kLayerSizes{3, 16, 8, 1};
    static constexpr double kLeakySlope = 0.2;

    /// Xavier-uniform weights, zero biases, deterministic per seed.
    explicit ClassicalDiscriminator(std::uint64_t seed);
    /// All-zero parameters (outputs 0.5 for every input).
    ClassicalDiscriminator();

    static std::size_t parameter_count();

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Forward pass; returns the predicted probability in (0, 1).
    double forward(std::span<const double> input) const;

    /// Intermediate activations for one input, reused by backward().
    struct Trace {
        std::vector<double> input;
        std::vector<std::vector<double>> pre;   // pre-activations per layer
        std::vector<std::vector<double>> post;  // post-activations per layer
        double prob = 0.0;
    };
    double forward(std::span<const double> input, Trace& trace) const;

    /// Accumulates d(prob)/d(theta) * dprob into grad (flat, parameter_count()
    /// long) for the traced input.
    void backward(const Trace& trace, double dprob, std::span<double> grad) const;

private:
    std::vector<double> params_;

    struct LayerView {
        std::size_t w_offset, b_offset, rows, cols;
    };
    static LayerView layer_view(std::size_t layer);
};

}  // namespace cvq
