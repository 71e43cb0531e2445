#pragma once

// The two qGAN prototypes and their training loop.
//
// Fully quantum: the generator's output state feeds the quantum discriminator
// directly (one state threaded end to end, no measurement in between); the
// label is sigmoid(<x>) of the last qumode after the discriminator layers.
// Hybrid: the generator is measured into an image (<x> per qumode) and a
// small classical network produces the label.
//
// Gradients for quantum parameters are central finite differences; the
// classical discriminator trains by backprop. Both use Adam. Every run is
// deterministic under its seed, including the threaded gradient evaluation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvq/cvnn.hpp"
#include "cvq/discriminator.hpp"
#include "cvq/fock_state.hpp"

namespace cvq {

enum class Architecture { FullyQuantum, Hybrid };

const char* architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

struct GanConfig {
    Architecture architecture = Architecture::Hybrid;
    std::size_t num_modes = 3;
    std::size_t cutoff = 8;
    std::size_t gen_depth = 5;
    std::size_t disc_depth = 0;   // 0 = same as gen_depth (fully quantum only)
    std::size_t latent_dim = 1;
    std::size_t latent_mode = 0;  // first qumode receiving a noise displacement
    std::size_t measure_mode = std::size_t(-1);  // label qumode; default last
    std::size_t epochs = 200;
    std::size_t batch_size = 16;
    std::size_t disc_steps = 1;
    double lr_quantum = 0.01;
    double lr_classical = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double fd_step = 1e-3;
    double init_scale = 0.05;
    std::uint64_t rng_seed = 1;
    std::size_t probe_samples = 64;   // fixed latent probes for the mean image
    std::size_t final_samples = 256;  // sample set emitted at the end
    unsigned threads = 0;             // 0 = hardware concurrency

    std::size_t resolved_disc_depth() const { return disc_depth ? disc_depth : gen_depth; }
    std::size_t resolved_measure_mode() const {
        return measure_mode == std::size_t(-1) ? num_modes - 1 : measure_mode;
    }

    /// All validation failures, empty when the config is usable.
    std::vector<std::string> validate() const;
};

using ImageBatch = std::vector<std::vector<double>>;

// ---- losses -------------------------------------------------------------------

/// Clamps a label into [1e-7, 1 - 1e-7] before it meets a logarithm.
double clamp_label(double p);
/// -mean(log l_real) - mean(log(1 - l_fake))
double disc_loss(std::span<const double> real_labels, std::span<const double> fake_labels);
/// Non-saturating generator loss: -mean(log l_fake)
double gen_loss(std::span<const double> fake_labels);

// ---- optimizer ------------------------------------------------------------------

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// Standard Adam update with bias correction.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double lr, double beta1, double beta2, double eps = 1e-8);

// ---- finite-difference gradients -------------------------------------------------

/// Central differences (L(p + h e_k) - L(p - h e_k)) / 2h per coordinate.
/// loss_fn must be pure; coordinates are probed on `threads` threads.
/// Throws if any probe produces a non-finite loss (naming the coordinate).
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& loss_fn,
                                std::span<const double> params, double h, unsigned threads = 1);

/// Same derivative, specialized to a layer stack applied to a batch of input
/// states: forward states are cached per layer, so probing a coordinate in
/// layer l only re-runs layers l..depth-1. Bit-identical to fd_gradient over
/// the full forward pass.
std::vector<double> layered_fd_gradient(
    std::span<const double> stack_params, std::size_t num_modes, std::size_t depth,
    std::size_t cutoff, const std::vector<FockState>& inputs,
    const std::function<double(const std::vector<FockState>&)>& loss_of_outputs, double h,
    unsigned threads = 1);

// ---- generator / discriminator paths ----------------------------------------------

/// D(z_k) on qumodes latent_mode + k for k < latent_dim, vacuum elsewhere.
FockState prepare_latent_state(std::span<const double> z, const GanConfig& config);

/// prepare_latent_state followed by gen_depth CVNN layers; no measurement.
FockState generator_state(const ParamVector& params, std::span<const double> z,
                          const GanConfig& config);

/// <x> at every qumode.
std::vector<double> measure_image(const FockState& state);

/// Hybrid only: measure_image(generator_state(...)).
std::vector<double> generate_image(const ParamVector& params, std::span<const double> z,
                                   const GanConfig& config);

/// Real image encoded as prod_i D(x_i / 2)|0>, so <x> reproduces the pixels.
FockState encode_image_state(std::span<const double> image, const GanConfig& config);

/// Fully quantum only: disc_depth layers on the (unmeasured) input state,
/// then sigmoid(<x>) at the measure mode.
double quantum_discriminate(const FockState& gen_state, const ParamVector& disc_params,
                            const GanConfig& config);

double classical_discriminate(const ClassicalDiscriminator& disc,
                              std::span<const double> image);

/// Mean pairwise Euclidean distance; requires at least two samples.
double diversity(const ImageBatch& samples);

// ---- training ------------------------------------------------------------------------

struct TrainingRun {
    GanConfig config;
    // per-epoch series
    std::vector<double> gen_losses;
    std::vector<double> disc_losses;
    std::vector<double> diversities;
    std::vector<double> label_min;  // smallest label seen that epoch
    std::vector<double> label_max;
    ImageBatch mean_images;  // probe-set mean image per epoch
    // final artifacts
    ImageBatch final_samples;
    ParamVector final_gen_params;
    double wall_time_seconds = 0.0;
};

/// Non-finite loss during training: carries the epoch and a snapshot of the
/// generator parameters at the failure.
class TrainingError : public std::runtime_error {
public:
    TrainingError(std::size_t epoch, const std::string& what, ParamVector gen_params)
        : std::runtime_error("epoch " + std::to_string(epoch) + ": " + what),
          epoch(epoch),
          gen_params(std::move(gen_params)) {}
    std::size_t epoch;
    ParamVector gen_params;
};

/// Alternating training: per epoch, disc_steps discriminator updates on fresh
/// batches, then one generator update on a fresh fake batch. Deterministic
/// for a fixed config (including rng_seed and regardless of thread count).
TrainingRun train(const GanConfig& config, const ImageBatch& dataset);

}  // namespace cvq
