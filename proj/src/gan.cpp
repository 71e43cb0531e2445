#include "cvq/gan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "cvq/gates.hpp"
#include "cvq/rng.hpp"

namespace cvq {

namespace {

constexpr double kLabelClamp = 1e-7;

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Static split of [0, total) across workers; exceptions propagate to the caller.
void parallel_chunks(std::size_t total, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    threads = std::max(1u, threads);
    if (threads == 1 || total <= 1) {
        body(0, total);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(total, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                if (begin < end) body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

const char* architecture_name(Architecture a) {
    return a == Architecture::FullyQuantum ? "fully-quantum" : "hybrid";
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "fully-quantum" || name == "fully_quantum" || name == "quantum") {
        return Architecture::FullyQuantum;
    }
    if (name == "hybrid") return Architecture::Hybrid;
    throw std::invalid_argument("unknown architecture: " + name);
}

std::vector<std::string> GanConfig::validate() const {
    std::vector<std::string> errors;
    auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

    if (num_modes < 1) fail("num_modes must be >= 1");
    if (cutoff < 2) fail("cutoff must be >= 2");
    if (gen_depth < 1) fail("gen_depth must be >= 1");
    if (latent_dim < 1 || latent_dim > num_modes) fail("latent_dim must be in 1..num_modes");
    if (latent_mode + latent_dim > num_modes) {
        fail("latent_mode + latent_dim must not exceed num_modes");
    }
    if (resolved_measure_mode() >= num_modes) fail("measure_mode out of range");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (disc_steps < 1) fail("disc_steps must be >= 1");
    if (!(lr_quantum > 0.0)) fail("lr_quantum must be positive");
    if (!(lr_classical > 0.0)) fail("lr_classical must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must be in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must be in [0, 1)");
    if (!(fd_step > 0.0 && fd_step < 0.1)) fail("fd_step must be in (0, 0.1)");
    if (!(init_scale >= 0.0)) fail("init_scale must be >= 0");
    if (probe_samples < 2) fail("probe_samples must be >= 2");
    if (final_samples < 1) fail("final_samples must be >= 1");
    if (num_modes >= 1 && cutoff >= 2) {
        const auto len = checked_pow(cutoff, num_modes);
        if (!len || *len > kDefaultAmplitudeBudget) {
            fail("cutoff^num_modes exceeds the amplitude budget");
        }
    }
    return errors;
}

// ---- losses ---------------------------------------------------------------------

double clamp_label(double p) { return std::clamp(p, kLabelClamp, 1.0 - kLabelClamp); }

double disc_loss(std::span<const double> real_labels, std::span<const double> fake_labels) {
    if (real_labels.empty() || fake_labels.empty()) {
        throw std::invalid_argument("disc_loss: empty batch");
    }
    double acc = 0.0;
    for (double l : real_labels) acc -= std::log(clamp_label(l));
    double loss = acc / static_cast<double>(real_labels.size());
    acc = 0.0;
    for (double l : fake_labels) acc -= std::log(1.0 - clamp_label(l));
    return loss + acc / static_cast<double>(fake_labels.size());
}

double gen_loss(std::span<const double> fake_labels) {
    if (fake_labels.empty()) throw std::invalid_argument("gen_loss: empty batch");
    double acc = 0.0;
    for (double l : fake_labels) acc -= std::log(clamp_label(l));
    return acc / static_cast<double>(fake_labels.size());
}

// ---- optimizer -------------------------------------------------------------------

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double lr, double beta1, double beta2, double eps) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

// ---- finite differences -------------------------------------------------------------

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& loss_fn,
                                std::span<const double> params, double h, unsigned threads) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
    std::vector<double> grad(params.size(), 0.0);
    parallel_chunks(params.size(), resolve_threads(threads), [&](std::size_t k0, std::size_t k1) {
        std::vector<double> probe(params.begin(), params.end());
        for (std::size_t k = k0; k < k1; ++k) {
            const double saved = probe[k];
            probe[k] = saved + h;
            const double up = loss_fn(probe);
            probe[k] = saved - h;
            const double down = loss_fn(probe);
            probe[k] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw std::runtime_error("fd_gradient: non-finite loss at coordinate " +
                                         std::to_string(k));
            }
            grad[k] = (up - down) / (2.0 * h);
        }
    });
    return grad;
}

std::vector<double> layered_fd_gradient(
    std::span<const double> stack_params, std::size_t num_modes, std::size_t depth,
    std::size_t cutoff, const std::vector<FockState>& inputs,
    const std::function<double(const std::vector<FockState>&)>& loss_of_outputs, double h,
    unsigned threads) {
    if (!(h > 0.0)) throw std::invalid_argument("layered_fd_gradient: h must be positive");
    const std::size_t per_layer = layer_param_count(num_modes);
    if (stack_params.size() != per_layer * depth) {
        throw std::invalid_argument("layered_fd_gradient: parameter count mismatch");
    }
    if (inputs.empty()) throw std::invalid_argument("layered_fd_gradient: empty input batch");

    // base compiled layers and the per-layer forward cache
    std::vector<CompiledLayer> base;
    base.reserve(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        base.emplace_back(unpack_layer(stack_params.subspan(l * per_layer, per_layer), num_modes),
                          num_modes, cutoff);
    }
    std::vector<std::vector<FockState>> cache;
    cache.reserve(depth);
    cache.push_back(inputs);
    for (std::size_t l = 0; l + 1 < depth; ++l) {
        std::vector<FockState> next = cache.back();
        for (auto& s : next) base[l].apply(s);
        cache.push_back(std::move(next));
    }

    std::vector<double> grad(stack_params.size(), 0.0);
    parallel_chunks(grad.size(), resolve_threads(threads), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            const std::size_t layer = k / per_layer;
            const std::size_t within = k % per_layer;
            double values[2];
            for (int side = 0; side < 2; ++side) {
                std::vector<double> slice(
                    stack_params.begin() + static_cast<std::ptrdiff_t>(layer * per_layer),
                    stack_params.begin() + static_cast<std::ptrdiff_t>((layer + 1) * per_layer));
                slice[within] += side == 0 ? h : -h;
                const CompiledLayer probe(unpack_layer(slice, num_modes), num_modes, cutoff);
                std::vector<FockState> states = cache[layer];
                for (auto& s : states) probe.apply(s);
                for (std::size_t l2 = layer + 1; l2 < depth; ++l2) {
                    for (auto& s : states) base[l2].apply(s);
                }
                values[side] = loss_of_outputs(states);
                if (!std::isfinite(values[side])) {
                    throw std::runtime_error(
                        "layered_fd_gradient: non-finite loss at coordinate " + std::to_string(k));
                }
            }
            grad[k] = (values[0] - values[1]) / (2.0 * h);
        }
    });
    return grad;
}

// ---- circuits -----------------------------------------------------------------------

FockState prepare_latent_state(std::span<const double> z, const GanConfig& config) {
    if (z.size() != config.latent_dim) {
        throw std::invalid_argument("prepare_latent_state: latent_dim mismatch");
    }
    FockState state = vacuum_state(config.num_modes, config.cutoff);
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!std::isfinite(z[k])) {
            throw std::invalid_argument("prepare_latent_state: non-finite latent value");
        }
        apply_displacement_inplace(state, config.latent_mode + k, {z[k], 0.0});
    }
    return state;
}

FockState generator_state(const ParamVector& params, std::span<const double> z,
                          const GanConfig& config) {
    const CompiledStack stack(params, config.num_modes, config.gen_depth, config.cutoff);
    FockState state = prepare_latent_state(z, config);
    stack.apply(state);
    return state;
}

std::vector<double> measure_image(const FockState& state) {
    std::vector<double> image(state.num_modes());
    for (std::size_t m = 0; m < state.num_modes(); ++m) {
        image[m] = expectation_x(state, m);
    }
    return image;
}

std::vector<double> generate_image(const ParamVector& params, std::span<const double> z,
                                   const GanConfig& config) {
    if (config.architecture != Architecture::Hybrid) {
        throw std::logic_error("generate_image is only defined for the hybrid architecture");
    }
    return measure_image(generator_state(params, z, config));
}

FockState encode_image_state(std::span<const double> image, const GanConfig& config) {
    if (image.size() != config.num_modes) {
        throw std::invalid_argument("encode_image_state: image length mismatch");
    }
    FockState state = vacuum_state(config.num_modes, config.cutoff);
    for (std::size_t m = 0; m < image.size(); ++m) {
        apply_displacement_inplace(state, m, {image[m] / 2.0, 0.0});
    }
    return state;
}

double quantum_discriminate(const FockState& gen_state, const ParamVector& disc_params,
                            const GanConfig& config) {
    if (config.architecture != Architecture::FullyQuantum) {
        throw std::logic_error("quantum_discriminate requires the fully quantum architecture");
    }
    const CompiledStack stack(disc_params, config.num_modes, config.resolved_disc_depth(),
                              config.cutoff);
    FockState state = gen_state;
    stack.apply(state);
    return sigmoid(expectation_x(state, config.resolved_measure_mode()));
}

double classical_discriminate(const ClassicalDiscriminator& disc,
                              std::span<const double> image) {
    return disc.forward(image);
}

double diversity(const ImageBatch& samples) {
    if (samples.size() < 2) throw std::invalid_argument("diversity: need at least two samples");
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t p = 0; p < samples[i].size(); ++p) {
                const double d = samples[i][p] - samples[j][p];
                d2 += d * d;
            }
            acc += std::sqrt(d2);
            ++pairs;
        }
    }
    return acc / static_cast<double>(pairs);
}

// ---- training --------------------------------------------------------------------------

namespace {

struct LabelRange {
    double lo = 1.0;
    double hi = 0.0;
    void observe(double l) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    void observe(std::span<const double> ls) {
        for (double l : ls) observe(l);
    }
};

std::vector<std::vector<double>> draw_latents(Rng& rng, std::size_t count, std::size_t dim) {
    std::vector<std::vector<double>> zs(count, std::vector<double>(dim));
    for (auto& z : zs) {
        for (double& v : z) v = rng.normal();
    }
    return zs;
}

std::vector<FockState> latent_states(const std::vector<std::vector<double>>& zs,
                                     const GanConfig& config) {
    std::vector<FockState> states;
    states.reserve(zs.size());
    for (const auto& z : zs) states.push_back(prepare_latent_state(z, config));
    return states;
}

/// sigmoid(<x>) labels of already-discriminated states (fully quantum path).
std::vector<double> quantum_labels(const std::vector<FockState>& disc_outputs,
                                   std::size_t measure_mode) {
    std::vector<double> labels(disc_outputs.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = sigmoid(expectation_x(disc_outputs[i], measure_mode));
    }
    return labels;
}

}  // namespace

TrainingRun train(const GanConfig& config, const ImageBatch& dataset) {
    const auto t_start = std::chrono::steady_clock::now();
    {
        const auto errors = config.validate();
        if (!errors.empty()) {
            std::string what = "invalid GanConfig:";
            for (const auto& e : errors) what += " " + e + ";";
            throw std::invalid_argument(what);
        }
    }
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    for (const auto& img : dataset) {
        if (img.size() != config.num_modes) {
            throw std::invalid_argument("train: dataset images must have length num_modes");
        }
    }

    const bool hybrid = config.architecture == Architecture::Hybrid;
    const std::size_t n_modes = config.num_modes;
    const std::size_t measure_mode = config.resolved_measure_mode();
    const unsigned threads = resolve_threads(config.threads);
    const std::size_t batch = config.batch_size;

    // independent deterministic streams
    ParamVector gen_params = init_params(n_modes, config.gen_depth,
                                         derive_seed(config.rng_seed, 1), config.init_scale);
    ParamVector qdisc_params;
    ClassicalDiscriminator cdisc;
    if (hybrid) {
        cdisc = ClassicalDiscriminator(derive_seed(config.rng_seed, 2));
    } else {
        qdisc_params = init_params(n_modes, config.resolved_disc_depth(),
                                   derive_seed(config.rng_seed, 2), config.init_scale);
    }
    Rng probe_rng(derive_seed(config.rng_seed, 3));
    Rng epoch_rng(derive_seed(config.rng_seed, 4));
    Rng final_rng(derive_seed(config.rng_seed, 5));

    const auto probe_zs = draw_latents(probe_rng, config.probe_samples, config.latent_dim);
    const auto probe_inputs = latent_states(probe_zs, config);

    AdamState gen_adam(gen_params.size());
    AdamState disc_adam(hybrid ? ClassicalDiscriminator::parameter_count()
                               : qdisc_params.size());

    TrainingRun run;
    run.config = config;

    auto sample_real_batch = [&](Rng& rng) {
        ImageBatch imgs;
        imgs.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            imgs.push_back(dataset[rng.integer(dataset.size())]);
        }
        return imgs;
    };

    auto images_of_states = [](const std::vector<FockState>& states) {
        ImageBatch imgs;
        imgs.reserve(states.size());
        for (const auto& s : states) imgs.push_back(measure_image(s));
        return imgs;
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        try {
            LabelRange label_range;
            double disc_loss_value = 0.0;

            // -- discriminator update(s) --
            for (std::size_t step = 0; step < config.disc_steps; ++step) {
                const auto real_imgs = sample_real_batch(epoch_rng);
                const auto fake_zs = draw_latents(epoch_rng, batch, config.latent_dim);
                auto fake_inputs = latent_states(fake_zs, config);
                const CompiledStack gen_stack(gen_params, n_modes, config.gen_depth,
                                              config.cutoff);
                for (auto& s : fake_inputs) gen_stack.apply(s);

                if (hybrid) {
                    const auto fake_imgs = images_of_states(fake_inputs);

                    std::vector<double> grad(cdisc.parameters().size(), 0.0);
                    std::vector<double> real_labels(batch), fake_labels(batch);
                    const double inv_b = 1.0 / static_cast<double>(batch);
                    for (std::size_t i = 0; i < batch; ++i) {
                        ClassicalDiscriminator::Trace trace;
                        const double l = cdisc.forward(real_imgs[i], trace);
                        real_labels[i] = l;
                        const double lc = clamp_label(l);
                        // d/dl of -log(clamp(l))/B; zero outside the clamp window
                        const double dl = (l > kLabelClamp && l < 1.0 - kLabelClamp)
                                              ? -inv_b / lc
                                              : 0.0;
                        cdisc.backward(trace, dl, grad);
                    }
                    for (std::size_t i = 0; i < batch; ++i) {
                        ClassicalDiscriminator::Trace trace;
                        const double l = cdisc.forward(fake_imgs[i], trace);
                        fake_labels[i] = l;
                        const double lc = clamp_label(l);
                        const double dl = (l > kLabelClamp && l < 1.0 - kLabelClamp)
                                              ? inv_b / (1.0 - lc)
                                              : 0.0;
                        cdisc.backward(trace, dl, grad);
                    }
                    disc_loss_value = disc_loss(real_labels, fake_labels);
                    label_range.observe(real_labels);
                    label_range.observe(fake_labels);
                    if (!std::isfinite(disc_loss_value)) {
                        throw std::runtime_error("non-finite discriminator loss");
                    }
                    adam_step(disc_adam, cdisc.parameters(), grad, config.lr_classical,
                              config.adam_beta1, config.adam_beta2);
                } else {
                    // fully quantum: discriminator consumes states directly
                    std::vector<FockState> disc_inputs;
                    disc_inputs.reserve(2 * batch);
                    for (const auto& img : real_imgs) {
                        disc_inputs.push_back(encode_image_state(img, config));
                    }
                    for (auto& s : fake_inputs) disc_inputs.push_back(std::move(s));

                    auto loss_of = [&](const std::vector<FockState>& outputs) {
                        const auto labels = quantum_labels(outputs, measure_mode);
                        const std::span<const double> all(labels);
                        return disc_loss(all.first(batch), all.subspan(batch));
                    };
                    const auto grad = layered_fd_gradient(
                        qdisc_params.values, n_modes, config.resolved_disc_depth(),
                        config.cutoff, disc_inputs, loss_of, config.fd_step, threads);

                    // recorded (pre-update) loss and label range
                    {
                        const CompiledStack disc_stack(qdisc_params, n_modes,
                                                       config.resolved_disc_depth(),
                                                       config.cutoff);
                        std::vector<FockState> outputs = disc_inputs;
                        for (auto& s : outputs) disc_stack.apply(s);
                        const auto labels = quantum_labels(outputs, measure_mode);
                        label_range.observe(labels);
                        const std::span<const double> all(labels);
                        disc_loss_value = disc_loss(all.first(batch), all.subspan(batch));
                        if (!std::isfinite(disc_loss_value)) {
                            throw std::runtime_error("non-finite discriminator loss");
                        }
                    }
                    adam_step(disc_adam, qdisc_params.values, grad, config.lr_quantum,
                              config.adam_beta1, config.adam_beta2);
                }
            }

            // -- generator update --
            const auto gen_zs = draw_latents(epoch_rng, batch, config.latent_dim);
            const auto gen_inputs = latent_states(gen_zs, config);

            std::function<double(const std::vector<FockState>&)> gen_objective;
            // the discriminator is frozen during the generator update
            std::shared_ptr<CompiledStack> frozen_disc;
            if (hybrid) {
                gen_objective = [&](const std::vector<FockState>& outputs) {
                    std::vector<double> labels(outputs.size());
                    for (std::size_t i = 0; i < outputs.size(); ++i) {
                        labels[i] = cdisc.forward(measure_image(outputs[i]));
                    }
                    return gen_loss(labels);
                };
            } else {
                frozen_disc = std::make_shared<CompiledStack>(
                    qdisc_params, n_modes, config.resolved_disc_depth(), config.cutoff);
                gen_objective = [&, frozen_disc](const std::vector<FockState>& outputs) {
                    std::vector<FockState> after = outputs;
                    for (auto& s : after) frozen_disc->apply(s);
                    return gen_loss(quantum_labels(after, measure_mode));
                };
            }

            const auto gen_grad =
                layered_fd_gradient(gen_params.values, n_modes, config.gen_depth, config.cutoff,
                                    gen_inputs, gen_objective, config.fd_step, threads);

            // recorded (pre-update) generator loss and labels
            double gen_loss_value;
            {
                const CompiledStack gen_stack(gen_params, n_modes, config.gen_depth,
                                              config.cutoff);
                std::vector<FockState> outputs = gen_inputs;
                for (auto& s : outputs) gen_stack.apply(s);
                if (hybrid) {
                    std::vector<double> labels(outputs.size());
                    for (std::size_t i = 0; i < outputs.size(); ++i) {
                        labels[i] = cdisc.forward(measure_image(outputs[i]));
                    }
                    label_range.observe(labels);
                    gen_loss_value = gen_loss(labels);
                } else {
                    for (auto& s : outputs) frozen_disc->apply(s);
                    const auto labels = quantum_labels(outputs, measure_mode);
                    label_range.observe(labels);
                    gen_loss_value = gen_loss(labels);
                }
                if (!std::isfinite(gen_loss_value)) {
                    throw std::runtime_error("non-finite generator loss");
                }
            }
            adam_step(gen_adam, gen_params.values, gen_grad, config.lr_quantum,
                      config.adam_beta1, config.adam_beta2);

            // -- probe metrics with the updated generator --
            {
                const CompiledStack gen_stack(gen_params, n_modes, config.gen_depth,
                                              config.cutoff);
                std::vector<FockState> probes = probe_inputs;
                for (auto& s : probes) gen_stack.apply(s);
                const auto probe_imgs = images_of_states(probes);

                std::vector<double> mean(n_modes, 0.0);
                for (const auto& img : probe_imgs) {
                    for (std::size_t m = 0; m < n_modes; ++m) mean[m] += img[m];
                }
                for (double& v : mean) v /= static_cast<double>(probe_imgs.size());

                run.mean_images.push_back(std::move(mean));
                run.diversities.push_back(diversity(probe_imgs));
            }

            run.disc_losses.push_back(disc_loss_value);
            run.gen_losses.push_back(gen_loss_value);
            run.label_min.push_back(label_range.lo);
            run.label_max.push_back(label_range.hi);
        } catch (const std::runtime_error& e) {
            throw TrainingError(epoch, e.what(), gen_params);
        }
    }

    // final sample set
    const auto final_zs = draw_latents(final_rng, config.final_samples, config.latent_dim);
    {
        const CompiledStack gen_stack(gen_params, n_modes, config.gen_depth, config.cutoff);
        run.final_samples.reserve(final_zs.size());
        for (const auto& z : final_zs) {
            FockState s = prepare_latent_state(z, config);
            gen_stack.apply(s);
            run.final_samples.push_back(measure_image(s));
        }
    }
    run.final_gen_params = std::move(gen_params);
    run.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return run;
}

}  // namespace cvq
