#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cvq/types.hpp"

namespace cvq {

/// Default cap on amplitude-vector length (64M complex doubles = 1 GiB).
inline constexpr std::size_t kDefaultAmplitudeBudget = std::size_t{1} << 26;

/// Pure state of N qumodes in a Fock basis truncated to `cutoff` levels per
/// mode. Amplitudes are stored densely, index = little-endian mixed-radix
/// encoding of the photon numbers (mode 0 is the fastest-varying digit).
///
/// Value semantics: gate operations either return a new state or mutate a
/// state the caller owns; there is no shared interior state, so independent
/// circuits can run on separate threads.
class FockState {
public:
    FockState(std::size_t num_modes, std::size_t cutoff,
              std::size_t amplitude_budget = kDefaultAmplitudeBudget);

    std::size_t num_modes() const { return num_modes_; }
    std::size_t cutoff() const { return cutoff_; }
    std::size_t size() const { return amps_.size(); }

    std::span<cdouble> amplitudes() { return amps_; }
    std::span<const cdouble> amplitudes() const { return amps_; }

    /// Stride of mode `m` in the amplitude index, i.e. cutoff^m.
    std::size_t stride(std::size_t mode) const;

    /// Flat index of the joint Fock state |ns[0], ns[1], ...>.
    std::size_t encode(std::span<const std::size_t> ns) const;
    /// Photon numbers of the basis state at `index`.
    std::vector<std::size_t> decode(std::size_t index) const;

    void check_mode(std::size_t mode) const;

    std::string to_json() const;

private:
    std::size_t num_modes_;
    std::size_t cutoff_;
    std::vector<cdouble> amps_;
};

/// |0>^(x)N. Throws std::invalid_argument when cutoff^N exceeds the budget
/// (the message names the offending cutoff^N).
FockState vacuum_state(std::size_t num_modes, std::size_t cutoff,
                       std::size_t amplitude_budget = kDefaultAmplitudeBudget);

/// Euclidean norm of the amplitude vector. 1 for any state reachable from
/// vacuum by number-conserving gates; < 1 after truncation leakage.
double norm(const FockState& state);

/// Throws std::domain_error on a zero-norm state.
void renormalize_inplace(FockState& state);
FockState renormalized(const FockState& state);

/// Marginal photon-number weights of one mode: out[n] = sum of |amp|^2 over
/// basis states with n photons in `mode`. Sums to norm^2.
std::vector<double> photon_number_dist(const FockState& state, std::size_t mode);

}  // namespace cvq
