#include "cvq/fock_state.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cvq {

FockState::FockState(std::size_t num_modes, std::size_t cutoff, std::size_t amplitude_budget)
    : num_modes_(num_modes), cutoff_(cutoff) {
    if (num_modes < 1) throw std::invalid_argument("FockState: num_modes must be >= 1");
    if (cutoff < 2) throw std::invalid_argument("FockState: cutoff must be >= 2");
    const auto len = checked_pow(cutoff, num_modes);
    if (!len || *len > amplitude_budget) {
        std::string dn = len ? std::to_string(*len) : "overflowing";
        throw std::invalid_argument("FockState: cutoff^num_modes = " + dn +
                                    " amplitudes exceeds the budget of " +
                                    std::to_string(amplitude_budget));
    }
    amps_.assign(*len, cdouble{0.0, 0.0});
    amps_[0] = cdouble{1.0, 0.0};
}

std::size_t FockState::stride(std::size_t mode) const {
    check_mode(mode);
    std::size_t s = 1;
    for (std::size_t i = 0; i < mode; ++i) s *= cutoff_;
    return s;
}

std::size_t FockState::encode(std::span<const std::size_t> ns) const {
    if (ns.size() != num_modes_) {
        throw std::invalid_argument("FockState::encode: wrong number of photon numbers");
    }
    std::size_t index = 0;
    std::size_t s = 1;
    for (std::size_t m = 0; m < num_modes_; ++m) {
        if (ns[m] >= cutoff_) throw std::invalid_argument("FockState::encode: level >= cutoff");
        index += ns[m] * s;
        s *= cutoff_;
    }
    return index;
}

std::vector<std::size_t> FockState::decode(std::size_t index) const {
    if (index >= amps_.size()) throw std::invalid_argument("FockState::decode: index out of range");
    std::vector<std::size_t> ns(num_modes_);
    for (std::size_t m = 0; m < num_modes_; ++m) {
        ns[m] = index % cutoff_;
        index /= cutoff_;
    }
    return ns;
}

void FockState::check_mode(std::size_t mode) const {
    if (mode >= num_modes_) {
        throw std::invalid_argument("mode index " + std::to_string(mode) + " out of range for " +
                                    std::to_string(num_modes_) + " modes");
    }
}

std::string FockState::to_json() const {
    nlohmann::json j;
    j["num_modes"] = num_modes_;
    j["cutoff"] = cutoff_;
    auto& arr = j["amplitudes"] = nlohmann::json::array();
    for (const cdouble& a : amps_) {
        arr.push_back({a.real(), a.imag()});
    }
    return j.dump();
}

FockState vacuum_state(std::size_t num_modes, std::size_t cutoff, std::size_t amplitude_budget) {
    return FockState(num_modes, cutoff, amplitude_budget);
}

double norm(const FockState& state) {
    double n2 = 0.0;
    for (const cdouble& a : state.amplitudes()) {
        n2 += a.real() * a.real() + a.imag() * a.imag();
    }
    return std::sqrt(n2);
}

void renormalize_inplace(FockState& state) {
    const double n = norm(state);
    if (n == 0.0) throw std::domain_error("renormalize: zero-norm state");
    const double inv = 1.0 / n;
    for (cdouble& a : state.amplitudes()) a *= inv;
}

FockState renormalized(const FockState& state) {
    FockState out = state;
    renormalize_inplace(out);
    return out;
}

std::vector<double> photon_number_dist(const FockState& state, std::size_t mode) {
    state.check_mode(mode);
    const std::size_t dim = state.cutoff();
    const std::size_t stride = state.stride(mode);
    std::vector<double> dist(dim, 0.0);
    auto amps = state.amplitudes();
    const std::size_t block = dim * stride;
    for (std::size_t base = 0; base < amps.size(); base += block) {
        for (std::size_t n = 0; n < dim; ++n) {
            double acc = 0.0;
            const cdouble* row = amps.data() + base + n * stride;
            for (std::size_t j = 0; j < stride; ++j) {
                acc += row[j].real() * row[j].real() + row[j].imag() * row[j].imag();
            }
            dist[n] += acc;
        }
    }
    return dist;
}

}  // namespace cvq
