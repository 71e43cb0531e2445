#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>

namespace cvq {

using cdouble = std::complex<double>;

/// base^exp as size_t, or nullopt on overflow.
inline std::optional<std::size_t> checked_pow(std::size_t base, std::size_t exp) {
    std::size_t result = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && result > std::numeric_limits<std::size_t>::max() / base) {
            return std::nullopt;
        }
        result *= base;
    }
    return result;
}

}  // namespace cvq
