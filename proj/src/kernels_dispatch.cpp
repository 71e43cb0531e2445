#include "cvq/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cvq::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend resolve_initial() {
    if (const char* env = std::getenv("CVQ_KERNEL_BACKEND")) {
        const std::string v{env};
        if (v == "scalar") return Backend::Scalar;
        if (v == "avx2") {
            if (!cpu_has_avx2()) {
                throw std::runtime_error("CVQ_KERNEL_BACKEND=avx2 but CPU lacks AVX2/FMA");
            }
            return Backend::Avx2;
        }
        // anything else (incl. "auto") falls through to detection
    }
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const detail::KernelTable*>& table_slot() {
    static std::atomic<const detail::KernelTable*> slot{nullptr};
    return slot;
}

const detail::KernelTable* table_for(Backend b) {
#if defined(__x86_64__)
    if (b == Backend::Avx2) return &detail::avx2_table;
#endif
    (void)b;
    return &detail::scalar_table;
}

const detail::KernelTable& active_table() {
    const detail::KernelTable* t = table_slot().load(std::memory_order_acquire);
    if (t == nullptr) {
        t = table_for(resolve_initial());
        table_slot().store(t, std::memory_order_release);
    }
    return *t;
}

}  // namespace

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend b) {
    return b == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() {
    const detail::KernelTable& t = active_table();
    return &t == table_for(Backend::Avx2) && cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        throw std::runtime_error(std::string("kernel backend unsupported on this CPU: ") +
                                 backend_name(b));
    }
    table_slot().store(table_for(b), std::memory_order_release);
}

void diag_phase(std::span<cdouble> amps, std::size_t dim, std::size_t stride,
                std::span<const cdouble> table) {
    active_table().diag_phase(amps.data(), amps.size(), dim, stride, table.data());
}

void strided_dense(std::span<cdouble> amps, std::size_t dim, std::size_t stride,
                   std::span<const cdouble> u_colmajor, std::span<cdouble> scratch) {
    active_table().strided_dense(amps.data(), amps.size(), dim, stride, u_colmajor.data(),
                                 scratch.data());
}

void indexed_dense(std::span<cdouble> amps, std::span<const std::size_t> idx,
                   std::span<const cdouble> u_colmajor, std::span<cdouble> scratch) {
    active_table().indexed_dense(amps.data(), idx.data(), idx.size(), u_colmajor.data(),
                                 scratch.data());
}

}  // namespace cvq::kernels
