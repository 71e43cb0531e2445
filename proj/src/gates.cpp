#include "cvq/gates.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "cvq/kernels.hpp"

namespace cvq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---- symmetric tridiagonal eigensolver (implicit QL with shifts) ----------
//
// d[0..n): diagonal, off[0..n-1): coupling of i and i+1. On return d holds the
// eigenvalues and z (row-major n x n, initialized to identity by the caller)
// holds the eigenvectors in its columns: z[i*n + j] = component i of vector j.
void sym_tridiag_eig(std::vector<double>& d, std::vector<double>& off, std::vector<double>& z,
                     std::size_t n) {
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        std::size_t m = l;
        while (m < n && std::fabs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 50) throw std::runtime_error("sym_tridiag_eig: no convergence");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = z[k * n + ii + 1];
                        z[k * n + ii + 1] = s * z[k * n + ii] + c * h;
                        z[k * n + ii] = c * z[k * n + ii] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

void warn_once(std::atomic<bool>& flag, const std::string& msg) {
    if (!flag.exchange(true)) {
        std::cerr << "cvq: warning: " << msg << " (further warnings of this kind suppressed)\n";
    }
}

std::atomic<bool> g_warned_displacement{false};
std::atomic<bool> g_warned_squeeze{false};

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

// ---- matrix builders ---------------------------------------------------------

std::vector<cdouble> rotation_phase_table(std::size_t dim, double phi) {
    require_finite(phi, "rotation angle");
    std::vector<cdouble> table(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        table[n] = std::polar(1.0, phi * static_cast<double>(n));
    }
    return table;
}

std::vector<cdouble> kerr_phase_table(std::size_t dim, double kappa) {
    require_finite(kappa, "Kerr strength");
    std::vector<cdouble> table(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        table[n] = std::polar(1.0, kappa * nn);
    }
    return table;
}

std::vector<cdouble> displacement_matrix(std::size_t dim, cdouble alpha) {
    require_finite(alpha.real(), "displacement alpha");
    require_finite(alpha.imag(), "displacement alpha");
    std::vector<double> sq(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) sq[i] = std::sqrt(static_cast<double>(i));

    std::vector<cdouble> u(dim * dim, cdouble{0.0, 0.0});
    auto at = [&](std::size_t m, std::size_t n) -> cdouble& { return u[n * dim + m]; };

    const double a2 = std::norm(alpha);
    at(0, 0) = std::exp(-0.5 * a2);
    for (std::size_t m = 1; m < dim; ++m) {
        at(m, 0) = alpha / sq[m] * at(m - 1, 0);
    }
    const cdouble ac = std::conj(alpha);
    for (std::size_t n = 1; n < dim; ++n) {
        for (std::size_t m = 0; m < dim; ++m) {
            cdouble v = -ac * at(m, n - 1);
            if (m > 0) v += sq[m] * at(m - 1, n - 1);
            at(m, n) = v / sq[n];
        }
    }
    return u;
}

std::vector<cdouble> squeeze_matrix(std::size_t dim, double r, double phi) {
    require_finite(r, "squeeze magnitude");
    require_finite(phi, "squeeze angle");
    if (r < 0.0) throw std::invalid_argument("squeeze magnitude r must be >= 0");

    const double sech = 1.0 / std::cosh(r);
    const cdouble eit_tanh = std::polar(std::tanh(r), phi);
    const cdouble eit_tanh_c = std::conj(eit_tanh);

    std::vector<cdouble> u(dim * dim, cdouble{0.0, 0.0});
    auto at = [&](std::size_t m, std::size_t n) -> cdouble& { return u[n * dim + m]; };

    at(0, 0) = std::sqrt(sech);
    for (std::size_t m = 2; m < dim; m += 2) {
        at(m, 0) = -std::sqrt(static_cast<double>(m - 1) / static_cast<double>(m)) * eit_tanh *
                   at(m - 2, 0);
    }
    for (std::size_t n = 1; n < dim; ++n) {
        for (std::size_t m = (n % 2); m < dim; m += 2) {
            cdouble v{0.0, 0.0};
            if (n >= 2) {
                v += std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n)) *
                     eit_tanh_c * at(m, n - 2);
            }
            if (m >= 1) {
                v += std::sqrt(static_cast<double>(m) / static_cast<double>(n)) * sech *
                     at(m - 1, n - 1);
            }
            at(m, n) = v;
        }
    }
    return u;
}

BeamsplitterBlocks beamsplitter_blocks(std::size_t dim, double theta, double phi) {
    require_finite(theta, "beamsplitter theta");
    require_finite(phi, "beamsplitter phi");
    BeamsplitterBlocks out;
    out.dim = dim;
    out.blocks.resize(2 * dim - 1);
    // generator off-diagonal has the constant phase mu = e^{i(phi - pi/2)}, so
    // each block is a phase-scaled real symmetric tridiagonal exponential
    const cdouble mu = std::polar(1.0, phi - 0.5 * kPi);

    for (std::size_t n = 0; n < 2 * dim - 1; ++n) {
        auto& blk = out.blocks[n];
        blk.k_min = (n >= dim) ? n - (dim - 1) : 0;
        const std::size_t k_max = std::min<std::size_t>(n, dim - 1);
        const std::size_t size = k_max - blk.k_min + 1;
        blk.size = size;
        blk.u.assign(size * size, cdouble{0.0, 0.0});
        if (size == 1) {
            blk.u[0] = cdouble{1.0, 0.0};
            continue;
        }
        std::vector<double> diag(size, 0.0);
        std::vector<double> off(size - 1);
        for (std::size_t i = 0; i + 1 < size; ++i) {
            const double k = static_cast<double>(blk.k_min + i);
            const double nn = static_cast<double>(n);
            off[i] = std::sqrt((k + 1.0) * (nn - k));
        }
        std::vector<double> vec(size * size, 0.0);
        for (std::size_t i = 0; i < size; ++i) vec[i * size + i] = 1.0;
        sym_tridiag_eig(diag, off, vec, size);

        std::vector<cdouble> expv(size);
        for (std::size_t j = 0; j < size; ++j) {
            expv[j] = std::polar(1.0, theta * diag[j]);
        }
        std::vector<cdouble> mu_pow(size);
        mu_pow[0] = cdouble{1.0, 0.0};
        for (std::size_t i = 1; i < size; ++i) mu_pow[i] = mu_pow[i - 1] * mu;

        // U[r][c] = mu^r (sum_j V[r][j] e^{i theta lambda_j} V[c][j]) conj(mu)^c
        for (std::size_t c = 0; c < size; ++c) {
            for (std::size_t r = 0; r < size; ++r) {
                cdouble acc{0.0, 0.0};
                for (std::size_t j = 0; j < size; ++j) {
                    acc += expv[j] * (vec[r * size + j] * vec[c * size + j]);
                }
                blk.u[c * size + r] = mu_pow[r] * acc * std::conj(mu_pow[c]);
            }
        }
    }
    return out;
}

// ---- application -------------------------------------------------------------

void apply_diag_table_inplace(FockState& state, std::size_t mode,
                              std::span<const cdouble> table) {
    state.check_mode(mode);
    kernels::diag_phase(state.amplitudes(), state.cutoff(), state.stride(mode), table);
}

void apply_single_mode_matrix_inplace(FockState& state, std::size_t mode,
                                      std::span<const cdouble> u_colmajor) {
    state.check_mode(mode);
    const std::size_t dim = state.cutoff();
    std::vector<cdouble> scratch(2 * dim);
    kernels::strided_dense(state.amplitudes(), dim, state.stride(mode), u_colmajor, scratch);
}

void apply_beamsplitter_blocks_inplace(FockState& state, std::size_t mode_a, std::size_t mode_b,
                                       const BeamsplitterBlocks& blocks) {
    state.check_mode(mode_a);
    state.check_mode(mode_b);
    if (mode_a == mode_b) throw std::invalid_argument("beamsplitter modes must be distinct");
    if (blocks.dim != state.cutoff()) throw std::invalid_argument("beamsplitter block cutoff mismatch");

    const std::size_t dim = state.cutoff();
    const std::size_t sa = state.stride(mode_a);
    const std::size_t sb = state.stride(mode_b);
    const std::size_t s_lo = std::min(sa, sb);
    const std::size_t s_hi = std::max(sa, sb);
    const std::size_t len = state.size();

    std::vector<cdouble> scratch(2 * dim);
    std::vector<std::size_t> idx(dim);
    auto amps = state.amplitudes();

    // bases enumerate all indices whose digits at both modes are zero
    for (std::size_t hi = 0; hi < len; hi += s_hi * dim) {
        for (std::size_t mid = 0; mid < s_hi; mid += s_lo * dim) {
            for (std::size_t lo = 0; lo < s_lo; ++lo) {
                const std::size_t base = hi + mid + lo;
                for (std::size_t n = 0; n < blocks.blocks.size(); ++n) {
                    const auto& blk = blocks.blocks[n];
                    if (blk.size == 1) continue;  // identity
                    for (std::size_t i = 0; i < blk.size; ++i) {
                        const std::size_t ka = blk.k_min + i;
                        idx[i] = base + ka * sa + (n - ka) * sb;
                    }
                    kernels::indexed_dense(amps, std::span(idx).first(blk.size), blk.u, scratch);
                }
            }
        }
    }
}

void apply_rotation_inplace(FockState& state, std::size_t mode, double phi) {
    const auto table = rotation_phase_table(state.cutoff(), phi);
    apply_diag_table_inplace(state, mode, table);
}

void apply_kerr_inplace(FockState& state, std::size_t mode, double kappa) {
    const auto table = kerr_phase_table(state.cutoff(), kappa);
    apply_diag_table_inplace(state, mode, table);
}

void apply_displacement_inplace(FockState& state, std::size_t mode, cdouble alpha) {
    const double dim = static_cast<double>(state.cutoff());
    if (std::abs(alpha) > 0.25 * std::sqrt(dim)) {
        warn_once(g_warned_displacement,
                  "displacement |alpha| above 0.25*sqrt(cutoff); expect truncation leakage");
    }
    const auto u = displacement_matrix(state.cutoff(), alpha);
    apply_single_mode_matrix_inplace(state, mode, u);
}

void apply_squeeze_inplace(FockState& state, std::size_t mode, double r, double phi) {
    const double dim = static_cast<double>(state.cutoff());
    if (r > 0.25 * std::log(dim)) {
        warn_once(g_warned_squeeze,
                  "squeeze magnitude above 0.25*ln(cutoff); expect truncation leakage");
    }
    const auto u = squeeze_matrix(state.cutoff(), r, phi);
    apply_single_mode_matrix_inplace(state, mode, u);
}

void apply_beamsplitter_inplace(FockState& state, std::size_t mode_a, std::size_t mode_b,
                                double theta, double phi) {
    const auto blocks = beamsplitter_blocks(state.cutoff(), theta, phi);
    apply_beamsplitter_blocks_inplace(state, mode_a, mode_b, blocks);
}

void apply_gate_inplace(FockState& state, const GateParam& gate) {
    std::visit(
        [&state](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, RotationGate>) {
                apply_rotation_inplace(state, g.mode, g.phi);
            } else if constexpr (std::is_same_v<T, DisplacementGate>) {
                apply_displacement_inplace(state, g.mode, g.alpha);
            } else if constexpr (std::is_same_v<T, SqueezeGate>) {
                apply_squeeze_inplace(state, g.mode, g.r, g.phi);
            } else if constexpr (std::is_same_v<T, BeamsplitterGate>) {
                apply_beamsplitter_inplace(state, g.mode_a, g.mode_b, g.theta, g.phi);
            } else {
                apply_kerr_inplace(state, g.mode, g.kappa);
            }
        },
        gate);
}

FockState apply_rotation(const FockState& state, std::size_t mode, double phi) {
    FockState out = state;
    apply_rotation_inplace(out, mode, phi);
    return out;
}
FockState apply_kerr(const FockState& state, std::size_t mode, double kappa) {
    FockState out = state;
    apply_kerr_inplace(out, mode, kappa);
    return out;
}
FockState apply_displacement(const FockState& state, std::size_t mode, cdouble alpha) {
    FockState out = state;
    apply_displacement_inplace(out, mode, alpha);
    return out;
}
FockState apply_squeeze(const FockState& state, std::size_t mode, double r, double phi) {
    FockState out = state;
    apply_squeeze_inplace(out, mode, r, phi);
    return out;
}
FockState apply_beamsplitter(const FockState& state, std::size_t mode_a, std::size_t mode_b,
                             double theta, double phi) {
    FockState out = state;
    apply_beamsplitter_inplace(out, mode_a, mode_b, theta, phi);
    return out;
}
FockState apply_gate(const FockState& state, const GateParam& gate) {
    FockState out = state;
    apply_gate_inplace(out, gate);
    return out;
}

double expectation_x(const FockState& state, std::size_t mode) {
    state.check_mode(mode);
    const std::size_t dim = state.cutoff();
    const std::size_t stride = state.stride(mode);
    auto amps = state.amplitudes();

    double n2 = 0.0;
    for (const cdouble& a : amps) n2 += a.real() * a.real() + a.imag() * a.imag();
    if (n2 == 0.0) throw std::domain_error("expectation_x: zero-norm state");

    // <x> = 2 sum_n sqrt(n+1) Re(conj(psi_{n+1}) psi_n), normalized
    double acc = 0.0;
    const std::size_t block = dim * stride;
    for (std::size_t base = 0; base < amps.size(); base += block) {
        for (std::size_t n = 0; n + 1 < dim; ++n) {
            const double w = std::sqrt(static_cast<double>(n + 1));
            const cdouble* lo = amps.data() + base + n * stride;
            const cdouble* up = lo + stride;
            double re = 0.0;
            for (std::size_t j = 0; j < stride; ++j) {
                re += up[j].real() * lo[j].real() + up[j].imag() * lo[j].imag();
            }
            acc += w * re;
        }
    }
    return 2.0 * acc / n2;
}

}  // namespace cvq
