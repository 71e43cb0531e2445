#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvq/cvnn.hpp"
#include "cvq/rng.hpp"

using namespace cvq;

namespace {

FockState random_normalized_state(std::size_t num_modes, std::size_t cutoff,
                                  std::uint64_t seed) {
    FockState s = vacuum_state(num_modes, cutoff);
    Rng rng(seed);
    for (auto& a : s.amplitudes()) a = cdouble{rng.normal(), rng.normal()};
    renormalize_inplace(s);
    return s;
}

double max_abs_diff(const FockState& a, const FockState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
    }
    return m;
}

LayerParams random_layer(std::size_t n, std::uint64_t seed, double scale) {
    const auto pv = init_params(n, 1, seed, scale);
    return unpack_layer(pv.values, n);
}

}  // namespace

TEST_CASE("parameter counting") {
    CHECK(interferometer_param_count(3) == 9);
    CHECK(layer_param_count(3) == 33);
    CHECK(param_count(3, 8) == 264);
    CHECK(param_count(3, 1) == 33);
    CHECK(param_count(1, 1) == 7);

    SUBCASE("matches packed length for all (N, d_g) in 1..4 x 1..10") {
        for (std::size_t n = 1; n <= 4; ++n) {
            for (std::size_t d = 1; d <= 10; ++d) {
                std::vector<LayerParams> layers(d, LayerParams::zeros(n));
                CHECK(pack_params(layers).size() == param_count(n, d));
            }
        }
    }
}

TEST_CASE("mesh ordering") {
    CHECK(mesh_pair(3, 0) == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(mesh_pair(3, 1) == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK(mesh_pair(3, 2) == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(mesh_pair(4, 2) == std::pair<std::size_t, std::size_t>{2, 3});
    CHECK(mesh_pair(4, 3) == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("interferometer") {
    SUBCASE("all-zero parameters is the identity") {
        FockState s = random_normalized_state(3, 4, 5);
        FockState r = apply_interferometer(s, InterferometerParams::zeros(3));
        CHECK(max_abs_diff(s, r) < 1e-14);
    }
    SUBCASE("N = 1 is a bare rotation") {
        InterferometerParams p = InterferometerParams::zeros(1);
        p.final_rotations[0] = M_PI / 2.0;
        FockState s = vacuum_state(1, 4);
        s.amplitudes()[0] = 0.0;
        s.amplitudes()[1] = 1.0;
        apply_interferometer_inplace(s, p);
        CHECK(std::abs(s.amplitudes()[1] - cdouble{0.0, 1.0}) < 1e-15);
    }
    SUBCASE("single photon 50/50 split for N = 2") {
        InterferometerParams p = InterferometerParams::zeros(2);
        p.bs_thetas[0] = M_PI / 4.0;
        FockState s = vacuum_state(2, 6);
        s.amplitudes()[0] = 0.0;
        s.amplitudes()[1] = 1.0;  // |1, 0>
        apply_interferometer_inplace(s, p);
        const auto d0 = photon_number_dist(s, 0);
        CHECK(d0[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d0[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("norm preserved on sub-cutoff support") {
        auto layer = random_layer(3, 17, 0.0);  // angles only, no energy injection
        FockState s = random_normalized_state(3, 6, 19);
        apply_interferometer_inplace(s, layer.u1);
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("size mismatch rejected") {
        FockState s = vacuum_state(3, 4);
        CHECK_THROWS_AS(apply_interferometer_inplace(s, InterferometerParams::zeros(2)),
                        std::invalid_argument);
    }
}

TEST_CASE("layer application") {
    SUBCASE("all-zero parameters on vacuum stays vacuum") {
        FockState s = vacuum_state(3, 6);
        apply_layer_inplace(s, LayerParams::zeros(3));
        CHECK(std::abs(s.amplitudes()[0] - cdouble{1.0, 0.0}) < 1e-13);
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("all-zero parameters is the identity on random states") {
        FockState s = random_normalized_state(2, 5, 23);
        FockState r = apply_layer(s, LayerParams::zeros(2));
        CHECK(max_abs_diff(s, r) < 1e-12);
    }
    SUBCASE("displacement-only layer sets per-mode <x>") {
        LayerParams p = LayerParams::zeros(3);
        p.disp_re = {0.3, 0.2, 0.1};
        FockState s = vacuum_state(3, 12);
        apply_layer_inplace(s, p);
        CHECK(expectation_x(s, 0) == doctest::Approx(0.6).epsilon(1e-6));
        CHECK(expectation_x(s, 1) == doctest::Approx(0.4).epsilon(1e-6));
        CHECK(expectation_x(s, 2) == doctest::Approx(0.2).epsilon(1e-6));
    }
    SUBCASE("composition equals manual sequential stage application") {
        const auto p = random_layer(3, 29, 0.05);
        FockState via_layer = random_normalized_state(3, 6, 31);
        FockState manual = via_layer;

        apply_layer_inplace(via_layer, p);

        apply_interferometer_inplace(manual, p.u1);
        for (std::size_t m = 0; m < 3; ++m) {
            double r = p.squeeze_r[m], phi = p.squeeze_phi[m];
            if (r < 0.0) {
                r = -r;
                phi += M_PI;
            }
            apply_squeeze_inplace(manual, m, r, phi);
        }
        apply_interferometer_inplace(manual, p.u2);
        for (std::size_t m = 0; m < 3; ++m) {
            apply_displacement_inplace(manual, m, {p.disp_re[m], p.disp_im[m]});
        }
        for (std::size_t m = 0; m < 3; ++m) {
            apply_kerr_inplace(manual, m, p.kerr_kappa[m]);
        }

        CHECK(max_abs_diff(via_layer, manual) < 1e-12);
    }
    SUBCASE("small parameters keep norm above 0.999 at D = 8") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto p = random_layer(3, 100 + seed, 0.05);
            FockState s = vacuum_state(3, 8);
            apply_layer_inplace(s, p);
            CHECK(norm(s) >= 0.999);
        }
    }
}

TEST_CASE("pack/unpack round-trip is exact") {
    const auto pv = init_params(3, 4, 77, 0.05);
    const auto layers = unpack_params(pv, 3, 4);
    const auto repacked = pack_params(layers);
    REQUIRE(repacked.size() == pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
        CHECK(repacked.values[i] == pv.values[i]);
    }
    CHECK_THROWS_AS(unpack_params(pv, 3, 5), std::invalid_argument);
}

TEST_CASE("init_params") {
    SUBCASE("deterministic given the seed") {
        const auto a = init_params(3, 8, 42, 0.05);
        const auto b = init_params(3, 8, 42, 0.05);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values[i] == b.values[i]);
        const auto c = init_params(3, 8, 43, 0.05);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.size(); ++i) any_diff |= (a.values[i] != c.values[i]);
        CHECK(any_diff);
    }
    SUBCASE("scale 0 zeroes every energy-injecting parameter") {
        const auto pv = init_params(3, 2, 9, 0.0);
        for (const auto& layer : unpack_params(pv, 3, 2)) {
            for (double v : layer.squeeze_r) CHECK(v == 0.0);
            for (double v : layer.disp_re) CHECK(v == 0.0);
            for (double v : layer.disp_im) CHECK(v == 0.0);
            for (double v : layer.kerr_kappa) CHECK(v == 0.0);
            // angles stay distributed
            bool any_angle = false;
            for (double v : layer.u1.bs_thetas) any_angle |= (v != 0.0);
            CHECK(any_angle);
        }
    }
    SUBCASE("squeeze_r sample std within 10% of scale") {
        // ~10k draws: N = 3 modes x depth
        const double scale = 0.05;
        double sum = 0.0, sum2 = 0.0;
        std::size_t count = 0;
        for (std::uint64_t seed = 0; seed < 70; ++seed) {
            const auto pv = init_params(3, 16, 5000 + seed, scale);
            for (const auto& layer : unpack_params(pv, 3, 16)) {
                for (double v : layer.squeeze_r) {
                    sum += v;
                    sum2 += v * v;
                    ++count;
                }
            }
        }
        REQUIRE(count >= 3000);
        const double mean = sum / static_cast<double>(count);
        const double stddev = std::sqrt(sum2 / static_cast<double>(count) - mean * mean);
        CHECK(stddev > 0.9 * scale);
        CHECK(stddev < 1.1 * scale);
    }
    SUBCASE("angles bounded by pi") {
        const auto pv = init_params(2, 3, 3, 0.05);
        for (const auto& layer : unpack_params(pv, 2, 3)) {
            for (double v : layer.u1.bs_thetas) CHECK(std::fabs(v) <= M_PI);
            for (double v : layer.squeeze_phi) CHECK(std::fabs(v) <= M_PI);
        }
    }
}

TEST_CASE("param vector JSON round-trip") {
    const auto pv = init_params(3, 2, 11, 0.05);
    const std::string j = params_to_json(pv, 3, 2);
    std::size_t n = 0, d = 0;
    const auto back = params_from_json(j, &n, &d);
    CHECK(n == 3);
    CHECK(d == 2);
    REQUIRE(back.size() == pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) CHECK(back.values[i] == pv.values[i]);
}

TEST_CASE("compiled stack matches per-layer application") {
    const auto pv = init_params(3, 3, 55, 0.05);
    const auto layers = unpack_params(pv, 3, 3);

    FockState a = vacuum_state(3, 6);
    apply_displacement_inplace(a, 0, {0.4, 0.0});
    FockState b = a;

    CompiledStack stack(pv, 3, 3, 6);
    stack.apply(a);
    for (const auto& p : layers) apply_layer_inplace(b, p);

    CHECK(max_abs_diff(a, b) < 1e-14);

    SUBCASE("apply_from skips the prefix") {
        FockState c = vacuum_state(3, 6);
        apply_displacement_inplace(c, 0, {0.4, 0.0});
        apply_layer_inplace(c, layers[0]);
        stack.apply_from(c, 1);
        CHECK(max_abs_diff(a, c) < 1e-14);
    }
}
