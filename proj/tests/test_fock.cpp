#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cvq/fock_state.hpp"
#include "cvq/gates.hpp"
#include "cvq/rng.hpp"

using namespace cvq;

namespace {

// independent Poisson pmf, evaluated via lgamma for stability
double poisson_pmf(double lambda, std::size_t n) {
    if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + static_cast<double>(n) * std::log(lambda) -
                    std::lgamma(static_cast<double>(n) + 1.0));
}

FockState random_normalized_state(std::size_t num_modes, std::size_t cutoff,
                                  std::uint64_t seed) {
    FockState s = vacuum_state(num_modes, cutoff);
    Rng rng(seed);
    for (auto& a : s.amplitudes()) {
        a = cdouble{rng.normal(), rng.normal()};
    }
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

}  // namespace

TEST_CASE("vacuum state construction") {
    SUBCASE("single mode") {
        FockState s = vacuum_state(1, 4);
        REQUIRE(s.size() == 4);
        CHECK(s.amplitudes()[0] == cdouble{1.0, 0.0});
        for (std::size_t i = 1; i < 4; ++i) CHECK(s.amplitudes()[i] == cdouble{0.0, 0.0});
    }
    SUBCASE("two modes, cutoff 3") {
        FockState s = vacuum_state(2, 3);
        REQUIRE(s.size() == 9);
        const std::size_t joint00 = s.encode(std::vector<std::size_t>{0, 0});
        CHECK(joint00 == 0);
        CHECK(s.amplitudes()[0] == cdouble{1.0, 0.0});
        for (std::size_t i = 1; i < 9; ++i) CHECK(s.amplitudes()[i] == cdouble{0.0, 0.0});
    }
    SUBCASE("three modes, cutoff 10") {
        FockState s = vacuum_state(3, 10);
        CHECK(s.size() == 1000);
        CHECK(norm(s) == 1.0);
    }
    SUBCASE("budget exceeded names the offending size") {
        try {
            vacuum_state(4, 10, 1000);
            FAIL("expected throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("10000") != std::string::npos);
        }
    }
}

TEST_CASE("mixed-radix indexing round-trips") {
    FockState s = vacuum_state(3, 5);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto ns = s.decode(k);
        CHECK(s.encode(ns) == k);
    }
    // mode 0 is the fastest digit
    CHECK(s.encode(std::vector<std::size_t>{1, 0, 0}) == 1);
    CHECK(s.encode(std::vector<std::size_t>{0, 1, 0}) == 5);
    CHECK(s.encode(std::vector<std::size_t>{0, 0, 1}) == 25);
}

TEST_CASE("rotation") {
    SUBCASE("vacuum is an eigenstate") {
        FockState s = vacuum_state(1, 8);
        apply_rotation_inplace(s, 0, 1.234);
        CHECK(std::abs(s.amplitudes()[0] - cdouble{1.0, 0.0}) < 1e-15);
    }
    SUBCASE("zero angle is the identity") {
        FockState s = random_normalized_state(2, 4, 11);
        FockState r = apply_rotation(s, 1, 0.0);
        CHECK(max_abs_diff(s, r) == 0.0);
    }
    SUBCASE("single photon picks up e^{i phi}") {
        FockState s = vacuum_state(1, 4);
        s.amplitudes()[0] = 0.0;
        s.amplitudes()[1] = 1.0;
        apply_rotation_inplace(s, 0, M_PI / 2.0);
        CHECK(std::abs(s.amplitudes()[1] - cdouble{0.0, 1.0}) < 1e-15);
    }
    SUBCASE("norm preserved to 1e-15") {
        FockState s = random_normalized_state(2, 6, 12);
        apply_rotation_inplace(s, 0, 0.7718);
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("kerr") {
    SUBCASE("kappa = 0 is the identity") {
        FockState s = random_normalized_state(1, 6, 21);
        FockState r = apply_kerr(s, 0, 0.0);
        CHECK(max_abs_diff(s, r) == 0.0);
    }
    SUBCASE("|2> picks up e^{i kappa n^2}") {
        FockState s = vacuum_state(1, 4);
        s.amplitudes()[0] = 0.0;
        s.amplitudes()[2] = 1.0;
        apply_kerr_inplace(s, 0, M_PI / 4.0);
        CHECK(std::abs(s.amplitudes()[2] - cdouble{-1.0, 0.0}) < 1e-12);
    }
    SUBCASE("photon-number histograms unchanged on a random state") {
        FockState s = random_normalized_state(2, 5, 31);
        const auto before0 = photon_number_dist(s, 0);
        const auto before1 = photon_number_dist(s, 1);
        apply_kerr_inplace(s, 0, 0.9);
        apply_kerr_inplace(s, 1, -0.4);
        const auto after0 = photon_number_dist(s, 0);
        const auto after1 = photon_number_dist(s, 1);
        for (std::size_t n = 0; n < 5; ++n) {
            CHECK(after0[n] == doctest::Approx(before0[n]).epsilon(1e-12));
            CHECK(after1[n] == doctest::Approx(before1[n]).epsilon(1e-12));
        }
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("displacement") {
    SUBCASE("alpha = 0 is the identity") {
        FockState s = random_normalized_state(1, 8, 41);
        FockState r = apply_displacement(s, 0, {0.0, 0.0});
        CHECK(max_abs_diff(s, r) < 1e-15);
    }
    SUBCASE("Poisson photon statistics at D = 20") {
        FockState s = vacuum_state(1, 20);
        apply_displacement_inplace(s, 0, {0.5, 0.0});
        const auto dist = photon_number_dist(s, 0);
        const double lambda = 0.25;
        for (std::size_t n = 0; n < 12; ++n) {
            CHECK(dist[n] == doctest::Approx(poisson_pmf(lambda, n)).epsilon(1e-8));
        }
        CHECK(dist[0] == doctest::Approx(std::exp(-0.25)).epsilon(1e-8));
        CHECK(dist[1] == doctest::Approx(0.25 * std::exp(-0.25)).epsilon(1e-8));
    }
    SUBCASE("coherent <x> = 2 Re alpha") {
        FockState s = vacuum_state(1, 20);
        apply_displacement_inplace(s, 0, {0.5, 0.0});
        CHECK(expectation_x(s, 0) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("norm never exceeds one and leakage shrinks with the cutoff") {
        const cdouble alpha{2.0, 0.0};
        double prev = 0.0;
        for (std::size_t d : {6, 10, 20, 40}) {
            FockState s = vacuum_state(1, d);
            apply_displacement_inplace(s, 0, alpha);
            const double n = norm(s);
            CHECK(n <= 1.0 + 1e-12);
            CHECK(n > prev);
            prev = n;
        }
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-10));  // D = 40 captures alpha = 2
        FockState small = vacuum_state(1, 6);
        apply_displacement_inplace(small, 0, alpha);
        CHECK(norm(small) < 1.0);
    }
    SUBCASE("D(alpha) D(-alpha) is the identity on low-lying states") {
        FockState s = vacuum_state(1, 20);
        apply_displacement_inplace(s, 0, {0.3, 0.1});
        apply_displacement_inplace(s, 0, {-0.3, -0.1});
        FockState vac = vacuum_state(1, 20);
        CHECK(max_abs_diff(s, vac) < 1e-10);
    }
}

TEST_CASE("squeeze") {
    SUBCASE("r = 0 is the identity") {
        FockState s = random_normalized_state(1, 10, 51);
        FockState r = apply_squeeze(s, 0, 0.0, 0.3);
        CHECK(max_abs_diff(s, r) < 1e-15);
    }
    SUBCASE("negative r rejected") {
        FockState s = vacuum_state(1, 8);
        CHECK_THROWS_AS(apply_squeeze_inplace(s, 0, -0.1, 0.0), std::invalid_argument);
    }
    SUBCASE("squeezed vacuum populates even levels only") {
        FockState s = vacuum_state(1, 20);
        apply_squeeze_inplace(s, 0, 0.3, 0.0);
        const auto dist = photon_number_dist(s, 0);
        for (std::size_t n = 1; n < 20; n += 2) {
            CHECK(dist[n] < 1e-24);  // amplitude < 1e-12
        }
    }
    SUBCASE("x-variance of squeezed vacuum is e^{-2r}") {
        auto variance_x = [](const FockState& s) {
            // second moment from the amplitudes: x^2 = a^2 + a^dag^2 + 2n + 1
            auto amps = s.amplitudes();
            const std::size_t d = s.cutoff();
            double n2 = 0.0, xsq = 0.0;
            for (std::size_t n = 0; n < d; ++n) {
                const double p = std::norm(amps[n]);
                n2 += p;
                xsq += p * (2.0 * static_cast<double>(n) + 1.0);
            }
            for (std::size_t n = 0; n + 2 < d; ++n) {
                const double w = std::sqrt(static_cast<double>((n + 1) * (n + 2)));
                xsq += 2.0 * w * (std::conj(amps[n + 2]) * amps[n]).real();
            }
            xsq /= n2;
            const double mean = expectation_x(s, 0);
            return xsq - mean * mean;
        };
        for (double r : {0.1, 0.3, 0.45}) {
            FockState s = vacuum_state(1, 20);
            apply_squeeze_inplace(s, 0, r, 0.0);
            CHECK(variance_x(s) == doctest::Approx(std::exp(-2.0 * r)).epsilon(1e-6));
        }
        // At r = 0.5 the D = 20 truncation itself floors the deviation at
        // 1.825e-6 (dropped |18><20| cross term). Assert the exact
        // truncated-space value, computed independently from the closed-form
        // amplitudes, and the floor.
        FockState s = vacuum_state(1, 20);
        apply_squeeze_inplace(s, 0, 0.5, 0.0);
        const double v = variance_x(s);
        CHECK(v == doctest::Approx(0.367881265912).epsilon(1e-9));
        CHECK(std::fabs(v - std::exp(-1.0)) < 2.5e-6);
    }
    SUBCASE("norm never exceeds one; deficit shrinks with cutoff") {
        double prev = 0.0;
        for (std::size_t d : {6, 10, 20}) {
            FockState s = vacuum_state(1, d);
            apply_squeeze_inplace(s, 0, 0.5, 1.1);
            const double n = norm(s);
            CHECK(n <= 1.0 + 1e-12);
            CHECK(n >= prev);
            prev = n;
        }
    }
}

TEST_CASE("beamsplitter") {
    SUBCASE("theta = 0 is the identity") {
        FockState s = random_normalized_state(2, 5, 61);
        FockState r = apply_beamsplitter(s, 0, 1, 0.0, 0.4);
        CHECK(max_abs_diff(s, r) < 1e-14);
    }
    SUBCASE("50:50 split of a single photon") {
        FockState s = vacuum_state(2, 8);
        s.amplitudes()[s.encode(std::vector<std::size_t>{0, 0})] = 0.0;
        s.amplitudes()[s.encode(std::vector<std::size_t>{1, 0})] = 1.0;
        apply_beamsplitter_inplace(s, 0, 1, M_PI / 4.0, 0.0);
        const double p10 = std::norm(s.amplitudes()[s.encode(std::vector<std::size_t>{1, 0})]);
        const double p01 = std::norm(s.amplitudes()[s.encode(std::vector<std::size_t>{0, 1})]);
        CHECK(p10 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p01 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("total photon number histogram preserved") {
        // random two-mode state supported below the cutoff
        FockState s = vacuum_state(2, 10);
        Rng rng(71);
        for (std::size_t na = 0; na < 5; ++na) {
            for (std::size_t nb = 0; nb < 5; ++nb) {
                s.amplitudes()[s.encode(std::vector<std::size_t>{na, nb})] =
                    cdouble{rng.normal(), rng.normal()};
            }
        }
        renormalize_inplace(s);
        auto total_hist = [&](const FockState& st) {
            std::vector<double> h(2 * 10 - 1, 0.0);
            for (std::size_t k = 0; k < st.size(); ++k) {
                const auto ns = st.decode(k);
                h[ns[0] + ns[1]] += std::norm(st.amplitudes()[k]);
            }
            return h;
        };
        const auto before = total_hist(s);
        apply_beamsplitter_inplace(s, 0, 1, 0.83, -0.31);
        const auto after = total_hist(s);
        for (std::size_t n = 0; n < before.size(); ++n) {
            CHECK(after[n] == doctest::Approx(before[n]).epsilon(1e-12));
        }
        CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("inverse composition and mode validation") {
        FockState s = random_normalized_state(2, 6, 81);
        FockState t = apply_beamsplitter(s, 0, 1, 0.6, 0.2);
        t = apply_beamsplitter(t, 0, 1, -0.6, 0.2);
        CHECK(max_abs_diff(s, t) < 1e-12);
        CHECK_THROWS_AS(apply_beamsplitter_inplace(s, 0, 0, 0.1, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(apply_beamsplitter_inplace(s, 0, 2, 0.1, 0.0), std::invalid_argument);
    }
    SUBCASE("acts on the named pair of a three-mode state") {
        FockState s = vacuum_state(3, 6);
        s.amplitudes()[0] = 0.0;
        s.amplitudes()[s.encode(std::vector<std::size_t>{0, 1, 0})] = 1.0;
        apply_beamsplitter_inplace(s, 1, 2, M_PI / 4.0, 0.0);
        const double p010 = std::norm(s.amplitudes()[s.encode(std::vector<std::size_t>{0, 1, 0})]);
        const double p001 = std::norm(s.amplitudes()[s.encode(std::vector<std::size_t>{0, 0, 1})]);
        CHECK(p010 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p001 == doctest::Approx(0.5).epsilon(1e-12));
        // mode 0 untouched
        CHECK(photon_number_dist(s, 0)[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("expectation_x") {
    SUBCASE("vacuum and Fock states have zero mean") {
        FockState v = vacuum_state(1, 12);
        CHECK(expectation_x(v, 0) == 0.0);
        v.amplitudes()[0] = 0.0;
        v.amplitudes()[1] = 1.0;  // |1>
        CHECK(expectation_x(v, 0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("coherent state with complex alpha") {
        FockState s = vacuum_state(1, 20);
        apply_displacement_inplace(s, 0, {0.7, 0.2});
        CHECK(expectation_x(s, 0) == doctest::Approx(1.4).epsilon(1e-6));
    }
    SUBCASE("renormalizes internally") {
        FockState s = vacuum_state(1, 20);
        apply_displacement_inplace(s, 0, {0.4, 0.0});
        for (auto& a : s.amplitudes()) a *= 0.5;  // unnormalized copy
        CHECK(expectation_x(s, 0) == doctest::Approx(0.8).epsilon(1e-6));
    }
    SUBCASE("zero-norm state rejected") {
        FockState s = vacuum_state(1, 4);
        s.amplitudes()[0] = 0.0;
        CHECK_THROWS_AS(expectation_x(s, 0), std::domain_error);
    }
}

TEST_CASE("norm and renormalize") {
    FockState s = vacuum_state(1, 6);
    CHECK(norm(s) == 1.0);
    apply_displacement_inplace(s, 0, {2.0, 0.0});
    CHECK(norm(s) < 1.0);  // leakage at a small cutoff
    renormalize_inplace(s);
    CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-15));

    FockState z = vacuum_state(1, 4);
    z.amplitudes()[0] = 0.0;
    CHECK_THROWS_AS(renormalize_inplace(z), std::domain_error);
}

TEST_CASE("gates on different modes commute") {
    Rng rng(91);
    for (int trial = 0; trial < 5; ++trial) {
        FockState s = random_normalized_state(3, 4, 1000 + static_cast<std::uint64_t>(trial));
        const cdouble alpha{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        const double kappa = rng.uniform(-1.0, 1.0);

        FockState ab = s;
        apply_displacement_inplace(ab, 0, alpha);
        apply_kerr_inplace(ab, 2, kappa);

        FockState ba = s;
        apply_kerr_inplace(ba, 2, kappa);
        apply_displacement_inplace(ba, 0, alpha);

        CHECK(max_abs_diff(ab, ba) < 1e-12);
    }
}

TEST_CASE("state JSON dump") {
    FockState s = vacuum_state(1, 3);
    const std::string j = s.to_json();
    CHECK(j.find("\"num_modes\":1") != std::string::npos);
    CHECK(j.find("\"cutoff\":3") != std::string::npos);
    CHECK(j.find("\"amplitudes\":[[1.0,0.0],[0.0,0.0],[0.0,0.0]]") != std::string::npos);
}
