#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "psep/boundary.hpp"
#include "psep/errors.hpp"

using namespace psep;
constexpr double kPi = std::numbers::pi;

TEST_CASE("PV quadrature reproduces trigonometric conjugates") {
    for (double theta : {-2.5, -0.3, 0.7, 2.9}) {
        CHECK(hilbert_pv_quadrature([](double t) { return std::cos(t); }, theta) ==
              doctest::Approx(std::sin(theta)).epsilon(1e-7));
        CHECK(hilbert_pv_quadrature([](double t) { return std::cos(3.0 * t); }, theta) ==
              doctest::Approx(std::sin(3.0 * theta)).epsilon(1e-6));
    }
}

TEST_CASE("indicator transform matches PV quadrature") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(0.0, kPi);
    for (int trial = 0; trial < 10; ++trial) {
        double a = U(gen);
        double b = U(gen);
        if (a > b) std::swap(a, b);
        if (b - a < 0.05) continue;
        PvQuadratureConfig cfg;
        cfg.breakpoints = {a, -a, b, -b};
        const auto f = [a, b](double t) { return (std::abs(t) > a && std::abs(t) <= b) ? 1.0 : 0.0; };
        for (double theta : {-2.0, -0.5, 0.25, 1.3, 3.0}) {
            if (std::abs(std::abs(theta) - a) < 1e-3 || std::abs(std::abs(theta) - b) < 1e-3) continue;
            CHECK(hilbert_indicator(a, b, theta) == doctest::Approx(hilbert_pv_quadrature(f, theta, cfg)).epsilon(1e-6));
        }
    }
}

TEST_CASE("indicator transform edge cases") {
    // The full half-circle indicator is the constant 1, whose conjugate vanishes.
    CHECK(std::abs(hilbert_indicator(0.0, kPi, 1.0)) < 1e-15);
    // The transform is odd in theta.
    CHECK(hilbert_indicator(0.3, 1.2, 0.8) == doctest::Approx(-hilbert_indicator(0.3, 1.2, -0.8)));
    CHECK_THROWS_AS(hilbert_indicator(0.3, 1.2, 1.2), SingularityError);
    CHECK_THROWS_AS(hilbert_indicator(1.2, 0.3, 0.0), DomainError);
}

TEST_CASE("step transform matches PV quadrature on random steps") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-kPi, kPi);
    for (int trial = 0; trial < 5; ++trial) {
        const auto qs = oracle::random_step(gen, 2 + trial * 3, false);
        PvQuadratureConfig cfg;
        cfg.breakpoints = jump_angles(qs);
        const auto f = [&qs](double t) { return phi_eval(qs, t); };
        for (int i = 0; i < 5; ++i) {
            const double theta = U(gen);
            bool clear = true;
            for (double j : cfg.breakpoints) clear = clear && std::abs(theta - j) > 1e-3;
            if (!clear) continue;
            CHECK(hilbert_phi_step(qs, theta) == doctest::Approx(hilbert_pv_quadrature(f, theta, cfg)).epsilon(1e-6));
        }
    }
}

TEST_CASE("step transform singularities") {
    const QuantileStep qs({0.5, 1.0}, {-1.0, 1.0});
    CHECK_THROWS_AS(hilbert_phi_step(qs, kPi / 2.0), SingularityError);
    CHECK_THROWS_AS(hilbert_phi_step(qs, -kPi / 2.0 + 1e-10), SingularityError);
    CHECK_NOTHROW(hilbert_phi_step(qs, kPi / 2.0 + 1e-6));
    CHECK_THROWS_AS(phi_eval(qs, kPi), DomainError);
}

TEST_CASE("two-point curve lies on two vertical lines") {
    const QuantileStep qs({0.5, 1.0}, {-1.0, 1.0});
    const auto curve = boundary_curve(qs, 256);
    REQUIRE(curve.samples.size() == 256);
    for (const auto& s : curve.samples) CHECK((s.x == -1.0 || s.x == 1.0));
}

TEST_CASE("curve symmetry and grid") {
    std::mt19937_64 gen(9);
    const auto qs = oracle::random_step(gen, 6, false);
    const auto curve = boundary_curve(qs, 200);
    const std::size_t n = curve.samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = curve.samples[i];
        const auto& b = curve.samples[n - 1 - i];
        CHECK(a.theta == -b.theta);
        CHECK(a.x == b.x);
        CHECK(a.y == -b.y);
        if (i > 0) CHECK(curve.samples[i - 1].theta < a.theta);
    }
    CHECK_THROWS_AS(boundary_curve(qs, 32), ConfigError);
}

TEST_CASE("angle grid clears jump angles") {
    // Jump exactly at a grid midpoint: pi * 0.5 with 4 cells per quarter.
    const QuantileStep qs({0.5 + 1.0 / 128.0, 1.0}, {0.0, 1.0});
    const auto grid = AngleGrid::avoiding(qs, 128);
    for (double t : grid.angles()) {
        for (double j : grid.jump_angles()) CHECK(std::abs(t - j) >= kJumpClearance);
    }
}

TEST_CASE("curve csv round trip keeps 17 digits") {
    std::mt19937_64 gen(1);
    const auto curve = boundary_curve(oracle::random_step(gen, 4, false), 64);
    std::stringstream ss;
    write_curve_csv(curve, ss);
    CHECK(ss.str().rfind("theta,x,y\n", 0) == 0);
    const auto back = read_curve_csv(ss);
    REQUIRE(back.samples.size() == curve.samples.size());
    for (std::size_t i = 0; i < back.samples.size(); ++i) {
        CHECK(back.samples[i].theta == curve.samples[i].theta);
        CHECK(back.samples[i].x == curve.samples[i].x);
        CHECK(back.samples[i].y == curve.samples[i].y);
    }
    std::istringstream bad("x,y\n1,2\n");
    CHECK_THROWS_AS(read_curve_csv(bad), ConfigError);
}

TEST_CASE("svg output") {
    const auto svg = curve_svg(boundary_curve(QuantileStep({0.5, 1.0}, {-1.0, 1.0}), 64));
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find(" Z\"") != std::string::npos);
}
