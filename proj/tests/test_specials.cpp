#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "darboux/specials.hpp"
#include "oracles.hpp"

namespace sp = darboux::special;
constexpr double kPi = std::numbers::pi;

TEST(Gamma, KnownValues) {
    EXPECT_NEAR(sp::gamma(1.0), 1.0, 1e-15);
    EXPECT_NEAR(sp::gamma(0.5), std::sqrt(kPi), 1e-14);
    EXPECT_NEAR(sp::gamma(5.0), 24.0, 1e-12);
    EXPECT_NEAR(sp::gamma(1.25), 0.9064024770554771, 1e-14);
    EXPECT_NEAR(sp::gamma(-0.5), -2 * std::sqrt(kPi), 1e-13);
    for (double x = 0.3; x < 8; x += 0.37) EXPECT_NEAR(sp::gamma(x + 1) / (x * sp::gamma(x)), 1.0, 1e-13);
    EXPECT_THROW(sp::gamma(0.0), std::domain_error);
    EXPECT_THROW(sp::gamma(-2.0), std::domain_error);
}

TEST(Bessel, IntegerOrdersAgainstSeries) {
    EXPECT_NEAR(sp::bessel_j(0, 1.0), 0.7651976865579666, 1e-14);
    for (double x = 0.0; x <= 11.5; x += 0.5) {
        EXPECT_NEAR(sp::bessel_j(0, x), oracle::bessel_jn(0, x), 1e-12) << x;
        EXPECT_NEAR(sp::bessel_j(1, x), oracle::bessel_jn(1, x), 1e-12) << x;
    }
}

TEST(Bessel, HalfOrdersHaveClosedForms) {
    EXPECT_NEAR(sp::bessel_j(0.5, kPi / 2), 0.6366197723675813, 1e-12);
    EXPECT_NEAR(sp::bessel_y(0.5, kPi), 0.4501581580785531, 1e-12);
    for (double w = 0.1; w <= 20; w += 0.173) {
        EXPECT_NEAR(sp::bessel_j(0.5, w), oracle::j_half(w), 1e-12) << w;
        EXPECT_NEAR(sp::bessel_y(0.5, w), oracle::y_half(w), 1e-12) << w;
    }
}

TEST(Bessel, QuarterOrderValues) {
    EXPECT_NEAR(sp::bessel_y(0.25, 0.5), -0.756843545694496, 1e-12);
    EXPECT_NEAR(sp::bessel_y(0.25, 1.0), -0.1944217536771644, 1e-12);
    EXPECT_NEAR(sp::bessel_y(0.25, 2.0), 0.3927383996153851, 1e-12);
    // small-argument limit of sqrt(z) J_{1/4}(z^2/2) / z
    EXPECT_NEAR(sp::quarter_bessel_mode(1e-4, 1, 0) / 1e-4, 0.7801245021788135, 1e-8);
    EXPECT_THROW(sp::quarter_bessel_mode(0.0, 1, 0), std::domain_error);
}

TEST(Bessel, WronskianIdentity) {
    for (double nu : {0.0, 0.25, 0.5, 1.0}) {
        for (double w = 0.3; w <= 10; w += 0.0977) {
            auto J = [&](double t) { return sp::bessel_j(nu, t); };
            auto Y = [&](double t) { return sp::bessel_y(nu, t); };
            const double h = 1e-3;
            const double W = J(w) * oracle::d1(Y, w, h) - Y(w) * oracle::d1(J, w, h);
            EXPECT_NEAR(W, 2 / (kPi * w), 1e-8) << nu << " " << w;
        }
    }
}

TEST(Bessel, SatisfiesBesselEquation) {
    for (double nu : {0.0, 0.25, 1.0, 2.0}) {
        for (double w = 0.5; w <= 8; w += 0.0311) {
            for (int kind = 0; kind < 2; ++kind) {
                auto f = [&](double t) { return kind == 0 ? sp::bessel_j(nu, t) : sp::bessel_y(nu, t); };
                const double h = 1e-3;
                const double r = w * w * oracle::d2(f, w, h) + w * oracle::d1(f, w, h) + (w * w - nu * nu) * f(w);
                EXPECT_LE(std::abs(r), 1e-7 * std::max(1.0, w * w)) << nu << " " << w << " " << kind;
            }
        }
    }
}

TEST(Bessel, SeriesAndAsymptoticAgreeAcrossTheSeam) {
    for (double nu : {0.0, 0.25, 0.5, 1.0}) {
        for (double w = 10; w <= 14; w += 0.25) {
            EXPECT_NEAR(sp::bessel_j_series(nu, w), sp::bessel_j_asymptotic(nu, w), 1e-9) << nu << " " << w;
            EXPECT_NEAR(sp::bessel_y_series(nu, w), sp::bessel_y_asymptotic(nu, w), 1e-9) << nu << " " << w;
        }
    }
}

TEST(Bessel, RecurrenceForOrderTwo) {
    for (double w = 0.5; w < 15; w += 0.7) {
        EXPECT_NEAR(sp::bessel_j(2, w), 2 / w * sp::bessel_j(1, w) - sp::bessel_j(0, w), 1e-12);
        EXPECT_NEAR(sp::bessel_y(2, w), 2 / w * sp::bessel_y(1, w) - sp::bessel_y(0, w), 1e-10 * std::max(1.0, std::abs(sp::bessel_y(2, w))));
    }
}

TEST(Bessel, DomainErrors) {
    EXPECT_THROW(sp::bessel_y(0.25, 0.0), std::domain_error);
    EXPECT_THROW(sp::bessel_j(0.25, -1.0), std::domain_error);
    EXPECT_THROW(sp::bessel_j(3.5, 1.0), std::domain_error);
}

TEST(QuarterBesselMode, SolvesTheOscillatorWithQuadraticFrequency) {
    for (double c2 : {0.0, 1.0}) {
        auto f = [&](double z) { return sp::quarter_bessel_mode(z, 1.0, c2); };
        for (double z = 0.2; z <= 4; z += 0.0731) {
            const double r = oracle::d2(f, z, 1e-3) + z * z * f(z);
            EXPECT_LE(std::abs(r), 1e-7 * (1 + z * z)) << z;
        }
    }
}

TEST(Erfi, SeriesDerivativeAndLimits) {
    EXPECT_NEAR(sp::erfi_scaled(1.0), 1.4626517459071816, 1e-14);
    EXPECT_EQ(sp::erfi_scaled(0.0), 0.0);
    EXPECT_NEAR(sp::erfi_scaled(-0.7), -sp::erfi_scaled(0.7), 1e-16);
    for (double x = -2.9; x <= 2.9; x += 0.13)
        EXPECT_NEAR(oracle::d1(sp::erfi_scaled, x, 1e-3) / std::exp(x * x), 1.0, 1e-9) << x;
    EXPECT_THROW(sp::erfi_scaled(3.5), std::domain_error);
}
