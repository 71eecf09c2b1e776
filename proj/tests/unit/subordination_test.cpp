#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace levylmm;

TEST(Subordination, InverseGaussianExponentMatchesIntegral) {
    const InverseGaussianClock clock{0.8, 1.5};
    for (double u : {0.0, -0.5, -3.0, -12.0}) {
        auto f = [&](double s) { return std::expm1(u * s) * clock.density(s); };
        const double q = quad::integrate_from_zero(f, 1.0) + quad::integrate(f, 1.0, std::numeric_limits<double>::infinity());
        EXPECT_NEAR(clock.laplace_exponent(u), q, 1e-8) << u;
    }
}

TEST(Subordination, ClosedFormMatchesDefinition) {
    const auto c = oracle::subordination_closed_form();
    EXPECT_TRUE(c.pass) << c.value;
}

TEST(Subordination, CharacteristicExponentDependsOnNorm) {
    const auto m = InverseGaussianClock{0.8, 1.5}.measure(2);
    const double a[2] = {3.0, 4.0}, b[2] = {5.0, 0.0};
    EXPECT_NEAR(m.characteristic_exponent(a), m.characteristic_exponent(b), 1e-14);
    EXPECT_THROW(m.characteristic_exponent(std::span<const double>(a, 1)), ConfigError);
}

TEST(Subordination, DensityIsRadialAndUndefinedAtOrigin) {
    const auto m = InverseGaussianClock{0.8, 1.5}.measure(2);
    const double a[2] = {0.3, 0.4}, b[2] = {0.0, -0.5}, o[2] = {0.0, 0.0};
    EXPECT_NEAR(m.levy_density(a), m.levy_density(b), 1e-12 * m.levy_density(a));
    EXPECT_THROW(m.levy_density(o), DomainError);
}

TEST(Subordination, ComponentsUncorrelatedButDependent) {
    const InverseGaussianClock clock{0.8, 1.5};
    const auto m = clock.measure(2);
    const int n = 20000;
    std::vector<double> xy(n), x2y2(n), x2(n);
    for (int s = 0; s < n; ++s) {
        auto rng = common_randomness(3, static_cast<std::uint32_t>(s), StreamTag::auxiliary);
        const auto y = m.sample(1.0, rng);
        xy[s] = y[0] * y[1];
        x2y2[s] = y[0] * y[0] * y[1] * y[1];
        x2[s] = y[0] * y[0];
    }
    const auto c = estimate(xy);
    EXPECT_LT(std::abs(c.mean), 3.0 * c.stderr_);
    // a shared clock makes squared components positively correlated
    const double v = estimate(x2).mean;
    EXPECT_GT(estimate(x2y2).mean, 1.2 * v * v);
}

TEST(Subordination, InvalidClock) {
    EXPECT_THROW((InverseGaussianClock{-1.0, 1.0}.measure(2)), ConfigError);
    EXPECT_THROW(subordinate([](double u) { return u + 1.0; }, 2), ConfigError);
}
