#ifndef LEVYLMM_SUBORDINATION_HPP
#define LEVYLMM_SUBORDINATION_HPP

// Multivariate pure-jump Levy measures obtained by running an m-dimensional
// Brownian motion on a subordinator clock: Y(t) = W(S_t).  The result has an
// absolutely continuous, rotationally symmetric Levy measure and components
// that are uncorrelated but not independent.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/inverse_gaussian.hpp>

#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace levylmm {

class SubordinatedMeasure {
public:
    using Exponent = std::function<double(double)>;
    using Density = std::function<double(double)>;
    /// Draws S_t for a given t.
    using ClockSampler = std::function<double(double, RandomStream&)>;

    SubordinatedMeasure(Exponent laplace_exponent, Density clock_density, int dimension,
                        ClockSampler clock_sampler = {})
        : xi_(std::move(laplace_exponent)), rho_(std::move(clock_density)), m_(dimension),
          clock_sampler_(std::move(clock_sampler)) {
        if (m_ < 1) throw ConfigError("subordinated measure: dimension must be >= 1");
        if (!xi_ || std::abs(xi_(0.0)) > 1e-14)
            throw ConfigError("subordinator Laplace exponent must vanish at 0");
    }

    int dimension() const { return m_; }

    /// Laplace exponent of the subordinator, u <= 0.
    double laplace_exponent(double u) const { return xi_(u); }

    /// Characteristic exponent Phi(z) = Xi(-|z|^2 / 2).
    double characteristic_exponent(std::span<const double> z) const {
        check_dim(z.size());
        return xi_(-0.5 * squared_norm(z));
    }

    /// Phi(z) from its integral definition over the clock's Levy measure.
    double characteristic_exponent_by_quadrature(std::span<const double> z) const {
        check_dim(z.size());
        require_density();
        const double half_r2 = 0.5 * squared_norm(z);
        auto integrand = [&](double s) { return std::expm1(-s * half_r2) * rho_(s); };
        return quad::integrate_from_zero(integrand, 1.0) +
               quad::integrate(integrand, 1.0, std::numeric_limits<double>::infinity());
    }

    /// Levy density of Y at x != 0: a Gaussian mixture over the clock measure.
    double levy_density(std::span<const double> x) const {
        check_dim(x.size());
        require_density();
        const double r2 = squared_norm(x);
        if (r2 == 0.0) throw DomainError("subordinated levy_density: x = 0 is not in the support");
        const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * m_);
        auto integrand = [&](double s) {
            const double rho = rho_(s);
            if (rho == 0.0) return 0.0;
            const double v = norm * std::pow(s, -0.5 * m_) * std::exp(-0.5 * r2 / s) * rho;
            return std::isfinite(v) ? v : 0.0;
        };
        return quad::integrate_from_zero(integrand, 1.0) +
               quad::integrate(integrand, 1.0, std::numeric_limits<double>::infinity());
    }

    /// One draw of Y(t) = W(S_t).
    std::vector<double> sample(double t, RandomStream& rng) const {
        if (!clock_sampler_) throw ConfigError("subordinated measure has no clock sampler");
        const double clock = t > 0.0 ? clock_sampler_(t, rng) : 0.0;
        std::vector<double> y(static_cast<std::size_t>(m_));
        const double scale = std::sqrt(clock);
        for (auto& v : y) v = scale * rng.normal();
        return y;
    }

private:
    static double squared_norm(std::span<const double> v) {
        return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    }
    void check_dim(std::size_t n) const {
        if (n != static_cast<std::size_t>(m_)) throw ConfigError("subordinated measure: argument dimension mismatch");
    }
    void require_density() const {
        if (!rho_) throw ConfigError("subordinated measure: clock Levy density not provided");
    }

    Exponent xi_;
    Density rho_;
    int m_;
    ClockSampler clock_sampler_;
};

/// Subordinated measure from a Laplace exponent (and optionally the clock's
/// Levy density and a clock sampler).
inline SubordinatedMeasure subordinate(SubordinatedMeasure::Exponent laplace_exponent, int dimension,
                                       SubordinatedMeasure::Density clock_density = {},
                                       SubordinatedMeasure::ClockSampler clock_sampler = {}) {
    return SubordinatedMeasure(std::move(laplace_exponent), std::move(clock_density), dimension,
                               std::move(clock_sampler));
}

/// Inverse Gaussian subordinator rho(ds) = c e^{-lambda s} s^{-3/2} ds.
struct InverseGaussianClock {
    double c = 1.0;
    double lambda = 1.0;

    double laplace_exponent(double u) const {
        return -2.0 * c * std::sqrt(std::numbers::pi) * (std::sqrt(lambda - u) - std::sqrt(lambda));
    }
    double density(double s) const { return s > 0.0 ? c * std::exp(-lambda * s) / (s * std::sqrt(s)) : 0.0; }

    /// Closed form Phi(z) = -2c sqrt(pi) (sqrt(lambda + |z|^2/2) - sqrt(lambda)).
    double characteristic_exponent(std::span<const double> z) const {
        const double r2 = std::inner_product(z.begin(), z.end(), z.begin(), 0.0);
        return -2.0 * c * std::sqrt(std::numbers::pi) * (std::sqrt(lambda + 0.5 * r2) - std::sqrt(lambda));
    }

    /// S_t is inverse Gaussian with mean c t sqrt(pi/lambda) and shape 2 pi c^2 t^2.
    double sample(double t, RandomStream& rng) const {
        const double mean = c * t * std::sqrt(std::numbers::pi / lambda);
        const double shape = 2.0 * std::numbers::pi * c * c * t * t;
        const boost::math::inverse_gaussian_distribution<> law(mean, shape);
        return boost::math::quantile(law, rng.uniform());
    }

    SubordinatedMeasure measure(int dimension) const {
        const InverseGaussianClock self = *this;
        if (!(c > 0.0 && lambda > 0.0)) throw ConfigError("inverse Gaussian clock requires c, lambda > 0");
        return subordinate([self](double u) { return self.laplace_exponent(u); }, dimension,
                           [self](double s) { return self.density(s); },
                           [self](double t, RandomStream& rng) { return self.sample(t, rng); });
    }
};

} // namespace levylmm

#endif // LEVYLMM_SUBORDINATION_HPP
