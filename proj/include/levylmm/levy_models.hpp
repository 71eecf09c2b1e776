#ifndef LEVYLMM_LEVY_MODELS_HPP
#define LEVYLMM_LEVY_MODELS_HPP

// Driving Levy processes of the LIBOR model: closed-form cumulants, Levy
// densities and big-jump sampling for the CGMY (tempered stable) and Merton
// (compound Poisson, normal jumps) specifications, plus an optional Brownian
// component with time-dependent scale alpha(t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"
#include "piecewise.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace levylmm {

struct CgmyParams {
    double C = 0.0;
    double G = 0.0;
    double M = 0.0;
    double Y = 0.0;

    /// C such that the pure-jump process has unit variance at t = 1.
    static CgmyParams unit_variance(double G, double M, double Y) {
        const double var_per_c = std::tgamma(2.0 - Y) * (std::pow(M, Y - 2.0) + std::pow(G, Y - 2.0));
        return {1.0 / var_per_c, G, M, Y};
    }
};

struct MertonParams {
    double intensity = 0.0;  ///< jumps per year
    double jump_mean = 0.0;
    double jump_stdev = 0.0;
    /// When false the cumulant uses exp(mu*u + sigma^2*u^2) without the 1/2.
    /// That variant does not match the normal jump law; it exists so the
    /// self-test can demonstrate the variance check catching it.
    bool half_variance_convention = true;
};

/// Which part of the real line a Levy-measure integral covers.
enum class JumpRegion { all, big };

class LevyModel {
public:
    using Variant = std::variant<CgmyParams, MertonParams>;

    LevyModel(Variant jumps, PiecewiseConstant alpha = PiecewiseConstant(0.0))
        : jumps_(jumps), alpha_(std::move(alpha)) {
        if (const auto* c = std::get_if<CgmyParams>(&jumps_)) {
            if (!(c->C > 0.0 && c->G > 0.0 && c->M > 0.0))
                throw ConfigError("CGMY requires C, G, M > 0");
            if (!(c->Y > 0.0 && c->Y < 1.0))
                throw ConfigError("CGMY requires Y in (0,1) (infinite activity, finite variation)");
        } else {
            const auto& m = std::get<MertonParams>(jumps_);
            if (!(m.intensity > 0.0 && m.jump_stdev > 0.0))
                throw ConfigError("Merton requires intensity > 0 and jump stdev > 0");
        }
        if (alpha_.inf() < 0.0) throw ConfigError("diffusion scale alpha(t) must be nonnegative");
    }

    static LevyModel cgmy(double C, double G, double M, double Y, PiecewiseConstant alpha = PiecewiseConstant(0.0)) {
        return LevyModel(CgmyParams{C, G, M, Y}, std::move(alpha));
    }
    static LevyModel merton(double intensity, double mean, double stdev,
                            PiecewiseConstant alpha = PiecewiseConstant(0.0)) {
        return LevyModel(MertonParams{intensity, mean, stdev}, std::move(alpha));
    }

    const Variant& jumps() const { return jumps_; }
    bool is_cgmy() const { return std::holds_alternative<CgmyParams>(jumps_); }
    std::string name() const { return is_cgmy() ? "cgmy" : "merton"; }
    const PiecewiseConstant& alpha() const { return alpha_; }
    double alpha(double s) const { return alpha_(s); }
    int dimension() const { return 1; }

    /// Open interval of u on which the jump cumulant is finite.
    std::pair<double, double> exponential_moment_domain() const {
        if (const auto* c = std::get_if<CgmyParams>(&jumps_)) return {-c->G, c->M};
        const double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf};
    }

    /// Largest loading magnitude the exponential-moment condition tolerates.
    double moment_bound() const {
        const auto [lo, hi] = exponential_moment_domain();
        return std::min(-lo, hi);
    }

    /// Jump part of the cumulant, int (e^{ux} - 1 - ux) F(dx).
    double jump_cumulant(double u) const {
        if (const auto* c = std::get_if<CgmyParams>(&jumps_)) {
            check_domain(u);
            const double g = std::tgamma(-c->Y);
            const double pos = std::pow(c->M, c->Y) * (std::expm1(c->Y * std::log1p(-u / c->M)) + u * c->Y / c->M);
            const double neg = std::pow(c->G, c->Y) * (std::expm1(c->Y * std::log1p(u / c->G)) - u * c->Y / c->G);
            return c->C * g * (pos + neg);
        }
        const auto& m = std::get<MertonParams>(jumps_);
        const double quad = m.half_variance_convention ? 0.5 : 1.0;
        return m.intensity * (std::expm1(m.jump_mean * u + quad * m.jump_stdev * m.jump_stdev * u * u) - m.jump_mean * u);
    }

    /// kappa_s(u) = alpha(s)/2 u^2 + jump_cumulant(u).
    double cumulant(double u, double s) const { return 0.5 * alpha_(s) * u * u + jump_cumulant(u); }

    /// Closed-form first or second derivative of the jump cumulant.
    double jump_cumulant_derivative(double u, int order) const {
        if (order != 1 && order != 2) throw ConfigError("jump_cumulant_derivative: order must be 1 or 2");
        if (const auto* c = std::get_if<CgmyParams>(&jumps_)) {
            check_domain(u);
            const double k = c->C * std::tgamma(-c->Y) * c->Y;
            if (order == 1) {
                return k * (std::pow(c->M, c->Y - 1.0) * (1.0 - std::pow(1.0 - u / c->M, c->Y - 1.0)) +
                            std::pow(c->G, c->Y - 1.0) * (std::pow(1.0 + u / c->G, c->Y - 1.0) - 1.0));
            }
            return k * (c->Y - 1.0) *
                   (std::pow(c->M, c->Y - 2.0) * std::pow(1.0 - u / c->M, c->Y - 2.0) +
                    std::pow(c->G, c->Y - 2.0) * std::pow(1.0 + u / c->G, c->Y - 2.0));
        }
        const auto& m = std::get<MertonParams>(jumps_);
        const double s2 = m.jump_stdev * m.jump_stdev * (m.half_variance_convention ? 1.0 : 2.0);
        const double e = std::exp(m.jump_mean * u + 0.5 * s2 * u * u);
        const double slope = m.jump_mean + s2 * u;
        if (order == 1) return m.intensity * (slope * e - m.jump_mean);
        return m.intensity * (slope * slope + s2) * e;
    }

    double cumulant_derivative(double u, double s, int order) const {
        const double diff = order == 1 ? alpha_(s) * u : alpha_(s);
        return diff + jump_cumulant_derivative(u, order);
    }

    /// Levy density nu(x), x != 0.
    double levy_density(double x) const {
        if (x == 0.0) throw DomainError("levy_density: x = 0 is not in the support");
        if (const auto* c = std::get_if<CgmyParams>(&jumps_)) {
            const double a = std::abs(x);
            const double rate = x > 0.0 ? c->M : c->G;
            return c->C * std::exp(-rate * a) / std::pow(a, 1.0 + c->Y);
        }
        const auto& m = std::get<MertonParams>(jumps_);
        const double z = (x - m.jump_mean) / m.jump_stdev;
        return m.intensity * std::exp(-0.5 * z * z) / (m.jump_stdev * std::sqrt(2.0 * std::numbers::pi));
    }

    /// int g(x) F(dx) over R\{0} or over |x| > eps.
    template <class G>
    double integrate(G&& g, JumpRegion region = JumpRegion::all, double eps = 0.0,
                     const quad::Options& opt = {}) const {
        const double inf = std::numeric_limits<double>::infinity();
        const double lo = region == JumpRegion::big ? eps : 0.0;
        // Far in the tails the density underflows before g overflows; the
        // true product there is negligible, so non-finite products count as 0.
        auto weighted = [&](double x) {
            const double d = levy_density(x);
            if (d == 0.0) return 0.0;
            const double v = g(x) * d;
            return std::isfinite(v) ? v : 0.0;
        };
        auto pos = [&](double x) { return weighted(x); };
        auto neg = [&](double x) { return weighted(-x); };
        if (is_cgmy()) {
            // power singularity at 0: logarithmic substitution on (0,1]
            auto half_line = [&](auto&& h) {
                if (lo >= 1.0) return quad::integrate(h, lo, inf, opt);
                const double head = lo == 0.0 ? quad::integrate_from_zero(h, 1.0, opt) : quad::integrate(h, lo, 1.0, opt);
                return head + quad::integrate(h, 1.0, inf, opt);
            };
            return half_line(pos) + half_line(neg);
        }
        const auto& m = std::get<MertonParams>(jumps_);
        // extra knot past the jump mean so the bulk of the normal law is resolved
        auto half_line = [&](auto&& h, double centre) {
            const double knot = std::max(lo, centre + 2.0 * m.jump_stdev);
            return quad::integrate(h, lo, knot, opt) + quad::integrate(h, knot, inf, opt);
        };
        return half_line(pos, m.jump_mean) + half_line(neg, -m.jump_mean);
    }

    /// Variance rate of the jumps dropped by truncation at eps.
    double small_jump_variance(double eps) const {
        if (!(eps > 0.0)) return 0.0;
        if (is_cgmy()) {
            auto pos = [&](double x) { return x * x * levy_density(x); };
            auto neg = [&](double x) { return x * x * levy_density(-x); };
            return quad::integrate_from_zero(pos, eps) + quad::integrate_from_zero(neg, eps);
        }
        auto f = [&](double x) { return x * x * levy_density(x); };
        return quad::integrate(f, -eps, 0.0) + quad::integrate(f, 0.0, eps);
    }

    /// F({|x| > eps}).
    double big_jump_intensity(double eps) const {
        if (const auto* m = std::get_if<MertonParams>(&jumps_)) {
            const boost::math::normal_distribution<> law(m->jump_mean, m->jump_stdev);
            return m->intensity * (boost::math::cdf(law, -eps) + boost::math::cdf(complement(law, eps)));
        }
        if (!(eps > 0.0)) throw ConfigError("CGMY has infinite activity: truncation eps must be > 0");
        return integrate([](double) { return 1.0; }, JumpRegion::big, eps);
    }

    /// int_{|x|>eps} x F(dx), the drift that compensates the big jumps.
    double big_jump_mean(double eps) const {
        return integrate([](double x) { return x; }, JumpRegion::big, eps);
    }

private:
    void check_domain(double u) const {
        const auto [lo, hi] = exponential_moment_domain();
        if (!(u > lo && u < hi))
            throw DomainError("cumulant argument " + std::to_string(u) + " outside the exponential-moment domain (" +
                              std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }

    Variant jumps_;
    PiecewiseConstant alpha_;
};

/// Jumps of size |x| > eps on (0, horizon], times strictly increasing.
struct JumpSample {
    std::vector<double> times;
    std::vector<double> sizes;
    double eps = 0.0;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

/// Compound Poisson sampler for the big jumps of a model.  Caches the
/// intensity so per-path sampling does no quadrature.
class BigJumpSampler {
public:
    BigJumpSampler(const LevyModel& model, double eps) : model_(&model), eps_(eps) {
        if (!(eps > 0.0)) throw ConfigError("truncation eps must be > 0");
        intensity_ = model.big_jump_intensity(eps);
        if (!std::isfinite(intensity_) || intensity_ < 0.0)
            throw ConfigError("big-jump intensity is not finite");
        compensator_ = model.big_jump_mean(eps);
    }

    double eps() const { return eps_; }
    double intensity() const { return intensity_; }
    /// int_{|x|>eps} x F(dx)
    double compensator() const { return compensator_; }

    /// One draw from F restricted to |x| > eps, normalised.
    double sample_size(RandomStream& rng) const {
        if (const auto* c = std::get_if<CgmyParams>(&model_->jumps())) {
            // Symmetric Pareto proposal ~ |x|^{-1-Y} on |x| > eps, accepted
            // with the tempering factor exp(-M x) or exp(-G |x|).
            const double inv_y = -1.0 / c->Y;
            for (;;) {
                const double sign_u = rng.uniform();
                const double a = eps_ * std::pow(rng.uniform(), inv_y);
                const bool positive = sign_u < 0.5;
                const double accept = std::exp(-(positive ? c->M : c->G) * a);
                if (rng.uniform() < accept) return positive ? a : -a;
            }
        }
        const auto& m = std::get<MertonParams>(model_->jumps());
        for (;;) {
            const double x = m.jump_mean + m.jump_stdev * rng.normal();
            if (std::abs(x) > eps_) return x;
        }
    }

    JumpSample sample(double horizon, RandomStream& rng) const {
        JumpSample out;
        out.eps = eps_;
        if (horizon <= 0.0 || intensity_ == 0.0) return out;
        std::poisson_distribution<long long> count_law(intensity_ * horizon);
        const auto count = static_cast<std::size_t>(count_law(rng));
        out.times.resize(count);
        for (auto& t : out.times) t = horizon * rng.uniform();
        std::sort(out.times.begin(), out.times.end());
        out.sizes.resize(count);
        for (auto& x : out.sizes) x = sample_size(rng);
        return out;
    }

private:
    const LevyModel* model_;
    double eps_;
    double intensity_ = 0.0;
    double compensator_ = 0.0;
};

/// Big jumps of the model on (0, horizon].
inline JumpSample sample_jumps(const LevyModel& model, double eps, double horizon, RandomStream& rng) {
    return BigJumpSampler(model, eps).sample(horizon, rng);
}

} // namespace levylmm

#endif // LEVYLMM_LEVY_MODELS_HPP
