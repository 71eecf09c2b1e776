#ifndef LEVYLMM_QUADRATURE_HPP
#define LEVYLMM_QUADRATURE_HPP

// Adaptive Gauss-Kronrod integration used for every Levy-measure integral.
// Integrable power singularities at the origin are removed with the
// logarithmic substitution x = a*exp(-v) before handing off to Boost.

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace levylmm::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    unsigned max_depth = 15;
};

namespace detail {

template <class F>
double gk(F&& f, double a, double b, const Options& opt) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    double l1 = 0.0;
    double val = gauss_kronrod<double, 21>::integrate(f, a, b, opt.max_depth, opt.rel_tol, &err, &l1);
    if (err > opt.abs_tol && err > opt.rel_tol * l1) {
        // Boost stops on relative error alone; one higher-order pass when the
        // absolute target is missed.  Depth is not increased: past this point
        // the estimate is dominated by accumulated rounding, not truncation.
        val = gauss_kronrod<double, 31>::integrate(f, a, b, opt.max_depth, opt.rel_tol, &err, &l1);
    }
    return val;
}

} // namespace detail

/// Integral over a finite interval or a half-line (a or b may be infinite).
template <class F>
double integrate(F&& f, double a, double b, const Options& opt = {}) {
    if (a == b) return 0.0;
    return detail::gk(std::forward<F>(f), a, b, opt);
}

/// Integral over (0, a] for integrands with an integrable singularity at 0.
/// The substituted range stops at x = a*1e-40; the omitted piece is below
/// any tolerance for singularities weaker than x^{-1+0.1}.
template <class F>
double integrate_from_zero(F&& f, double a, const Options& opt = {}) {
    if (a <= 0.0) return 0.0;
    constexpr double v_max = 92.1;  // 40 decades
    auto g = [&](double v) { const double x = a * std::exp(-v); return f(x) * x; };
    return detail::gk(g, 0.0, v_max, opt);
}

} // namespace levylmm::quad

#endif // LEVYLMM_QUADRATURE_HPP
