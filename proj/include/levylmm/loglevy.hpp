#ifndef LEVYLMM_LOGLEVY_HPP
#define LEVYLMM_LOGLEVY_HPP

// Log-Levy approximation of the log-LIBORs.  Integrating the truncated drift
// by parts and replacing Z_j = f(G_j), Y_kl = Z_k Z_l by their first Picard
// iterates gives
//
//   G_i(t) ~ Ghat_i(0,t) + int H_i(t,s) ds + int Theta_i(t,s) dW(s)
//            + int int I_i(t,s,x) (mu - nu)(ds,dx)
//
// with deterministic kernels.  f(x) = delta e^x / (1 + delta e^x).
//
// The frozen annuity approximation lives here as well:
//   log A_i(t) = log A_i(0) - 1/2 int alpha Lambda_i^2 + int sqrt(alpha) Lambda_i dW
//                + sum_jumps log R_i(s,x) - int int_{|x|>eps} (R_i - 1) F ds
// with Lambda_i = sum_{j>i} Z_j(0) lambda_j and
// R_i = prod_{j>i} (1 + delta_j L_j(0) e^{lambda_j x}) / (1 + delta_j L_j(0)).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "drift.hpp"
#include "errors.hpp"
#include "levy_models.hpp"
#include "market.hpp"

namespace levylmm {

/// Picard data of Z_j on one tenor interval.  Frozen at G_j(0).
struct ZCoefficient {
    double A = 0.0;       ///< drift coefficient
    double B = 0.0;       ///< diffusion coefficient f'(G_j(0)) sqrt(alpha) lambda_j
    double z0 = 0.0;      ///< Z_j(0)
    double dl0 = 0.0;     ///< delta_j L_j(0)
    double lambda = 0.0;  ///< lambda_j on the interval

    /// f(G_j(0) + lambda_j x)
    double shifted(double x) const {
        const double e = dl0 * std::exp(lambda * x);
        return e / (1.0 + e);
    }
    /// C_j(x) = f(G_j(0) + lambda_j x) - f(G_j(0)), accurate for small x.
    double C(double x) const {
        const double m = std::expm1(lambda * x);
        return dl0 * m / ((1.0 + dl0 * (1.0 + m)) * (1.0 + dl0));
    }
};

/// Picard data of Y_kl = Z_k Z_l on one tenor interval.
struct YCoefficient {
    double A = 0.0;
    double B = 0.0;
    ZCoefficient k;
    ZCoefficient l;

    double y0() const { return k.z0 * l.z0; }
    /// g(G + lambda x) - g(G); the linear terms of the jump transform cancel
    /// against the compensator, leaving the plain increment.
    double C(double x) const { return k.shifted(x) * l.C(x) + l.z0 * k.C(x); }
};

/// Kernels of one rate i at one horizon t.
struct ApproxKernels;

class LogLevyApproximation {
public:
    /// order 1 or 2; frozen replaces the Picard iterates by their time-0 values.
    LogLevyApproximation(const DriftEngine& engine, int order, bool frozen, double eps)
        : engine_(&engine), order_(order), frozen_(frozen), eps_(eps), n_(engine.size()) {
        if (order != 1 && order != 2) throw ConfigError("log-Levy approximation order must be 1 or 2");
        if (!(eps > 0.0)) throw ConfigError("truncation eps must be > 0");
        const auto& market = engine.market();
        const auto& model = engine.model();
        const auto l0 = market.initial_libors();
        g0_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
        z0_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
        for (int j = 1; j <= n_; ++j) {
            if (!(l0[static_cast<std::size_t>(j)] > 0.0)) throw ConfigError("log-Levy approximation needs positive initial LIBORs");
            g0_[static_cast<std::size_t>(j)] = std::log(l0[static_cast<std::size_t>(j)]);
            const double dl = market.delta(j) * l0[static_cast<std::size_t>(j)];
            z0_[static_cast<std::size_t>(j)] = dl / (1.0 + dl);
        }
        jump_mean_ = model.big_jump_mean(eps);
        const std::size_t d = static_cast<std::size_t>(n_) + 1;
        z_.assign(d * d, ZCoefficient{});
        z_comp_.assign(d * d, 0.0);
        if (order_ == 2) {
            y_.assign(d * d * d, YCoefficient{});
            y_comp_.assign(d * d * d, 0.0);
        }
        for (int n = 0; n <= n_; ++n) {
            for (int j = n + 1; j <= n_; ++j) {
                auto& z = z_[zi(n, j)];
                z = base_coefficient(n, j, l0);
                if (frozen_) continue;
                const double f = z.z0;
                const double f1 = f * (1.0 - f);
                const double f2 = f1 * (1.0 - 2.0 * f);
                const double b0 = order_ == 2 ? engine.frozen(j, n) : engine.frozen_first_order(j, n);
                const double a = engine.kernels().alpha(n);
                z.A = f1 * b0 + 0.5 * f2 * z.lambda * z.lambda * a + z_jump_integral(z);
                z.B = f1 * std::sqrt(a) * z.lambda;
                z_comp_[zi(n, j)] = z_big_jump_integral(z);
            }
            if (order_ != 2 || frozen_) continue;
            for (int k = n + 1; k <= n_; ++k)
                for (int l = k + 1; l <= n_; ++l) {
                    YCoefficient y;
                    y.k = z_[zi(n, k)];
                    y.l = z_[zi(n, l)];
                    const double fk = y.k.z0, fl = y.l.z0;
                    const double dk = fk * (1.0 - fk), dlf = fl * (1.0 - fl);
                    const double gk = dk * fl, gl = fk * dlf;
                    const double gkk = dk * (1.0 - 2.0 * fk) * fl, gll = fk * dlf * (1.0 - 2.0 * fl), gkl = dk * dlf;
                    const double bk = engine.frozen(k, n), bl = engine.frozen(l, n);
                    const double a = engine.kernels().alpha(n);
                    const double lk = y.k.lambda, ll = y.l.lambda;
                    y.A = gk * bk + gl * bl + 0.5 * a * (gkk * lk * lk + 2.0 * gkl * lk * ll + gll * ll * ll) +
                          y_jump_integral(y, gk, gl);
                    y.B = std::sqrt(a) * (gk * lk + gl * ll);
                    y_[yi(n, k, l)] = y;
                    y_comp_[yi(n, k, l)] = y_big_jump_integral(y);
                }
        }
    }

    int order() const { return order_; }
    bool frozen() const { return frozen_; }
    double eps() const { return eps_; }
    int size() const { return n_; }
    const DriftEngine& engine() const { return *engine_; }

    double g0(int i) const { return g0_[static_cast<std::size_t>(i)]; }
    double z0(int j) const { return z0_[static_cast<std::size_t>(j)]; }
    /// int_{|x|>eps} x F(dx)
    double big_jump_mean() const { return jump_mean_; }

    /// Picard coefficients of Z_j on interval n (zero once j has fixed).
    const ZCoefficient& z(int n, int j) const { return z_[zi(n, j)]; }
    /// Picard coefficients of Y_kl on interval n, k < l (order 2, non-frozen).
    const YCoefficient& y(int n, int k, int l) const {
        if (y_.empty()) throw StateError("pair coefficients exist only for order 2 without freezing");
        return y_[yi(n, k, l)];
    }
    /// int_{|x|>eps} C_j F(dx) on interval n.
    double z_compensator(int n, int j) const { return z_comp_[zi(n, j)]; }
    double y_compensator(int n, int k, int l) const { return y_comp_[yi(n, k, l)]; }

    bool uses_pairs() const { return order_ == 2 && !frozen_; }
    bool uses_picard() const { return !frozen_; }

    /// Ghat_i(0,t) = G_i(0) - sum_j V_ij(0,t) Z_j(0) - sum_kl Vbar_ikl(0,t) Y_kl(0).
    double G_hat(int i, double t) const {
        const auto& K = engine_->kernels();
        double v = g0(i);
        for (int j = i + 1; j <= n_; ++j) v -= K.V(i, j, 0.0, t) * z0(j);
        if (order_ == 2)
            for (int k = i + 1; k <= n_; ++k)
                for (int l = k + 1; l <= n_; ++l) v -= K.Vbar(i, k, l, 0.0, t) * z0(k) * z0(l);
        return v;
    }

    /// H_i(t,s), s < t.
    double H(int i, double t, double s) const {
        if (s >= t) return 0.0;
        const int n = interval_of_s(s);
        const auto& K = engine_->kernels();
        double v = -K.theta(n, i);
        if (!uses_picard()) return v;
        for (int j = i + 1; j <= n_; ++j) v -= K.V(i, j, s, t) * z(n, j).A;
        if (uses_pairs())
            for (int k = i + 1; k <= n_; ++k)
                for (int l = k + 1; l <= n_; ++l) v -= K.Vbar(i, k, l, s, t) * y(n, k, l).A;
        return v;
    }

    /// Theta_i(t,s), s < t.
    double Theta(int i, double t, double s) const {
        if (s >= t) return 0.0;
        const int n = interval_of_s(s);
        const auto& K = engine_->kernels();
        double v = std::sqrt(K.alpha(n)) * lambda(i, n);
        if (!uses_picard()) return v;
        for (int j = i + 1; j <= n_; ++j) v -= K.V(i, j, s, t) * z(n, j).B;
        if (uses_pairs())
            for (int k = i + 1; k <= n_; ++k)
                for (int l = k + 1; l <= n_; ++l) v -= K.Vbar(i, k, l, s, t) * y(n, k, l).B;
        return v;
    }

    /// I_i(t,s,x), s < t.
    double I(int i, double t, double s, double x) const {
        if (s >= t) return 0.0;
        const int n = interval_of_s(s);
        const auto& K = engine_->kernels();
        double v = lambda(i, n) * x;
        if (!uses_picard()) return v;
        for (int j = i + 1; j <= n_; ++j) v -= K.V(i, j, s, t) * z(n, j).C(x);
        if (uses_pairs())
            for (int k = i + 1; k <= n_; ++k)
                for (int l = k + 1; l <= n_; ++l) v -= K.Vbar(i, k, l, s, t) * y(n, k, l).C(x);
        return v;
    }

    /// int_0^t H_i(t,s) ds, exact over the piecewise structure.
    double drift_integral(int i, double t) const {
        double v = 0.0;
        for_each_piece(t, [&](int n, double a, double b) {
            const auto& K = engine_->kernels();
            v -= K.theta(n, i) * (b - a);
            if (!uses_picard()) return;
            for (int j = i + 1; j <= n_; ++j) v -= V_integral(i, j, n, a, b, t) * z(n, j).A;
            if (uses_pairs())
                for (int k = i + 1; k <= n_; ++k)
                    for (int l = k + 1; l <= n_; ++l) v -= Vbar_integral(i, k, l, n, a, b, t) * y(n, k, l).A;
        });
        return v;
    }

    /// int_0^t int_{|x|>eps} I_i(t,s,x) F(dx) ds.
    double compensator(int i, double t) const {
        double v = 0.0;
        for_each_piece(t, [&](int n, double a, double b) {
            v += lambda(i, n) * jump_mean_ * (b - a);
            if (!uses_picard()) return;
            for (int j = i + 1; j <= n_; ++j) v -= V_integral(i, j, n, a, b, t) * z_compensator(n, j);
            if (uses_pairs())
                for (int k = i + 1; k <= n_; ++k)
                    for (int l = k + 1; l <= n_; ++l) v -= Vbar_integral(i, k, l, n, a, b, t) * y_compensator(n, k, l);
        });
        return v;
    }

    /// int_0^{min(t,t2)} Theta_i(t,s) Theta_i2(t2,s) ds.  Theta is affine in s on
    /// each interval, so Simpson's rule is exact.
    double gaussian_covariance(int i, double t, int i2, double t2) const {
        double v = 0.0;
        for_each_piece(std::min(t, t2), [&](int, double a, double b) {
            const double m = 0.5 * (a + b);
            // evaluate strictly inside the piece so the interval lookup is unambiguous
            const double ea = a + 1e-12 * (b - a), eb = b - 1e-12 * (b - a);
            auto prod = [&](double s) { return Theta(i, t, s) * Theta(i2, t2, s); };
            v += (b - a) / 6.0 * (prod(ea) + 4.0 * prod(m) + prod(eb));
        });
        return v;
    }

    /// Loading of rate i on interval n.
    double lambda(int i, int n) const { return engine_->market().loading().on_interval(i, n); }

    /// Interval n with s in [T_n, T_{n+1}).
    int interval_of_s(double s) const {
        const auto& d = engine_->market().tenor().dates();
        auto it = std::upper_bound(d.begin(), d.end(), s);
        return std::clamp(static_cast<int>(it - d.begin()) - 1, 0, n_);
    }

    /// int_a^b V_ij(s,t) ds for [a,b] inside interval n.
    double V_integral(int i, int j, int n, double a, double b, double t) const {
        const auto& K = engine_->kernels();
        const double tn = engine_->market().tenor().date(n);
        const double base = K.eta_integral(i, j, t) - K.eta_integral_at(n, std::min(i, j), std::max(i, j));
        const double e = K.eta(n, i, j);
        return (b - a) * base - 0.5 * e * ((b - tn) * (b - tn) - (a - tn) * (a - tn));
    }
    double Vbar_integral(int i, int k, int l, int n, double a, double b, double t) const {
        const auto& K = engine_->kernels();
        const double tn = engine_->market().tenor().date(n);
        const double base = K.zeta_integral(i, k, l, t) - K.zeta_integral_at(n, i, k, l);
        const double e = K.zeta(n, i, k, l);
        return (b - a) * base - 0.5 * e * ((b - tn) * (b - tn) - (a - tn) * (a - tn));
    }

    /// Calls fn(n, a, b) for the pieces [a,b] = [T_n, min(T_{n+1}, t)] of [0, t].
    template <class Fn>
    void for_each_piece(double t, Fn&& fn) const {
        const auto& tenor = engine_->market().tenor();
        for (int n = 0; n <= n_ && tenor.date(n) < t; ++n) fn(n, tenor.date(n), std::min(tenor.date(n + 1), t));
    }

    inline ApproxKernels kernels(int i, double t) const;

private:
    std::size_t zi(int n, int j) const {
        return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n_) + 1) + static_cast<std::size_t>(j);
    }
    std::size_t yi(int n, int k, int l) const {
        const std::size_t d = static_cast<std::size_t>(n_) + 1;
        return (static_cast<std::size_t>(n) * d + static_cast<std::size_t>(k)) * d + static_cast<std::size_t>(l);
    }

    ZCoefficient base_coefficient(int n, int j, const std::vector<double>& l0) const {
        ZCoefficient z;
        z.dl0 = engine_->market().delta(j) * l0[static_cast<std::size_t>(j)];
        z.z0 = z.dl0 / (1.0 + z.dl0);
        z.lambda = lambda(j, n);
        return z;
    }

    // Identical (lambda, delta L(0)) combinations recur for flat setups; the
    // quadratures are memoised on their inputs.
    double memo(const std::array<double, 5>& key, auto&& compute) const {
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double v = compute();
        cache_.emplace(key, v);
        return v;
    }

    double z_jump_integral(const ZCoefficient& z) const {
        if (z.lambda == 0.0) return 0.0;
        const double f1 = z.z0 * (1.0 - z.z0);
        return memo({0.0, z.lambda, z.dl0, 0.0, 0.0}, [&] {
            return engine_->model().integrate([&](double x) { return z.C(x) - f1 * z.lambda * x; });
        });
    }
    double z_big_jump_integral(const ZCoefficient& z) const {
        if (z.lambda == 0.0) return 0.0;
        return memo({1.0, z.lambda, z.dl0, 0.0, 0.0}, [&] {
            return engine_->model().integrate([&](double x) { return z.C(x); }, JumpRegion::big, eps_);
        });
    }
    double y_jump_integral(const YCoefficient& y, double gk, double gl) const {
        if (y.k.lambda == 0.0 && y.l.lambda == 0.0) return 0.0;
        return memo({2.0, y.k.lambda, y.k.dl0, y.l.lambda, y.l.dl0}, [&] {
            return engine_->model().integrate(
                [&](double x) { return y.C(x) - gk * y.k.lambda * x - gl * y.l.lambda * x; });
        });
    }
    double y_big_jump_integral(const YCoefficient& y) const {
        if (y.k.lambda == 0.0 && y.l.lambda == 0.0) return 0.0;
        return memo({3.0, y.k.lambda, y.k.dl0, y.l.lambda, y.l.dl0}, [&] {
            return engine_->model().integrate([&](double x) { return y.C(x); }, JumpRegion::big, eps_);
        });
    }

    const DriftEngine* engine_;
    int order_;
    bool frozen_;
    double eps_;
    int n_;
    double jump_mean_ = 0.0;
    std::vector<double> g0_, z0_;
    std::vector<ZCoefficient> z_;
    std::vector<double> z_comp_;
    std::vector<YCoefficient> y_;
    std::vector<double> y_comp_;
    mutable std::map<std::array<double, 5>, double> cache_;
};

/// Kernels of rate i at horizon t; a view into a LogLevyApproximation.
struct ApproxKernels {
    const LogLevyApproximation* approx = nullptr;
    int i = 0;
    double t = 0.0;

    int order() const { return approx->order(); }
    bool frozen() const { return approx->frozen(); }
    double G_hat() const { return approx->G_hat(i, t); }
    double H(double s) const { return approx->H(i, t, s); }
    double Theta(double s) const { return approx->Theta(i, t, s); }
    double I(double s, double x) const { return approx->I(i, t, s, x); }
    double drift_integral() const { return approx->drift_integral(i, t); }
    double compensator() const { return approx->compensator(i, t); }
    double gaussian_variance() const { return approx->gaussian_covariance(i, t, i, t); }
};

inline ApproxKernels LogLevyApproximation::kernels(int i, double t) const {
    if (i < 1 || i > n_) throw DataError("approximation kernels: rate index out of range");
    if (t < 0.0 || t > engine_->market().tenor().date(i) + 1e-12)
        throw ConfigError("approximation kernels: horizon must lie in [0, T_i]");
    return ApproxKernels{this, i, t};
}

/// Kernels of rate i at horizon t (order and freezing fixed by approx).
inline ApproxKernels build_approx(const LogLevyApproximation& approx, int i, double t) { return approx.kernels(i, t); }

/// Z_j Picard coefficients at time s.
inline ZCoefficient z_picard(const LogLevyApproximation& approx, int j, double s) {
    return approx.z(approx.interval_of_s(s), j);
}

/// Y_kl Picard coefficients at time s.
inline YCoefficient y_picard(const LogLevyApproximation& approx, int k, int l, double s) {
    if (!(k < l)) throw DataError("y_picard requires k < l");
    return approx.y(approx.interval_of_s(s), k, l);
}

/// Frozen stochastic-exponential approximation of the annuities
/// A_i(t) = prod_{j>i} (1 + delta_j L_j(t)), i = 0..N.
class AnnuityApproximation {
public:
    AnnuityApproximation(const DriftEngine& engine, double eps)
        : engine_(&engine), eps_(eps), n_(engine.size()) {
        if (!(eps > 0.0)) throw ConfigError("truncation eps must be > 0");
        const auto& market = engine.market();
        const auto l0 = market.initial_libors();
        dl0_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
        for (int j = 1; j <= n_; ++j) dl0_[static_cast<std::size_t>(j)] = market.delta(j) * l0[static_cast<std::size_t>(j)];
        log_a0_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
        for (int i = n_ - 1; i >= 0; --i)
            log_a0_[static_cast<std::size_t>(i)] = log_a0_[static_cast<std::size_t>(i) + 1] + std::log1p(dl0_[static_cast<std::size_t>(i) + 1]);
        const std::size_t d = static_cast<std::size_t>(n_) + 1;
        Lambda_.assign(d * d, 0.0);
        comp_.assign(d * d, 0.0);
        std::map<std::vector<double>, double> cache;
        for (int n = 0; n <= n_; ++n) {
            for (int i = 0; i < n_; ++i) {
                double lam = 0.0;
                std::vector<double> key;
                for (int j = std::max(i + 1, n + 1); j <= n_; ++j) {
                    const double l = market.loading().on_interval(j, n);
                    const double z = dl0_[static_cast<std::size_t>(j)] / (1.0 + dl0_[static_cast<std::size_t>(j)]);
                    lam += z * l;
                    key.push_back(l);
                    key.push_back(dl0_[static_cast<std::size_t>(j)]);
                }
                Lambda_[idx(n, i)] = lam;
                if (key.empty()) continue;
                auto it = cache.find(key);
                if (it == cache.end()) {
                    const double v = engine.model().integrate([&](double x) { return ratio(i, n, x) - 1.0; },
                                                             JumpRegion::big, eps_);
                    it = cache.emplace(key, v).first;
                }
                comp_[idx(n, i)] = it->second;
            }
        }
    }

    int size() const { return n_; }
    double eps() const { return eps_; }
    const DriftEngine& engine() const { return *engine_; }
    double log_a0(int i) const { return log_a0_[static_cast<std::size_t>(i)]; }
    double delta_libor0(int j) const { return dl0_[static_cast<std::size_t>(j)]; }

    /// Lambda_i = sum_{j>i} Z_j(0) lambda_j on interval n.
    double Lambda(int i, int n) const { return Lambda_[idx(n, i)]; }
    /// int_{|x|>eps} (R_i - 1) F(dx) on interval n.
    double jump_compensator(int i, int n) const { return comp_[idx(n, i)]; }

    /// Frozen jump ratio R_i(x) on interval n.
    double ratio(int i, int n, double x) const {
        double r = 1.0;
        const auto& vol = engine_->market().loading();
        for (int j = std::max(i + 1, n + 1); j <= n_; ++j) {
            const double dl = dl0_[static_cast<std::size_t>(j)];
            r *= (1.0 + dl * std::exp(vol.on_interval(j, n) * x)) / (1.0 + dl);
        }
        return r;
    }

    /// Deterministic part of log A_i(t) - log A_i(0):
    /// -1/2 int alpha Lambda_i^2 - int int_{|x|>eps} (R_i - 1) F.
    double drift_integral(int i, double t) const {
        double v = 0.0;
        const auto& K = engine_->kernels();
        for_each_piece(t, [&](int n, double a, double b) {
            const double lam = Lambda(i, n);
            v -= (b - a) * (0.5 * K.alpha(n) * lam * lam + jump_compensator(i, n));
        });
        return v;
    }

    /// int_0^min(t,t2) alpha Lambda_i Lambda_i2 ds.
    double gaussian_covariance(int i, double t, int i2, double t2) const {
        double v = 0.0;
        const auto& K = engine_->kernels();
        for_each_piece(std::min(t, t2), [&](int n, double a, double b) {
            v += (b - a) * K.alpha(n) * Lambda(i, n) * Lambda(i2, n);
        });
        return v;
    }

    template <class Fn>
    void for_each_piece(double t, Fn&& fn) const {
        const auto& tenor = engine_->market().tenor();
        for (int n = 0; n <= n_ && tenor.date(n) < t; ++n) fn(n, tenor.date(n), std::min(tenor.date(n + 1), t));
    }

    int interval_of_s(double s) const {
        const auto& d = engine_->market().tenor().dates();
        auto it = std::upper_bound(d.begin(), d.end(), s);
        return std::clamp(static_cast<int>(it - d.begin()) - 1, 0, n_);
    }

private:
    std::size_t idx(int n, int i) const {
        return static_cast<std::size_t>(n) * (static_cast<std::size_t>(n_) + 1) + static_cast<std::size_t>(i);
    }

    const DriftEngine* engine_;
    double eps_;
    int n_;
    std::vector<double> dl0_;
    std::vector<double> log_a0_;
    std::vector<double> Lambda_;
    std::vector<double> comp_;
};

/// Annuity kernels of A_i at horizon t.
struct AnnuityKernels {
    const AnnuityApproximation* approx = nullptr;
    int i = 0;
    double t = 0.0;

    double log_a0() const { return approx->log_a0(i); }
    double drift_integral() const { return approx->drift_integral(i, t); }
    double Theta(double s) const {
        if (s >= t) return 0.0;
        const int n = approx->interval_of_s(s);
        return std::sqrt(approx->engine().kernels().alpha(n)) * approx->Lambda(i, n);
    }
    /// log R_i(s, x)
    double I(double s, double x) const {
        if (s >= t) return 0.0;
        return std::log(approx->ratio(i, approx->interval_of_s(s), x));
    }
    double gaussian_variance() const { return approx->gaussian_covariance(i, t, i, t); }
};

inline AnnuityKernels build_annuity_approx(const AnnuityApproximation& approx, int i, double t) {
    if (i < 0 || i > approx.size()) throw DataError("annuity kernels: index out of range");
    if (t < 0.0 || (i < approx.size() && t > approx.engine().market().tenor().date(i + 1) + 1e-12))
        throw ConfigError("annuity kernels: horizon must lie in [0, T_{i+1}]");
    return AnnuityKernels{&approx, i, t};
}

} // namespace levylmm

#endif // LEVYLMM_LOGLEVY_HPP
