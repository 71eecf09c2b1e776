#ifndef LEVYLMM_DRIFT_HPP
#define LEVYLMM_DRIFT_HPP

// Terminal-measure drift of the log-LIBORs G_i = log L_i.  With the
// quotients q_j = delta_j L_j / (1 + delta_j L_j) the drift expands as
//
//   b_i = -kappa(lambda_i) - sum_{J nonempty} prod_{j in J} q_j c(i, J),
//   c(i, J) = sum_{S subset {i} u J, S nonempty} (-1)^{|J|+1-|S|} khat(lambda_S)
//
// (plus alpha lambda_i lambda_j in c(i,{j})), J ranging over subsets of
// {i+1..N}.  Truncation keeps |J| <= p.  Loadings are constant on each tenor
// interval, so every coefficient is a per-interval constant.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "levy_models.hpp"
#include "market.hpp"

namespace levylmm {

/// alpha on tenor interval n.  Requires alpha's breakpoints to be tenor dates.
inline std::vector<double> alpha_per_interval(const LevyModel& model, const TenorStructure& tenor) {
    const auto& dates = tenor.dates();
    for (double k : model.alpha().knots()) {
        if (k <= 0.0 || k >= tenor.terminal()) continue;
        const bool on_grid = std::any_of(dates.begin(), dates.end(), [k](double d) { return std::abs(d - k) < 1e-12; });
        if (!on_grid) throw ConfigError("alpha(t) may only change value at tenor dates");
    }
    std::vector<double> out(dates.size() - 1);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = model.alpha(0.5 * (dates[n] + dates[n + 1]));
    return out;
}

/// theta, eta, zeta per tenor interval and their running time integrals.
/// Rates are indexed 1..N; intervals 0..N.
class CumulantKernels {
public:
    CumulantKernels() = default;

    CumulantKernels(const LevyModel& model, const MarketSetup& market) : n_(market.size()) {
        const auto& tenor = market.tenor();
        const auto& vol = market.loading();
        alpha_ = alpha_per_interval(model, tenor);
        const std::size_t d = dim();
        theta_.assign(d * d, 0.0);
        eta_.assign(d * d * d, 0.0);
        zeta_.assign(d * d * d * d, 0.0);
        for (int n = 0; n <= n_; ++n) {
            const double a = alpha_[static_cast<std::size_t>(n)];
            auto lam = [&](int i) { return vol.on_interval(i, n); };
            auto kfull = [&](double u) { return 0.5 * a * u * u + model.jump_cumulant(u); };
            for (int i = n + 1; i <= n_; ++i) {
                theta_[idx(n, i)] = kfull(lam(i));
                for (int j = i + 1; j <= n_; ++j) {
                    eta_[idx(n, i, j)] = kfull(lam(i) + lam(j)) - kfull(lam(i)) - kfull(lam(j));
                    for (int l = j + 1; l <= n_; ++l) {
                        const double li = lam(i), lk = lam(j), ll = lam(l);
                        zeta_[idx(n, i, j, l)] = model.jump_cumulant(li + lk + ll) - model.jump_cumulant(li + lk) -
                                                 model.jump_cumulant(li + ll) - model.jump_cumulant(lk + ll) +
                                                 model.jump_cumulant(li) + model.jump_cumulant(lk) +
                                                 model.jump_cumulant(ll);
                    }
                }
            }
        }
        // Cumulative integrals at tenor dates.
        const auto& dates = tenor.dates();
        w_eta_.assign((d + 1) * d * d, 0.0);
        w_zeta_.assign((d + 1) * d * d * d, 0.0);
        for (int n = 0; n <= n_; ++n) {
            const double h = dates[static_cast<std::size_t>(n) + 1] - dates[static_cast<std::size_t>(n)];
            for (int i = 1; i <= n_; ++i)
                for (int j = i + 1; j <= n_; ++j) {
                    w_eta_[widx(n + 1, i, j)] = w_eta_[widx(n, i, j)] + h * eta(n, i, j);
                    for (int l = j + 1; l <= n_; ++l)
                        w_zeta_[widx(n + 1, i, j, l)] = w_zeta_[widx(n, i, j, l)] + h * zeta(n, i, j, l);
                }
        }
        dates_ = dates;
    }

    int size() const { return n_; }
    double alpha(int n) const { return alpha_[static_cast<std::size_t>(n)]; }

    /// kappa(lambda_i) on interval n.
    double theta(int n, int i) const { return theta_[idx(n, i)]; }
    /// kappa(lambda_i + lambda_j) - kappa(lambda_i) - kappa(lambda_j), symmetric in i, j.
    double eta(int n, int i, int j) const {
        if (i == j) return 0.0;
        if (i > j) std::swap(i, j);
        return eta_[idx(n, i, j)];
    }
    /// Alternating sum of khat over the subsets of {lambda_i, lambda_k, lambda_l}.
    double zeta(int n, int i, int k, int l) const {
        int a[3] = {i, k, l};
        std::sort(a, a + 3);
        if (a[0] == a[1] || a[1] == a[2]) return 0.0;
        return zeta_[idx(n, a[0], a[1], a[2])];
    }

    /// W_ij(t) = int_0^t eta_ij, so V_ij(s,t) = W_ij(t) - W_ij(s).
    double eta_integral(int i, int j, double t) const {
        if (i == j) return 0.0;
        if (i > j) std::swap(i, j);
        const int n = interval(t);
        return w_eta_[widx(n, i, j)] + (t - dates_[static_cast<std::size_t>(n)]) * eta(n, i, j);
    }
    double zeta_integral(int i, int k, int l, double t) const {
        int a[3] = {i, k, l};
        std::sort(a, a + 3);
        if (a[0] == a[1] || a[1] == a[2]) return 0.0;
        const int n = interval(t);
        return w_zeta_[widx(n, a[0], a[1], a[2])] + (t - dates_[static_cast<std::size_t>(n)]) * zeta(n, a[0], a[1], a[2]);
    }
    /// W_ij and Wbar_ikl at tenor date T_k (indices as in eta/zeta, i < j, i < k < l).
    double eta_integral_at(int date, int i, int j) const { return w_eta_[widx(date, i, j)]; }
    double zeta_integral_at(int date, int i, int k, int l) const { return w_zeta_[widx(date, i, k, l)]; }
    double V(int i, int j, double s, double t) const { return eta_integral(i, j, t) - eta_integral(i, j, s); }
    double Vbar(int i, int k, int l, double s, double t) const {
        return zeta_integral(i, k, l, t) - zeta_integral(i, k, l, s);
    }

private:
    std::size_t dim() const { return static_cast<std::size_t>(n_) + 1; }
    std::size_t idx(int n, int i) const { return static_cast<std::size_t>(n) * dim() + static_cast<std::size_t>(i); }
    std::size_t idx(int n, int i, int j) const { return idx(n, i) * dim() + static_cast<std::size_t>(j); }
    std::size_t idx(int n, int i, int j, int l) const { return idx(n, i, j) * dim() + static_cast<std::size_t>(l); }
    // date index k runs 0..N+1
    std::size_t widx(int k, int i, int j) const { return idx(k, i, j); }
    std::size_t widx(int k, int i, int j, int l) const { return idx(k, i, j, l); }
    /// interval n with t in [T_n, T_{n+1}), clamped to the last one.
    int interval(double t) const {
        auto it = std::upper_bound(dates_.begin(), dates_.end(), t);
        const int n = static_cast<int>(it - dates_.begin()) - 1;
        return std::clamp(n, 0, n_);
    }

    int n_ = 0;
    std::vector<double> alpha_;
    std::vector<double> dates_;
    std::vector<double> theta_, eta_, zeta_;
    std::vector<double> w_eta_, w_zeta_;
};

inline CumulantKernels build_kernels(const LevyModel& model, const MarketSetup& market) {
    return CumulantKernels(model, market);
}

/// Exact, truncated and frozen drifts.  The truncated coefficients c(i, J) are
/// stored per order and interval in depth-first subset order, so evaluation is
/// a single pass with a running product of quotients.
class DriftEngine {
public:
    DriftEngine(const LevyModel& model, const MarketSetup& market, int max_order = 3)
        : model_(&model), market_(&market), kernels_(model, market), n_(market.size()),
          max_order_(std::max(max_order, 2)) {
        coef_.resize(static_cast<std::size_t>(max_order_));
        for (int p = 1; p <= max_order_; ++p) {
            auto& per_order = coef_[static_cast<std::size_t>(p) - 1];
            per_order.resize(static_cast<std::size_t>(n_) + 1);
            for (int n = 0; n <= n_; ++n) {
                auto& per_rate = per_order[static_cast<std::size_t>(n)];
                per_rate.resize(static_cast<std::size_t>(n_) + 1);
                for (int i = n + 1; i <= n_; ++i) per_rate[static_cast<std::size_t>(i)] = build_coefficients(n, i, p);
            }
        }
        const auto l0 = market.initial_libors();
        frozen_.assign(static_cast<std::size_t>(n_) + 1, std::vector<double>(static_cast<std::size_t>(n_) + 1, 0.0));
        frozen_order1_ = frozen_;
        for (int n = 0; n <= n_; ++n)
            for (int i = 1; i <= n_; ++i) {
                frozen_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] = truncated(i, l0, n, 2);
                frozen_order1_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] = truncated(i, l0, n, 1);
            }
    }

    const CumulantKernels& kernels() const { return kernels_; }
    const MarketSetup& market() const { return *market_; }
    const LevyModel& model() const { return *model_; }
    int size() const { return n_; }
    int max_order() const { return max_order_; }

    /// Exact drift on interval n: enumerates all subsets U of {i+1..N} with
    /// weights w_U = prod_{j in U} delta_j L_j / prod_{j>i} (1 + delta_j L_j).
    /// Cumulants are evaluated on the fly; cost O(2^{N-i}).
    double full(int i, std::span<const double> L, int n) const {
        check_rate(i);
        check_state(L, i);
        const auto& vol = market_->loading();
        const double li = vol.on_interval(i, n);
        if (li == 0.0 && n >= i) return 0.0;
        const double a = kernels_.alpha(n);
        double norm = 1.0;
        double diff = 0.0;
        for (int j = i + 1; j <= n_; ++j) {
            const double dl = market_->delta(j) * L[static_cast<std::size_t>(j)];
            norm /= 1.0 + dl;
            diff += dl / (1.0 + dl) * vol.on_interval(j, n);
        }
        double jump = 0.0;
        struct Frame {
            int next;
            double arg;
            double weight;
        };
        // explicit stack; depth never exceeds N - i + 1
        Frame stack[64];
        if (n_ - i + 1 > 64) throw ConfigError("drift_full: too many rates");
        int top = 0;
        stack[0] = {i + 1, 0.0, norm};
        jump += norm * model_->jump_cumulant(li);
        while (top >= 0) {
            Frame& f = stack[top];
            if (f.next > n_) {
                --top;
                continue;
            }
            const int j = f.next++;
            const double arg = f.arg + vol.on_interval(j, n);
            const double w = f.weight * market_->delta(j) * L[static_cast<std::size_t>(j)];
            jump += w * (model_->jump_cumulant(li + arg) - model_->jump_cumulant(arg));
            stack[++top] = {j + 1, arg, w};
        }
        return -0.5 * a * li * li - a * li * diff - jump;
    }

    /// Drift truncated at subsets of size <= p (p <= max_order()).
    double truncated(int i, std::span<const double> L, int n, int p) const {
        check_rate(i);
        if (p < 1) throw ConfigError("drift order must be >= 1");
        if (n >= i) return 0.0;
        if (p > max_order_) throw ConfigError("drift order exceeds the precomputed maximum");
        check_state(L, i);
        const int depth_max = std::min(p, n_ - i);
        double q[65];
        for (int j = i + 1; j <= n_; ++j) {
            const double dl = market_->delta(j) * L[static_cast<std::size_t>(j)];
            q[j - i] = dl / (1.0 + dl);
        }
        const auto& c = coef_[static_cast<std::size_t>(p) - 1][static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
        return -kernels_.theta(n, i) - dfs_sum(q, n_ - i, depth_max, c);
    }

    /// Order-2 drift at L(0), cached per interval.
    double frozen(int i, int n) const {
        check_rate(i);
        return frozen_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
    }
    /// Order-1 drift at L(0), cached per interval.
    double frozen_first_order(int i, int n) const {
        check_rate(i);
        return frozen_order1_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
    }

    /// Interval index used for an evaluation at time s (loading in force at s).
    int interval_at(double s) const { return market_->tenor().interval_of(s); }

private:
    void check_rate(int i) const {
        if (i < 1 || i > n_) throw DataError("drift: rate index out of range");
    }
    void check_state(std::span<const double> L, int i) const {
        if (L.size() < static_cast<std::size_t>(n_) + 1) throw DataError("drift: state must hold L_0..L_N");
        for (int j = i + 1; j <= n_; ++j)
            if (!(1.0 + market_->delta(j) * L[static_cast<std::size_t>(j)] > 0.0))
                throw StateError("drift: 1 + delta_j L_j <= 0");
    }

    /// Coefficients c(i, J) for |J| <= depth in depth-first order.
    std::vector<double> build_coefficients(int n, int i, int depth) const {
        const auto& vol = market_->loading();
        std::vector<double> out;
        std::vector<int> members;
        auto coefficient = [&](const std::vector<int>& J) {
            if (J.size() == 1) return kernels_.eta(n, i, J[0]);
            if (J.size() == 2) return kernels_.zeta(n, i, J[0], J[1]);
            // sum over nonempty S subset {i} u J of (-1)^{|J|+1-|S|} khat(lambda_S)
            std::vector<double> lam{vol.on_interval(i, n)};
            for (int j : J) lam.push_back(vol.on_interval(j, n));
            const std::size_t k = lam.size();
            double sum = 0.0;
            for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
                double arg = 0.0;
                int bits = 0;
                for (std::size_t b = 0; b < k; ++b)
                    if (mask & (std::size_t{1} << b)) {
                        arg += lam[b];
                        ++bits;
                    }
                const int sign = ((static_cast<int>(k) - bits) % 2 == 0) ? 1 : -1;
                sum += sign * model_->jump_cumulant(arg);
            }
            return sum;
        };
        auto rec = [&](auto& self, int start) -> void {
            for (int j = start; j <= n_; ++j) {
                members.push_back(j);
                out.push_back(coefficient(members));
                if (static_cast<int>(members.size()) < depth) self(self, j + 1);
                members.pop_back();
            }
        };
        rec(rec, i + 1);
        return out;
    }

    /// sum over subsets J of {1..m}, |J| <= depth, of prod_{j in J} q_j c(J).
    static double dfs_sum(const double* q, int m, int depth, const std::vector<double>& c) {
        double acc = 0.0;
        std::size_t pos = 0;
        if (depth == 1) {
            for (int j = 1; j <= m; ++j) acc += q[j] * c[pos++];
            return acc;
        }
        if (depth == 2) {
            for (int j = 1; j <= m; ++j) {
                const double qj = q[j];
                acc += qj * c[pos++];
                double inner = 0.0;
                for (int l = j + 1; l <= m; ++l) inner += q[l] * c[pos++];
                acc += qj * inner;
            }
            return acc;
        }
        if (depth == 3) {
            for (int j = 1; j <= m; ++j) {
                acc += q[j] * c[pos++];
                double mid = 0.0;
                for (int k = j + 1; k <= m; ++k) {
                    mid += q[k] * c[pos++];
                    double inner = 0.0;
                    for (int l = k + 1; l <= m; ++l) inner += q[l] * c[pos++];
                    mid += q[k] * inner;
                }
                acc += q[j] * mid;
            }
            return acc;
        }
        struct Frame {
            int next;
            double prod;
        };
        Frame stack[66];
        int top = 0;
        stack[0] = {1, 1.0};
        while (top >= 0) {
            Frame& f = stack[top];
            if (f.next > m) {
                --top;
                continue;
            }
            const int j = f.next++;
            const double pr = f.prod * q[j];
            acc += pr * c[pos++];
            if (top + 1 < depth) stack[++top] = {j + 1, pr};
        }
        return acc;
    }

    const LevyModel* model_;
    const MarketSetup* market_;
    CumulantKernels kernels_;
    int n_;
    int max_order_;
    // coef_[p-1][n][i]: depth-p coefficient tree of rate i on interval n
    std::vector<std::vector<std::vector<std::vector<double>>>> coef_;
    std::vector<std::vector<double>> frozen_;
    std::vector<std::vector<double>> frozen_order1_;
};

/// Exact drift b_i(s).
inline double drift_full(const DriftEngine& engine, int i, std::span<const double> L, double s) {
    return engine.full(i, L, engine.interval_at(s));
}

/// Drift keeping subsets of size <= p.
inline double drift_truncated(const DriftEngine& engine, int i, std::span<const double> L, double s, int p) {
    return engine.truncated(i, L, engine.interval_at(s), p);
}

/// Order-2 drift at the initial curve.
inline double drift_frozen(const DriftEngine& engine, int i, double s) { return engine.frozen(i, engine.interval_at(s)); }

} // namespace levylmm

#endif // LEVYLMM_DRIFT_HPP
