#ifndef LEVYLMM_MARKET_HPP
#define LEVYLMM_MARKET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "levy_models.hpp"

namespace levylmm {

/// Dates T_0 = 0 < T_1 < ... < T_{N+1}; rate i (1 <= i <= N) accrues over
/// [T_i, T_{i+1}] and fixes at T_i.
class TenorStructure {
public:
    explicit TenorStructure(std::vector<double> dates) : dates_(std::move(dates)) {
        if (dates_.size() < 3) throw ConfigError("tenor structure needs at least T_0, T_1, T_2");
        if (dates_.front() != 0.0) throw ConfigError("tenor structure must start at T_0 = 0");
        for (std::size_t k = 1; k < dates_.size(); ++k)
            if (!(dates_[k] > dates_[k - 1])) throw ConfigError("tenor dates must be strictly increasing");
    }

    static TenorStructure uniform(int n_rates, double delta) {
        if (n_rates < 1 || !(delta > 0.0)) throw ConfigError("uniform tenor needs N >= 1 and delta > 0");
        std::vector<double> d(static_cast<std::size_t>(n_rates) + 2);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = delta * static_cast<double>(k);
        return TenorStructure(std::move(d));
    }

    /// Number of LIBOR rates N.
    int size() const { return static_cast<int>(dates_.size()) - 2; }
    double date(int k) const { return dates_.at(static_cast<std::size_t>(k)); }
    /// delta_k = T_{k+1} - T_k, 0 <= k <= N.
    double delta(int k) const { return date(k + 1) - date(k); }
    double terminal() const { return dates_.back(); }
    const std::vector<double>& dates() const { return dates_; }

    /// Interval n with t in (T_n, T_{n+1}]; t <= 0 maps to 0.
    int interval_of(double t) const {
        if (t <= dates_.front()) return 0;
        auto it = std::lower_bound(dates_.begin(), dates_.end(), t);
        const int n = static_cast<int>(it - dates_.begin()) - 1;
        return std::min(n, static_cast<int>(dates_.size()) - 2);
    }

private:
    std::vector<double> dates_;
};

/// Initial zero-coupon prices B_k(0) = B(0, T_k), k = 0..N+1.
class DiscountCurve {
public:
    explicit DiscountCurve(std::vector<double> bonds) : bonds_(std::move(bonds)) {
        for (std::size_t k = 0; k < bonds_.size(); ++k) {
            if (!(bonds_[k] > 0.0 && bonds_[k] <= 1.0)) throw ConfigError("discount factors must lie in (0,1]");
            if (k > 0 && bonds_[k] > bonds_[k - 1]) throw ConfigError("discount factors must be nonincreasing");
        }
    }

    /// B(0,T) = exp(-rate * T) at every tenor date.
    static DiscountCurve flat(const TenorStructure& tenor, double rate) {
        std::vector<double> b;
        for (double t : tenor.dates()) b.push_back(std::exp(-rate * t));
        return DiscountCurve(std::move(b));
    }

    /// Two-column CSV (maturity, discount factor), log-linear interpolation
    /// onto the tenor dates and flat forward extrapolation past the last point.
    static DiscountCurve from_csv(const std::string& path, const TenorStructure& tenor) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open curve file " + path);
        std::vector<double> mats{0.0};
        std::vector<double> logs{0.0};
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double t = 0.0;
            double b = 0.0;
            if (!(row >> t >> b)) continue;  // header
            if (t <= mats.back()) throw ConfigError("curve maturities must be increasing and positive");
            if (!(b > 0.0)) throw ConfigError("curve discount factors must be positive");
            mats.push_back(t);
            logs.push_back(std::log(b));
        }
        if (mats.size() < 2) throw ConfigError("curve file " + path + " has no data rows");
        std::vector<double> bonds;
        for (double t : tenor.dates()) {
            auto it = std::upper_bound(mats.begin(), mats.end(), t);
            std::size_t hi = std::min(static_cast<std::size_t>(it - mats.begin()), mats.size() - 1);
            const std::size_t lo = hi - 1;
            const double w = (t - mats[lo]) / (mats[hi] - mats[lo]);
            bonds.push_back(std::exp(logs[lo] + w * (logs[hi] - logs[lo])));
        }
        return DiscountCurve(std::move(bonds));
    }

    double bond(int k) const { return bonds_.at(static_cast<std::size_t>(k)); }
    std::size_t size() const { return bonds_.size(); }

private:
    std::vector<double> bonds_;
};

/// Scalar loadings lambda_i(t), piecewise constant over tenor intervals:
/// value(i, n) applies on (T_n, T_{n+1}] and vanishes for n >= i, so a rate
/// stops diffusing after its fixing date.
class VolLoading {
public:
    VolLoading(int n_rates, std::vector<std::vector<double>> values) : n_(n_rates), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != n_) throw ConfigError("loadings: one row per rate required");
        for (int i = 1; i <= n_; ++i) {
            auto& row = values_[static_cast<std::size_t>(i - 1)];
            if (static_cast<int>(row.size()) < i) throw ConfigError("loadings: row i needs values on intervals 0..i-1");
            row.resize(static_cast<std::size_t>(n_) + 1, 0.0);
            std::fill(row.begin() + i, row.end(), 0.0);
        }
    }

    static VolLoading flat(int n_rates, double value) {
        std::vector<std::vector<double>> v(static_cast<std::size_t>(n_rates),
                                           std::vector<double>(static_cast<std::size_t>(n_rates) + 1, value));
        return VolLoading(n_rates, std::move(v));
    }

    int size() const { return n_; }

    /// lambda_i on interval n (1 <= i <= N, 0 <= n <= N).
    double on_interval(int i, int n) const {
        return values_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n)];
    }

    double at(int i, double t, const TenorStructure& tenor) const {
        if (t > tenor.date(i)) return 0.0;
        return on_interval(i, tenor.interval_of(t));
    }

    /// max_i sup_s |lambda_i(s)|
    double max_abs() const {
        double m = 0.0;
        for (const auto& row : values_)
            for (double v : row) m = std::max(m, std::abs(v));
        return m;
    }

    /// sup_s |sum_i lambda_i(s)|
    double max_abs_sum() const {
        double m = 0.0;
        for (int n = 0; n <= n_; ++n) {
            double s = 0.0;
            for (int i = 1; i <= n_; ++i) s += on_interval(i, n);
            m = std::max(m, std::abs(s));
        }
        return m;
    }

    bool all_zero() const { return max_abs() == 0.0; }

private:
    int n_;
    std::vector<std::vector<double>> values_;
};

/// Tenor, initial curve and loadings of one LIBOR market.
class MarketSetup {
public:
    MarketSetup(TenorStructure tenor, DiscountCurve curve, VolLoading loading)
        : tenor_(std::move(tenor)), curve_(std::move(curve)), loading_(std::move(loading)) {
        if (curve_.size() != tenor_.dates().size())
            throw ConfigError("discount curve must have one bond per tenor date");
        if (loading_.size() != tenor_.size()) throw ConfigError("loadings must cover every rate");
    }

    const TenorStructure& tenor() const { return tenor_; }
    const DiscountCurve& curve() const { return curve_; }
    const VolLoading& loading() const { return loading_; }
    int size() const { return tenor_.size(); }
    double delta(int i) const { return tenor_.delta(i); }

    /// L_i(0) = (B_i(0)/B_{i+1}(0) - 1)/delta_i, 1 <= i <= N.
    double initial_libor(int i) const {
        if (i < 1 || i > size()) throw DataError("initial_libor: rate index out of range");
        return (curve_.bond(i) / curve_.bond(i + 1) - 1.0) / tenor_.delta(i);
    }

    /// Index 0 unused; entries 1..N.
    std::vector<double> initial_libors() const {
        std::vector<double> l(static_cast<std::size_t>(size()) + 1, 0.0);
        for (int i = 1; i <= size(); ++i) l[static_cast<std::size_t>(i)] = initial_libor(i);
        return l;
    }

private:
    TenorStructure tenor_;
    DiscountCurve curve_;
    VolLoading loading_;
};

inline double initial_libor(const DiscountCurve& curve, const TenorStructure& tenor, int i) {
    if (i < 1 || i > tenor.size()) throw DataError("initial_libor: rate index out of range");
    return (curve.bond(i) / curve.bond(i + 1) - 1.0) / tenor.delta(i);
}

struct ValidationReport {
    bool pass = true;
    double loading_bound = 0.0;   ///< M-bar implied by the loadings
    double required = 0.0;        ///< (1 + margin) * M-bar
    double moment_bound = 0.0;    ///< min(G, M) for CGMY, infinite for Merton
    std::string message;
};

/// Exponential-moment condition: (1 + margin) * M-bar must stay inside the
/// domain of the jump cumulant, with M-bar = max(sup|sum_i lambda_i|, max|lambda_i|).
inline ValidationReport validate_setup(const LevyModel& model, const VolLoading& vol, double margin = 0.05) {
    ValidationReport r;
    r.loading_bound = std::max(vol.max_abs_sum(), vol.max_abs());
    r.required = (1.0 + margin) * r.loading_bound;
    r.moment_bound = model.moment_bound();
    r.pass = r.required <= r.moment_bound;
    std::ostringstream msg;
    if (r.pass) {
        msg << "exponential-moment condition holds: (1+" << margin << ")*" << r.loading_bound << " <= " << r.moment_bound;
    } else {
        msg << "exponential-moment condition violated: (1+" << margin << ")*" << r.loading_bound << " = " << r.required
            << " exceeds min(G,M) = " << r.moment_bound;
    }
    r.message = msg.str();
    return r;
}

/// lambda_max^2 * t; the approximations degrade once this is no longer small.
inline double validity_indicator(const VolLoading& vol, double t) {
    const double lm = vol.max_abs();
    return lm * lm * std::max(t, 0.0);
}

} // namespace levylmm

#endif // LEVYLMM_MARKET_HPP
