#ifndef LEVYLMM_PRICING_HPP
#define LEVYLMM_PRICING_HPP

// Monte Carlo prices of FRAs, caplets, payer swaptions and sticky ratchet
// caplets under the terminal measure, from LIBOR path batches (direct form)
// or annuity batches (annuity form).  Prices are per unit notional.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "market.hpp"
#include "paths.hpp"

namespace levylmm {

enum class ProductType { fra, caplet, swaption, ratchet };

inline std::string product_name(ProductType t) {
    switch (t) {
    case ProductType::fra: return "fra";
    case ProductType::caplet: return "caplet";
    case ProductType::swaption: return "swaption";
    case ProductType::ratchet: return "ratchet";
    }
    return "unknown";
}

inline ProductType parse_product(const std::string& name) {
    if (name == "fra") return ProductType::fra;
    if (name == "caplet") return ProductType::caplet;
    if (name == "swaption") return ProductType::swaption;
    if (name == "ratchet") return ProductType::ratchet;
    throw ConfigError("unknown product '" + name + "'");
}

/// i is the fixing index; m the last swap index (swaptions only).  An empty
/// strike means at the money: K = L_i(0) for FRAs and caplets, the forward
/// swap rate for swaptions.  Ratchets have no strike.
struct Product {
    ProductType type = ProductType::caplet;
    int i = 1;
    int m = 0;
    std::optional<double> strike;

    std::string describe() const {
        std::string s = product_name(type) + "(" + std::to_string(i);
        if (type == ProductType::swaption) s += "," + std::to_string(m);
        s += ")";
        return s;
    }
};

struct PriceEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t paths = 0;
    double elapsed_ms = 0.0;
    std::string scheme;
    std::string product;
};

/// Mean and standard error of a sample; summation runs in path order.
inline PriceEstimate estimate(const std::vector<double>& v) {
    PriceEstimate e;
    e.paths = v.size();
    if (v.empty()) return e;
    double s = 0.0;
    for (double x : v) s += x;
    e.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - e.mean) * (x - e.mean);
        e.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return e;
}

/// Paired estimate of E[a - b] on common paths.
inline PriceEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("paired difference needs equal path counts");
    std::vector<double> d(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) d[p] = a[p] - b[p];
    return estimate(d);
}

/// Forward swap rate at time 0 for the swaption (i, m) payoff convention.
inline double forward_swap_rate(const MarketSetup& market, int i, int m) {
    // value of -sum c_k A_{k-1}(0) vanishes at K = (A_{i-1} - A_{m-1}) / sum_{k=i+1}^m delta_k A_{k-1}
    const int N = market.size();
    auto annuity0 = [&](int j) {
        double a = 1.0;
        for (int l = j + 1; l <= N; ++l) a *= 1.0 + market.delta(l) * market.initial_libor(l);
        return a;
    };
    double level = 0.0;
    for (int k = i + 1; k <= m; ++k) level += market.delta(k) * annuity0(k - 1);
    return (annuity0(i - 1) - annuity0(m - 1)) / level;
}

inline double resolve_strike(const Product& prod, const MarketSetup& market) {
    if (prod.strike) return *prod.strike;
    if (prod.type == ProductType::swaption) return forward_swap_rate(market, prod.i, prod.m);
    return market.initial_libor(prod.i);
}

namespace detail {

inline void check_product(const Product& prod, int N) {
    if (prod.i < 1 || prod.i > N) throw DataError(prod.describe() + ": fixing index outside 1..N");
    if (prod.type == ProductType::swaption && (prod.m <= prod.i || prod.m > N))
        throw DataError(prod.describe() + ": swaption needs i < m <= N");
    if (prod.type == ProductType::ratchet && prod.i < 2) throw DataError(prod.describe() + ": ratchet needs i >= 2");
}

/// prod_{l > i} (1 + delta_l L_l(T_h)) on one path.
inline double annuity_on_path(const PathBatch& b, const MarketSetup& market, std::size_t p, int i, int h) {
    double a = 1.0;
    for (int l = i + 1; l <= b.size(); ++l) a *= 1.0 + market.delta(l) * b.libor(p, l, h);
    return a;
}

} // namespace detail

/// Discounted per-path payoffs B_{N+1}(0) * payoff / B_{N+1}(T_pay) in direct form.
inline std::vector<double> payoffs(const PathBatch& b, const MarketSetup& market, const Product& prod) {
    const int N = market.size();
    if (b.size() != N) throw DataError("path batch and market disagree on N");
    detail::check_product(prod, N);
    const double bN1 = market.curve().bond(N + 1);
    const int i = prod.i;
    const double d = market.delta(i);
    const double K = prod.type == ProductType::ratchet ? 0.0 : resolve_strike(prod, market);
    std::vector<double> out(b.paths());
    for (std::size_t p = 0; p < b.paths(); ++p) {
        const double Li = b.libor(p, i, i);
        switch (prod.type) {
        case ProductType::fra:
            out[p] = bN1 * d * (Li - K) * detail::annuity_on_path(b, market, p, i, std::min(i + 1, N));
            break;
        case ProductType::caplet:
            out[p] = bN1 * d * std::max(Li - K, 0.0) * detail::annuity_on_path(b, market, p, i, std::min(i + 1, N));
            break;
        case ProductType::ratchet: {
            double floor = b.libor(p, 1, 1);
            for (int j = 2; j < i; ++j) floor = std::min(floor, b.libor(p, j, j));
            out[p] = bN1 * d * std::max(Li - floor, 0.0) * detail::annuity_on_path(b, market, p, i, std::min(i + 1, N));
            break;
        }
        case ProductType::swaption: {
            // -sum_k c_k prod_{l >= k} (1 + delta_l L_l(T_i)), c_i = -1, c_k = delta_k K, c_m = 1 + delta_m K
            double v = detail::annuity_on_path(b, market, p, i - 1, i);
            for (int k = i + 1; k <= prod.m; ++k) {
                const double c = market.delta(k) * K + (k == prod.m ? 1.0 : 0.0);
                v -= c * detail::annuity_on_path(b, market, p, k - 1, i);
            }
            out[p] = bN1 * std::max(v, 0.0);
            break;
        }
        }
    }
    return out;
}

/// Discounted per-path payoffs in annuity form (caplets, FRAs and swaptions).
inline std::vector<double> payoffs(const AnnuityBatch& b, const MarketSetup& market, const Product& prod) {
    const int N = market.size();
    if (b.size() != N) throw DataError("annuity batch and market disagree on N");
    detail::check_product(prod, N);
    if (prod.type == ProductType::ratchet) throw DataError("ratchet caplets are not priced in annuity form");
    const double bN1 = market.curve().bond(N + 1);
    const int i = prod.i;
    const double K = resolve_strike(prod, market);
    std::vector<double> out(b.paths());
    for (std::size_t p = 0; p < b.paths(); ++p) {
        if (prod.type == ProductType::swaption) {
            double v = b.annuity(p, i - 1, i);
            for (int k = i + 1; k <= prod.m; ++k) {
                const double c = market.delta(k) * K + (k == prod.m ? 1.0 : 0.0);
                v -= c * b.annuity(p, k - 1, i);
            }
            out[p] = bN1 * std::max(v, 0.0);
            continue;
        }
        const double ai = b.annuity(p, i, i);
        const double ratio = i < N ? b.annuity(p, i, i + 1) / ai : 1.0;
        const double inner = b.annuity(p, i - 1, i) - (1.0 + market.delta(i) * K) * ai;
        out[p] = bN1 * ratio * (prod.type == ProductType::fra ? inner : std::max(inner, 0.0));
    }
    return out;
}

template <class Batch>
PriceEstimate price(const Batch& b, const MarketSetup& market, const Product& prod) {
    PriceEstimate e = estimate(payoffs(b, market, prod));
    e.elapsed_ms = b.elapsed_ms();
    e.scheme = b.scheme();
    e.product = prod.describe();
    return e;
}

inline PriceEstimate price_fra(const PathBatch& b, const MarketSetup& market, int i, double K) {
    return price(b, market, Product{ProductType::fra, i, 0, K});
}
inline PriceEstimate price_caplet(const PathBatch& b, const MarketSetup& market, int i, double K) {
    return price(b, market, Product{ProductType::caplet, i, 0, K});
}
inline PriceEstimate price_swaption(const PathBatch& b, const MarketSetup& market, int i, int m, double K) {
    return price(b, market, Product{ProductType::swaption, i, m, K});
}
inline PriceEstimate price_ratchet(const PathBatch& b, const MarketSetup& market, int i) {
    return price(b, market, Product{ProductType::ratchet, i, 0, std::nullopt});
}
inline PriceEstimate price_caplet_annuity(const AnnuityBatch& b, const MarketSetup& market, int i, double K) {
    return price(b, market, Product{ProductType::caplet, i, 0, K});
}
inline PriceEstimate price_swaption_annuity(const AnnuityBatch& b, const MarketSetup& market, int i, int m, double K) {
    return price(b, market, Product{ProductType::swaption, i, m, K});
}

/// Value of the product on the deterministic paths L(t) = L(0).
inline double deterministic_value(const MarketSetup& market, const Product& prod) {
    PathBatch b(market.size(), 1, "deterministic", 0);
    for (int i = 1; i <= market.size(); ++i)
        for (int h = 0; h <= i; ++h) b.slot(0, i, h) = market.initial_libor(i);
    return payoffs(b, market, prod)[0];
}

} // namespace levylmm

#endif // LEVYLMM_PRICING_HPP
