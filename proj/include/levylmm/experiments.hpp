#ifndef LEVYLMM_EXPERIMENTS_HPP
#define LEVYLMM_EXPERIMENTS_HPP

// Experiment drivers behind the CLI: price, drift-study, approx-study,
// vol-sweep, timing and selftest.  Each returns its CSV text; the caller
// decides where to write it.  CSV content depends only on (config, seed)
// unless timing columns are enabled.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "config.hpp"
#include "drift.hpp"
#include "levy_models.hpp"
#include "loglevy.hpp"
#include "market.hpp"
#include "paths.hpp"
#include "pricing.hpp"
#include "subordination.hpp"

namespace levylmm {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int full_drift_max_n = 14;

struct RunOptions {
    bool timing = true;  ///< false writes every runtime column as 0
};

/// Rows of strings with a fixed header, rendered as RFC-4180-style CSV.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width differs from header");
        rows_.push_back(std::move(row));
    }
    std::size_t size() const { return rows_.size(); }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (k) out += ',';
                out += r[k];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string num(double x) { return fmt::format("{:.10g}", x == 0.0 ? 0.0 : x); }

struct ExperimentResult {
    std::string name;  ///< CSV file name
    std::string csv;
    bool ok = true;    ///< selftest: all checks passed
    std::vector<std::string> report;
};

/// One simulated batch of any scheme, priced through a common interface.
struct SchemeBatch {
    std::string label;
    std::optional<PathBatch> libor;
    std::optional<AnnuityBatch> annuity;
    double elapsed_ms = 0.0;

    bool supports(const Product& p) const { return libor.has_value() || p.type != ProductType::ratchet; }
    std::vector<double> payoffs(const MarketSetup& market, const Product& p) const {
        return libor ? levylmm::payoffs(*libor, market, p) : levylmm::payoffs(*annuity, market, p);
    }
    PriceEstimate price(const MarketSetup& market, const Product& p) const {
        PriceEstimate e = estimate(payoffs(market, p));
        e.scheme = label;
        e.product = p.describe();
        e.elapsed_ms = elapsed_ms;
        return e;
    }
};

/// Simulates `name` with common random numbers (seed in cfg).  The
/// approximation set-up time is included in elapsed_ms.
inline SchemeBatch run_scheme(const std::string& name, SimConfig cfg, const DriftEngine& engine) {
    cfg.scheme = parse_scheme(name, &cfg.order);
    const auto start = std::chrono::steady_clock::now();
    SchemeBatch out;
    out.label = cfg.label();
    switch (cfg.scheme) {
    case Scheme::euler_full:
        if (engine.size() > full_drift_max_n)
            throw ConfigError(fmt::format("euler-full needs N <= {}: the exact drift sums over 2^(N-i) subsets "
                                          "per rate and step (O(2^N) cost)",
                                          full_drift_max_n));
        [[fallthrough]];
    case Scheme::euler_order:
    case Scheme::euler_frozen: out.libor = simulate_euler(cfg, engine); break;
    case Scheme::loglevy1:
    case Scheme::loglevy2:
    case Scheme::frozen_kernel: {
        const int order = cfg.scheme == Scheme::loglevy1 ? 1 : 2;
        const LogLevyApproximation approx(engine, order, cfg.scheme == Scheme::frozen_kernel, cfg.eps);
        out.libor = simulate_loglevy(cfg, approx);
        break;
    }
    case Scheme::annuity: {
        const AnnuityApproximation approx(engine, cfg.eps);
        out.annuity = simulate_annuity(cfg, approx);
        break;
    }
    }
    out.elapsed_ms = detail::elapsed_ms(start);
    return out;
}

namespace detail {

inline int max_order_for(const std::vector<std::string>& schemes) {
    int p = 2;
    for (const auto& s : schemes) {
        int order = 2;
        if (parse_scheme(s, &order) == Scheme::euler_order) p = std::max(p, order);
    }
    return std::min(p, 3);
}

inline std::string strike_cell(const Product& p, const MarketSetup& market) {
    return p.type == ProductType::ratchet ? std::string("running-min") : num(resolve_strike(p, market));
}

inline std::string end_cell(const Product& p) { return p.type == ProductType::swaption ? std::to_string(p.m) : std::to_string(p.i + 1); }

} // namespace detail

inline ExperimentResult run_price(const ExperimentConfig& cfg, const RunOptions& = {}) {
    cfg.validate();
    const auto model = cfg.model.build();
    const auto market = cfg.market.build();
    const DriftEngine engine(model, market, std::min(3, std::max(2, cfg.sim.order)));
    const auto batch = run_scheme(cfg.sim.label(), cfg.sim, engine);
    CsvTable t({"product", "maturity", "end", "strike", "scheme", "price", "stderr", "paths"});
    for (const auto& p : cfg.products) {
        if (!batch.supports(p)) continue;
        const auto e = batch.price(market, p);
        t.add({product_name(p.type), std::to_string(p.i), detail::end_cell(p), detail::strike_cell(p, market), batch.label,
               num(e.mean), num(e.stderr_), std::to_string(e.paths)});
    }
    return {cfg.experiment.file(), t.str(), true, {}};
}

inline ExperimentResult run_drift_study(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
    cfg.validate();
    if (cfg.market.N > full_drift_max_n)
        throw ConfigError(fmt::format("drift-study needs N <= {} (full drift costs O(2^N) per step), got N = {}",
                                      full_drift_max_n, cfg.market.N));
    const auto model = cfg.model.build();
    const auto market = cfg.market.build();
    const DriftEngine engine(model, market, 3);
    const auto full = run_scheme("euler-full", cfg.sim, engine);
    std::vector<std::pair<int, SchemeBatch>> runs;
    for (int p : cfg.experiment.orders) runs.emplace_back(p, run_scheme("euler-order-" + std::to_string(p), cfg.sim, engine));
    CsvTable t({"product", "maturity", "order", "price", "abs-diff-vs-full-bp", "stderr", "runtime-ms"});
    auto ms = [&](double v) { return num(opt.timing ? std::round(v * 1000.0) / 1000.0 : 0.0); };
    for (const auto& p : cfg.products) {
        const auto ef = full.price(market, p);
        for (const auto& [order, b] : runs) {
            const auto e = b.price(market, p);
            t.add({product_name(p.type), std::to_string(p.i), std::to_string(order), num(e.mean),
                   num(std::abs(e.mean - ef.mean) * 1e4), num(e.stderr_), ms(b.elapsed_ms)});
        }
        t.add({product_name(p.type), std::to_string(p.i), "full", num(ef.mean), num(0.0), num(ef.stderr_), ms(full.elapsed_ms)});
    }
    return {cfg.experiment.file(), t.str(), true, {}};
}

inline std::vector<std::string> approx_schemes(const ExperimentConfig& cfg) {
    if (!cfg.experiment.schemes.empty()) return cfg.experiment.schemes;
    return {cfg.experiment.benchmark, "frozen-kernel", "loglevy-1", "loglevy-2", "annuity"};
}

/// Prices of every scheme for every product on common random numbers;
/// differences are paired against the benchmark scheme.
inline void add_scheme_comparison(CsvTable& t, const std::vector<std::string>& prefix, const MarketSetup& market,
                                  const std::vector<Product>& products, const std::vector<SchemeBatch>& runs,
                                  const SchemeBatch& bench, bool with_diff) {
    for (const auto& p : products) {
        std::vector<double> pb;
        if (with_diff) pb = bench.payoffs(market, p);
        for (const auto& b : runs) {
            if (!b.supports(p)) continue;
            const auto pay = b.payoffs(market, p);
            const auto e = estimate(pay);
            std::vector<std::string> row = prefix;
            row.insert(row.end(), {product_name(p.type), std::to_string(p.i), b.label, num(e.mean), num(e.stderr_)});
            if (with_diff) {
                const auto d = paired_difference(pay, pb);
                row.push_back(num(d.mean * 1e4));
                row.push_back(num(d.stderr_ * 1e4));
            }
            t.add(std::move(row));
        }
    }
}

inline ExperimentResult run_approx_study(const ExperimentConfig& cfg, const RunOptions& = {}) {
    cfg.validate();
    const auto model = cfg.model.build();
    const auto market = cfg.market.build();
    auto schemes = approx_schemes(cfg);
    if (std::find(schemes.begin(), schemes.end(), cfg.experiment.benchmark) == schemes.end())
        schemes.insert(schemes.begin(), cfg.experiment.benchmark);
    const DriftEngine engine(model, market, detail::max_order_for(schemes));
    std::vector<SchemeBatch> runs;
    for (const auto& s : schemes) runs.push_back(run_scheme(s, cfg.sim, engine));
    const auto& bench = *std::find_if(runs.begin(), runs.end(), [&](const SchemeBatch& b) {
        int o = 2;
        const auto sch = parse_scheme(cfg.experiment.benchmark, &o);
        SimConfig c;
        c.scheme = sch;
        c.order = o;
        return b.label == c.label();
    });
    CsvTable t({"product", "maturity", "scheme", "price", "stderr", "diff-vs-benchmark-bp", "paired-stderr-bp"});
    add_scheme_comparison(t, {}, market, cfg.products, runs, bench, true);
    return {cfg.experiment.file(), t.str(), true, {}};
}

inline ExperimentResult run_vol_sweep(const ExperimentConfig& cfg, const RunOptions& = {}) {
    cfg.validate();
    const auto model = cfg.model.build();
    const auto schemes = approx_schemes(cfg);
    CsvTable t({"lambda", "product", "maturity", "scheme", "price", "stderr"});
    for (double lam : cfg.experiment.lambdas) {
        MarketSpec ms = cfg.market;
        ms.loadings = {lam};
        const auto market = ms.build();
        const auto report = validate_setup(model, market.loading());
        if (!report.pass) throw ConfigError(fmt::format("vol-sweep lambda {}: {}", lam, report.message));
        const DriftEngine engine(model, market, detail::max_order_for(schemes));
        std::vector<SchemeBatch> runs;
        for (const auto& s : schemes) runs.push_back(run_scheme(s, cfg.sim, engine));
        add_scheme_comparison(t, {num(lam)}, market, cfg.products, runs, runs.front(), false);
    }
    return {cfg.experiment.file(), t.str(), true, {}};
}

inline ExperimentResult run_timing(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
    cfg.validate();
    std::vector<std::string> schemes = cfg.experiment.schemes;
    if (schemes.empty()) schemes = {"euler-full", "euler-order-1", "euler-order-2", "euler-order-3"};
    std::vector<ModelSpec> models;
    if (cfg.experiment.models.empty()) models.push_back(cfg.model);
    for (const auto& m : cfg.experiment.models) models.push_back(ModelSpec::calibrated(m));
    const auto market = cfg.market.build();
    CsvTable t({"model", "scheme", "paths", "runtime-ms", "speedup-vs-full"});
    for (const auto& spec : models) {
        const auto model = spec.build();
        const DriftEngine engine(model, market, detail::max_order_for(schemes));
        std::vector<std::pair<std::string, double>> best;
        for (const auto& s : schemes) {
            double ms = std::numeric_limits<double>::infinity();
            std::string label;
            for (int r = 0; r < cfg.experiment.repeats; ++r) {
                const auto b = run_scheme(s, cfg.sim, engine);
                ms = std::min(ms, b.elapsed_ms);
                label = b.label;
            }
            best.emplace_back(label, ms);
        }
        const auto full = std::find_if(best.begin(), best.end(), [](const auto& b) { return b.first == "euler-full"; });
        for (const auto& [label, ms] : best) {
            const double speedup = full != best.end() ? full->second / ms : 0.0;
            t.add({model.name(), label, std::to_string(cfg.sim.paths), num(opt.timing ? std::round(ms * 1000.0) / 1000.0 : 0.0),
                   num(opt.timing ? std::round(speedup * 1000.0) / 1000.0 : 0.0)});
        }
    }
    return {cfg.experiment.file(), t.str(), true, {}};
}

// ---------------------------------------------------------------------------
// Oracles shared by selftest, unit tests and the acceptance binary.

/// Exact drift by quadrature over the Levy measure:
/// b_i = -alpha lambda_i^2 / 2 - alpha lambda_i sum_j q_j lambda_j
///       - int [(e^{lambda_i x} - 1) prod_j (1 + q_j (e^{lambda_j x} - 1)) - lambda_i x] F(dx).
inline double drift_by_quadrature(const DriftEngine& engine, int i, std::span<const double> L, int n) {
    const auto& market = engine.market();
    const auto& vol = market.loading();
    const int N = market.size();
    if (n >= i) return 0.0;
    const double li = vol.on_interval(i, n);
    std::vector<double> q, lj;
    double cross = 0.0;
    for (int j = i + 1; j <= N; ++j) {
        const double dl = market.delta(j) * L[static_cast<std::size_t>(j)];
        q.push_back(dl / (1.0 + dl));
        lj.push_back(vol.on_interval(j, n));
        cross += q.back() * lj.back();
    }
    const double a = engine.kernels().alpha(n);
    auto f = [&](double x) {
        double prod = 1.0;
        for (std::size_t k = 0; k < q.size(); ++k) prod *= 1.0 + q[k] * std::expm1(lj[k] * x);
        return std::expm1(li * x) * prod - li * x;
    };
    quad::Options o;
    o.rel_tol = 1e-11;
    return -0.5 * a * li * li - a * li * cross - engine.model().integrate(f, JumpRegion::all, 0.0, o);
}

struct Check {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace oracle {

inline Check small_jump_variance(double eps) {
    const auto p = CgmyParams::unit_variance(13.0, 13.0, 0.25);
    const auto m = LevyModel::cgmy(p.C, p.G, p.M, p.Y);
    const double v = m.small_jump_variance(eps);
    return {"cgmy-small-jump-variance", v, 3.11e-4, 0.01, std::abs(v / 3.11e-4 - 1.0) <= 0.01};
}

inline std::vector<Check> calibration(const LevyModel& m) {
    const double d1 = m.jump_cumulant_derivative(0.0, 1);
    const double d2 = m.jump_cumulant_derivative(0.0, 2);
    return {{m.name() + "-kappa'(0)", d1, 0.0, 1e-8, std::abs(d1) <= 1e-8},
            {m.name() + "-kappa''(0)", d2, 1.0, 1e-8, std::abs(d2 - 1.0) <= 1e-8}};
}

/// Closed-form jump cumulant against quadrature of int (e^{ux}-1-ux) F(dx).
inline Check cumulant_cross_check(const LevyModel& m) {
    double worst = 0.0;
    const double bound = std::min(m.moment_bound() * 0.5, 3.0);
    for (double u : {-bound, -0.6, -0.2, 0.2, 0.6, bound}) {
        const double closed = m.jump_cumulant(u);
        const double numeric = m.integrate([u](double x) { return std::expm1(u * x) - u * x; }, JumpRegion::all, 0.0);
        worst = std::max(worst, std::abs(closed - numeric) / std::max(1e-12, std::abs(closed)));
    }
    return {m.name() + "-cumulant-vs-quadrature", worst, 0.0, 1e-6, worst <= 1e-6};
}

/// FRA at K = L_i(0) is worth 0 under the exact dynamics: worst |z| over i.
inline Check fra_martingale(const LevyModel& m, int N, double lambda, std::size_t paths, std::uint64_t seed, unsigned workers = 1) {
    const auto tenor = TenorStructure::uniform(N, 0.5);
    const MarketSetup market(tenor, DiscountCurve::flat(tenor, 0.04), VolLoading::flat(N, lambda));
    const DriftEngine engine(m, market, 2);
    SimConfig c;
    c.paths = paths;
    c.seed = seed;
    c.workers = workers;
    c.scheme = Scheme::euler_full;
    const auto b = simulate_euler(c, engine);
    double worst = 0.0;
    for (int i = 1; i <= N; ++i) {
        const auto e = price_fra(b, market, i, market.initial_libor(i));
        worst = std::max(worst, std::abs(e.mean) / std::max(e.stderr_, 1e-300));
    }
    return {m.name() + "-fra-martingale-max-z", worst, 0.0, 3.0, worst <= 3.0};
}

/// Exact drift against quadrature at randomly perturbed LIBOR states.
inline Check drift_vs_quadrature(const LevyModel& m, int N, double lambda, std::uint64_t seed) {
    const auto tenor = TenorStructure::uniform(N, 0.5);
    const MarketSetup market(tenor, DiscountCurve::flat(tenor, 0.04), VolLoading::flat(N, lambda));
    const DriftEngine engine(m, market, 2);
    auto rng = common_randomness(seed, 0, StreamTag::auxiliary);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> L = market.initial_libors();
        for (int j = 1; j <= N; ++j) L[static_cast<std::size_t>(j)] *= std::exp(0.5 * rng.normal());
        for (int n = 0; n < N; ++n)
            for (int i = n + 1; i <= N; ++i) {
                const double exact = engine.full(i, L, n);
                const double numeric = drift_by_quadrature(engine, i, L, n);
                worst = std::max(worst, std::abs(exact - numeric) / std::max(1e-12, std::abs(numeric)));
            }
    }
    return {m.name() + "-drift-full-vs-quadrature", worst, 0.0, 1e-6, worst <= 1e-6};
}

/// Mean of A_i(t)/A_i(0) is 1 for all i and fixing horizons: worst |z|.
inline Check annuity_martingale(const LevyModel& m, int N, double lambda, std::size_t paths, std::uint64_t seed, unsigned workers = 1) {
    const auto tenor = TenorStructure::uniform(N, 0.5);
    const MarketSetup market(tenor, DiscountCurve::flat(tenor, 0.04), VolLoading::flat(N, lambda));
    const DriftEngine engine(m, market, 2);
    const AnnuityApproximation approx(engine, 1e-3);
    SimConfig c;
    c.paths = paths;
    c.seed = seed;
    c.workers = workers;
    c.scheme = Scheme::annuity;
    const auto b = simulate_annuity(c, approx);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        for (int h = 1; h < b.horizons(i); ++h) {
            std::vector<double> r(b.paths());
            for (std::size_t p = 0; p < b.paths(); ++p) r[p] = b.annuity(p, i, h) / b.annuity(p, i, 0);
            const auto e = estimate(r);
            worst = std::max(worst, std::abs(e.mean - 1.0) / std::max(e.stderr_, 1e-300));
        }
    return {m.name() + "-annuity-martingale-max-z", worst, 0.0, 3.0, worst <= 3.0};
}

/// Inverse-Gaussian subordination: closed-form Phi against the integral definition.
inline Check subordination_closed_form() {
    const InverseGaussianClock clock{0.8, 1.5};
    const auto measure = clock.measure(2);
    double worst = 0.0;
    for (double a : {0.0, 0.3, 1.0, 2.5, 5.0})
        for (double b : {-1.5, 0.0, 0.7, 4.0}) {
            const double z[2] = {a, b};
            worst = std::max(worst, std::abs(clock.characteristic_exponent(z) - measure.characteristic_exponent_by_quadrature(z)));
        }
    return {"ig-subordination-closed-form", worst, 0.0, 1e-8, worst <= 1e-8};
}

/// Sample cross-correlations of the components of Y(t): worst |z|.
inline Check subordination_uncorrelated(std::size_t samples, std::uint64_t seed) {
    const InverseGaussianClock clock{0.8, 1.5};
    const auto measure = clock.measure(3);
    std::vector<std::vector<double>> y(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        auto rng = common_randomness(seed, static_cast<std::uint32_t>(s), StreamTag::auxiliary);
        y[s] = measure.sample(1.0, rng);
    }
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            std::vector<double> prod(samples);
            for (std::size_t s = 0; s < samples; ++s)
                prod[s] = y[s][static_cast<std::size_t>(a)] * y[s][static_cast<std::size_t>(b)];
            const auto e = estimate(prod);
            worst = std::max(worst, std::abs(e.mean) / e.stderr_);
        }
    return {"ig-subordination-uncorrelated-max-z", worst, 0.0, 3.0, worst <= 3.0};
}

} // namespace oracle

inline ExperimentResult run_selftest(const ExperimentConfig& cfg, const RunOptions& = {}) {
    const auto model = cfg.model.build();
    const auto other = ModelSpec::calibrated(model.is_cgmy() ? "merton" : "cgmy").build();
    const auto& merton = model.is_cgmy() ? other : model;
    const std::size_t paths = std::min<std::size_t>(cfg.sim.paths, 4000);
    const int n_small = std::min(cfg.market.N, 6);
    std::vector<Check> checks;
    checks.push_back(oracle::small_jump_variance(cfg.sim.eps));
    for (const auto* m : {&model, &other})
        for (auto& c : oracle::calibration(*m)) checks.push_back(c);
    checks.push_back(oracle::cumulant_cross_check(model));
    checks.push_back(oracle::cumulant_cross_check(other));
    checks.push_back(oracle::fra_martingale(merton, n_small, 0.2, paths, cfg.sim.seed, cfg.sim.workers));
    checks.push_back(oracle::drift_vs_quadrature(model, n_small, 0.2, cfg.sim.seed));
    checks.push_back(oracle::drift_vs_quadrature(other, n_small, 0.2, cfg.sim.seed));
    checks.push_back(oracle::annuity_martingale(merton, std::min(cfg.market.N, 10), 0.2, paths, cfg.sim.seed, cfg.sim.workers));
    checks.push_back(oracle::subordination_closed_form());
    checks.push_back(oracle::subordination_uncorrelated(20000, cfg.sim.seed));

    ExperimentResult r{cfg.experiment.kind == "selftest" ? cfg.experiment.file() : "selftest.csv", {}, true, {}};
    CsvTable t({"check", "status", "value", "target", "tolerance"});
    for (const auto& c : checks) {
        t.add({c.name, c.pass ? "PASS" : "FAIL", num(c.value), num(c.target), num(c.tolerance)});
        r.report.push_back(fmt::format("{} {}: value {:.6g}, target {:.6g}, tolerance {:.3g}", c.pass ? "PASS" : "FAIL", c.name,
                                       c.value, c.target, c.tolerance));
        r.ok = r.ok && c.pass;
    }
    r.csv = t.str();
    return r;
}

inline ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& cfg, const RunOptions& opt = {}) {
    static const std::map<std::string, std::function<ExperimentResult(const ExperimentConfig&, const RunOptions&)>> table{
        {"price", run_price},           {"drift-study", run_drift_study}, {"approx-study", run_approx_study},
        {"vol-sweep", run_vol_sweep},   {"timing", run_timing},           {"selftest", run_selftest},
    };
    const auto it = table.find(kind);
    if (it == table.end()) throw ConfigError("unknown experiment '" + kind + "'");
    ExperimentConfig c = cfg;
    c.experiment.kind = kind;
    return it->second(c, opt);
}

} // namespace levylmm

#endif // LEVYLMM_EXPERIMENTS_HPP
