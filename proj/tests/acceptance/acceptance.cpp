// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include <levylmm/levylmm.hpp>

using namespace levylmm;

namespace {

constexpr double bp = 1e-4;
constexpr std::uint64_t seed = 20110;

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string note) {
        pass = pass && ok;
        notes.push_back(fmt::format("  [{}] {}", ok ? "ok" : "!!", note));
    }
    void info(std::string note) { notes.push_back("  " + std::move(note)); }
};

MarketSetup flat_market(int N, double lambda, double delta = 0.5) {
    const auto tenor = TenorStructure::uniform(N, delta);
    return MarketSetup(tenor, DiscountCurve::flat(tenor, 0.04), VolLoading::flat(N, lambda));
}

LevyModel calibrated_model(const std::string& type) { return ModelSpec::calibrated(type).build(); }

SimConfig sim(std::size_t paths) {
    SimConfig c;
    c.paths = paths;
    c.seed = seed;
    return c;
}

Product atm_caplet(int i) { return Product{ProductType::caplet, i, 0, std::nullopt}; }

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// -------------------------------------------------------------------------

Criterion small_jump_variance() {
    Criterion c{1, "CGMY small-jump variance at eps=1e-3 equals 3.11e-4 within 1%"};
    const auto r = oracle::small_jump_variance(1e-3);
    c.require(r.pass, fmt::format("variance {:.6e}, relative deviation {:.3e} (tol 1e-2)", r.value, r.value / r.target - 1.0));
    return c;
}

Criterion calibration() {
    Criterion c{2, "kappa'(0)=0 and kappa''(0)=1 for both calibrated models (tol 1e-8)"};
    for (const char* m : {"merton", "cgmy"})
        for (const auto& r : oracle::calibration(calibrated_model(m)))
            c.require(r.pass, fmt::format("{} = {:.12g}", r.name, r.value));
    return c;
}

Criterion fra_martingale() {
    Criterion c{3, "FRA martingale under exact drift, N=10, lambda=0.2, 1e4 paths"};
    const auto t0 = std::chrono::steady_clock::now();
    const auto market = flat_market(10, 0.2);
    for (const char* name : {"merton", "cgmy"}) {
        const auto model = calibrated_model(name);
        const DriftEngine engine(model, market, 2);
        const auto b = run_scheme("euler-full", sim(10000), engine);
        double worst_atm = 0.0, worst_zero = 0.0;
        for (int i = 1; i <= 10; ++i) {
            const double L0 = market.initial_libor(i);
            const auto atm = b.price(market, Product{ProductType::fra, i, 0, L0});
            worst_atm = std::max(worst_atm, std::abs(atm.mean) / atm.stderr_);
            const auto zero = b.price(market, Product{ProductType::fra, i, 0, 0.0});
            const double exact = market.delta(i) * market.curve().bond(i + 1) * L0;
            worst_zero = std::max(worst_zero, std::abs(zero.mean - exact) / zero.stderr_);
        }
        c.require(worst_atm <= 3.0, fmt::format("{}: K=L_i(0), max |price|/stderr over maturities = {:.2f} (tol 3)", name, worst_atm));
        c.require(worst_zero <= 3.0, fmt::format("{}: K=0, max |price - closed form|/stderr = {:.2f} (tol 3)", name, worst_zero));
    }
    const double s = seconds_since(t0);
    c.require(s < 120.0, fmt::format("runtime {:.1f} s (limit 120 s)", s));
    return c;
}

double max_caplet_gap(const SchemeBatch& a, const SchemeBatch& b, const MarketSetup& market, int* where = nullptr) {
    double worst = 0.0;
    for (int i = 1; i <= market.size(); ++i) {
        const double d = std::abs(a.price(market, atm_caplet(i)).mean - b.price(market, atm_caplet(i)).mean) / bp;
        if (d > worst) {
            worst = d;
            if (where) *where = i;
        }
    }
    return worst;
}

Criterion drift_truncation() {
    Criterion c{4, "drift truncation: lambda=0.2 |order1-full| < 0.2 bp; lambda=0.6 |order3-order2| < 1e-3 bp"};
    const auto t0 = std::chrono::steady_clock::now();
    for (const char* name : {"merton", "cgmy"}) {
        const auto model = calibrated_model(name);
        {
            const auto market = flat_market(10, 0.2);
            const DriftEngine engine(model, market, 3);
            const auto full = run_scheme("euler-full", sim(10000), engine);
            const auto o1 = run_scheme("euler-order-1", sim(10000), engine);
            int at = 0;
            const double gap = max_caplet_gap(o1, full, market, &at);
            c.require(gap < 0.2, fmt::format("{} lambda=0.2: max caplet |order1 - full| = {:.3e} bp at i={} (tol 0.2)", name, gap, at));
        }
        {
            const auto market = flat_market(10, 0.6);
            const DriftEngine engine(model, market, 3);
            const auto o2 = run_scheme("euler-order-2", sim(10000), engine);
            const auto o3 = run_scheme("euler-order-3", sim(10000), engine);
            int at = 0;
            const double gap = max_caplet_gap(o3, o2, market, &at);
            c.require(gap < 1e-3, fmt::format("{} lambda=0.6: max caplet |order3 - order2| = {:.3e} bp at i={} (tol 1e-3)", name, gap, at));
            if (model.is_cgmy() || gap >= 1e-3) {
                const auto full = run_scheme("euler-full", sim(10000), engine);
                c.info(fmt::format("{} lambda=0.6: max caplet |order3 - full| = {:.3e} bp, |order2 - full| = {:.3e} bp", name,
                                   max_caplet_gap(o3, full, market), max_caplet_gap(o2, full, market)));
            }
        }
    }
    const double s = seconds_since(t0);
    c.require(s < 600.0, fmt::format("runtime {:.1f} s (limit 600 s)", s));
    return c;
}

Criterion drift_exactness() {
    Criterion c{5, "truncated drift exact when N-i <= p (1e-12); exact drift vs quadrature for N <= 6 (rel 1e-6)"};
    for (const char* name : {"merton", "cgmy"}) {
        const auto model = calibrated_model(name);
        for (double lam : {0.2, 0.6}) {
            const auto market = flat_market(10, lam);
            const DriftEngine engine(model, market, 3);
            auto rng = common_randomness(seed, 0, StreamTag::auxiliary);
            double worst = 0.0;
            for (int trial = 0; trial < 5; ++trial) {
                auto L = market.initial_libors();
                for (int j = 1; j <= 10; ++j) L[static_cast<std::size_t>(j)] *= std::exp(0.5 * rng.normal());
                for (int n = 0; n < 10; ++n)
                    for (int p = 1; p <= 3; ++p)
                        for (int i = std::max(n + 1, 10 - p); i <= 10; ++i)
                            worst = std::max(worst, std::abs(engine.truncated(i, L, n, p) - engine.full(i, L, n)));
            }
            c.require(worst <= 1e-12, fmt::format("{} lambda={}: max |truncated - full| = {:.2e}", name, lam, worst));
        }
        for (int N : {4, 6})
            for (double lam : {0.2, 0.6}) {
                const auto r = oracle::drift_vs_quadrature(model, N, lam, seed + static_cast<std::uint64_t>(N));
                c.require(r.pass, fmt::format("{} N={} lambda={}: max relative error vs quadrature = {:.2e}", name, N, lam, r.value));
            }
    }
    return c;
}

Criterion speedup() {
    Criterion c{6, "order-2 Euler >= 10x faster than exact-drift Euler; order-3 within 25% of order-2 (N=10, 1e4 paths)"};
    const auto market = flat_market(10, 0.2);
    for (const char* name : {"merton", "cgmy"}) {
        const auto model = calibrated_model(name);
        const DriftEngine engine(model, market, 3);
        auto best = [&](const std::string& scheme) {
            double ms = std::numeric_limits<double>::infinity();
            for (int r = 0; r < 2; ++r) ms = std::min(ms, run_scheme(scheme, sim(10000), engine).elapsed_ms);
            return ms;
        };
        const double full = best("euler-full"), o2 = best("euler-order-2"), o3 = best("euler-order-3");
        c.info(fmt::format("{}: full {:.0f} ms, order-2 {:.0f} ms, order-3 {:.0f} ms", name, full, o2, o3));
        c.require(full / o2 >= 10.0, fmt::format("{}: speedup full/order-2 = {:.1f}x (floor 10x)", name, full / o2));
        c.require(o3 <= 1.25 * o2, fmt::format("{}: order-3/order-2 = {:.3f} (limit 1.25)", name, o3 / o2));
    }
    return c;
}

Criterion approximation_ordering() {
    Criterion c{7, "N=20, lambda=0.2: log-Levy schemes beat frozen kernels on >= 80% of caplet maturities"};
    const auto market = flat_market(20, 0.2);
    for (const char* name : {"merton", "cgmy"}) {
        const auto model = calibrated_model(name);
        const DriftEngine engine(model, market, 2);
        const auto bench = run_scheme("euler-order-2", sim(10000), engine);
        const auto frozen = run_scheme("frozen-kernel", sim(10000), engine);
        const auto l1 = run_scheme("loglevy-1", sim(10000), engine);
        const auto l2 = run_scheme("loglevy-2", sim(10000), engine);
        int wins1 = 0, wins2 = 0;
        double gap12 = 0.0, gap_frozen = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double b = bench.price(market, atm_caplet(i)).mean;
            const double f = std::abs(frozen.price(market, atm_caplet(i)).mean - b);
            const double p1 = l1.price(market, atm_caplet(i)).mean, p2 = l2.price(market, atm_caplet(i)).mean;
            wins1 += std::abs(p1 - b) < f;
            wins2 += std::abs(p2 - b) < f;
            gap12 = std::max(gap12, std::abs(p1 - p2));
            gap_frozen = std::max(gap_frozen, f);
        }
        c.require(wins1 >= 16, fmt::format("{}: loglevy-1 closer than frozen-kernel on {}/20 maturities", name, wins1));
        c.require(wins2 >= 16, fmt::format("{}: loglevy-2 closer than frozen-kernel on {}/20 maturities", name, wins2));
        c.require(gap12 < gap_frozen, fmt::format("{}: max |loglevy-1 - loglevy-2| = {:.3f} bp < max |frozen - benchmark| = {:.3f} bp",
                                                  name, gap12 / bp, gap_frozen / bp));
    }
    return c;
}

Criterion annuity_behaviour() {
    Criterion c{8, "annuity caplets: monotone in lambda, agree with benchmark at lambda=0.2, lower stderr at lambda=0.6"};
    const auto model = calibrated_model("merton");
    const int N = 20;
    std::vector<std::vector<double>> prices;
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    for (double lam : grid) {
        const auto market = flat_market(N, lam);
        const DriftEngine engine(model, market, 2);
        const auto ann = run_scheme("annuity", sim(10000), engine);
        std::vector<double> row;
        for (int i = 1; i <= N; ++i) row.push_back(ann.price(market, atm_caplet(i)).mean);
        prices.push_back(row);
        if (lam == 0.2 || lam == 0.6) {
            const auto bench = run_scheme("euler-order-2", sim(10000), engine);
            if (lam == 0.2) {
                double worst = 0.0;
                int at = 0;
                for (int i = 1; i <= N; ++i) {
                    const auto d = paired_difference(ann.payoffs(market, atm_caplet(i)), bench.payoffs(market, atm_caplet(i)));
                    const double z = std::abs(d.mean) / d.stderr_;
                    if (z > worst) worst = z, at = i;
                    if (i == 1 || i % 5 == 0)
                        c.info(fmt::format("lambda=0.2 i={}: annuity - benchmark = {:.3f} bp, paired stderr {:.3f} bp", i,
                                           d.mean / bp, d.stderr_ / bp));
                }
                c.require(worst <= 3.0, fmt::format("lambda=0.2: max |annuity - benchmark| / paired stderr = {:.2f} at i={} (tol 3)", worst, at));
            } else {
                int smaller = 0;
                for (int i = 1; i <= N; ++i)
                    smaller += ann.price(market, atm_caplet(i)).stderr_ < bench.price(market, atm_caplet(i)).stderr_;
                c.require(smaller == N, fmt::format("lambda=0.6: annuity stderr below direct stderr on {}/{} maturities", smaller, N));
            }
        }
    }
    int monotone = 0;
    for (int i = 0; i < N; ++i) {
        bool up = true;
        for (std::size_t k = 1; k < grid.size(); ++k) up = up && prices[k][static_cast<std::size_t>(i)] > prices[k - 1][static_cast<std::size_t>(i)];
        monotone += up;
    }
    c.require(monotone == N, fmt::format("prices increase over lambda in {{0.1..0.6}} on {}/{} maturities", monotone, N));
    return c;
}

Criterion annuity_martingale() {
    Criterion c{9, "annuity ratio A_i(t)/A_i(0) has mean 1 within 3 stderr, 1e4 paths"};
    for (const char* name : {"merton", "cgmy"})
        for (int N : {10, 20}) {
            const auto r = oracle::annuity_martingale(calibrated_model(name), N, 0.2, 10000, seed);
            c.require(r.pass, fmt::format("{} N={}: max |mean - 1|/stderr over all (i, t) = {:.2f}", name, N, r.value));
        }
    return c;
}

Criterion subordination() {
    Criterion c{10, "inverse-Gaussian subordination: closed form vs integral (1e-8); components uncorrelated"};
    const auto a = oracle::subordination_closed_form();
    c.require(a.pass, fmt::format("max |closed form - integral| = {:.2e}", a.value));
    const auto b = oracle::subordination_uncorrelated(100000, seed);
    c.require(b.pass, fmt::format("max |correlation z-score| over component pairs = {:.2f} (tol 3)", b.value));
    return c;
}

Criterion determinism() {
    Criterion c{11, "experiment CSVs byte-identical on rerun and across worker counts"};
    const std::string dir = LEVYLMM_PRESET_DIR;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"drift_low.cfg", "drift-study"},  {"drift_high.cfg", "price"},   {"approx_n20.cfg", "approx-study"},
        {"volsweep_n10.cfg", "vol-sweep"}, {"timing.cfg", "timing"},      {"drift_low.cfg", "selftest"},
    };
    for (const auto& [file, kind] : runs) {
        auto cfg = load_config(dir + "/" + file);
        cfg.sim.paths = kind == "selftest" ? 1000 : 500;
        if (kind == "vol-sweep") cfg.experiment.lambdas = {0.1, 0.4};
        const RunOptions stable{false};
        const auto first = run_experiment(kind, cfg, stable).csv;
        const auto again = run_experiment(kind, cfg, stable).csv;
        cfg.sim.workers = 3;
        const auto threaded = run_experiment(kind, cfg, stable).csv;
        c.require(first == again && first == threaded,
                  fmt::format("{} ({}): {} bytes, rerun {}, 3 workers {}", kind, file, first.size(),
                              first == again ? "identical" : "DIFFERS", first == threaded ? "identical" : "DIFFERS"));
    }
    return c;
}

} // namespace

int main() {
    using Fn = Criterion (*)();
    const Fn all[] = {small_jump_variance, calibration,        fra_martingale,     drift_truncation,
                      drift_exactness,     speedup,            approximation_ordering, annuity_behaviour,
                      annuity_martingale,  subordination,      determinism};
    int failed = 0;
    int id = 0;
    for (Fn f : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c{++id, "(aborted)"};
        try {
            c = f();
        } catch (const std::exception& e) {
            c.pass = false;
            c.notes.push_back(std::string("  exception: ") + e.what());
        }
        std::cout << fmt::format("{} criterion {:>2}: {} ({:.1f} s)\n", c.pass ? "PASS" : "FAIL", c.id, c.title, seconds_since(t0));
        for (const auto& n : c.notes) std::cout << n << '\n';
        std::cout.flush();
        failed += !c.pass;
    }
    std::cout << fmt::format("{} of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
