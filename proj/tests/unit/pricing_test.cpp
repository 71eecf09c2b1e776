#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace levylmm;

namespace {

PathBatch deterministic_batch(const MarketSetup& m) {
    PathBatch b(m.size(), 1, "deterministic", 0);
    for (int i = 1; i <= m.size(); ++i)
        for (int h = 0; h <= i; ++h) b.slot(0, i, h) = m.initial_libor(i);
    return b;
}

struct Shared {
    LevyModel model = fixtures::merton();
    MarketSetup market = fixtures::flat_market(6, 0.3);
    DriftEngine engine{model, market};
    PathBatch batch = simulate_euler(fixtures::sim(Scheme::euler_order, 4000, 31), engine);
};

const Shared& shared() {
    static const Shared s;
    return s;
}

} // namespace

TEST(Pricing, ForwardAgreementOnDeterministicPaths) {
    const auto m = fixtures::flat_market(6, 0.0);
    const auto b = deterministic_batch(m);
    for (int i = 1; i <= 6; ++i)
        for (double K : {0.0, 0.03, 0.05}) {
            const double exact = m.delta(i) * m.curve().bond(i + 1) * (m.initial_libor(i) - K);
            EXPECT_NEAR(price_fra(b, m, i, K).mean, exact, 1e-15) << i;
            EXPECT_NEAR(price_caplet(b, m, i, K).mean, std::max(exact, 0.0), 1e-15) << i;
        }
}

TEST(Pricing, DeterministicSwaption) {
    const auto m = fixtures::flat_market(6, 0.0);
    const auto b = deterministic_batch(m);
    EXPECT_EQ(price_swaption(b, m, 2, 5, 0.08).mean, 0.0);
    EXPECT_NEAR(price_swaption(b, m, 2, 5, 0.0).mean, m.curve().bond(2) - m.curve().bond(5), 1e-15);
    EXPECT_NEAR(price_swaption(b, m, 2, 5, forward_swap_rate(m, 2, 5)).mean, 0.0, 1e-15);
    EXPECT_NEAR(forward_swap_rate(m, 2, 5), m.initial_libor(3), 1e-14);
}

TEST(Pricing, RatchetOnDeterministicCurves) {
    const auto flat = fixtures::flat_market(5, 0.0);
    EXPECT_NEAR(price_ratchet(deterministic_batch(flat), flat, 4).mean, 0.0, 1e-15);
    const auto tenor = TenorStructure::uniform(5, 0.5);
    std::vector<double> bonds{1.0};
    for (int k = 1; k <= 6; ++k) bonds.push_back(bonds.back() / (1.0 + 0.5 * (0.02 + 0.005 * k)));
    const MarketSetup up(tenor, DiscountCurve(bonds), VolLoading::flat(5, 0.0));
    const double v = price_ratchet(deterministic_batch(up), up, 4).mean;
    EXPECT_NEAR(v, 0.5 * up.curve().bond(5) * (up.initial_libor(4) - up.initial_libor(1)), 1e-15);
}

TEST(Pricing, CapletAtZeroStrikeIsForwardAgreement) {
    const auto& s = shared();
    for (int i = 1; i <= 6; ++i)
        EXPECT_EQ(price_caplet(s.batch, s.market, i, 0.0).mean, price_fra(s.batch, s.market, i, 0.0).mean);
}

TEST(Pricing, ZeroStrikeForwardAgreementMatchesCurve) {
    const auto& s = shared();
    for (int i = 1; i <= 6; ++i) {
        const auto f = price_fra(s.batch, s.market, i, 0.0);
        const double exact = s.market.delta(i) * s.market.curve().bond(i + 1) * s.market.initial_libor(i);
        EXPECT_LT(std::abs(f.mean - exact), 3.5 * f.stderr_) << i;
    }
}

TEST(Pricing, CapletDominatesForwardAgreementAcrossStrikes) {
    const auto& s = shared();
    for (int i = 1; i <= 6; ++i) {
        double prev = std::numeric_limits<double>::infinity(), prev_gap = -prev;
        for (double K = 0.0; K <= 0.1; K += 0.01) {
            const auto cap = payoffs(s.batch, s.market, Product{ProductType::caplet, i, 0, K});
            const auto fra = payoffs(s.batch, s.market, Product{ProductType::fra, i, 0, K});
            for (std::size_t p = 0; p < cap.size(); ++p) EXPECT_GE(cap[p], fra[p]);
            const double c = estimate(cap).mean, gap = c - estimate(fra).mean;
            EXPECT_LE(c, prev);
            // caplet - FRA is the floorlet (K - L)^+, nondecreasing in K
            EXPECT_GE(gap, prev_gap - 1e-15);
            EXPECT_GE(gap, -1e-15);
            prev = c;
            prev_gap = gap;
        }
    }
}

TEST(Pricing, SinglePeriodSwaptionIsCaplet) {
    const auto& s = shared();
    for (int i = 1; i <= 5; ++i) {
        const double K = s.market.initial_libor(i);
        const auto sw = payoffs(s.batch, s.market, Product{ProductType::swaption, i, i + 1, K});
        const auto cap = payoffs(s.batch, s.market, Product{ProductType::caplet, i, 0, K});
        const auto d = paired_difference(sw, cap);
        // pathwise the two differ by the move of A_i over [T_i, T_{i+1}]
        EXPECT_LT(std::abs(d.mean), 3.5 * d.stderr_ + 1e-12) << i;
    }
}

TEST(Pricing, RatchetIsCapletStruckAtFirstFixing) {
    const auto& s = shared();
    const auto r = payoffs(s.batch, s.market, Product{ProductType::ratchet, 2, 0, std::nullopt});
    const double bN1 = s.market.curve().bond(7);
    for (std::size_t p = 0; p < s.batch.paths(); ++p) {
        double ann = 1.0;
        for (int l = 3; l <= 6; ++l) ann *= 1.0 + 0.5 * s.batch.libor(p, l, 3);
        const double direct = bN1 * 0.5 * std::max(s.batch.libor(p, 2, 2) - s.batch.libor(p, 1, 1), 0.0) * ann;
        EXPECT_NEAR(r[p], direct, 1e-15);
    }
}

TEST(Pricing, NumeraireRecoversBondPrices) {
    const auto model = fixtures::merton();
    const auto market = fixtures::flat_market(5, 0.2);
    const DriftEngine e(model, market);
    const auto b = simulate_euler(fixtures::sim(Scheme::euler_full, 4000, 41), e);
    for (int i = 1; i <= 5; ++i) {
        std::vector<double> v(b.paths());
        for (std::size_t p = 0; p < b.paths(); ++p) {
            double a = 1.0;
            for (int l = i + 1; l <= 5; ++l) a *= 1.0 + 0.5 * b.libor(p, l, i);
            v[p] = market.curve().bond(6) * a;
        }
        const auto est = estimate(v);
        EXPECT_LT(std::abs(est.mean - market.curve().bond(i + 1)), 3.5 * est.stderr_ + 1e-12) << i;
    }
}

TEST(Pricing, AnnuityFormOnDeterministicPaths) {
    const auto model = fixtures::merton();
    const auto market = fixtures::flat_market(6, 0.0);
    const DriftEngine e(model, market);
    const AnnuityApproximation a(e, 1e-3);
    const auto b = simulate_annuity(fixtures::sim(Scheme::annuity, 10, 2), a);
    const auto det = deterministic_batch(market);
    for (int i = 1; i <= 6; ++i)
        for (double K : {0.0, 0.03, 0.06}) {
            EXPECT_NEAR(price_caplet_annuity(b, market, i, K).mean, price_caplet(det, market, i, K).mean, 1e-14) << i;
            if (i < 6)
                EXPECT_NEAR(price_swaption_annuity(b, market, i, 6, K).mean, price_swaption(det, market, i, 6, K).mean, 1e-14);
        }
}

TEST(Pricing, AnnuityAndDirectPayoffsAgreeAlgebraically) {
    // the annuity-form payoff evaluated on exact annuities equals the direct payoff
    const auto& s = shared();
    const int N = 6;
    AnnuityBatch ab(N, s.batch.paths(), 0);
    for (std::size_t p = 0; p < s.batch.paths(); ++p)
        for (int j = 0; j <= N; ++j)
            for (int h = 0; h < ab.horizons(j); ++h) {
                double a = 1.0;
                for (int l = j + 1; l <= N; ++l) a *= 1.0 + 0.5 * s.batch.libor(p, l, h);
                ab.slot(p, j, h) = a;
            }
    for (int i = 1; i <= N; ++i) {
        const Product cap{ProductType::caplet, i, 0, 0.04};
        const auto x = payoffs(ab, s.market, cap), y = payoffs(s.batch, s.market, cap);
        for (std::size_t p = 0; p < x.size(); ++p) EXPECT_NEAR(x[p], y[p], 1e-14);
    }
}

TEST(Pricing, ProductValidation) {
    const auto& s = shared();
    EXPECT_THROW(price_caplet(s.batch, s.market, 7, 0.04), DataError);
    EXPECT_THROW(price_swaption(s.batch, s.market, 3, 3, 0.04), DataError);
    EXPECT_THROW(price_ratchet(s.batch, s.market, 1), DataError);
    EXPECT_THROW(parse_product("digital"), ConfigError);
}

TEST(Pricing, StandardErrorScalesWithPaths) {
    const auto& s = shared();
    const auto small = simulate_euler(fixtures::sim(Scheme::euler_order, 1000, 31), s.engine);
    const double r = price_caplet(small, s.market, 5, 0.04).stderr_ / price_caplet(s.batch, s.market, 5, 0.04).stderr_;
    EXPECT_NEAR(r, 2.0, 0.3);
}
