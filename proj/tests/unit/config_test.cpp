#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace levylmm;

namespace {

std::string preset(const std::string& name) { return std::string(LEVYLMM_PRESET_DIR) + "/" + name; }

bool check_passed(const ExperimentResult& r, const std::string& name) {
    const auto pos = r.csv.find(name + ",");
    if (pos == std::string::npos) throw std::runtime_error("missing check " + name);
    return r.csv.compare(pos + name.size() + 1, 4, "PASS") == 0;
}

} // namespace

TEST(Config, AllPresetsParseAndValidate) {
    for (const char* name : {"drift_low.cfg", "drift_high.cfg", "approx_n20.cfg", "volsweep_n20.cfg", "volsweep_n10.cfg", "timing.cfg"}) {
        const auto cfg = load_config(preset(name));
        EXPECT_NO_THROW(cfg.validate()) << name;
        EXPECT_FALSE(cfg.products.empty()) << name;
    }
    const auto low = load_config(preset("drift_low.cfg"));
    EXPECT_EQ(low.market.N, 10);
    EXPECT_EQ(low.experiment.kind, "drift-study");
    EXPECT_EQ(low.sim.paths, 10000u);
}

TEST(Config, DefaultsAreAtmCaplets) {
    const auto cfg = parse_config("[market]\nN = 4\n");
    ASSERT_EQ(cfg.products.size(), 4u);
    for (const auto& p : cfg.products) {
        EXPECT_EQ(p.type, ProductType::caplet);
        EXPECT_FALSE(p.strike.has_value());
    }
    EXPECT_EQ(cfg.model.type, "merton");
    EXPECT_NEAR(cfg.model.build().jump_cumulant_derivative(0.0, 2), 1.0, 1e-12);
}

TEST(Config, ProductLists) {
    const auto cfg = parse_config("[market]\nN = 8\n[products]\nstrike = 0.05\ncaplet = 2-4, 7\nswaption = all\nswaption_periods = 3\nratchet = all\n");
    int caplets = 0, swaptions = 0, ratchets = 0;
    for (const auto& p : cfg.products) {
        if (p.type == ProductType::caplet) {
            ++caplets;
            EXPECT_EQ(*p.strike, 0.05);
        } else if (p.type == ProductType::swaption) {
            ++swaptions;
            EXPECT_EQ(p.m, p.i + 3);
        } else if (p.type == ProductType::ratchet) {
            ++ratchets;
            EXPECT_GE(p.i, 2);
        }
    }
    EXPECT_EQ(caplets, 4);
    EXPECT_EQ(swaptions, 5);
    EXPECT_EQ(ratchets, 7);
}

TEST(Config, UnknownKeysAndBlocksRejected) {
    EXPECT_THROW(parse_config("[model]\nsigma = 0.2\n"), ConfigError);
    EXPECT_THROW(parse_config("[plot]\ncolor = red\n"), ConfigError);
    EXPECT_THROW(parse_config("[market]\nN = ten\n"), ConfigError);
    EXPECT_THROW(parse_config("[model]\nconvention = quarter\n"), ConfigError);
    EXPECT_THROW(parse_config("[experiment]\norders = 4\n"), ConfigError);
}

TEST(Config, ValidationCatchesMomentViolation) {
    const auto cfg = parse_config("[model]\ntype = cgmy\n[market]\nN = 40\nloadings = 0.6\n");
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, HashIgnoresLayoutButNotValues) {
    const auto a = parse_config("[market]\nN = 4\ndelta = 0.5\n");
    const auto b = parse_config("; comment\n[market]\ndelta = 0.5\nN   = 4\n");
    const auto c = parse_config("[market]\nN = 5\ndelta = 0.5\n");
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
}

TEST(Config, CsvCurveSource) {
    const std::string file = testing::TempDir() + "cfg_curve.csv";
    {
        std::ofstream out(file);
        out << "0.5,0.98\n1.0,0.96\n1.5,0.94\n";
    }
    const auto cfg = parse_config("[market]\nN = 2\ncurve = csv:" + file + "\n");
    EXPECT_NEAR(cfg.market.build().curve().bond(1), 0.98, 1e-14);
    EXPECT_THROW(parse_config("[market]\ncurve = spline:x\n").market.build(), ConfigError);
    std::filesystem::remove(file);
}

TEST(Experiments, PriceCsvHeaderAndRows) {
    auto cfg = parse_config("[market]\nN = 3\n[simulation]\npaths = 200\n[products]\ncaplet = all\nfra = 1\n");
    const auto r = run_experiment("price", cfg);
    EXPECT_EQ(r.name, "price.csv");
    EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "product,maturity,end,strike,scheme,price,stderr,paths");
    EXPECT_EQ(std::count(r.csv.begin(), r.csv.end(), '\n'), 5);
}

TEST(Experiments, DriftStudyRefusesLargeTenor) {
    auto cfg = parse_config("[market]\nN = 16\n[simulation]\npaths = 10\n");
    EXPECT_THROW(run_experiment("drift-study", cfg), ConfigError);
}

TEST(Experiments, ZeroLoadingsGiveIdenticalPricesAcrossSchemes) {
    auto cfg = parse_config("[market]\nN = 4\nloadings = 0\n[simulation]\npaths = 50\n");
    const auto r = run_experiment("approx-study", cfg);
    std::istringstream in(r.csv);
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::set<std::string>> prices;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        boost::split(f, line, boost::is_any_of(","));
        prices[f[1]].insert(f[3]);
    }
    ASSERT_EQ(prices.size(), 4u);
    for (const auto& [m, p] : prices) EXPECT_EQ(p.size(), 1u) << m;
}

TEST(Experiments, SelftestPassesOnDefaults) {
    auto cfg = parse_config("[simulation]\npaths = 2000\n");
    const auto r = run_experiment("selftest", cfg);
    EXPECT_TRUE(r.ok) << r.csv;
}

TEST(Experiments, SelftestCatchesVarianceConvention) {
    const auto r = run_experiment("selftest", parse_config("[model]\nconvention = full\n[simulation]\npaths = 500\n"));
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(check_passed(r, "merton-kappa''(0)"));
}

TEST(Experiments, SelftestCatchesCoarseTruncation) {
    const auto r = run_experiment("selftest", parse_config("[simulation]\npaths = 500\neps = 0.1\n"));
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(check_passed(r, "cgmy-small-jump-variance"));
}

TEST(Experiments, NumberFormatting) {
    EXPECT_EQ(num(-0.0), "0");
    EXPECT_EQ(num(0.25), "0.25");
    EXPECT_EQ(num(1.0 / 3.0), "0.3333333333");
}
