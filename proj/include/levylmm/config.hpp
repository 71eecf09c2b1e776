#ifndef LEVYLMM_CONFIG_HPP
#define LEVYLMM_CONFIG_HPP

// Experiment configuration: an INI file with the blocks [model], [market],
// [simulation], [experiment] and [products].  Unknown keys are rejected so
// typos do not silently fall back to defaults.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/functional/hash.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "levy_models.hpp"
#include "market.hpp"
#include "paths.hpp"
#include "pricing.hpp"

namespace levylmm {

struct ModelSpec {
    std::string type = "merton";  ///< merton | cgmy
    double intensity = 5.0;
    double mean = 0.0;
    std::optional<double> stdev;  ///< default sqrt(1/intensity): unit variance
    std::optional<double> C;      ///< default: unit-variance calibration
    double G = 13.0, M = 13.0, Y = 0.25;
    double alpha = 0.0;  ///< Brownian scale, constant in time
    bool half_variance = true;  ///< Merton cumulant convention

    LevyModel build() const {
        const PiecewiseConstant a(alpha);
        if (type == "merton")
            return LevyModel(MertonParams{intensity, mean, stdev.value_or(std::sqrt(1.0 / intensity)), half_variance}, a);
        if (type == "cgmy") {
            const double c = C.value_or(CgmyParams::unit_variance(G, M, Y).C);
            return LevyModel::cgmy(c, G, M, Y, a);
        }
        throw ConfigError("unknown model type '" + type + "'");
    }

    /// Unit-variance Merton or CGMY with the default parameters.
    static ModelSpec calibrated(const std::string& type) {
        ModelSpec m;
        m.type = type;
        if (type != "merton" && type != "cgmy") throw ConfigError("unknown model type '" + type + "'");
        return m;
    }
};

struct MarketSpec {
    int N = 10;
    double delta = 0.5;
    std::string curve = "flat:0.04";  ///< flat:<rate> | csv:<path>
    std::vector<double> loadings{0.2};  ///< one flat value, or one per rate

    MarketSetup build() const {
        const auto tenor = TenorStructure::uniform(N, delta);
        DiscountCurve dc = [&] {
            if (boost::starts_with(curve, "flat:")) return DiscountCurve::flat(tenor, std::stod(curve.substr(5)));
            if (boost::starts_with(curve, "csv:")) return DiscountCurve::from_csv(curve.substr(4), tenor);
            throw ConfigError("curve must be flat:<rate> or csv:<path>, got '" + curve + "'");
        }();
        return MarketSetup(tenor, std::move(dc), loading());
    }

    VolLoading loading() const {
        if (loadings.size() == 1) return VolLoading::flat(N, loadings[0]);
        if (static_cast<int>(loadings.size()) != N) throw ConfigError("loadings needs 1 or N values");
        std::vector<std::vector<double>> rows;
        for (double v : loadings) rows.emplace_back(static_cast<std::size_t>(N) + 1, v);
        return VolLoading(N, std::move(rows));
    }
};

struct ExperimentSpec {
    std::string kind = "price";
    std::string output;  ///< CSV file name; default <kind>.csv
    std::vector<int> orders{1, 2, 3};
    std::vector<double> lambdas{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6};
    std::vector<std::string> schemes;  ///< empty: experiment default
    std::vector<std::string> models;   ///< timing: calibrated models to time; empty: [model]
    int repeats = 1;                   ///< timing: best of
    std::string benchmark = "euler-order-2";

    std::string file() const {
        if (!output.empty()) return output;
        return boost::replace_all_copy(kind, "-", "_") + ".csv";
    }
};

struct ExperimentConfig {
    ModelSpec model;
    MarketSpec market;
    SimConfig sim;
    ExperimentSpec experiment;
    std::vector<Product> products;
    std::uint64_t hash = 0;
    std::string source;

    /// Checks model/market invariants before any simulation.
    void validate() const {
        sim.validate();
        const auto lm = model.build();
        const auto ms = market.build();
        const auto report = validate_setup(lm, ms.loading());
        if (!report.pass) throw ConfigError(report.message);
        for (const auto& p : products) {
            if (p.i < 1 || p.i > market.N) throw ConfigError(p.describe() + ": index outside 1..N");
            if (p.type == ProductType::swaption && (p.m <= p.i || p.m > market.N))
                throw ConfigError(p.describe() + ": swaption needs i < m <= N");
        }
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    boost::split(out, s, boost::is_any_of(","));
    for (auto& x : out) boost::trim(x);
    out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
    return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& x : split_list(s)) out.push_back(std::stod(x));
    return out;
}

/// "a-b" or "a" or "a,b,c"; "all" expands to lo..hi.
inline std::vector<int> parse_indices(const std::string& s, int lo, int hi) {
    std::vector<int> out;
    for (const auto& tok : split_list(s)) {
        if (tok == "all") {
            for (int k = lo; k <= hi; ++k) out.push_back(k);
            continue;
        }
        const auto dash = tok.find('-');
        if (dash == std::string::npos) {
            out.push_back(std::stoi(tok));
            continue;
        }
        const int a = std::stoi(tok.substr(0, dash)), b = std::stoi(tok.substr(dash + 1));
        for (int k = a; k <= b; ++k) out.push_back(k);
    }
    return out;
}

inline std::optional<double> parse_strike(const std::string& s) {
    if (s.empty() || s == "atm") return std::nullopt;
    return std::stod(s);
}

} // namespace detail

/// Parses INI text.  Product keys in [products]:
///   fra / caplet / ratchet = <indices>, swaption = <indices>,
///   strike = atm | <rate>, swaption_periods = <accruals per swap>.
/// Swaptions whose end index would pass N are dropped.
inline ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::map<std::string, std::set<std::string>> allowed{
        {"model", {"type", "intensity", "mean", "stdev", "C", "G", "M", "Y", "alpha", "convention"}},
        {"market", {"N", "delta", "curve", "loadings"}},
        {"simulation", {"paths", "seed", "eps", "substeps", "scheme", "order", "workers"}},
        {"experiment", {"kind", "output", "orders", "lambdas", "schemes", "models", "repeats", "benchmark"}},
        {"products", {"fra", "caplet", "swaption", "ratchet", "strike", "swaption_periods"}},
    };
    // canonical "block.key=value" lines feed the config hash
    std::vector<std::string> canon;
    for (const auto& [block, sub] : tree) {
        const auto it = allowed.find(block);
        if (it == allowed.end()) throw ConfigError("config: unknown block [" + block + "]");
        for (const auto& [key, val] : sub) {
            if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + block + "]");
            canon.push_back(block + "." + key + "=" + boost::trim_copy(val.data()));
        }
    }
    std::sort(canon.begin(), canon.end());

    ExperimentConfig cfg;
    auto get = [&](const std::string& path) { return tree.get_optional<std::string>(path); };
    try {
        if (auto v = get("model.type")) cfg.model.type = *v;
        if (auto v = get("model.intensity")) cfg.model.intensity = std::stod(*v);
        if (auto v = get("model.mean")) cfg.model.mean = std::stod(*v);
        if (auto v = get("model.stdev")) cfg.model.stdev = std::stod(*v);
        if (auto v = get("model.C"); v && *v != "calibrated") cfg.model.C = std::stod(*v);
        if (auto v = get("model.G")) cfg.model.G = std::stod(*v);
        if (auto v = get("model.M")) cfg.model.M = std::stod(*v);
        if (auto v = get("model.Y")) cfg.model.Y = std::stod(*v);
        if (auto v = get("model.alpha")) cfg.model.alpha = std::stod(*v);
        if (auto v = get("model.convention")) {
            if (*v != "half" && *v != "full") throw ConfigError("model convention must be half or full");
            cfg.model.half_variance = *v == "half";
        }

        if (auto v = get("market.N")) cfg.market.N = std::stoi(*v);
        if (auto v = get("market.delta")) cfg.market.delta = std::stod(*v);
        if (auto v = get("market.curve")) cfg.market.curve = *v;
        if (auto v = get("market.loadings")) cfg.market.loadings = detail::parse_doubles(*v);

        if (auto v = get("simulation.paths")) cfg.sim.paths = std::stoull(*v);
        if (auto v = get("simulation.seed")) cfg.sim.seed = std::stoull(*v);
        if (auto v = get("simulation.eps")) cfg.sim.eps = std::stod(*v);
        if (auto v = get("simulation.substeps")) cfg.sim.substeps = std::stoi(*v);
        if (auto v = get("simulation.order")) cfg.sim.order = std::stoi(*v);
        if (auto v = get("simulation.scheme")) cfg.sim.scheme = parse_scheme(*v, &cfg.sim.order);
        if (auto v = get("simulation.workers")) cfg.sim.workers = static_cast<unsigned>(std::stoul(*v));

        if (auto v = get("experiment.kind")) cfg.experiment.kind = *v;
        if (auto v = get("experiment.output")) cfg.experiment.output = *v;
        if (auto v = get("experiment.orders")) {
            cfg.experiment.orders.clear();
            for (double o : detail::parse_doubles(*v)) cfg.experiment.orders.push_back(static_cast<int>(o));
        }
        if (auto v = get("experiment.lambdas")) cfg.experiment.lambdas = detail::parse_doubles(*v);
        if (auto v = get("experiment.schemes")) cfg.experiment.schemes = detail::split_list(*v);
        if (auto v = get("experiment.models")) cfg.experiment.models = detail::split_list(*v);
        if (auto v = get("experiment.repeats")) cfg.experiment.repeats = std::stoi(*v);
        if (auto v = get("experiment.benchmark")) cfg.experiment.benchmark = *v;

        const int N = cfg.market.N;
        const auto strike = detail::parse_strike(get("products.strike").value_or("atm"));
        const int periods = std::stoi(get("products.swaption_periods").value_or("6"));
        if (periods < 1) throw ConfigError("swaption_periods must be >= 1");
        for (const char* name : {"fra", "caplet", "swaption", "ratchet"}) {
            const auto v = get(std::string("products.") + name);
            if (!v) continue;
            const ProductType type = parse_product(name);
            const int lo = type == ProductType::ratchet ? 2 : 1;
            for (int i : detail::parse_indices(*v, lo, N)) {
                Product p{type, i, 0, type == ProductType::ratchet ? std::nullopt : strike};
                if (type == ProductType::swaption) {
                    p.m = i + periods;
                    if (p.m > N) continue;
                }
                cfg.products.push_back(p);
            }
        }
    } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError(std::string("config: malformed number (") + e.what() + ")");
    }
    if (cfg.experiment.repeats < 1) throw ConfigError("repeats must be >= 1");
    for (int o : cfg.experiment.orders)
        if (o < 1 || o > 3) throw ConfigError("drift orders must lie in 1..3");
    if (cfg.products.empty())
        for (int i = 1; i <= cfg.market.N; ++i) cfg.products.push_back(Product{ProductType::caplet, i, 0, std::nullopt});

    cfg.hash = boost::hash_range(canon.begin(), canon.end());
    cfg.source = text;
    return cfg;
}

inline ExperimentConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace levylmm

#endif // LEVYLMM_CONFIG_HPP
