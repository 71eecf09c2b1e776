#ifndef LEVYLMM_PATHS_HPP
#define LEVYLMM_PATHS_HPP

// Path generation: log-Euler on the exact / truncated / frozen dynamics,
// direct sampling of the log-Levy approximation, and the frozen annuity
// approximation.  Every scheme draws the big jumps of path p from the same
// substream (seed, p, jumps), so all schemes see identical jump times and
// sizes; Gaussian draws come from (seed, p, gaussians).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "drift.hpp"
#include "errors.hpp"
#include "levy_models.hpp"
#include "loglevy.hpp"
#include "market.hpp"
#include "rng.hpp"

namespace levylmm {

enum class Scheme { euler_full, euler_order, euler_frozen, loglevy1, loglevy2, frozen_kernel, annuity };

inline std::string scheme_name(Scheme s, int order = 2) {
    switch (s) {
    case Scheme::euler_full: return "euler-full";
    case Scheme::euler_order: return "euler-order-" + std::to_string(order);
    case Scheme::euler_frozen: return "euler-frozen";
    case Scheme::loglevy1: return "loglevy-1";
    case Scheme::loglevy2: return "loglevy-2";
    case Scheme::frozen_kernel: return "frozen-kernel";
    case Scheme::annuity: return "annuity";
    }
    return "unknown";
}

/// Accepts the names produced by scheme_name; "euler-order-p" sets *order.
inline Scheme parse_scheme(const std::string& name, int* order = nullptr) {
    if (name == "euler-full") return Scheme::euler_full;
    if (name == "euler-frozen") return Scheme::euler_frozen;
    if (name == "loglevy-1") return Scheme::loglevy1;
    if (name == "loglevy-2") return Scheme::loglevy2;
    if (name == "frozen-kernel") return Scheme::frozen_kernel;
    if (name == "annuity") return Scheme::annuity;
    const std::string prefix = "euler-order";
    if (name.rfind(prefix, 0) == 0) {
        if (order && name.size() > prefix.size() + 1) *order = std::stoi(name.substr(prefix.size() + 1));
        return Scheme::euler_order;
    }
    throw ConfigError("unknown scheme '" + name + "'");
}

struct SimConfig {
    std::size_t paths = 10000;
    int substeps = 4;  ///< Euler steps per accrual period
    double eps = 1e-3;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::euler_order;
    int order = 2;  ///< drift order for euler-order
    unsigned workers = 1;

    void validate() const {
        if (paths < 1) throw ConfigError("path count must be >= 1");
        if (substeps < 1) throw ConfigError("Euler sub-steps must be >= 1");
        if (!(eps > 0.0)) throw ConfigError("truncation eps must be > 0");
        if (order < 1) throw ConfigError("drift order must be >= 1");
        if (paths > std::size_t{0xFFFFFFFF}) throw ConfigError("path count exceeds the stream id range");
    }
    std::string label() const { return scheme_name(scheme, order); }
};

/// Runs fn(p) for p in [0, paths) on `workers` threads with contiguous
/// blocks.  Each path writes only its own slot, so results do not depend on
/// the worker count.
template <class Fn>
void for_each_path(std::size_t paths, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(paths, 1024))));
    if (workers == 1) {
        for (std::size_t p = 0; p < paths; ++p) fn(p);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk, hi = std::min(paths, lo + chunk);
                for (std::size_t p = lo; p < hi; ++p) fn(p);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Big jumps of one path on (0, horizon]; identical for every scheme.
inline JumpSample path_jumps(const BigJumpSampler& sampler, double horizon, std::uint64_t seed, std::size_t path) {
    auto rng = common_randomness(seed, static_cast<std::uint32_t>(path), StreamTag::jumps);
    return sampler.sample(horizon, rng);
}

/// LIBOR fixings L_i(T_h), 1 <= i <= N, 0 <= h <= i, per path.
class PathBatch {
public:
    PathBatch() = default;
    PathBatch(int n_rates, std::size_t paths, std::string scheme, std::uint64_t seed)
        : n_(n_rates), paths_(paths), scheme_(std::move(scheme)), seed_(seed),
          stride_(static_cast<std::size_t>(n_rates) * (static_cast<std::size_t>(n_rates) + 3) / 2),
          values_(paths * stride_, 0.0) {}

    int size() const { return n_; }
    std::size_t paths() const { return paths_; }
    const std::string& scheme() const { return scheme_; }
    std::uint64_t seed() const { return seed_; }
    double elapsed_ms() const { return elapsed_ms_; }
    void set_elapsed_ms(double ms) { elapsed_ms_ = ms; }

    /// L_i(T_h); rates are frozen after fixing, so h > i returns L_i(T_i).
    double libor(std::size_t path, int i, int h) const {
        if (i < 1 || i > n_ || h < 0) throw DataError("PathBatch: index out of range");
        return values_[path * stride_ + offset(i) + static_cast<std::size_t>(std::min(h, i))];
    }
    double& slot(std::size_t path, int i, int h) { return values_[path * stride_ + offset(i) + static_cast<std::size_t>(h)]; }
    double* row(std::size_t path) { return values_.data() + path * stride_; }

    /// Flat index of (i, h) inside one path's row.
    static std::size_t offset(int i) {
        // rates 1..i-1 hold 2 + 3 + ... + i values
        return static_cast<std::size_t>(i - 1) * (static_cast<std::size_t>(i) + 2) / 2;
    }
    const std::vector<double>& values() const { return values_; }

    /// Binary dump: magic, version, scheme, seed, N, paths, then the values.
    void dump(const std::string& file) const {
        std::ofstream out(file, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + file);
        const char magic[8] = {'L', 'L', 'M', 'M', 'P', 'A', 'T', 'H'};
        const std::uint32_t version = 1;
        const std::uint32_t len = static_cast<std::uint32_t>(scheme_.size());
        const std::uint64_t paths = paths_;
        const std::int32_t n = n_;
        out.write(magic, 8);
        out.write(reinterpret_cast<const char*>(&version), sizeof version);
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(scheme_.data(), len);
        out.write(reinterpret_cast<const char*>(&seed_), sizeof seed_);
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(&paths), sizeof paths);
        out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
    }

    static PathBatch load(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw ConfigError("cannot read " + file);
        char magic[8];
        std::uint32_t version = 0, len = 0;
        in.read(magic, 8);
        in.read(reinterpret_cast<char*>(&version), sizeof version);
        if (std::string(magic, 8) != "LLMMPATH" || version != 1) throw DataError("not a version-1 path dump: " + file);
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        std::string scheme(len, '\0');
        in.read(scheme.data(), len);
        std::uint64_t seed = 0, paths = 0;
        std::int32_t n = 0;
        in.read(reinterpret_cast<char*>(&seed), sizeof seed);
        in.read(reinterpret_cast<char*>(&n), sizeof n);
        in.read(reinterpret_cast<char*>(&paths), sizeof paths);
        PathBatch b(n, paths, scheme, seed);
        in.read(reinterpret_cast<char*>(b.values_.data()), static_cast<std::streamsize>(b.values_.size() * sizeof(double)));
        if (!in) throw DataError("truncated path dump: " + file);
        return b;
    }

private:
    int n_ = 0;
    std::size_t paths_ = 0;
    std::string scheme_;
    std::uint64_t seed_ = 0;
    std::size_t stride_ = 0;
    std::vector<double> values_;
    double elapsed_ms_ = 0.0;
};

/// Annuities A_j(T_h), 0 <= j <= N, 0 <= h <= min(j+1, N), per path.
class AnnuityBatch {
public:
    AnnuityBatch() = default;
    AnnuityBatch(int n_rates, std::size_t paths, std::uint64_t seed) : n_(n_rates), paths_(paths), seed_(seed) {
        offsets_.resize(static_cast<std::size_t>(n_rates) + 2);
        for (int j = 0; j <= n_rates; ++j) offsets_[static_cast<std::size_t>(j) + 1] = offsets_[static_cast<std::size_t>(j)] + static_cast<std::size_t>(horizons(j));
        stride_ = offsets_.back();
        values_.assign(paths * stride_, 0.0);
    }

    int size() const { return n_; }
    std::size_t paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }
    std::string scheme() const { return "annuity"; }
    double elapsed_ms() const { return elapsed_ms_; }
    void set_elapsed_ms(double ms) { elapsed_ms_ = ms; }
    /// number of stored horizons of A_j
    int horizons(int j) const { return std::min(j + 1, n_) + 1; }

    double annuity(std::size_t path, int j, int h) const {
        if (j < 0 || j > n_ || h < 0 || h >= horizons(j)) throw DataError("AnnuityBatch: index out of range");
        return values_[path * stride_ + offsets_[static_cast<std::size_t>(j)] + static_cast<std::size_t>(h)];
    }
    double& slot(std::size_t path, int j, int h) {
        return values_[path * stride_ + offsets_[static_cast<std::size_t>(j)] + static_cast<std::size_t>(h)];
    }

private:
    int n_ = 0;
    std::size_t paths_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
    double elapsed_ms_ = 0.0;
};

namespace detail {

/// Symmetric square root of a covariance matrix with eigenvalues below
/// 1e-14 clipped to zero.
inline Eigen::MatrixXd covariance_root(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k) ev[k] = ev[k] > 1e-14 ? std::sqrt(ev[k]) : 0.0;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Draws the joint Gaussian vector with the given root; empty root means none.
inline void add_gaussian(const Eigen::MatrixXd& root, std::uint64_t seed, std::size_t path, Eigen::VectorXd& out) {
    if (root.size() == 0) return;
    auto rng = common_randomness(seed, static_cast<std::uint32_t>(path), StreamTag::gaussians);
    Eigen::VectorXd z(root.cols());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
    out.noalias() += root * z;
}

} // namespace detail

/// Log-Euler on the tenor grid refined by `substeps`, drift at the left end
/// point, jumps aggregated per step and compensated by int_{|x|>eps} x F.
inline PathBatch simulate_euler(const SimConfig& cfg, const DriftEngine& engine) {
    cfg.validate();
    if (cfg.scheme != Scheme::euler_full && cfg.scheme != Scheme::euler_order && cfg.scheme != Scheme::euler_frozen)
        throw ConfigError("simulate_euler: scheme " + cfg.label() + " is not an Euler scheme");
    if (cfg.scheme == Scheme::euler_order && cfg.order > engine.max_order())
        throw ConfigError("simulate_euler: drift order exceeds the engine's precomputed maximum");
    const auto start = std::chrono::steady_clock::now();
    const auto& market = engine.market();
    const auto& tenor = market.tenor();
    const auto& vol = market.loading();
    const int N = market.size();
    const BigJumpSampler sampler(engine.model(), cfg.eps);
    const double m_eps = sampler.compensator();
    const auto l0 = market.initial_libors();
    const double horizon = tenor.date(N);
    const bool diffusion = engine.model().alpha().sup() > 0.0;

    PathBatch batch(N, cfg.paths, cfg.label(), cfg.seed);
    for_each_path(cfg.paths, cfg.workers, [&](std::size_t p) {
        std::vector<double> L(l0);
        std::vector<double> G(static_cast<std::size_t>(N) + 1, 0.0);
        std::vector<double> b(static_cast<std::size_t>(N) + 1, 0.0);
        for (int i = 1; i <= N; ++i) {
            G[static_cast<std::size_t>(i)] = std::log(l0[static_cast<std::size_t>(i)]);
            batch.slot(p, i, 0) = l0[static_cast<std::size_t>(i)];
        }
        const JumpSample jumps = path_jumps(sampler, horizon, cfg.seed, p);
        auto gauss = common_randomness(cfg.seed, static_cast<std::uint32_t>(p), StreamTag::gaussians);
        std::size_t next_jump = 0;
        for (int n = 0; n < N; ++n) {
            const double t0 = tenor.date(n);
            const double dt = tenor.delta(n) / cfg.substeps;
            const double sqrt_alpha = std::sqrt(engine.kernels().alpha(n));
            for (int k = 0; k < cfg.substeps; ++k) {
                const double s_end = k + 1 == cfg.substeps ? tenor.date(n + 1) : t0 + (k + 1) * dt;
                for (int i = n + 1; i <= N; ++i) {
                    double& bi = b[static_cast<std::size_t>(i)];
                    switch (cfg.scheme) {
                    case Scheme::euler_full: bi = engine.full(i, L, n); break;
                    case Scheme::euler_order: bi = engine.truncated(i, L, n, cfg.order); break;
                    default: bi = engine.frozen(i, n); break;
                    }
                }
                double jump_sum = 0.0;
                while (next_jump < jumps.size() && jumps.times[next_jump] <= s_end) jump_sum += jumps.sizes[next_jump++];
                double noise = jump_sum - dt * m_eps;
                if (diffusion) noise += sqrt_alpha * std::sqrt(dt) * gauss.normal();
                for (int i = n + 1; i <= N; ++i) {
                    const auto ui = static_cast<std::size_t>(i);
                    G[ui] += b[ui] * dt + vol.on_interval(i, n) * noise;
                    L[ui] = std::exp(G[ui]);
                }
            }
            for (int i = n + 1; i <= N; ++i) batch.slot(p, i, n + 1) = L[static_cast<std::size_t>(i)];
        }
    });
    batch.set_elapsed_ms(detail::elapsed_ms(start));
    return batch;
}

/// Direct sampling of the log-Levy approximation at the fixing horizons.
/// Per path and tenor interval the jumps enter only through a few sums:
/// X0 = sum x, P0_j = sum C_j, P1_j = sum (s - T_n) C_j and, for order 2,
/// Q0 = sum a a^T, Q1 = sum (s - T_n) a a^T with a_k = f(G_k(0) + lambda_k x).
inline PathBatch simulate_loglevy(const SimConfig& cfg, const LogLevyApproximation& approx) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto& engine = approx.engine();
    const auto& K = engine.kernels();
    const auto& market = engine.market();
    const auto& tenor = market.tenor();
    const int N = market.size();
    const auto uN = static_cast<std::size_t>(N);
    const BigJumpSampler sampler(engine.model(), approx.eps());
    const double horizon = tenor.date(N);
    const bool picard = approx.uses_picard();
    const bool pairs = approx.uses_pairs();
    const std::string label = approx.frozen() ? "frozen-kernel" : "loglevy-" + std::to_string(approx.order());

    // Deterministic part per (i, h), h = 1..i.
    std::vector<std::pair<int, int>> targets;
    for (int i = 1; i <= N; ++i)
        for (int h = 1; h <= i; ++h) targets.emplace_back(i, h);
    std::vector<double> base(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto [i, h] = targets[k];
        const double t = tenor.date(h);
        base[k] = approx.G_hat(i, t) + approx.drift_integral(i, t) - approx.compensator(i, t);
    }

    // Joint Gaussian part.
    Eigen::MatrixXd root;
    if (engine.model().alpha().sup() > 0.0) {
        const auto D = static_cast<Eigen::Index>(targets.size());
        Eigen::MatrixXd cov(D, D);
        for (Eigen::Index a = 0; a < D; ++a)
            for (Eigen::Index c = 0; c <= a; ++c) {
                const auto [i, h] = targets[static_cast<std::size_t>(a)];
                const auto [i2, h2] = targets[static_cast<std::size_t>(c)];
                cov(a, c) = cov(c, a) = approx.gaussian_covariance(i, tenor.date(h), i2, tenor.date(h2));
            }
        root = detail::covariance_root(cov);
    }

    // Dense views of the kernel integrals at tenor dates.
    auto Wd = [&](int date, int i, int j) { return K.eta_integral_at(date, i, j); };
    auto Wbd = [&](int date, int i, int k, int l) { return K.zeta_integral_at(date, i, k, l); };

    std::vector<std::size_t> target_index((uN + 1) * (uN + 1), 0);
    for (std::size_t k = 0; k < targets.size(); ++k)
        target_index[static_cast<std::size_t>(targets[k].first) * (uN + 1) + static_cast<std::size_t>(targets[k].second)] = k;

    PathBatch batch(N, cfg.paths, label, cfg.seed);
    for_each_path(cfg.paths, cfg.workers, [&](std::size_t p) {
        Eigen::VectorXd acc = Eigen::Map<const Eigen::VectorXd>(base.data(), static_cast<Eigen::Index>(base.size()));
        const JumpSample jumps = path_jumps(sampler, horizon, cfg.seed, p);
        std::vector<double> P0(uN + 1), P1(uN + 1);
        Eigen::MatrixXd Arows, Q0, Q1;
        std::size_t cursor = 0;
        for (int n = 0; n < N; ++n) {
            const double tn = tenor.date(n);
            const double tn1 = tenor.date(n + 1);
            const std::size_t first = cursor;
            while (cursor < jumps.size() && jumps.times[cursor] < tn1) ++cursor;
            const std::size_t count = cursor - first;
            if (count == 0) continue;
            double X0 = 0.0;
            for (std::size_t q = first; q < cursor; ++q) X0 += jumps.sizes[q];
            const int m = N - n;  // alive rates n+1..N
            if (picard) {
                std::fill(P0.begin(), P0.end(), 0.0);
                std::fill(P1.begin(), P1.end(), 0.0);
                if (pairs) Arows.resize(static_cast<Eigen::Index>(count), m);
                for (std::size_t q = first; q < cursor; ++q) {
                    const double x = jumps.sizes[q];
                    const double tau = jumps.times[q] - tn;
                    double last_lambda = std::numeric_limits<double>::quiet_NaN();
                    double e = 0.0;
                    for (int j = n + 1; j <= N; ++j) {
                        const ZCoefficient& z = approx.z(n, j);
                        if (z.lambda != last_lambda) {
                            last_lambda = z.lambda;
                            e = std::exp(z.lambda * x);
                        }
                        const double de = z.dl0 * e;
                        const double shifted = de / (1.0 + de);
                        const double c = shifted - z.z0;
                        P0[static_cast<std::size_t>(j)] += c;
                        P1[static_cast<std::size_t>(j)] += tau * c;
                        if (pairs) Arows(static_cast<Eigen::Index>(q - first), j - n - 1) = shifted;
                    }
                }
                if (pairs) {
                    Q0.setZero(m, m);
                    Q0.selfadjointView<Eigen::Lower>().rankUpdate(Arows.transpose());
                    for (std::size_t q = first; q < cursor; ++q)
                        Arows.row(static_cast<Eigen::Index>(q - first)) *= std::sqrt(jumps.times[q] - tn);
                    Q1.setZero(m, m);
                    Q1.selfadjointView<Eigen::Lower>().rankUpdate(Arows.transpose());
                    double tau_sum = 0.0;
                    for (std::size_t q = first; q < cursor; ++q) tau_sum += jumps.times[q] - tn;
                    // subtract the constant Z_k(0) Z_l(0) part of C_kl
                    for (int l = 0; l < m; ++l)
                        for (int k = l; k < m; ++k) {
                            const double zz = approx.z0(n + 1 + k) * approx.z0(n + 1 + l);
                            Q0(k, l) -= static_cast<double>(count) * zz;
                            Q1(k, l) -= tau_sum * zz;
                        }
                }
            }
            for (int i = n + 1; i <= N; ++i) {
                const double li = approx.lambda(i, n);
                for (int h = n + 1; h <= i; ++h) {
                    double v = li * X0;
                    if (picard) {
                        for (int j = i + 1; j <= N; ++j) {
                            const auto uj = static_cast<std::size_t>(j);
                            v -= (Wd(h, i, j) - Wd(n, i, j)) * P0[uj] - K.eta(n, i, j) * P1[uj];
                        }
                        if (pairs) {
                            for (int k = i + 1; k <= N; ++k)
                                for (int l = k + 1; l <= N; ++l) {
                                    // lower triangle holds (l, k) with l > k
                                    const Eigen::Index r = l - n - 1, c = k - n - 1;
                                    v -= (Wbd(h, i, k, l) - Wbd(n, i, k, l)) * Q0(r, c) - K.zeta(n, i, k, l) * Q1(r, c);
                                }
                        }
                    }
                    acc[static_cast<Eigen::Index>(target_index[static_cast<std::size_t>(i) * (uN + 1) + static_cast<std::size_t>(h)])] += v;
                }
            }
        }
        detail::add_gaussian(root, cfg.seed, p, acc);
        for (int i = 1; i <= N; ++i) {
            batch.slot(p, i, 0) = std::exp(approx.g0(i));
            for (int h = 1; h <= i; ++h)
                batch.slot(p, i, h) =
                    std::exp(acc[static_cast<Eigen::Index>(target_index[static_cast<std::size_t>(i) * (uN + 1) + static_cast<std::size_t>(h)])]);
        }
    });
    batch.set_elapsed_ms(detail::elapsed_ms(start));
    return batch;
}

/// Frozen annuity approximation sampled jointly at all needed horizons.
inline AnnuityBatch simulate_annuity(const SimConfig& cfg, const AnnuityApproximation& approx) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto& engine = approx.engine();
    const auto& market = engine.market();
    const auto& tenor = market.tenor();
    const auto& vol = market.loading();
    const int N = market.size();
    const auto uN = static_cast<std::size_t>(N);
    const BigJumpSampler sampler(engine.model(), approx.eps());
    const double horizon = tenor.date(N);

    AnnuityBatch batch(N, cfg.paths, cfg.seed);
    // targets (j, h) with j < N and 1 <= h <= min(j+1, N)
    std::vector<std::pair<int, int>> targets;
    for (int j = 0; j < N; ++j)
        for (int h = 1; h < batch.horizons(j); ++h) targets.emplace_back(j, h);
    std::vector<double> base(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto [j, h] = targets[k];
        base[k] = approx.log_a0(j) + approx.drift_integral(j, tenor.date(h));
    }
    Eigen::MatrixXd root;
    if (engine.model().alpha().sup() > 0.0) {
        const auto D = static_cast<Eigen::Index>(targets.size());
        Eigen::MatrixXd cov(D, D);
        for (Eigen::Index a = 0; a < D; ++a)
            for (Eigen::Index c = 0; c <= a; ++c) {
                const auto [j, h] = targets[static_cast<std::size_t>(a)];
                const auto [j2, h2] = targets[static_cast<std::size_t>(c)];
                cov(a, c) = cov(c, a) = approx.gaussian_covariance(j, tenor.date(h), j2, tenor.date(h2));
            }
        root = detail::covariance_root(cov);
    }

    for_each_path(cfg.paths, cfg.workers, [&](std::size_t p) {
        Eigen::VectorXd acc = Eigen::Map<const Eigen::VectorXd>(base.data(), static_cast<Eigen::Index>(base.size()));
        const JumpSample jumps = path_jumps(sampler, horizon, cfg.seed, p);
        // log of prod over jumps of R_j, accumulated per interval and prefix-summed over intervals
        std::vector<double> log_r(uN + 1, 0.0);    // cumulative up to the current interval
        std::vector<double> prod(uN + 1, 1.0);
        std::size_t cursor = 0;
        std::size_t k = 0;  // position in targets, ordered by j then h
        std::vector<std::vector<double>> log_at(uN + 1, std::vector<double>(uN + 1, 0.0));
        for (int n = 0; n < N; ++n) {
            const double tn1 = tenor.date(n + 1);
            std::fill(prod.begin(), prod.end(), 1.0);
            while (cursor < jumps.size() && jumps.times[cursor] < tn1) {
                const double x = jumps.sizes[cursor++];
                double last_lambda = std::numeric_limits<double>::quiet_NaN();
                double e = 0.0;
                // suffix products S_j = prod_{l > max(j, n)} factor_l
                double suffix = 1.0;
                for (int l = N; l >= n + 1; --l) {
                    const double lam = vol.on_interval(l, n);
                    if (lam != last_lambda) {
                        last_lambda = lam;
                        e = std::exp(lam * x);
                    }
                    const double dl = approx.delta_libor0(l);
                    suffix *= (1.0 + dl * e) / (1.0 + dl);
                    prod[static_cast<std::size_t>(l) - 1] *= suffix;
                }
                for (int j = 0; j < n; ++j) prod[static_cast<std::size_t>(j)] *= suffix;
            }
            for (int j = 0; j < N; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                log_r[uj] += std::log(prod[uj]);
                log_at[uj][static_cast<std::size_t>(n) + 1] = log_r[uj];
            }
        }
        for (k = 0; k < targets.size(); ++k) {
            const auto [j, h] = targets[k];
            acc[static_cast<Eigen::Index>(k)] += log_at[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)];
        }
        detail::add_gaussian(root, cfg.seed, p, acc);
        for (int j = 0; j <= N; ++j) batch.slot(p, j, 0) = std::exp(approx.log_a0(j));
        for (k = 0; k < targets.size(); ++k) {
            const auto [j, h] = targets[k];
            batch.slot(p, j, h) = std::exp(acc[static_cast<Eigen::Index>(k)]);
        }
        for (int h = 1; h < batch.horizons(N); ++h) batch.slot(p, N, h) = 1.0;
    });
    batch.set_elapsed_ms(detail::elapsed_ms(start));
    return batch;
}

} // namespace levylmm

#endif // LEVYLMM_PATHS_HPP
