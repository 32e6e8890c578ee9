#ifndef GFBM_MC_HPP
#define GFBM_MC_HPP

// Monte Carlo oracle. Sampling is exact where the law is known exactly:
// whole gfBm paths come from a Cholesky factor of the covariance matrix,
// and BS terminal prices are drawn from the lognormal law directly. The
// CEV y-process has no exact sampler, so it gets an Euler scheme on the
// transformed variable with absorption at zero, driven by the time-changed
// Brownian motion W_{K t^{2H}} whose Fokker-Planck equation the closed-form
// density solves: increments are independent across steps with variance
// equal to the exact growth of K t^{2H} over the step.
//
// Randomness is counter-based (Philox 2x64-10 keyed by seed, indexed by
// (path, slot)): the numbers a path sees depend only on its global index,
// so results are bit-identical no matter how work is scheduled across
// threads. GFBM_THREADS caps the worker count; it never changes values.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "gfbm/bs.hpp"
#include "gfbm/cev.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/process.hpp"

namespace gfbm {

namespace rng {

// Philox 2x64, 10 rounds. Stateless: one (key, counter) pair in, two
// 64-bit words out.
struct Philox2x64 {
    static constexpr std::uint64_t mult = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t weyl = 0x9E3779B97F4A7C15ull;

    static std::pair<std::uint64_t, std::uint64_t>
    block(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
        for (int r = 0; r < 10; ++r) {
            const auto prod = static_cast<unsigned __int128>(mult) * c0;
            const auto hi = static_cast<std::uint64_t>(prod >> 64);
            const auto lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ key ^ c1;
            c1 = lo;
            key += weyl;
        }
        return {c0, c1};
    }
};

// 53-bit draw strictly inside (0,1), safe under log
inline double to_open_unit(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1p-53 + 0x1p-54;
}

// Two standard normals for (seed, path, slot) via Box-Muller.
inline void normal_pair(std::uint64_t seed, std::uint64_t path,
                        std::uint64_t slot, double& z0, double& z1) {
    const auto [x0, x1] = Philox2x64::block(seed, path, slot);
    const double u1 = to_open_unit(x0);
    const double u2 = to_open_unit(x1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.28318530717958647692528676656;
    z0 = r * std::cos(two_pi * u2);
    z1 = r * std::sin(two_pi * u2);
}

// n normals for one path, consuming slots pairwise from 0
inline void normal_fill(std::uint64_t seed, std::uint64_t path, double* out,
                        std::size_t n) {
    std::size_t i = 0;
    std::uint64_t slot = 0;
    double z0, z1;
    while (i + 2 <= n) {
        normal_pair(seed, path, slot++, out[i], out[i + 1]);
        i += 2;
    }
    if (i < n) {
        normal_pair(seed, path, slot, z0, z1);
        out[i] = z0;
    }
}

} // namespace rng

struct TimeGrid {
    std::vector<double> points;  // strictly increasing, all > 0

    void validate() const {
        if (points.empty())
            throw std::invalid_argument("grid: no points");
        double prev = 0.0;
        for (double t : points) {
            if (!(std::isfinite(t) && t > prev))
                throw std::invalid_argument(
                    "grid: points must be positive and strictly increasing");
            prev = t;
        }
    }

    static TimeGrid uniform(double t_end, std::size_t n) {
        if (!(t_end > 0.0) || n < 1)
            throw std::invalid_argument("grid: uniform needs t_end > 0, n >= 1");
        TimeGrid g;
        g.points.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.points[i] = t_end * static_cast<double>(i + 1) / static_cast<double>(n);
        return g;
    }
};

struct PathBatch {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;           // n_paths rows x grid size cols
    std::vector<std::uint8_t> absorbed;   // per path; only CEV runs fill it
    double absorption_fraction = 0.0;
    double jitter = 0.0;   // diagonal shift the factorization needed; 0 when
                           // the run involved no covariance factorization

    double at(std::size_t path, std::size_t i) const {
        return values[path * grid.points.size() + i];
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

namespace detail {

inline unsigned thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("GFBM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Runs fn(chunk_index, begin, end) over [0,n). Chunk boundaries depend only
// on n, and fn must write only to slots owned by its index range; then any
// worker count produces identical results.
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunk, Fn&& fn) {
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const unsigned nt =
        static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n_chunks));
    if (nt <= 1) {
        for (std::size_t ci = 0; ci < n_chunks; ++ci)
            fn(ci, ci * chunk, std::min(n, (ci + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex guard;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t ci = next.fetch_add(1);
                if (ci >= n_chunks || failed.load()) return;
                fn(ci, ci * chunk, std::min(n, (ci + 1) * chunk));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(guard);
            if (!first_error) first_error = std::current_exception();
            failed.store(true);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Lower-triangular Cholesky factor of the gfBm covariance on the grid.
// Non-positive pivots get a diagonal jitter ladder up to 1e-12 of the max
// diagonal before the factorization gives up.
inline std::pair<std::vector<double>, double>
cholesky_covariance(const GfbmParams& p, const TimeGrid& grid) {
    const std::size_t n = grid.points.size();
    std::vector<double> cov(n * n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = covariance(p, grid.points[i], grid.points[j]);
            cov[i * n + j] = v;
            cov[j * n + i] = v;
            if (i == j && v > max_diag) max_diag = v;
        }
    static constexpr double ladder[] = {0.0, 1e-15, 1e-14, 1e-13, 1e-12};
    int bad_minor = 0;
    for (double lvl : ladder) {
        const double jit = lvl * max_diag;
        std::vector<double> a = cov;
        for (std::size_t i = 0; i < n; ++i) a[i * n + i] += jit;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = a[i * n + j];
                for (std::size_t k = 0; k < j; ++k)
                    s -= a[i * n + k] * a[j * n + k];
                if (i == j) {
                    if (!(s > 0.0)) {
                        bad_minor = static_cast<int>(i) + 1;
                        ok = false;
                        break;
                    }
                    a[i * n + i] = std::sqrt(s);
                } else {
                    a[i * n + j] = s / a[j * n + j];
                }
            }
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
            return {std::move(a), jit};
        }
    }
    throw FactorizationError("gfbm covariance is not positive definite",
                             bad_minor);
}

constexpr std::size_t path_block = 64;

// out^T = L z^T column-wise for a panel of pc paths; zT and outT are
// slot-major (n x pc) so the inner loop runs over contiguous memory.
inline void lower_apply_block(const double* lmat, std::size_t n,
                              const double* z_t, double* out_t,
                              std::size_t pc) {
    for (std::size_t i = 0; i < n; ++i) {
        double* orow = out_t + i * pc;
        for (std::size_t q = 0; q < pc; ++q) orow[q] = 0.0;
        const double* lrow = lmat + i * n;
        for (std::size_t j = 0; j <= i; ++j) {
            const double c = lrow[j];
            const double* zrow = z_t + j * pc;
            for (std::size_t q = 0; q < pc; ++q) orow[q] += c * zrow[q];
        }
    }
}

/// per-step increments shared by every CEV path: dt and the exact integral
// of 2 H K s^{2H-1} over the step (handles the H < 1/2 singularity at 0)
struct CevStepTable {
    std::vector<double> dt;
    std::vector<double> dvar;
};

inline CevStepTable cev_steps(const GfbmParams& p, const TimeGrid& grid) {
    CevStepTable st;
    const auto& pts = grid.points;
    st.dt.resize(pts.size());
    st.dvar.resize(pts.size());
    const double kf = k_factor(p);
    double tprev = 0.0, vprev = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = kf * std::pow(pts[i], 2.0 * p.hurst);
        st.dt[i] = pts[i] - tprev;
        st.dvar[i] = v - vprev;
        tprev = pts[i];
        vprev = v;
    }
    return st;
}

// Euler step of the time-changed diffusion. Drift uses the exact time
// integral of the constant term,
//   dy = (2-a)[ r y dt + (1-a) sigma^2 (K t^{2H})' dt / 2 ]
//      + (2-a) sigma sqrt(y) dW_{K t^{2H}},
// and the driving increments are independent normals with the exact
// per-step variance of K t^{2H}. Absorbed paths freeze at zero.
inline void cev_evolve_block(const CevParams& c, const CevStepTable& st,
                             const double* z_t, std::size_t n, std::size_t pc,
                             double y0, double* y, std::uint8_t* absorbed,
                             double* store, std::size_t stride) {
    const double two_m_a = 2.0 - c.alpha;
    const double gr = two_m_a * c.market.rate;
    const double gc = 0.5 * two_m_a * (1.0 - c.alpha)
                    * c.market.sigma * c.market.sigma;
    const double gs = two_m_a * c.market.sigma;
    for (std::size_t q = 0; q < pc; ++q) {
        y[q] = y0;
        absorbed[q] = 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* zrow = z_t + i * pc;
        const double a1 = gr * st.dt[i];
        const double a0 = gc * st.dvar[i];
        const double sd = gs * std::sqrt(st.dvar[i]);
        for (std::size_t q = 0; q < pc; ++q) {
            double yq = y[q];
            if (!absorbed[q]) {
                yq += a1 * yq + a0 + sd * std::sqrt(yq) * zrow[q];
                if (yq <= 0.0) {
                    yq = 0.0;
                    absorbed[q] = 1;
                }
                y[q] = yq;
            }
            if (store) store[q * stride + i] = yq;
        }
    }
}

// scratch buffers for one worker processing blocks of paths
struct BlockScratch {
    std::vector<double> z_t, out_t, zrow, y;
    std::vector<std::uint8_t> absorbed;
    BlockScratch(std::size_t n, bool factored)
        : z_t(n * path_block), out_t(factored ? n * path_block : 0), zrow(n),
          y(path_block), absorbed(path_block) {}
};

// Draws step-major standard normals for each block and hands per_block the
// driving levels: Cholesky-correlated when lmat is given, raw otherwise.
template <class PerBlock>
void run_path_blocks(std::size_t n, std::uint64_t seed, std::size_t begin,
                     std::size_t end, BlockScratch& sc, const double* lmat,
                     PerBlock&& per_block) {
    for (std::size_t base = begin; base < end; base += path_block) {
        const std::size_t pc = std::min(path_block, end - base);
        for (std::size_t q = 0; q < pc; ++q) {
            rng::normal_fill(seed, base + q, sc.zrow.data(), n);
            for (std::size_t j = 0; j < n; ++j)
                sc.z_t[j * pc + q] = sc.zrow[j];
        }
        const double* levels = sc.z_t.data();
        if (lmat) {
            lower_apply_block(lmat, n, sc.z_t.data(), sc.out_t.data(), pc);
            levels = sc.out_t.data();
        }
        per_block(base, pc, levels);
    }
}

} // namespace detail

// Exact gfBm paths on the grid: values[path][i] = Z_{t_i}.
inline PathBatch gfbm_paths(const GfbmParams& p, const TimeGrid& grid,
                            std::size_t n_paths, std::uint64_t seed) {
    p.validate();
    grid.validate();
    if (n_paths < 1)
        throw std::invalid_argument("gfbm_paths: n_paths must be >= 1");
    const std::size_t n = grid.points.size();
    auto fact = detail::cholesky_covariance(p, grid);
    PathBatch batch;
    batch.grid = grid;
    batch.n_paths = n_paths;
    batch.seed = seed;
    batch.jitter = fact.second;
    batch.values.assign(n_paths * n, 0.0);
    const double* lmat = fact.first.data();
    detail::for_each_chunk(
        n_paths, 4096, [&](std::size_t, std::size_t b, std::size_t e) {
            detail::BlockScratch sc(n, true);
            detail::run_path_blocks(
                n, seed, b, e, sc, lmat,
                [&](std::size_t base, std::size_t pc, const double* lev) {
                    for (std::size_t q = 0; q < pc; ++q) {
                        double* row = &batch.values[(base + q) * n];
                        for (std::size_t i = 0; i < n; ++i)
                            row[i] = lev[i * pc + q];
                    }
                });
        });
    return batch;
}

// Exact terminal draws S_T = s0 exp(rT - v/2 + sqrt(v) z), v = sigma^2 K T^{2H}.
inline std::vector<double> bs_terminal(const GfbmParams& p,
                                       const MarketParams& m,
                                       std::size_t n_paths,
                                       std::uint64_t seed) {
    p.validate();
    m.validate();
    if (n_paths < 1)
        throw std::invalid_argument("bs_terminal: n_paths must be >= 1");
    const double v = m.sigma * m.sigma * variance(p, m.maturity);
    const double drift = m.rate * m.maturity - 0.5 * v;
    const double vol = std::sqrt(v);
    std::vector<double> out(n_paths);
    detail::for_each_chunk(
        n_paths, 65536, [&](std::size_t, std::size_t b, std::size_t e) {
            double z0, z1;
            for (std::size_t path = b; path < e; ++path) {
                rng::normal_pair(seed, path, 0, z0, z1);
                out[path] = m.s0 * std::exp(drift + vol * z0);
            }
        });
    return out;
}

// Euler paths of the transformed CEV process y = S^{2-alpha}, absorbing at
// zero. The grid must start strictly after 0 (singular drift for H < 1/2)
// and carry at least 64 steps.
inline PathBatch cev_paths_euler(const GfbmParams& p, const CevParams& c,
                                 const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed) {
    p.validate();
    c.validate();
    grid.validate();
    if (grid.points.size() < 64)
        throw std::invalid_argument("cev_paths_euler: need at least 64 steps");
    if (n_paths < 1)
        throw std::invalid_argument("cev_paths_euler: n_paths must be >= 1");
    const std::size_t n = grid.points.size();
    const auto st = detail::cev_steps(p, grid);
    const double y0 = std::pow(c.market.s0, 2.0 - c.alpha);
    PathBatch batch;
    batch.grid = grid;
    batch.n_paths = n_paths;
    batch.seed = seed;
    batch.values.assign(n_paths * n, 0.0);
    batch.absorbed.assign(n_paths, 0);
    detail::for_each_chunk(
        n_paths, 4096, [&](std::size_t, std::size_t b, std::size_t e) {
            detail::BlockScratch sc(n, false);
            detail::run_path_blocks(
                n, seed, b, e, sc, nullptr,
                [&](std::size_t base, std::size_t pc, const double* lev) {
                    detail::cev_evolve_block(
                        c, st, lev, n, pc, y0, sc.y.data(),
                        &batch.absorbed[base], &batch.values[base * n], n);
                });
        });
    std::size_t hits = 0;
    for (auto f : batch.absorbed) hits += f;
    batch.absorption_fraction =
        static_cast<double>(hits) / static_cast<double>(n_paths);
    return batch;
}

// Terminal CEV price draws without storing paths. Absorbed paths map to
// S = 0 when alpha < 2; for alpha > 2 absorption of y means S has exploded,
// which the exact process cannot do, so the draw is +inf to make any such
// event impossible to miss.
inline std::vector<double> cev_terminal(const GfbmParams& p,
                                        const CevParams& c,
                                        const TimeGrid& grid,
                                        std::size_t n_paths,
                                        std::uint64_t seed,
                                        double* absorption_fraction = nullptr) {
    p.validate();
    c.validate();
    grid.validate();
    if (grid.points.size() < 64)
        throw std::invalid_argument("cev_terminal: need at least 64 steps");
    if (n_paths < 1)
        throw std::invalid_argument("cev_terminal: n_paths must be >= 1");
    const std::size_t n = grid.points.size();
    const auto st = detail::cev_steps(p, grid);
    const double two_m_a = 2.0 - c.alpha;
    const double y0 = std::pow(c.market.s0, two_m_a);
    const double absorbed_price =
        c.alpha < 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
    std::vector<double> out(n_paths);
    std::vector<std::uint64_t> chunk_hits((n_paths + 4095) / 4096, 0);
    detail::for_each_chunk(
        n_paths, 4096, [&](std::size_t ci, std::size_t b, std::size_t e) {
            detail::BlockScratch sc(n, false);
            std::uint64_t hits = 0;
            detail::run_path_blocks(
                n, seed, b, e, sc, nullptr,
                [&](std::size_t base, std::size_t pc, const double* lev) {
                    detail::cev_evolve_block(c, st, lev, n, pc, y0,
                                             sc.y.data(), sc.absorbed.data(),
                                             nullptr, 0);
                    for (std::size_t q = 0; q < pc; ++q) {
                        if (sc.absorbed[q]) {
                            out[base + q] = absorbed_price;
                            ++hits;
                        } else {
                            out[base + q] = std::pow(sc.y[q], 1.0 / two_m_a);
                        }
                    }
                });
            chunk_hits[ci] = hits;
        });
    if (absorption_fraction) {
        std::uint64_t hits = 0;
        for (auto h : chunk_hits) hits += h;
        *absorption_fraction =
            static_cast<double>(hits) / static_cast<double>(n_paths);
    }
    return out;
}

// Discounted-payoff estimate over terminal samples. Absorbed-at-zero CEV
// samples enter as S = 0 and contribute zero payoff.
inline McEstimate mc_price(const std::vector<double>& samples, double strike,
                           double rate, double maturity) {
    if (samples.size() < 2)
        throw std::invalid_argument("mc_price: need at least 2 samples");
    const double disc = std::exp(-rate * maturity);
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double s : samples) {
        const double x = disc * (s > strike ? s - strike : 0.0);
        ++k;
        const double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(m2 / (static_cast<double>(k)
                                  * static_cast<double>(k - 1)));
    est.n_paths = k;
    return est;
}

// RFC 4180 dump: header row of grid times, one row per path.
inline void write_paths_csv(const PathBatch& batch, std::ostream& os) {
    const std::size_t n = batch.grid.points.size();
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) os << ',';
        os << batch.grid.points[i];
    }
    os << "\r\n";
    for (std::size_t path = 0; path < batch.n_paths; ++path) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i) os << ',';
            os << batch.at(path, i);
        }
        os << "\r\n";
    }
    os.precision(old_precision);
}

} // namespace gfbm

#endif
