// Acceptance suite: ten checks, one line each, exit 0 only if every one
// passes inside its time budget. Tolerances are pinned here on purpose;
// loosening them is a behavior change, not a tuning knob.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "../oracles.hpp"

using namespace gfbm;

namespace {

const MarketParams ref_mkt{100.0, 100.0, 0.05, 0.2, 1.0};
const GfbmParams gen{1.0, 0.5, 0.7};
const double inv_rt2 = 1.0 / std::sqrt(2.0);

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

MarketParams random_market(oracle::ParamRng& rng) {
    return {rng.in(40.0, 160.0), rng.in(40.0, 160.0), rng.in(-0.02, 0.08),
            rng.in(0.1, 0.5), rng.in(0.25, 2.0)};
}

// 1: closed form collapses onto the classical reductions
Outcome c1_reductions() {
    oracle::ParamRng rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const MarketParams m = random_market(rng);
        const double h = rng.in(0.1, 0.9);
        worst = std::max(worst,
                         std::fabs(call_price({1.0, 0.0, 0.5}, m).price
                                   - standard_call(m)));
        worst = std::max(worst,
                         std::fabs(call_price({1.0, 0.0, h}, m).price
                                   - fractional_call(m, h)));
        worst = std::max(worst,
                         std::fabs(call_price({inv_rt2, inv_rt2, h}, m).price
                                   - sub_fractional_call(m, h)));
    }
    return {worst <= 1e-10, fmt("worst gap %.3e (tol 1e-10)", worst)};
}

// 2: price equals payoff quadrature and the Monte Carlo estimate
Outcome c2_bs_oracles() {
    const GfbmParams procs[] = {{1.0, 0.0, 0.3},
                                {1.0, 0.0, 0.5},
                                {1.0, 0.0, 0.7},
                                {inv_rt2, inv_rt2, 0.3},
                                {inv_rt2, inv_rt2, 0.5},
                                {inv_rt2, inv_rt2, 0.7},
                                {1.0, 0.5, 0.3},
                                {1.0, 0.5, 0.5},
                                {1.0, 0.5, 0.7},
                                {0.8, 0.4, 0.55}};
    oracle::ParamRng rng(2002);
    double worst_quad = 0.0, worst_z = 0.0;
    int set = 0;
    for (const auto& p : procs) {
        const MarketParams m = random_market(rng);
        const double closed = call_price(p, m).price;
        const double quad = oracle::bs_call_quad(p, m);
        worst_quad = std::max(worst_quad, std::fabs(closed - quad) / m.s0);

        const auto s_t = bs_terminal(p, m, 1000000,
                                     7100 +
                                     static_cast<std::uint64_t>(set));
        const auto est = mc_price(s_t, m.strike, m.rate, m.maturity);
        worst_z = std::max(worst_z,
                           std::fabs(est.mean - closed) / est.std_error);
        ++set;
    }
    const bool pass = worst_quad <= 1e-6 && worst_z <= 3.0;
    return {pass, fmt("worst quad gap %.2e/s0 (tol 1e-6), worst mc %.2f se "
                      "(tol 3)",
                      worst_quad, worst_z)};
}

// 3: phi closed form against quadrature plus the classical constant
Outcome c3_phi() {
    oracle::ParamRng rng(3003);
    double worst = 0.0;
    const QuadControl tight{1e-300, 1e-13, 4000};
    for (int i = 0; i < 100; ++i) {
        const GfbmParams p{rng.in(0.3, 1.5), rng.in(0.0, 1.0),
                           rng.in(0.15, 0.85)};
        const double alpha = rng.next() < 0.5 ? rng.in(0.4, 1.9)
                                              : rng.in(2.1, 3.2);
        const CevParams c{{rng.in(50.0, 150.0), rng.in(50.0, 150.0),
                           rng.in(-0.02, 0.08), rng.in(0.1, 0.6),
                           rng.in(0.25, 2.0)},
                          alpha};
        const double t = c.market.maturity;
        const double quad = phi_quadrature(p, c, t, tight);
        worst = std::max(worst, std::fabs(phi(p, c, t) - quad)
                                    / std::fabs(quad));
    }

    // classical reduction of the transition scale at H = 1/2, (1, 0)
    double worst_k = 0.0;
    for (double sigma : {0.2, 2.0}) {
        MarketParams m = ref_mkt;
        m.sigma = sigma;
        const CevParams c{m, 1.5};
        const double beta = 0.5;
        const double k_closed = 2.0 * m.rate
                              / (sigma * sigma * beta
                                 * (std::exp(m.rate * beta * m.maturity)
                                    - 1.0));
        const double k_lib =
            1.0 / transition_scale({1.0, 0.0, 0.5}, c, m.maturity);
        worst_k = std::max(worst_k,
                           std::fabs(k_lib - k_closed) / k_closed);
    }
    const bool pass = worst <= 1e-10 && worst_k <= 1e-12;
    return {pass, fmt("worst phi gap %.2e (tol 1e-10), classical k gap "
                      "%.2e (tol 1e-12)",
                      worst, worst_k)};
}

// 4: CEV closed form against payoff quadrature on the classical density
Outcome c4_cev_classic() {
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 1.5, 2.5, 3.0}) {
        MarketParams m = ref_mkt;
        m.sigma = 0.2 * std::pow(m.s0, 1.0 - 0.5 * alpha);
        const CevParams c{m, alpha};
        const double closed = call_price_cev({1.0, 0.0, 0.5}, c).price;
        const double quad = oracle::cev_call_classic_quad(m, alpha);
        worst = std::max(worst, std::fabs(closed - quad) / m.s0);
    }
    return {worst <= 1e-5, fmt("worst gap %.2e/s0 (tol 1e-5)", worst)};
}

// 5: CEV closed form within Monte Carlo error, stable under step halving
Outcome c5_cev_mc() {
    double worst_z = 0.0, worst_dz = 0.0;
    for (double alpha : {1.5, 2.5}) {
        MarketParams m = ref_mkt;
        m.sigma = 0.2 * std::pow(m.s0, 1.0 - 0.5 * alpha);
        const CevParams c{m, alpha};
        const double closed = call_price_cev(gen, c).price;
        McEstimate est[2];
        int k = 0;
        for (std::size_t steps : {std::size_t(512), std::size_t(1024)}) {
            const auto grid = TimeGrid::uniform(m.maturity, steps);
            const auto s_t = cev_terminal(gen, c, grid, 200000,
                                          5000 + steps);
            est[k] = mc_price(s_t, m.strike, m.rate, m.maturity);
            worst_z = std::max(worst_z, std::fabs(est[k].mean - closed)
                                            / est[k].std_error);
            ++k;
        }
        const double comb = std::hypot(est[0].std_error, est[1].std_error);
        worst_dz = std::max(worst_dz,
                            std::fabs(est[0].mean - est[1].mean) / comb);
    }
    const bool pass = worst_z <= 3.0 && worst_dz <= 3.0;
    return {pass, fmt("worst mc %.2f se, step-halving shift %.2f se "
                      "(tol 3)",
                      worst_z, worst_dz)};
}

// 6: the alpha -> 2 limit walks monotonically into the lognormal price
Outcome c6_alpha_limit() {
    double final_rel = 0.0;
    bool monotone = true;
    for (const auto& alphas :
         {std::vector<double>{1.9, 1.99, 1.999},
          std::vector<double>{2.1, 2.01, 2.001}}) {
        const auto rows = bs_limit_gap(gen, ref_mkt, alphas);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            monotone = monotone
                     && std::fabs(rows[i].gap) < std::fabs(rows[i - 1].gap);
        }
        final_rel = std::max(final_rel, std::fabs(rows.back().gap)
                                            / rows.back().bs_price);
    }
    const bool pass = monotone && final_rel <= 1e-2;
    return {pass, std::string("monotone ") + (monotone ? "yes" : "NO")
                      + fmt(", final gap %.2e of price (tol 1e-2)",
                            final_rel)};
}

// 7: tail matches the large-df normal limit
Outcome c7_qlimit() {
    double worst = 0.0;
    const double v = 1e4;
    for (double lam : {0.0, 25.0, 50.0, 100.0}) {
        for (double k = -4.0; k <= 4.0; k += 0.5) {
            const double sd = std::sqrt(2.0 * (v + 2.0 * lam));
            const double n = v + lam + k * sd;
            worst = std::max(worst,
                             std::fabs(noncentral_chi2_sf(n, v, lam)
                                       - q_normal_limit(n, v, lam)));
        }
    }
    return {worst <= 1e-2, fmt("worst gap %.2e (tol 1e-2)", worst)};
}

// 8: closed-form density solves the Fokker-Planck equation
Outcome c8_pde() {
    double worst_res = 0.0;
    for (const auto& p : {GfbmParams{1.0, 0.0, 0.5}, gen,
                          GfbmParams{inv_rt2, inv_rt2, 0.3}}) {
        auto dens = [&](double x, double t) {
            const auto law = log_price_law(p, ref_mkt, t);
            const double sd = std::sqrt(law.variance);
            return normal_pdf((x - law.mean) / sd) / sd;
        };
        const auto law = log_price_law(p, ref_mkt, 1.0);
        const double sd = std::sqrt(law.variance);
        std::vector<double> xs;
        for (double k : {-1.5, -0.5, 0.0, 0.5, 1.5})
            xs.push_back(law.mean + k * sd);
        worst_res = std::max(worst_res,
                             residual_check(dens, p, ref_mkt, xs, 1.0));
    }

    const auto law = log_price_law(gen, ref_mkt, 1.0);
    const double sd = std::sqrt(law.variance);
    auto bs_grid = [&](int n) {
        return Grid1D{law.mean - 10.0 * sd, law.mean + 10.0 * sd, n, 0.1,
                      1.0, n};
    };
    auto l1 = [&](const DensitySlice& s) {
        double err = 0.0;
        for (std::size_t i = 1; i < s.x.size(); ++i) {
            const auto lw = log_price_law(gen, ref_mkt, s.time);
            const double sdt = std::sqrt(lw.variance);
            const double f1 = normal_pdf((s.x[i] - lw.mean) / sdt) / sdt;
            const double f0 = normal_pdf((s.x[i - 1] - lw.mean) / sdt) / sdt;
            err += 0.5
                 * (std::fabs(s.density[i] - f1)
                    + std::fabs(s.density[i - 1] - f0))
                 * (s.x[i] - s.x[i - 1]);
        }
        return err;
    };
    const double e1 = l1(evolve_fp_bs(gen, ref_mkt, bs_grid(2000)));
    const double e2 = l1(evolve_fp_bs(gen, ref_mkt, bs_grid(4000)));
    const bool pass = worst_res <= 1e-4 && e1 <= 1e-2 && e1 / e2 >= 3.0;
    return {pass, fmt("worst residual %.2e (tol 1e-4), L1 %.2e -> ", worst_res,
                      e1)
                      + fmt("%.2e (ratio %.1f, need >= 3)", e2, e1 / e2)};
}

// 9: simulated paths carry the exact covariance and terminal law
Outcome c9_paths() {
    const auto grid = TimeGrid::uniform(1.0, 20);
    const std::size_t n_paths = 100000;
    const auto batch = gfbm_paths(gen, grid, n_paths, 9001);
    const std::size_t m = grid.points.size();
    double worst_z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < n_paths; ++p)
                acc += batch.at(p, i) * batch.at(p, j);
            const double sample = acc / static_cast<double>(n_paths);
            const double cij = covariance(gen, grid.points[i],
                                          grid.points[j]);
            const double cii = covariance(gen, grid.points[i],
                                          grid.points[i]);
            const double cjj = covariance(gen, grid.points[j],
                                          grid.points[j]);
            const double se = std::sqrt((cii * cjj + cij * cij)
                                        / static_cast<double>(n_paths));
            worst_z = std::max(worst_z, std::fabs(sample - cij) / se);
        }
    }

    const auto s_t = bs_terminal(gen, ref_mkt, 1000000, 9002);
    const auto law = log_price_law(gen, ref_mkt, ref_mkt.maturity);
    const double mu = law.mean + ref_mkt.rate * ref_mkt.maturity;
    const double sdt = std::sqrt(law.variance);
    auto cdf = [&](double s) {
        return normal_cdf((std::log(s) - mu) / sdt);
    };
    const double d = ks_statistic(s_t, cdf);
    const double pv = ks_pvalue(d, s_t.size());
    const bool pass = worst_z <= 5.0 && pv >= 0.01;
    return {pass, fmt("worst cov dev %.2f se (tol 5), ks p %.3f "
                      "(need >= 0.01)",
                      worst_z, pv)};
}

// 10: survival function against brute-force quadrature, Bessel recurrence
Outcome c10_specfun() {
    oracle::ParamRng rng(10010);
    double worst_q = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = rng.in(0.05, 50.0);
        const double df = rng.in(1.0, 20.0);
        const double lam = rng.in(0.1, 30.0);
        worst_q = std::max(
            worst_q, std::fabs(noncentral_chi2_sf(x, df, lam)
                               - oracle::noncentral_chi2_sf_quad(x, df,
                                                                 lam)));
    }
    double worst_rec = 0.0;
    for (double nu : {0.8, 1.0, 1.5, 2.2, 3.3}) {
        for (double x = 0.1; x <= 30.0; x *= 1.45) {
            const double lhs = bessel_i(nu - 1.0, x) - bessel_i(nu + 1.0, x);
            const double rhs = 2.0 * nu / x * bessel_i(nu, x);
            worst_rec = std::max(worst_rec,
                                 std::fabs(lhs - rhs) / std::fabs(rhs));
        }
    }
    const bool pass = worst_q <= 1e-8 && worst_rec <= 1e-10;
    return {pass, fmt("worst sf gap %.2e (tol 1e-8), worst recurrence "
                      "%.2e (tol 1e-10)",
                      worst_q, worst_rec)};
}

}  // namespace

int main() {
    struct Row {
        const char* name;
        double budget_s;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {"reductions against classical forms", 1.0, c1_reductions},
        {"lognormal price vs quadrature and mc", 30.0, c2_bs_oracles},
        {"phi closed form vs quadrature", 5.0, c3_phi},
        {"cev price vs classical density quadrature", 30.0, c4_cev_classic},
        {"cev price vs euler monte carlo", 300.0, c5_cev_mc},
        {"alpha to two lognormal limit", 10.0, c6_alpha_limit},
        {"noncentral tail normal limit", 5.0, c7_qlimit},
        {"fokker-planck residual and evolution", 120.0, c8_pde},
        {"path covariance and terminal law", 120.0, c9_paths},
        {"survival function and bessel recurrence", 10.0, c10_specfun},
    };

    bool all = true;
    int idx = 0;
    for (const auto& row : rows) {
        ++idx;
        const auto start = std::chrono::steady_clock::now();
        const Outcome out = row.fn();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now()
                                          - start)
                .count();
        const bool in_budget = dt <= row.budget_s;
        const bool ok = out.pass && in_budget;
        all = all && ok;
        std::printf("[%2d/10] %s  %-44s %7.2fs / %gs\n", idx,
                    ok ? "PASS" : "FAIL", row.name, dt, row.budget_s);
        std::printf("        %s%s\n", out.detail.c_str(),
                    in_budget ? "" : "  [over budget]");
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass"
                            : "acceptance: FAILURES above");
    return all ? 0 : 1;
}
