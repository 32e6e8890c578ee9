// Command-line front end: closed-form and Monte Carlo prices, density
// tables, path simulation, and quick self-validation suites.
//
// Exit codes: 0 success, 1 usage or domain error, 2 validation failure.
// Volatility is always in the model's native scale: under price-cev the
// diffusion term is sigma S^{alpha/2}, so sigma is not comparable across
// alpha values (sigma_bs s0^{1 - alpha/2} matches levels near the spot).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfbm/gfbm.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct Cli {
    gfbm::GfbmParams process{1.0, 0.0, 0.5};
    gfbm::MarketParams market{100.0, 100.0, 0.0, 0.2, 1.0};
    double alpha = 1.0;
    std::string format = "json";
    std::string model = "bs";
    std::string suite = "all";
    std::string dump_paths;
    std::uint64_t paths = 100000;
    std::uint64_t steps = 64;
    std::uint64_t seed = 1;
    double s_min = 0.0;
    double s_max = 0.0;
    int points = 101;

    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    double runtime_ms() const {
        const auto d = std::chrono::steady_clock::now() - start;
        return std::chrono::duration<double, std::milli>(d).count();
    }

    ordered_json market_json(bool with_alpha) const {
        ordered_json j{{"a", process.a},
                       {"b", process.b},
                       {"hurst", process.hurst},
                       {"s0", market.s0},
                       {"strike", market.strike},
                       {"rate", market.rate},
                       {"sigma", market.sigma},
                       {"maturity", market.maturity}};
        if (with_alpha) j["alpha"] = alpha;
        return j;
    }
};

void add_process_options(CLI::App* cmd, Cli& c) {
    cmd->add_option("--a", c.process.a, "forward weight a");
    cmd->add_option("--b", c.process.b, "backward weight b");
    cmd->add_option("--hurst", c.process.hurst, "Hurst index in (0,1)")
        ->required();
}

void add_market_options(CLI::App* cmd, Cli& c) {
    cmd->add_option("--s0", c.market.s0, "spot")->required();
    cmd->add_option("--strike", c.market.strike, "strike")->required();
    cmd->add_option("--rate", c.market.rate, "risk-free rate");
    cmd->add_option("--sigma", c.market.sigma,
                    "volatility, native model scale")
        ->required();
    cmd->add_option("--maturity", c.market.maturity, "maturity in years")
        ->required();
}

void add_format_option(CLI::App* cmd, Cli& c) {
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

void print_price_csv(const std::string& model, const Cli& c, bool with_alpha,
                     const gfbm::PriceQuote& q, bool with_se) {
    std::cout.precision(17);
    std::cout << "model,a,b,hurst,s0,strike,rate,sigma,maturity";
    if (with_alpha) std::cout << ",alpha";
    std::cout << ",price";
    if (with_se) std::cout << ",std_error";
    std::cout << ",provenance,runtime_ms\r\n";
    std::cout << model << ',' << c.process.a << ',' << c.process.b << ','
              << c.process.hurst << ',' << c.market.s0 << ','
              << c.market.strike << ',' << c.market.rate << ','
              << c.market.sigma << ',' << c.market.maturity;
    if (with_alpha) std::cout << ',' << c.alpha;
    std::cout << ',' << q.price;
    if (with_se) std::cout << ',' << q.std_error;
    std::cout << ',' << to_string(q.provenance) << ',' << c.runtime_ms()
              << "\r\n";
}

void print_price(const std::string& model, const Cli& c, bool with_alpha,
                 const gfbm::PriceQuote& q, bool with_se = false) {
    if (c.format == "csv") {
        print_price_csv(model, c, with_alpha, q, with_se);
        return;
    }
    ordered_json out{{"model", model},
                     {"params", c.market_json(with_alpha)},
                     {"price", q.price}};
    if (with_se) out["std_error"] = q.std_error;
    out["provenance"] = to_string(q.provenance);
    out["runtime_ms"] = c.runtime_ms();
    std::cout << out.dump(2) << '\n';
}

int run_price_bs(Cli& c) {
    const auto q = gfbm::call_price(c.process, c.market);
    print_price("bs", c, false, q);
    return 0;
}

int run_price_cev(Cli& c) {
    const gfbm::CevParams cev{c.market, c.alpha};
    const auto q = gfbm::call_price_cev(c.process, cev);
    print_price("cev", c, true, q);
    return 0;
}

int run_simulate(Cli& c) {
    const auto grid =
        gfbm::TimeGrid::uniform(c.market.maturity,
                                static_cast<std::size_t>(c.steps));
    gfbm::McEstimate est;
    if (c.model == "bs") {
        const auto s_t = gfbm::bs_terminal(c.process, c.market,
                                           static_cast<std::size_t>(c.paths),
                                           c.seed);
        est = gfbm::mc_price(s_t, c.market.strike, c.market.rate,
                             c.market.maturity);
        if (!c.dump_paths.empty()) {
            const auto batch = gfbm::gfbm_paths(
                c.process, grid, static_cast<std::size_t>(c.paths), c.seed);
            std::ofstream f(c.dump_paths, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot open dump file");
            gfbm::write_paths_csv(batch, f);
        }
    } else {
        const gfbm::CevParams cev{c.market, c.alpha};
        if (!c.dump_paths.empty()) {
            const auto batch = gfbm::cev_paths_euler(
                c.process, cev, grid, static_cast<std::size_t>(c.paths),
                c.seed);
            std::ofstream f(c.dump_paths, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot open dump file");
            gfbm::write_paths_csv(batch, f);
            std::vector<double> s_t(batch.n_paths);
            const std::size_t last = grid.points.size() - 1;
            const double inv = 1.0 / (2.0 - c.alpha);
            for (std::size_t i = 0; i < batch.n_paths; ++i) {
                s_t[i] = batch.absorbed[i]
                             ? (c.alpha < 2.0
                                    ? 0.0
                                    : std::numeric_limits<double>::infinity())
                             : std::pow(batch.at(i, last), inv);
            }
            est = gfbm::mc_price(s_t, c.market.strike, c.market.rate,
                                 c.market.maturity);
        } else {
            const auto s_t = gfbm::cev_terminal(
                c.process, cev, grid, static_cast<std::size_t>(c.paths),
                c.seed);
            est = gfbm::mc_price(s_t, c.market.strike, c.market.rate,
                                 c.market.maturity);
        }
    }
    gfbm::PriceQuote q{est.mean, est.std_error, gfbm::Provenance::mc};
    const bool with_alpha = c.model == "cev";
    if (c.format == "csv") {
        print_price_csv(c.model, c, with_alpha, q, true);
        return 0;
    }
    ordered_json params = c.market_json(with_alpha);
    params["paths"] = c.paths;
    params["steps"] = c.steps;
    params["seed"] = c.seed;
    ordered_json out{{"model", c.model},
                     {"params", params},
                     {"price", q.price},
                     {"std_error", q.std_error},
                     {"provenance", to_string(q.provenance)},
                     {"runtime_ms", c.runtime_ms()}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_density(Cli& c, bool is_cev) {
    if (!(c.s_min >= 0.0) || !(c.s_max > c.s_min) || c.points < 2)
        throw std::invalid_argument(
            "density: need 0 <= s-min < s-max and points >= 2");
    std::vector<double> s(static_cast<std::size_t>(c.points));
    std::vector<double> dens(s.size());
    const double lo = c.s_min > 0.0 ? c.s_min : 1e-8 * c.market.s0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = lo + (c.s_max - lo) * static_cast<double>(i)
                        / static_cast<double>(s.size() - 1);
        if (is_cev) {
            const gfbm::CevParams cev{c.market, c.alpha};
            dens[i] = gfbm::transition_density_s(c.process, cev, s[i],
                                                 c.market.maturity);
        } else {
            dens[i] = gfbm::price_density(c.process, c.market, s[i]);
        }
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
        mass += 0.5 * (dens[i] + dens[i - 1]) * (s[i] - s[i - 1]);

    if (c.format == "csv") {
        std::cout.precision(17);
        std::cout << "s,density\r\n";
        for (std::size_t i = 0; i < s.size(); ++i)
            std::cout << s[i] << ',' << dens[i] << "\r\n";
        std::cout << "mass," << mass << "\r\n";
        return 0;
    }
    ordered_json out{{"model", is_cev ? "cev-density" : "bs-density"},
                     {"params", c.market_json(is_cev)},
                     {"s", s},
                     {"density", dens},
                     {"mass", mass},
                     {"runtime_ms", c.runtime_ms()}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct SuiteResult {
    std::string name;
    int cases = 0;
    double worst = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// deterministic scrambler, independent of the library rng
struct MiniRng {
    std::uint64_t s;
    explicit MiniRng(std::uint64_t seed) : s(seed) {}
    double next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) * 0x1p-53 + 0x1p-54;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }
};

SuiteResult suite_reductions() {
    SuiteResult r{"reductions", 0, 0.0, 1e-12, false};
    MiniRng rng(101);
    for (int i = 0; i < 25; ++i) {
        const gfbm::MarketParams m{rng.in(20, 180), rng.in(20, 180),
                                   rng.in(-0.02, 0.08), rng.in(0.1, 0.5),
                                   rng.in(0.25, 2.0)};
        const double h = rng.in(0.15, 0.85);
        const double w = 1.0 / std::sqrt(2.0);
        for (const auto& p :
             {gfbm::GfbmParams{1.0, 0.0, 0.5}, gfbm::GfbmParams{1.0, 0.0, h},
              gfbm::GfbmParams{w, w, h}}) {
            const auto rep = gfbm::reduction_report(p, m);
            r.worst = std::max(r.worst, rep.gap);
            ++r.cases;
        }
    }
    r.pass = r.worst <= r.tol;
    return r;
}

SuiteResult suite_phi() {
    SuiteResult r{"phi", 0, 0.0, 1e-9, false};
    MiniRng rng(202);
    for (int i = 0; i < 20; ++i) {
        const gfbm::GfbmParams p{rng.in(0.3, 1.5), rng.in(0.0, 1.0),
                                 rng.in(0.15, 0.85)};
        const gfbm::CevParams c{{rng.in(50, 150), rng.in(50, 150),
                                 rng.in(-0.02, 0.08), rng.in(0.1, 0.6),
                                 rng.in(0.25, 2.0)},
                                rng.next() < 0.5 ? rng.in(0.4, 1.9)
                                                 : rng.in(2.1, 3.2)};
        const double t = c.market.maturity;
        const double closed = gfbm::phi(p, c, t);
        const double quad = gfbm::phi_quadrature(p, c, t);
        r.worst = std::max(r.worst,
                           std::fabs(closed - quad) / std::fabs(quad));
        ++r.cases;
    }
    r.pass = r.worst <= r.tol;
    return r;
}

SuiteResult suite_qlimit() {
    SuiteResult r{"qlimit", 0, 0.0, 1e-2, false};
    const double v = 1e4;
    for (double lam : {0.0, 10.0, 100.0}) {
        for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double sd = std::sqrt(2.0 * (v + 2.0 * lam));
            const double n = v + lam + k * sd;
            const double q = gfbm::noncentral_chi2_sf(n, v, lam);
            const double limit = gfbm::q_normal_limit(n, v, lam);
            r.worst = std::max(r.worst, std::fabs(q - limit));
            ++r.cases;
        }
    }
    r.pass = r.worst <= r.tol;
    return r;
}

SuiteResult suite_parity() {
    SuiteResult r{"parity", 0, 0.0, 1e-10, false};
    MiniRng rng(303);
    for (int i = 0; i < 25; ++i) {
        const gfbm::GfbmParams p{rng.in(0.3, 2.0), rng.in(0.0, 1.5),
                                 rng.in(0.1, 0.9)};
        const gfbm::MarketParams m{rng.in(20, 180), rng.in(20, 180),
                                   rng.in(-0.02, 0.08), rng.in(0.1, 0.6),
                                   rng.in(0.25, 2.0)};
        const double gap = std::fabs(
            (gfbm::call_price(p, m).price - gfbm::put_price(p, m).price)
            - (m.s0 - m.strike * std::exp(-m.rate * m.maturity)));
        r.worst = std::max(r.worst, gap / m.s0);
        ++r.cases;
    }
    r.pass = r.worst <= r.tol;
    return r;
}

int run_validate(Cli& c) {
    std::vector<SuiteResult> results;
    if (c.suite == "reductions" || c.suite == "all")
        results.push_back(suite_reductions());
    if (c.suite == "phi" || c.suite == "all")
        results.push_back(suite_phi());
    if (c.suite == "qlimit" || c.suite == "all")
        results.push_back(suite_qlimit());
    if (c.suite == "parity" || c.suite == "all")
        results.push_back(suite_parity());

    bool all_pass = true;
    for (const auto& r : results) all_pass = all_pass && r.pass;

    if (c.format == "csv") {
        std::cout.precision(17);
        std::cout << "suite,cases,worst,tol,status\r\n";
        for (const auto& r : results) {
            std::cout << r.name << ',' << r.cases << ',' << r.worst << ','
                      << r.tol << ',' << (r.pass ? "pass" : "fail")
                      << "\r\n";
        }
    } else {
        ordered_json suites = ordered_json::array();
        for (const auto& r : results) {
            suites.push_back({{"name", r.name},
                              {"cases", r.cases},
                              {"worst", r.worst},
                              {"tol", r.tol},
                              {"pass", r.pass}});
        }
        ordered_json out{{"model", "validate"},
                         {"suites", suites},
                         {"pass", all_pass},
                         {"runtime_ms", c.runtime_ms()}};
        std::cout << out.dump(2) << '\n';
    }
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    Cli c;
    CLI::App app{"closed-form and Monte Carlo option pricing driven by a "
                 "generalized fractional Brownian motion"};
    app.require_subcommand(1);

    auto* price_bs = app.add_subcommand(
        "price-bs", "closed-form lognormal call price");
    add_process_options(price_bs, c);
    add_market_options(price_bs, c);
    add_format_option(price_bs, c);

    auto* price_cev = app.add_subcommand(
        "price-cev", "closed-form CEV call price");
    add_process_options(price_cev, c);
    add_market_options(price_cev, c);
    add_format_option(price_cev, c);
    price_cev->add_option("--alpha", c.alpha, "elasticity exponent")
        ->required();

    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo call price with standard error");
    add_process_options(simulate, c);
    add_market_options(simulate, c);
    add_format_option(simulate, c);
    simulate->add_option("--model", c.model, "bs or cev")
        ->check(CLI::IsMember({"bs", "cev"}));
    simulate->add_option("--alpha", c.alpha, "elasticity (cev only)");
    simulate->add_option("--paths", c.paths, "number of paths");
    simulate->add_option("--steps", c.steps,
                         "time steps (cev needs at least 64)");
    simulate->add_option("--seed", c.seed, "rng seed");
    simulate->add_option("--dump-paths", c.dump_paths,
                         "write simulated paths to a CSV file");

    auto* density = app.add_subcommand(
        "density", "terminal price density over a spot range");
    add_process_options(density, c);
    add_market_options(density, c);
    add_format_option(density, c);
    density->add_option("--alpha", c.alpha,
                        "elasticity; omit for the lognormal model");
    density->add_option("--s-min", c.s_min, "range start")->required();
    density->add_option("--s-max", c.s_max, "range end")->required();
    density->add_option("--points", c.points, "number of rows");

    auto* validate = app.add_subcommand(
        "validate", "internal consistency suites");
    add_format_option(validate, c);
    validate->add_option("--suite", c.suite, "which suite to run")
        ->check(CLI::IsMember({"reductions", "phi", "qlimit", "parity",
                               "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (price_bs->parsed()) return run_price_bs(c);
        if (price_cev->parsed()) return run_price_cev(c);
        if (simulate->parsed()) return run_simulate(c);
        if (density->parsed())
            return run_density(c, density->count("--alpha") > 0);
        if (validate->parsed()) return run_validate(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
