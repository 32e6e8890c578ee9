// Prints call prices across driver families and Hurst indexes for one
// market, with the CEV price at matched volatility alongside.

#include <cmath>
#include <cstdio>

#include "gfbm/gfbm.hpp"

int main() {
    const gfbm::MarketParams m{100.0, 100.0, 0.05, 0.2, 1.0};
    const double w = 1.0 / std::sqrt(2.0);

    std::printf("market: s0=%.0f strike=%.0f rate=%.2f sigma=%.2f T=%.1f\n",
                m.s0, m.strike, m.rate, m.sigma, m.maturity);
    std::printf("%-22s %-6s %-12s %-12s\n", "driver", "hurst", "call",
                "cev(alpha=1.5)");

    for (double h : {0.3, 0.5, 0.7}) {
        struct Row {
            const char* name;
            gfbm::GfbmParams p;
        };
        const Row rows[] = {
            {"fractional", {1.0, 0.0, h}},
            {"sub-fractional", {w, w, h}},
            {"general(1,0.5)", {1.0, 0.5, h}},
        };
        for (const auto& row : rows) {
            const double call = gfbm::call_price(row.p, m).price;
            gfbm::MarketParams mc = m;
            mc.sigma = m.sigma * std::pow(m.s0, 1.0 - 0.75);
            const gfbm::CevParams c{mc, 1.5};
            const double cev = gfbm::call_price_cev(row.p, c).price;
            std::printf("%-22s %-6.2f %-12.6f %-12.6f\n", row.name, h, call,
                        cev);
        }
    }
    return 0;
}
