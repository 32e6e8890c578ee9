#ifndef GFBM_BS_HPP
#define GFBM_BS_HPP

// Black-Scholes pricing driven by the generalized process. The log price
// x = ln S - r t is Gaussian with
//
//   mean = ln s0 - (1/2) sigma^2 K t^{2H},   variance = sigma^2 K t^{2H},
//
// so every formula below is the classical one with the total variance
// sigma^2 T swapped for sigma^2 K T^{2H}. Setting (a,b,H) = (1,0,1/2) gives
// K = 1 and recovers the textbook results exactly.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gfbm/process.hpp"
#include "gfbm/quote.hpp"
#include "gfbm/specfun.hpp"

namespace gfbm {

struct MarketParams {
    double s0 = 0.0;       // spot
    double strike = 0.0;
    double rate = 0.0;     // continuously compounded
    double sigma = 0.0;    // volatility on the model's own time scale
    double maturity = 0.0;

    void validate() const {
        if (!(std::isfinite(s0) && s0 > 0.0))
            throw std::invalid_argument("market: s0 must be > 0");
        if (!(std::isfinite(strike) && strike > 0.0))
            throw std::invalid_argument("market: strike must be > 0");
        if (!std::isfinite(rate))
            throw std::invalid_argument("market: rate must be finite");
        if (!(std::isfinite(sigma) && sigma > 0.0))
            throw std::invalid_argument("market: sigma must be > 0");
        if (!(std::isfinite(maturity) && maturity > 0.0))
            throw std::invalid_argument("market: maturity must be > 0");
    }
};

struct GaussianLaw {
    double mean = 0.0;
    double variance = 0.0;
};

// Law of x_t = ln S_t - r t started from x_0 = ln s0.
inline GaussianLaw log_price_law(const GfbmParams& p, const MarketParams& m,
                                 double t) {
    p.validate();
    m.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("log_price_law: t must be > 0");
    const double v = m.sigma * m.sigma * variance(p, t);
    return {std::log(m.s0) - 0.5 * v, v};
}

// Density of S at maturity: lognormal from the law above with the r t drift
// put back, so ln S_T has mean ln s0 + r T - v/2 and variance v.
inline double price_density(const GfbmParams& p, const MarketParams& m,
                            double s_t) {
    if (!(s_t > 0.0))
        throw std::invalid_argument("price_density: s must be > 0");
    const GaussianLaw law = log_price_law(p, m, m.maturity);
    const double mu = law.mean + m.rate * m.maturity;
    const double z = std::log(s_t) - mu;
    return std::exp(-0.5 * z * z / law.variance)
         / (s_t * std::sqrt(2.0 * M_PI * law.variance));
}

inline std::pair<double, double> d1_d2(const GfbmParams& p,
                                       const MarketParams& m) {
    p.validate();
    m.validate();
    const double v = m.sigma * m.sigma * variance(p, m.maturity);
    const double sv = std::sqrt(v);
    const double d1 =
        (std::log(m.s0 / m.strike) + m.rate * m.maturity + 0.5 * v) / sv;
    return {d1, d1 - sv};
}

inline PriceQuote call_price(const GfbmParams& p, const MarketParams& m) {
    const auto [d1, d2] = d1_d2(p, m);
    const double c = m.s0 * normal_cdf(d1)
                   - m.strike * std::exp(-m.rate * m.maturity) * normal_cdf(d2);
    return {c, 0.0, Provenance::formula};
}

// Parity against the call; the risk-neutral density has mean s0 e^{rT}, so
// call - put = s0 - strike e^{-rT} holds for every (a,b,H).
inline PriceQuote put_price(const GfbmParams& p, const MarketParams& m) {
    const double c = call_price(p, m).price;
    return {c - m.s0 + m.strike * std::exp(-m.rate * m.maturity), 0.0,
            Provenance::formula};
}

// Special-case formulas written out on their own, used as reduction
// oracles. Each assumes the canonical weights of its case: (1,0) for the
// fractional and standard forms, (1/sqrt 2, 1/sqrt 2) for the
// sub-fractional one.

inline double standard_call(const MarketParams& m) {
    m.validate();
    const double st = m.sigma * std::sqrt(m.maturity);
    const double d1 = (std::log(m.s0 / m.strike)
                    + (m.rate + 0.5 * m.sigma * m.sigma) * m.maturity) / st;
    return m.s0 * normal_cdf(d1)
         - m.strike * std::exp(-m.rate * m.maturity) * normal_cdf(d1 - st);
}

inline double fractional_call(const MarketParams& m, double hurst) {
    m.validate();
    const double th = std::pow(m.maturity, hurst);
    const double d1 = (std::log(m.s0 / m.strike) + m.rate * m.maturity
                    + 0.5 * m.sigma * m.sigma * th * th) / (m.sigma * th);
    return m.s0 * normal_cdf(d1)
         - m.strike * std::exp(-m.rate * m.maturity)
             * normal_cdf(d1 - m.sigma * th);
}

inline double sub_fractional_call(const MarketParams& m, double hurst) {
    m.validate();
    // unit-weight normalization carries variance factor 2 - 2^{2H-1}
    const double ksf = 2.0 - std::exp2(2.0 * hurst - 1.0);
    const double v = m.sigma * m.sigma * ksf
                   * std::pow(m.maturity, 2.0 * hurst);
    const double sv = std::sqrt(v);
    const double d1 =
        (std::log(m.s0 / m.strike) + m.rate * m.maturity + 0.5 * v) / sv;
    return m.s0 * normal_cdf(d1)
         - m.strike * std::exp(-m.rate * m.maturity) * normal_cdf(d1 - sv);
}

struct ReductionReport {
    ProcessKind kind = ProcessKind::general;
    double general_price = 0.0;
    double reduced_price = 0.0;
    double gap = 0.0;
};

// Prices through the general formula and through the matching special-case
// formula, reporting the absolute gap. Only meaningful for the three
// special kinds at their canonical weights.
inline ReductionReport reduction_report(const GfbmParams& p,
                                        const MarketParams& m) {
    ReductionReport rep;
    rep.kind = classify(p);
    rep.general_price = call_price(p, m).price;
    switch (rep.kind) {
        case ProcessKind::standard_bm:
            rep.reduced_price = standard_call(m);
            break;
        case ProcessKind::fractional_bm:
            rep.reduced_price = fractional_call(m, p.hurst);
            break;
        case ProcessKind::sub_fractional_bm:
            rep.reduced_price = sub_fractional_call(m, p.hurst);
            break;
        case ProcessKind::general:
            throw std::invalid_argument(
                "reduction_report: no special-case formula for a general process");
    }
    rep.gap = std::fabs(rep.general_price - rep.reduced_price);
    return rep;
}

} // namespace gfbm

#endif
