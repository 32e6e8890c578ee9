#ifndef GFBM_CEV_HPP
#define GFBM_CEV_HPP

// CEV dynamics dS = r S dt + sigma S^{alpha/2} dZ driven by the generalized
// process. The transformation y = S^{2-alpha} turns this into a Feller-type
// square-root diffusion
//
//   dy = (B y + C(t)) dt + sqrt(2 A(t) y) dW-equivalent,
//   A(t) = (2-alpha)^2 sigma^2 H K t^{2H-1},  B = (2-alpha) r,
//   C(t) = D A(t),  D = (1-alpha)/(2-alpha),
//
// with an absorbing barrier at y = 0. Two exponentially weighted integrals
// of A matter:
//
//   phi(t)             = integral_0^t A(s) e^{B s}     ds
//   transition_scale(t) = integral_0^t A(s) e^{B (t-s)} ds
//
// Both have Kummer closed forms, both reduce to the same expression at
// H = 1/2 (A constant) and when r = 0. The transition density and the call
// formula are governed by transition_scale; with time-independent A the
// distinction disappears, which is why a constant-coefficient treatment can
// use either. The split is pinned down here by three independent checks in
// the test suite: the Fokker-Planck residual of the density, the
// first-moment identity E[y_t] = y0 e^{Bt} + D * transition_scale(t), and
// agreement with the classical square-root-process density at H = 1/2.
//
// The call price is the discounted expectation of (S-e)+ under the
// sub-stochastic density, expressed through noncentral chi-square survival
// functions (Schroder's trick, branch-split at alpha = 2).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gfbm/bs.hpp"
#include "gfbm/process.hpp"
#include "gfbm/quadrature.hpp"
#include "gfbm/quote.hpp"
#include "gfbm/specfun.hpp"

namespace gfbm {

struct CevParams {
    MarketParams market;
    double alpha = 0.0;   // elasticity, != 2 (alpha = 2 is plain BS)

    void validate() const {
        market.validate();
        if (!std::isfinite(alpha) || alpha == 2.0)
            throw std::invalid_argument("cev: alpha must be finite and != 2");
    }
};

// Feller coefficients of the y-process at time t.
struct FellerCoefficients {
    double a = 0.0;  // diffusion scale, multiplies y
    double b = 0.0;  // linear drift rate
    double c = 0.0;  // constant drift, c = a*(1-alpha)/(2-alpha)
};

inline FellerCoefficients
drift_diffusion_coefficients(const GfbmParams& p, const CevParams& c,
                             double t) {
    c.validate();
    const double two_m_a = 2.0 - c.alpha;
    const double s2 = c.market.sigma * c.market.sigma;
    const double a = two_m_a * two_m_a * s2 * ito_drift_coeff(p, t);
    const double d = (1.0 - c.alpha) / two_m_a;
    return {a, two_m_a * c.market.rate, d * a};
}

namespace detail {

// shared constant: A(t) = 2 C0 H t^{2H-1} with C0 = (2-alpha)^2 sigma^2 K/2
inline double cev_c0(const GfbmParams& p, const CevParams& c) {
    const double two_m_a = 2.0 - c.alpha;
    return 0.5 * two_m_a * two_m_a * c.market.sigma * c.market.sigma
         * k_factor(p);
}

} // namespace detail

// phi(t) = integral_0^t A(s) e^{Bs} ds = C0 t^{2H} M(2H, 2H+1, Bt), using
// 2H integral_0^t s^{2H-1} e^{Bs} ds = t^{2H} M(2H, 2H+1, Bt). At H = 1/2,
// (a,b) = (1,0) this is (2-alpha) sigma^2 (e^{(2-alpha) r t} - 1)/(2r).
inline double phi(const GfbmParams& p, const CevParams& c, double t,
                  const SeriesControl& ctl = {}) {
    p.validate();
    c.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("phi: t must be > 0");
    const double h2 = 2.0 * p.hurst;
    const double bt = (2.0 - c.alpha) * c.market.rate * t;
    return detail::cev_c0(p, c) * std::pow(t, h2)
         * kummer_m(h2, h2 + 1.0, bt, ctl);
}

// Same integral by adaptive quadrature, the independent cross-check for
// phi. The substitution u = s^{2H} removes the s^{2H-1} endpoint
// singularity: integral becomes C0 integral_0^{t^{2H}} e^{B u^{1/(2H)}} du.
inline double phi_quadrature(const GfbmParams& p, const CevParams& c,
                             double t, const QuadControl& qctl = {}) {
    p.validate();
    c.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("phi_quadrature: t must be > 0");
    const double h2 = 2.0 * p.hurst;
    const double bb = (2.0 - c.alpha) * c.market.rate;
    const double inv = 1.0 / h2;
    auto f = [&](double u) { return std::exp(bb * std::pow(u, inv)); };
    return detail::cev_c0(p, c) * integrate(f, 0.0, std::pow(t, h2), qctl);
}

// transition_scale(t) = integral_0^t A(s) e^{B(t-s)} ds
//                     = C0 t^{2H} M(1, 2H+1, Bt),
// via the Kummer transform e^{Bt} M(2H, 2H+1, -Bt) = M(1, 2H+1, Bt). This
// is the variance-like scale of the transition density at horizon t; its
// reciprocal at maturity is the density normalization k.
inline double transition_scale(const GfbmParams& p, const CevParams& c,
                               double t, const SeriesControl& ctl = {}) {
    p.validate();
    c.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("transition_scale: t must be > 0");
    const double h2 = 2.0 * p.hurst;
    const double bt = (2.0 - c.alpha) * c.market.rate * t;
    return detail::cev_c0(p, c) * std::pow(t, h2)
         * kummer_m(1.0, h2 + 1.0, bt, ctl);
}

// Constants of the pricing formula at maturity.
struct CevTransform {
    double scale = 0.0;  // transition_scale(T)
    double k = 0.0;      // 1/scale
    double l = 0.0;      // k * s0^{2-alpha} * e^{BT}
    double f = 0.0;      // k * strike^{2-alpha}
    double theta = 0.0;  // Bessel order 1/|2-alpha|
};

inline CevTransform transform(const GfbmParams& p, const CevParams& c) {
    const double t_mat = c.market.maturity;
    const double two_m_a = 2.0 - c.alpha;
    CevTransform tr;
    tr.scale = transition_scale(p, c, t_mat);
    tr.k = 1.0 / tr.scale;
    tr.l = tr.k * std::pow(c.market.s0, two_m_a)
         * std::exp(two_m_a * c.market.rate * t_mat);
    tr.f = tr.k * std::pow(c.market.strike, two_m_a);
    tr.theta = 1.0 / std::fabs(two_m_a);
    return tr;
}

// Transition density of y at time t started from y0, absorbing at 0:
//
//   p(y,t|y0) = (1/s) (y/x)^{(D-1)/2} e^{-(y+x)/s} I_theta(2 sqrt(x y)/s)
//
// with s = transition_scale(t), x = y0 e^{Bt}, D = (1-alpha)/(2-alpha),
// theta = |D-1| = 1/|2-alpha|. Evaluated in log space; for alpha < 2 the
// mass on (0,inf) is P(theta, x/s) < 1, the deficit being the absorption
// probability; for alpha > 2 (D > 1) the origin is unreachable and the
// density integrates to 1.
inline double transition_density_y(const GfbmParams& p, const CevParams& c,
                                   double y0, double y, double t,
                                   const SeriesControl& ctl = {}) {
    c.validate();
    if (!(y0 > 0.0) || !(y > 0.0))
        throw std::invalid_argument("transition_density_y: y0, y must be > 0");
    const double two_m_a = 2.0 - c.alpha;
    const double s = transition_scale(p, c, t, ctl);
    const double x = y0 * std::exp(two_m_a * c.market.rate * t);
    const double d = (1.0 - c.alpha) / two_m_a;
    const double theta = 1.0 / std::fabs(two_m_a);
    const double lb = log_bessel_i(theta, 2.0 * std::sqrt(x * y) / s, ctl);
    const double ld = -std::log(s) + 0.5 * (d - 1.0) * (std::log(y) - std::log(x))
                    - (y + x) / s + lb;
    return std::exp(ld);
}

// Density of S_t itself: push through y = S^{2-alpha} with the absolute
// Jacobian |2-alpha| S^{1-alpha}.
inline double transition_density_s(const GfbmParams& p, const CevParams& c,
                                   double s_t, double t,
                                   const SeriesControl& ctl = {}) {
    c.validate();
    if (!(s_t > 0.0))
        throw std::invalid_argument("transition_density_s: s must be > 0");
    const double two_m_a = 2.0 - c.alpha;
    const double y = std::pow(s_t, two_m_a);
    const double y0 = std::pow(c.market.s0, two_m_a);
    return std::fabs(two_m_a) * std::pow(s_t, 1.0 - c.alpha)
         * transition_density_y(p, c, y0, y, t, ctl);
}

// Probability that the price has been absorbed at zero by time t
// (alpha < 2 only; the origin is unreachable for alpha > 2).
inline double absorption_probability(const GfbmParams& p, const CevParams& c,
                                     double t) {
    c.validate();
    if (c.alpha > 2.0) return 0.0;
    const double two_m_a = 2.0 - c.alpha;
    const double s = transition_scale(p, c, t);
    const double x = std::pow(c.market.s0, two_m_a)
                   * std::exp(two_m_a * c.market.rate * t);
    return reg_upper_gamma(1.0 / two_m_a, x / s);
}

// European call: both branches price by nested noncentral chi-square
// survival functions of the transformed constants.
inline PriceQuote call_price_cev(const GfbmParams& p, const CevParams& c) {
    const CevTransform tr = transform(p, c);
    const MarketParams& m = c.market;
    const double disc = m.strike * std::exp(-m.rate * m.maturity);
    // arguments near alpha = 2 blow up like 1/(2-alpha)^2, so give the
    // mixture a deep term budget
    const SeriesControl ctl{1e-14, 500000};
    double price;
    if (c.alpha < 2.0) {
        const double n1 = 2.0 + 2.0 / (2.0 - c.alpha);
        const double n2 = 2.0 / (2.0 - c.alpha);
        price = m.s0 * noncentral_chi2_sf(2.0 * tr.f, n1, 2.0 * tr.l, ctl)
              - disc * (1.0 - noncentral_chi2_sf(2.0 * tr.l, n2, 2.0 * tr.f, ctl));
    } else {
        const double n1 = 2.0 / (c.alpha - 2.0);
        const double n2 = 2.0 + 2.0 / (c.alpha - 2.0);
        price = m.s0 * noncentral_chi2_sf(2.0 * tr.l, n1, 2.0 * tr.f, ctl)
              - disc * (1.0 - noncentral_chi2_sf(2.0 * tr.f, n2, 2.0 * tr.l, ctl));
    }
    return {price, 0.0, Provenance::formula};
}

// Gap between the CEV price and the BS price as alpha walks toward 2. The
// CEV volatility is rescaled per point, sigma_cev = sigma_bs * s0^{1-alpha/2},
// so the local volatility at the spot matches the BS one.
struct AlphaGapRow {
    double alpha = 0.0;
    double cev_price = 0.0;
    double bs_price = 0.0;
    double gap = 0.0;
};

inline std::vector<AlphaGapRow>
bs_limit_gap(const GfbmParams& p, const MarketParams& m,
             const std::vector<double>& alphas) {
    const double bs = call_price(p, m).price;
    std::vector<AlphaGapRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        CevParams c{m, alpha};
        c.market.sigma = m.sigma * std::pow(m.s0, 1.0 - 0.5 * alpha);
        const double cev = call_price_cev(p, c).price;
        rows.push_back({alpha, cev, bs, std::fabs(cev - bs)});
    }
    return rows;
}

} // namespace gfbm

#endif
