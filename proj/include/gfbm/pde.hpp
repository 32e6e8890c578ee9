#ifndef GFBM_PDE_HPP
#define GFBM_PDE_HPP

// Finite-difference check of the Fokker-Planck equations the closed-form
// densities must satisfy:
//
//   BS, in x = ln S - r t:   dP/dt = c(t) (P_xx + P_x),
//                            c(t) = sigma^2 H K t^{2H-1}
//   CEV, in y = S^{2-alpha}: dP/dt = (A(t) y P)_yy - ((B y + C(t)) P)_y
//
// Two kinds of checks: evolve the PDE forward by Crank-Nicolson starting
// from the closed form at t0 and compare the slice at t1 against the closed
// form there, and plug a density callable straight into the operator with
// central differences (residual_check). The latter is the sharp arbiter:
// a density carrying the wrong scale or orientation fails it by orders of
// magnitude while still looking plausible to the eye.
//
// Dirac initial data is replaced by the closed-form density at a small
// t0 > 0; a discrete spike would wreck the scheme's order for nothing.
// Time-dependent coefficients enter at the half step t + dt/2.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gfbm/bs.hpp"
#include "gfbm/cev.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/process.hpp"

namespace gfbm {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_x = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    int n_t = 0;

    void validate() const {
        if (!(x_min < x_max))
            throw std::invalid_argument("grid1d: x_min < x_max required");
        if (n_x < 16)
            throw std::invalid_argument("grid1d: n_x >= 16 required");
        if (!(0.0 < t0 && t0 < t1))
            throw std::invalid_argument("grid1d: 0 < t0 < t1 required");
        if (n_t < 16)
            throw std::invalid_argument("grid1d: n_t >= 16 required");
    }
};

struct DensitySlice {
    std::vector<double> x;
    std::vector<double> density;
    double time = 0.0;
    double mass = 0.0;
    double absorbed_mass = 0.0;
};

namespace detail {

inline void thomas_solve(std::vector<double>& sub, std::vector<double>& diag,
                         std::vector<double>& sup, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

inline double trapezoid_mass(const std::vector<double>& x,
                             const std::vector<double>& p) {
    double m = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        m += 0.5 * (p[i] + p[i - 1]) * (x[i] - x[i - 1]);
    return m;
}

} // namespace detail

// Crank-Nicolson evolution of the BS log-price density from t0 to t1 on a
// uniform x grid with zero Dirichlet walls. Wide domains leak essentially
// nothing, so mass drifting past mass_tol signals an unstable run.
inline DensitySlice evolve_fp_bs(const GfbmParams& p, const MarketParams& m,
                                 const Grid1D& g, double mass_tol = 1e-2) {
    p.validate();
    m.validate();
    g.validate();
    const std::size_t n = static_cast<std::size_t>(g.n_x);
    const double dx = (g.x_max - g.x_min) / static_cast<double>(n - 1);
    std::vector<double> xs(n), dens(n);
    const GaussianLaw law = log_price_law(p, m, g.t0);
    const double sd = std::sqrt(law.variance);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = g.x_min + dx * static_cast<double>(i);
        dens[i] = normal_pdf((xs[i] - law.mean) / sd) / sd;
    }
    dens.front() = dens.back() = 0.0;
    const double mass0 = detail::trapezoid_mass(xs, dens);

    const double dt = (g.t1 - g.t0) / static_cast<double>(g.n_t);
    const double w_lo = 1.0 / (dx * dx) - 0.5 / dx;  // P_{i-1} weight in L
    const double w_cc = -2.0 / (dx * dx);
    const double w_hi = 1.0 / (dx * dx) + 0.5 / dx;
    const std::size_t ni = n - 2;
    std::vector<double> sub(ni), diag(ni), sup(ni), rhs(ni);
    for (int k = 0; k < g.n_t; ++k) {
        const double tmid = g.t0 + (static_cast<double>(k) + 0.5) * dt;
        const double beta =
            0.5 * dt * m.sigma * m.sigma * ito_drift_coeff(p, tmid);
        for (std::size_t i = 0; i < ni; ++i) {
            sub[i] = -beta * w_lo;
            diag[i] = 1.0 - beta * w_cc;
            sup[i] = -beta * w_hi;
            rhs[i] = dens[i + 1]
                   + beta * (w_lo * dens[i] + w_cc * dens[i + 1]
                           + w_hi * dens[i + 2]);
        }
        detail::thomas_solve(sub, diag, sup, rhs);
        for (std::size_t i = 0; i < ni; ++i) dens[i + 1] = rhs[i];
    }
    const double mass = detail::trapezoid_mass(xs, dens);
    if (!std::isfinite(mass)
        || std::fabs(mass - mass0) > mass_tol * std::max(1.0, mass0))
        throw InstabilityError("evolve_fp_bs: mass drifted beyond tolerance");
    return {std::move(xs), std::move(dens), g.t1, mass, 0.0};
}

// Crank-Nicolson for the transformed CEV density on (0, y_max]: node 0 is
// the absorbing origin (density pinned at zero), the interior is log-spaced
// between x_min > 0 and x_max to resolve the barrier. Mass only leaves;
// the deficit against the starting mass is reported as absorbed (plus
// whatever leaks through the far wall, negligible on wide domains).
inline DensitySlice evolve_fp_cev(const GfbmParams& p, const CevParams& c,
                                  const Grid1D& g, double mass_tol = 1e-6) {
    p.validate();
    c.validate();
    g.validate();
    if (!(g.x_min > 0.0))
        throw std::invalid_argument("evolve_fp_cev: x_min must be > 0");
    const std::size_t nlog = static_cast<std::size_t>(g.n_x);
    const std::size_t n = nlog + 1;  // plus the absorbing node at 0
    std::vector<double> ys(n), dens(n);
    ys[0] = 0.0;
    const double dlog =
        std::log(g.x_max / g.x_min) / static_cast<double>(nlog - 1);
    const double y0 = std::pow(c.market.s0, 2.0 - c.alpha);
    for (std::size_t i = 0; i < nlog; ++i) {
        ys[i + 1] = g.x_min * std::exp(dlog * static_cast<double>(i));
        dens[i + 1] = transition_density_y(p, c, y0, ys[i + 1], g.t0);
    }
    dens.front() = dens.back() = 0.0;
    const double mass0 = detail::trapezoid_mass(ys, dens);

    // stencil weights on the nonuniform grid, exact for quadratics
    const std::size_t ni = n - 2;
    std::vector<double> d2m(ni), d2c(ni), d2p(ni), d1m(ni), d1c(ni), d1p(ni);
    for (std::size_t i = 0; i < ni; ++i) {
        const double hm = ys[i + 1] - ys[i];
        const double hp = ys[i + 2] - ys[i + 1];
        d2m[i] = 2.0 / (hm * (hm + hp));
        d2c[i] = -2.0 / (hm * hp);
        d2p[i] = 2.0 / (hp * (hm + hp));
        d1m[i] = -hp / (hm * (hm + hp));
        d1c[i] = (hp - hm) / (hm * hp);
        d1p[i] = hm / (hp * (hm + hp));
    }

    const double dt = (g.t1 - g.t0) / static_cast<double>(g.n_t);
    std::vector<double> sub(ni), diag(ni), sup(ni), rhs(ni);
    double prev_mass = mass0;
    for (int k = 0; k < g.n_t; ++k) {
        const double tmid = g.t0 + (static_cast<double>(k) + 0.5) * dt;
        const auto co = drift_diffusion_coefficients(p, c, tmid);
        const double beta = 0.5 * dt;
        for (std::size_t i = 0; i < ni; ++i) {
            // L weights for (A y P)_yy - ((B y + C) P)_y at node i+1
            const double lm = d2m[i] * co.a * ys[i]
                            - d1m[i] * (co.b * ys[i] + co.c);
            const double lc = d2c[i] * co.a * ys[i + 1]
                            - d1c[i] * (co.b * ys[i + 1] + co.c);
            const double lp = d2p[i] * co.a * ys[i + 2]
                            - d1p[i] * (co.b * ys[i + 2] + co.c);
            sub[i] = -beta * lm;
            diag[i] = 1.0 - beta * lc;
            sup[i] = -beta * lp;
            rhs[i] = dens[i + 1]
                   + beta * (lm * dens[i] + lc * dens[i + 1]
                           + lp * dens[i + 2]);
        }
        detail::thomas_solve(sub, diag, sup, rhs);
        for (std::size_t i = 0; i < ni; ++i) dens[i + 1] = rhs[i];
        const double mass = detail::trapezoid_mass(ys, dens);
        if (!std::isfinite(mass) || mass > prev_mass + mass_tol * mass0)
            throw InstabilityError("evolve_fp_cev: mass increased");
        prev_mass = mass;
    }
    return {std::move(ys), std::move(dens), g.t1, prev_mass,
            mass0 - prev_mass};
}

// Max |P_t - c(t)(P_xx + P_x)| over the sample points, normalized by
// max |P_t|. The density argument is a callable so deliberately corrupted
// densities can be probed as a sensitivity control.
inline double residual_check(const std::function<double(double, double)>& density,
                             const GfbmParams& p, const MarketParams& m,
                             const std::vector<double>& xs, double t,
                             double hx = 1e-4, double ht = 1e-4) {
    p.validate();
    m.validate();
    if (!(t - ht > 0.0))
        throw std::invalid_argument("residual_check: need t - ht > 0");
    const double c0 = m.sigma * m.sigma * ito_drift_coeff(p, t);
    double worst = 0.0, scale = 0.0;
    for (double x : xs) {
        const double pt =
            (density(x, t + ht) - density(x, t - ht)) / (2.0 * ht);
        const double pc = density(x, t);
        const double pp = density(x + hx, t);
        const double pm = density(x - hx, t);
        const double pxx = (pp - 2.0 * pc + pm) / (hx * hx);
        const double px = (pp - pm) / (2.0 * hx);
        worst = std::max(worst, std::fabs(pt - c0 * (pxx + px)));
        scale = std::max(scale, std::fabs(pt));
    }
    if (scale == 0.0)
        throw std::invalid_argument(
            "residual_check: density is time-flat at the sample points");
    return worst / scale;
}

// Same for the CEV operator (A y P)_yy - ((B y + C) P)_y.
inline double residual_check(const std::function<double(double, double)>& density,
                             const GfbmParams& p, const CevParams& c,
                             const std::vector<double>& ys, double t,
                             double hy = 1e-4, double ht = 1e-4) {
    p.validate();
    c.validate();
    if (!(t - ht > 0.0))
        throw std::invalid_argument("residual_check: need t - ht > 0");
    const auto co = drift_diffusion_coefficients(p, c, t);
    double worst = 0.0, scale = 0.0;
    for (double y : ys) {
        const double pt =
            (density(y, t + ht) - density(y, t - ht)) / (2.0 * ht);
        const double pc = density(y, t);
        const double pp = density(y + hy, t);
        const double pm = density(y - hy, t);
        const double gyy = (co.a * (y + hy) * pp - 2.0 * co.a * y * pc
                          + co.a * (y - hy) * pm) / (hy * hy);
        const double fy = ((co.b * (y + hy) + co.c) * pp
                         - (co.b * (y - hy) + co.c) * pm) / (2.0 * hy);
        worst = std::max(worst, std::fabs(pt - (gyy - fy)));
        scale = std::max(scale, std::fabs(pt));
    }
    if (scale == 0.0)
        throw std::invalid_argument(
            "residual_check: density is time-flat at the sample points");
    return worst / scale;
}

} // namespace gfbm

#endif
