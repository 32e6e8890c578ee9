#ifndef GFBM_PROCESS_HPP
#define GFBM_PROCESS_HPP

// Generalized fractional Brownian motion Z_t = a*B^H_t + b*B^H_{-t}, built
// from one two-sided fractional Brownian motion B^H. The weights (a,b) and
// the Hurst exponent H pin down the whole second-order structure; everything
// downstream (pricing, sampling, density evolution) consumes the three
// quantities defined here: the variance factor K, the covariance kernel, and
// the time-dependent Ito drift coefficient.

#include <cmath>
#include <stdexcept>

#include "gfbm/errors.hpp"

namespace gfbm {

struct GfbmParams {
    double a;
    double b;
    double hurst;

    void validate() const {
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(hurst))
            throw std::invalid_argument("gfbm: parameters must be finite");
        if (a == 0.0 && b == 0.0)
            throw std::invalid_argument("gfbm: (a,b) = (0,0) is degenerate");
        if (!(hurst > 0.0 && hurst < 1.0))
            throw std::invalid_argument("gfbm: hurst must lie in (0,1)");
    }
};

enum class ProcessKind {
    standard_bm,
    fractional_bm,
    sub_fractional_bm,
    general,
};

namespace detail {

// t^p evaluated as exp(p*log t); 0^p = 0 for p > 0.
inline double pow_pos(double t, double p) {
    if (t == 0.0) return 0.0;
    return std::exp(p * std::log(t));
}

} // namespace detail

// K = (a+b)^2 - 2^{2H} a b.  Var[Z_t] = K t^{2H}.  Strictly positive for
// every admissible (a,b,H): write K = a^2 + b^2 + (2 - 2^{2H}) ab and note
// |2 - 2^{2H}| < 2 on H in (0,1).
inline double k_factor(const GfbmParams& p) {
    p.validate();
    return (p.a + p.b) * (p.a + p.b)
         - std::exp2(2.0 * p.hurst) * p.a * p.b;
}

// Cov[Z_s, Z_t] for s,t >= 0.
inline double covariance(const GfbmParams& p, double s, double t) {
    p.validate();
    if (s < 0.0 || t < 0.0)
        throw std::invalid_argument("gfbm: covariance needs s,t >= 0");
    const double h2 = 2.0 * p.hurst;
    const double apb = p.a + p.b;
    return 0.5 * apb * apb * (detail::pow_pos(s, h2) + detail::pow_pos(t, h2))
         - p.a * p.b * detail::pow_pos(s + t, h2)
         - 0.5 * (p.a * p.a + p.b * p.b) * detail::pow_pos(std::fabs(t - s), h2);
}

inline double variance(const GfbmParams& p, double t) {
    if (t < 0.0)
        throw std::invalid_argument("gfbm: variance needs t >= 0");
    return k_factor(p) * detail::pow_pos(t, 2.0 * p.hurst);
}

// Coefficient H K t^{2H-1} = (1/2) d/dt Var[Z_t]; this is what replaces the
// usual 1/2 sigma^2 factor in the Ito/Fokker-Planck calculus for Z.
// Diverges as t -> 0 when H < 1/2, so t = 0 is rejected; integrators start
// from a configurable t0 > 0 instead.
inline double ito_drift_coeff(const GfbmParams& p, double t) {
    if (!(t > 0.0))
        throw std::invalid_argument("gfbm: ito_drift_coeff needs t > 0");
    return p.hurst * k_factor(p) * detail::pow_pos(t, 2.0 * p.hurst - 1.0);
}

// Tags use exact comparisons on purpose: the named special cases are exact
// parameter choices, not numerical neighborhoods. Tags drive reporting only.
inline ProcessKind classify(const GfbmParams& p) {
    p.validate();
    if (p.b == 0.0)
        return p.hurst == 0.5 ? ProcessKind::standard_bm
                              : ProcessKind::fractional_bm;
    if (p.a == p.b) return ProcessKind::sub_fractional_bm;
    return ProcessKind::general;
}

inline const char* to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::standard_bm:       return "standard-bm";
        case ProcessKind::fractional_bm:     return "fractional-bm";
        case ProcessKind::sub_fractional_bm: return "sub-fractional-bm";
        default:                             return "general";
    }
}

} // namespace gfbm

#endif
