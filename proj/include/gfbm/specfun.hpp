#ifndef GFBM_SPECFUN_HPP
#define GFBM_SPECFUN_HPP

// Self-contained special-function kernel. Everything is built from
// elementary functions (exp, log, sqrt, cos); no erf, tgamma or Bessel from
// the platform. The pricing formulas need exactly this set:
//
//   ln_gamma            Lanczos approximation
//   reg_lower_gamma     P(s,x), series for x < s+1, continued fraction above
//   normal_cdf          from P(1/2, x^2/2), which is the Gaussian integral
//   log_bessel_i        ascending series, summed in log space
//   kummer_m            confluent hypergeometric 1F1
//   whittaker_m         Kummer with the standard prefactor
//   noncentral_chi2_sf  Poisson mixture of central chi-square tails, summed
//                       outward from the modal Poisson weight
//   q_normal_limit      Gaussian approximation to the above for huge df
//
// Series share one knob, SeriesControl: an absolute term tolerance and a
// term budget. Exhausting the budget throws NonConvergenceError rather than
// returning a silently truncated value.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "gfbm/errors.hpp"

namespace gfbm {

struct SeriesControl {
    double abs_tol = 1e-14;
    long max_terms = 100000;

    void validate() const {
        if (!(abs_tol > 0.0))
            throw std::invalid_argument("specfun: abs_tol must be > 0");
        if (max_terms < 1)
            throw std::invalid_argument("specfun: max_terms must be >= 1");
    }
};

// ln Gamma(x), x > 0. Lanczos, g = 7, 9 coefficients; relative error below
// 1e-13 over the positive axis once the recursion x -> x+1 lifts arguments
// past 0.5.
inline double ln_gamma(double x) {
    if (!(x > 0.0))
        throw std::invalid_argument("specfun: ln_gamma needs x > 0");
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (x < 0.5) {
        // Gamma(x) = Gamma(x+1)/x
        return ln_gamma(x + 1.0) - std::log(x);
    }
    const double z = x - 1.0;
    double s = c[0];
    for (int i = 1; i < 9; ++i) s += c[i] / (z + i);
    const double t = z + 7.5;
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(s);
}

namespace detail {

// Stirling remainder ln Gamma(s+1) - [0.5 ln(2 pi s) + s ln s - s]. The
// truncated 1/s series is below machine epsilon for s >= 15; smaller s go
// through ln_gamma directly, where no magnitudes are large enough to hurt.
inline double stirlerr(double s) {
    constexpr double half_log_two_pi = 0.91893853320467274178;
    if (s < 15.0)
        return ln_gamma(s + 1.0) - (s + 0.5) * std::log(s) + s
             - half_log_two_pi;
    const double z = 1.0 / (s * s);
    return (1.0 / 12.0
            - (1.0 / 360.0
               - (1.0 / 1260.0 - (1.0 / 1680.0 - z / 1188.0) * z) * z)
                  * z)
         / s;
}

// Binomial deviance bd0(s,y) = s ln(s/y) + y - s >= 0. Near s = y the
// direct form cancels catastrophically, so it switches to the even series
// in v = (s-y)/(s+y), which keeps full precision exactly where e^{-bd0}
// is large enough to matter.
inline double bd0(double s, double y) {
    if (std::fabs(s - y) < 0.1 * (s + y)) {
        const double v = (s - y) / (s + y);
        const double v2 = v * v;
        double acc = (s - y) * v;
        double ej = 2.0 * s * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double next = acc + ej / (2.0 * j + 1.0);
            if (next == acc) return next;
            acc = next;
        }
    }
    return s * std::log(s / y) + y - s;
}

// ln( y^s e^{-y} / Gamma(s+1) ), the log Poisson/gamma term. Assembling it
// as s ln y - y - ln Gamma(s+1) loses absolute precision proportional to
// the magnitude of s ln y; the saddle form keeps every summand O(1) near
// the mode s ~ y, where the term is non-negligible.
inline double log_gamma_term(double s, double y) {
    constexpr double half_log_two_pi = 0.91893853320467274178;
    if (s == 0.0) return -y;
    return -stirlerr(s) - bd0(s, y) - 0.5 * std::log(s) - half_log_two_pi;
}

// Lower regularized gamma by its ascending series; good for x < s + 1.
inline double gamma_p_series(double s, double x) {
    double sum = 1.0 / s;
    double term = sum;
    double ap = s;
    for (long k = 0; k < 10000000; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17)
            return sum * std::exp(std::log(s) + log_gamma_term(s, x));
    }
    throw NonConvergenceError("specfun: gamma series stalled");
}

// Upper regularized gamma by the Lentz continued fraction; good for
// x >= s + 1.
inline double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long k = 1; k < 10000000; ++k) {
        const double an = -static_cast<double>(k) * (k - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            return h * std::exp(std::log(s) + log_gamma_term(s, x));
    }
    throw NonConvergenceError("specfun: gamma continued fraction stalled");
}

} // namespace detail

// P(s,x) = gamma(s,x)/Gamma(s), s > 0, x >= 0.
inline double reg_lower_gamma(double s, double x) {
    if (!(s > 0.0))
        throw std::invalid_argument("specfun: reg_lower_gamma needs s > 0");
    if (x < 0.0)
        throw std::invalid_argument("specfun: reg_lower_gamma needs x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::gamma_p_series(s, x);
    return 1.0 - detail::gamma_q_cf(s, x);
}

// Q(s,x) = 1 - P(s,x), computed on whichever side keeps relative accuracy.
inline double reg_upper_gamma(double s, double x) {
    if (!(s > 0.0))
        throw std::invalid_argument("specfun: reg_upper_gamma needs s > 0");
    if (x < 0.0)
        throw std::invalid_argument("specfun: reg_upper_gamma needs x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
    return detail::gamma_q_cf(s, x);
}

// Standard normal CDF without erf: for x >= 0,
//   N(x) = 1/2 + 1/2 P(1/2, x^2/2),
// since P(1/2, x^2/2) is exactly the central Gaussian mass on [-x, x].
// The x < 0 branch goes through the continued fraction directly so the far
// tail keeps relative (not just absolute) accuracy.
inline double normal_cdf(double x) {
    if (x == 0.0) return 0.5;
    const double u = 0.5 * x * x;
    if (x > 0.0) {
        if (u < 1.5) return 0.5 + 0.5 * detail::gamma_p_series(0.5, u);
        return 1.0 - 0.5 * detail::gamma_q_cf(0.5, u);
    }
    if (u < 1.5) return 0.5 - 0.5 * detail::gamma_p_series(0.5, u);
    return 0.5 * detail::gamma_q_cf(0.5, u);
}

inline double normal_pdf(double x) {
    constexpr double inv_sqrt_two_pi = 0.39894228040143267794;
    return inv_sqrt_two_pi * std::exp(-0.5 * x * x);
}

// ln I_nu(x) by the ascending series
//   I_nu(x) = sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)),
// accumulated as a streaming log-sum-exp so arguments far beyond the
// overflow point of I itself stay representable. Requires nu > -1 (all
// series terms then share one sign) and x >= 0.
inline double log_bessel_i(double nu, double x,
                           const SeriesControl& ctl = {}) {
    ctl.validate();
    if (!(nu > -1.0))
        throw std::invalid_argument("specfun: log_bessel_i needs nu > -1");
    if (x < 0.0)
        throw std::invalid_argument("specfun: log_bessel_i needs x >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        return -std::numeric_limits<double>::infinity();
    }
    // Large arguments: the ascending series needs ~x/2 terms, while the
    // Hankel expansion I_nu(x) ~ e^x/sqrt(2 pi x) sum_k a_k converges to
    // machine precision in a handful once x dominates 4 nu^2.
    if (x >= 30.0 * std::max(1.0, nu * nu)) {
        const double mu = 4.0 * nu * nu;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 40; ++k) {
            const double odd = 2.0 * k - 1.0;
            term *= -(mu - odd * odd) / (8.0 * x * k);
            const double next = sum + term;
            if (next == sum) break;
            sum = next;
        }
        return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(sum);
    }
    const double lh = std::log(0.5 * x);
    double lt = nu * lh - ln_gamma(nu + 1.0);  // log of the k = 0 term
    double lmax = lt;
    double sum = 1.0;
    const double log_tol = std::log(ctl.abs_tol) - 40.0;
    for (long k = 0; k < ctl.max_terms; ++k) {
        lt += 2.0 * lh - std::log((k + 1.0) * (nu + k + 1.0));
        if (lt > lmax) {
            sum = sum * std::exp(lmax - lt) + 1.0;
            lmax = lt;
        } else {
            const double rel = lt - lmax;
            sum += std::exp(rel);
            // once terms decay and are negligible relative to the running
            // peak, the remaining tail is geometric and below tolerance
            if (rel < log_tol && 2.0 * lh < std::log((k + 2.0) * (nu + k + 2.0)))
                return lmax + std::log(sum);
        }
    }
    throw NonConvergenceError("specfun: Bessel I series exhausted its budget");
}

// I_nu(x); overflows to +inf for arguments past ~709 in log, callers that
// need big arguments combine log_bessel_i with their other log-scale pieces.
inline double bessel_i(double nu, double x, const SeriesControl& ctl = {}) {
    return std::exp(log_bessel_i(nu, x, ctl));
}

// e^{-x} I_nu(x), safe for large x.
inline double bessel_i_scaled(double nu, double x,
                              const SeriesControl& ctl = {}) {
    return std::exp(log_bessel_i(nu, x, ctl) - x);
}

// Kummer confluent hypergeometric M(a,b,z) = 1F1(a;b;z), b > 0.
// For z < 0 the terms alternate and cancel badly, so the Kummer transform
// M(a,b,z) = e^z M(b-a, b, -z) is applied first; the transformed series has
// positive argument.
inline double kummer_m(double a, double b, double z,
                       const SeriesControl& ctl = {}) {
    ctl.validate();
    if (!(b > 0.0))
        throw std::invalid_argument("specfun: kummer_m needs b > 0");
    if (z < 0.0) return std::exp(z) * kummer_m(b - a, b, -z, ctl);
    double term = 1.0;
    double sum = 1.0;
    for (long k = 0; k < ctl.max_terms; ++k) {
        term *= (a + k) * z / ((b + k) * (k + 1.0));
        sum += term;
        if (std::fabs(term) <= ctl.abs_tol * (1.0 + std::fabs(sum)))
            return sum;
    }
    throw NonConvergenceError("specfun: Kummer series exhausted its budget");
}

// Whittaker M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} M(mu-kappa+1/2, 1+2mu, z),
// real branch, z > 0.
inline double whittaker_m(double kappa, double mu, double z,
                          const SeriesControl& ctl = {}) {
    if (!(z > 0.0))
        throw std::invalid_argument("specfun: whittaker_m needs z > 0");
    return std::exp(-0.5 * z + (mu + 0.5) * std::log(z))
         * kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, ctl);
}

// Survival function Q(x; df, lambda) of the noncentral chi-square law with
// df > 0 degrees of freedom (fractional allowed) and noncentrality
// lambda >= 0:
//
//   Q = sum_j Poisson(lambda/2)_j * Q_central(df/2 + j, x/2).
//
// The sum runs outward from the modal Poisson index, with both the Poisson
// weights and the central tails updated by two-term recurrences
//   Q(s+1, y) = Q(s, y) + y^s e^{-y} / Gamma(s+1),
// so only one full incomplete-gamma evaluation is paid. Truncation is
// bounded by the un-summed Poisson mass (each central tail is <= 1); the
// loop stops once that bound drops under abs_tol.
inline double noncentral_chi2_sf(double x, double df, double lambda,
                                 const SeriesControl& ctl = {}) {
    ctl.validate();
    if (!(df > 0.0))
        throw std::invalid_argument("specfun: noncentral_chi2_sf needs df > 0");
    if (x < 0.0 || lambda < 0.0)
        throw std::invalid_argument("specfun: noncentral_chi2_sf needs x, lambda >= 0");
    if (x == 0.0) return 1.0;
    const double y = 0.5 * x;
    const double d = 0.5 * df;
    const double h = 0.5 * lambda;
    if (h == 0.0) return reg_upper_gamma(d, y);

    const long jm = static_cast<long>(std::floor(h));
    // central tail, gamma increment and Poisson weight at the mode; the
    // saddle-form logs keep the seeds accurate when the arguments are huge
    double q_up = reg_upper_gamma(d + jm, y);
    double t_up = std::exp(detail::log_gamma_term(d + jm, y));
    double w_up = std::exp(detail::log_gamma_term(static_cast<double>(jm), h));

    double q_dn = q_up;
    double t_dn = t_up;
    double w_dn = w_up;

    double acc = w_up * q_up;           // modal term j = jm
    long j_up = jm;
    long j_dn = jm;                     // next downward index is j_dn - 1
    for (long n = 0; n < ctl.max_terms; ++n) {
        // step up: j_up -> j_up + 1
        q_up += t_up;                   // Q(s+1,y) = Q(s,y) + t(s)
        t_up *= y / (d + j_up + 1.0);
        w_up *= h / (j_up + 1.0);
        ++j_up;
        acc += w_up * q_up;
        // step down: j_dn -> j_dn - 1
        if (j_dn > 0) {
            t_dn *= (d + j_dn) / y;     // t(s-1) = t(s) * s / y
            q_dn -= t_dn;
            if (q_dn < 0.0) q_dn = 0.0; // guard rounding at the floor
            w_dn *= j_dn / h;
            --j_dn;
            acc += w_dn * q_dn;
        }
        // every central tail is <= 1, so the truncation error is bounded by
        // the unsummed Poisson mass; the weight ratios h/(j+1) upward and
        // j/h downward shrink away from the mode, so each side is dominated
        // by a geometric series anchored at the current weight
        double tail = 0.0;
        const double ru = h / (j_up + 1.0);
        tail += ru < 1.0 ? w_up * ru / (1.0 - ru)
                         : std::numeric_limits<double>::infinity();
        if (j_dn > 0) {
            const double rd = j_dn / h;
            tail += rd < 1.0 ? w_dn * rd / (1.0 - rd)
                             : std::numeric_limits<double>::infinity();
        }
        if (tail <= ctl.abs_tol) {
            if (acc < 0.0) return 0.0;
            return acc > 1.0 ? 1.0 : acc;
        }
    }
    throw NonConvergenceError(
        "specfun: noncentral chi-square mixture exhausted its budget");
}

// Gaussian limit of Q(n; v, lambda) for large df:
//   Q ~ 1 - N( (n - v - lambda) / sqrt(2(v + 2 lambda)) ).
inline double q_normal_limit(double n, double v, double lambda) {
    if (!(v > 0.0) || lambda < 0.0)
        throw std::invalid_argument("specfun: q_normal_limit needs v > 0, lambda >= 0");
    return 1.0 - normal_cdf((n - v - lambda) / std::sqrt(2.0 * (v + 2.0 * lambda)));
}

} // namespace gfbm

#endif
