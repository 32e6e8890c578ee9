#ifndef GFBM_STATS_HPP
#define GFBM_STATS_HPP

// Statistical helpers for the sampler tests: sample moments, the
// Kolmogorov-Smirnov one-sample test, and the chi-square quantile needed by
// histogram goodness-of-fit checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gfbm/specfun.hpp"

namespace gfbm {

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    std::size_t n = 0;
};

inline SampleStats summarize(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw std::invalid_argument("summarize: need at least 2 samples");
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        const double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    return {mean, m2 / static_cast<double>(k - 1), k};
}

// One-sample KS statistic D_n against a continuous CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    if (samples.empty())
        throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

// Asymptotic KS p-value with the Stephens small-sample correction,
// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D. Large lambda uses the
// alternating tail series; small lambda its theta-transformed dual, where
// the alternating form cancels to roundoff.
inline double ks_pvalue(double d, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_pvalue: n must be >= 1");
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam <= 0.0) return 1.0;
    double pv;
    if (lam < 1.18) {
        const double x = std::exp(-M_PI * M_PI / (8.0 * lam * lam));
        pv = 1.0
           - std::sqrt(2.0 * M_PI) / lam
                 * (x + std::pow(x, 9.0) + std::pow(x, 25.0)
                    + std::pow(x, 49.0));
    } else {
        double sum = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double term =
                std::exp(-2.0 * lam * lam * static_cast<double>(k * k));
            sum += (k % 2 ? term : -term);
            if (term < 1e-16) break;
        }
        pv = 2.0 * sum;
    }
    return pv < 0.0 ? 0.0 : (pv > 1.0 ? 1.0 : pv);
}

// Quantile of the chi-square law by bisection on the regularized gamma CDF.
inline double chi2_quantile(double prob, double df) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("chi2_quantile: prob in (0,1) required");
    if (!(df > 0.0))
        throw std::invalid_argument("chi2_quantile: df > 0 required");
    double lo = 0.0, hi = std::max(1.0, df);
    while (reg_lower_gamma(0.5 * df, 0.5 * hi) < prob) {
        hi *= 2.0;
        if (hi > 1e12)
            throw std::invalid_argument("chi2_quantile: prob too close to 1");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (reg_lower_gamma(0.5 * df, 0.5 * mid) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace gfbm

#endif
