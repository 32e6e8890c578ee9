#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "gfbm/gfbm.hpp"
#include "oracles.hpp"

using namespace gfbm;

TEST_CASE("parameter validation rejects degenerate processes", "[process]") {
    CHECK_NOTHROW(GfbmParams{1.0, 0.5, 0.7}.validate());
    CHECK_THROWS_AS((GfbmParams{0.0, 0.0, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GfbmParams{1.0, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GfbmParams{1.0, 0.0, 1.0}.validate()), std::invalid_argument);
    // negative weights are admissible: K = a^2 + b^2 + (2 - 2^{2H})ab > 0
    CHECK_NOTHROW(GfbmParams{1.0, -1.0, 0.5}.validate());
    CHECK(k_factor({1.0, -1.0, 0.5}) > 0.0);
    const double nan = std::nan("");
    CHECK_THROWS_AS((GfbmParams{nan, 0.0, 0.5}.validate()), std::invalid_argument);
}

TEST_CASE("scale factor matches frozen references", "[process]") {
    const GfbmParams gen{1.0, 0.5, 0.7};
    CHECK(k_factor(gen) == Catch::Approx(oracle::k_1_05_07).epsilon(1e-15));

    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    const GfbmParams sub{inv_rt2, inv_rt2, 0.6};
    CHECK(k_factor(sub) == Catch::Approx(oracle::k_sub_06).epsilon(1e-15));

    // closed reductions: fractional gives 1, standard gives 1
    CHECK(k_factor({1.0, 0.0, 0.31}) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(k_factor({1.0, 0.0, 0.5}) == Catch::Approx(1.0).epsilon(1e-15));
    // unit weights a=b=1: (a+b)^2 - 2^{2H} ab = 4 - 2^{2H}
    const double h = 0.6;
    CHECK(k_factor({1.0, 1.0, h})
          == Catch::Approx(4.0 - std::exp2(2.0 * h)).epsilon(1e-15));
}

TEST_CASE("scale factor stays positive across the parameter box",
          "[process]") {
    oracle::ParamRng rng(2026);
    for (int i = 0; i < 500; ++i) {
        GfbmParams p{rng.in(-3.0, 3.0), rng.in(-3.0, 3.0),
                     rng.in(0.01, 0.99)};
        if (p.a == 0.0 && p.b == 0.0) continue;
        CHECK(k_factor(p) > 0.0);
    }
}

TEST_CASE("variance and covariance agree with the defining identities",
          "[process]") {
    const GfbmParams p{1.0, 0.5, 0.7};
    CHECK(variance(p, 2.0)
          == Catch::Approx(oracle::var_1_05_07_t2).epsilon(1e-15));

    // variance is the diagonal of the covariance
    for (double t : {0.1, 0.7, 1.0, 3.5}) {
        CHECK(covariance(p, t, t) == Catch::Approx(variance(p, t)));
        CHECK(variance(p, t)
              == Catch::Approx(k_factor(p) * std::pow(t, 2 * p.hurst)));
    }

    // symmetry in (s, t)
    CHECK(covariance(p, 0.3, 1.9) == Catch::Approx(covariance(p, 1.9, 0.3)));
    CHECK(covariance(p, 0.0, 1.9) == Catch::Approx(0.0).margin(1e-300));
}

TEST_CASE("covariance reduces to the classical kernels", "[process]") {
    // standard Brownian motion: min(s, t)
    const GfbmParams std_bm{1.0, 0.0, 0.5};
    for (double s : {0.2, 1.0, 2.7}) {
        for (double t : {0.5, 1.3, 4.0}) {
            CHECK(covariance(std_bm, s, t)
                  == Catch::Approx(std::min(s, t)).epsilon(1e-14));
        }
    }

    // fractional kernel: (s^2H + t^2H - |t-s|^2H)/2
    const double h = 0.7;
    const GfbmParams fbm{1.0, 0.0, h};
    for (double s : {0.2, 1.0, 2.7}) {
        for (double t : {0.5, 1.3, 4.0}) {
            const double want = 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h)
                                       - std::pow(std::fabs(t - s), 2 * h));
            CHECK(covariance(fbm, s, t) == Catch::Approx(want).epsilon(1e-14));
        }
    }

    // sub-fractional kernel at a=b=1/sqrt(2):
    // s^2H + t^2H - ((s+t)^2H + |t-s|^2H)/2
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    const GfbmParams sub{inv_rt2, inv_rt2, 0.6};
    for (double s : {0.2, 1.0, 2.7}) {
        for (double t : {0.5, 1.3, 4.0}) {
            const double want = std::pow(s, 1.2) + std::pow(t, 1.2)
                              - 0.5 * (std::pow(s + t, 1.2)
                                       + std::pow(std::fabs(t - s), 1.2));
            CHECK(covariance(sub, s, t) == Catch::Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("drift coefficient is the time derivative of half the variance",
          "[process]") {
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    const GfbmParams sub{inv_rt2, inv_rt2, 0.6};
    CHECK(ito_drift_coeff(sub, 2.0)
          == Catch::Approx(oracle::ito_sub_06_t2).epsilon(1e-14));

    // compare against a central difference of variance/2
    const GfbmParams p{1.0, 0.5, 0.7};
    for (double t : {0.3, 1.0, 2.5}) {
        const double h = 1e-6 * t;
        const double num = (variance(p, t + h) - variance(p, t - h))
                         / (4.0 * h);
        CHECK(ito_drift_coeff(p, t) == Catch::Approx(num).epsilon(1e-8));
    }

    CHECK_THROWS_AS(ito_drift_coeff(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ito_drift_coeff(p, -1.0), std::invalid_argument);
}

TEST_CASE("classification is exact and ordered by precedence", "[process]") {
    CHECK(classify({1.0, 0.0, 0.5}) == ProcessKind::standard_bm);
    CHECK(classify({2.0, 0.0, 0.5}) == ProcessKind::standard_bm);
    CHECK(classify({1.0, 0.0, 0.7}) == ProcessKind::fractional_bm);
    CHECK(classify({0.5, 0.5, 0.3}) == ProcessKind::sub_fractional_bm);
    // a == b at H = 1/2 is still sub-fractional, not standard
    CHECK(classify({1.0, 1.0, 0.5}) == ProcessKind::sub_fractional_bm);
    CHECK(classify({1.0, 0.5, 0.7}) == ProcessKind::general);
    // near misses stay general: comparison is exact, not fuzzy
    CHECK(classify({1.0, 1e-16, 0.5}) == ProcessKind::general);
    CHECK(classify({1.0, 0.0, 0.5 + 1e-16}) == ProcessKind::fractional_bm);

    CHECK(to_string(ProcessKind::standard_bm)
          == std::string("standard-bm"));
    CHECK(to_string(ProcessKind::fractional_bm)
          == std::string("fractional-bm"));
    CHECK(to_string(ProcessKind::sub_fractional_bm)
          == std::string("sub-fractional-bm"));
    CHECK(to_string(ProcessKind::general) == std::string("general"));
}
