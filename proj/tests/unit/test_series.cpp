#include <doctest.h>

#include <cmath>
#include <vector>

#include "acnet/errors.hpp"
#include "acnet/series.hpp"

using namespace acnet;
using doctest::Approx;

TEST_CASE("exp_decay with zero rate is constant")
{
    const auto s = series_exp_decay(0.0, 3.0, 2);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
}

TEST_CASE("exp_decay matches closed-form derivatives")
{
    const auto s = series_exp_decay(0.7, 1.0, 2);
    const double e = std::exp(-0.7);
    CHECK(s[0] == Approx(e).epsilon(1e-15));
    CHECK(s[1] == Approx(-0.7 * e).epsilon(1e-15));
    CHECK(s[2] == Approx(0.49 * e).epsilon(1e-15));

    const auto unit = series_exp_decay(1.0, 0.0, 3);
    CHECK(unit[0] == 1.0);
    CHECK(unit[1] == -1.0);
    CHECK(unit[2] == 1.0);
    CHECK(unit[3] == -1.0);
}

TEST_CASE("exp_decay rejects bad input")
{
    CHECK_THROWS_AS(series_exp_decay(std::nan(""), 1.0, 2), Error);
    CHECK_THROWS_AS(series_exp_decay(1.0, INFINITY, 2), Error);
    CHECK_THROWS_AS(series_exp_decay(-1.0, 1.0, 2), Error);
    try {
        series_exp_decay(1.0, std::nan(""), 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("combine is a coefficient-wise convex combination")
{
    const std::vector<SeriesValue> one{series_exp_decay(1.3, 0.4, 3)};
    const std::vector<double> w1{1.0};
    const auto same = series_combine(one, w1);
    for (int k = 0; k <= 3; ++k) CHECK(same[k] == one[0][k]);

    const std::vector<SeriesValue> two{series_exp_decay(1.0, 1.0, 2), series_exp_decay(2.0, 1.0, 2)};
    const std::vector<double> w{0.3, 0.7};
    const auto mix = series_combine(two, w);
    CHECK(mix[0] == Approx(0.3 * std::exp(-1.0) + 0.7 * std::exp(-2.0)).epsilon(1e-15));
    CHECK(mix[1] == Approx(-0.3 * std::exp(-1.0) - 1.4 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("combine validates its inputs")
{
    const std::vector<SeriesValue> mixed{series_exp_decay(1.0, 1.0, 2), series_exp_decay(1.0, 1.0, 3)};
    const std::vector<double> w{0.5, 0.5};
    try {
        series_combine(mixed, w);
        FAIL("expected a structural error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::structural);
    }
    const std::vector<SeriesValue> two{series_exp_decay(1.0, 1.0, 2), series_exp_decay(2.0, 1.0, 2)};
    const std::vector<double> bad{0.5, 0.6};
    try {
        series_combine(two, bad);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
    const std::vector<double> negative{1.5, -0.5};
    CHECK_THROWS_AS(series_combine(two, negative), Error);
}

TEST_CASE("multiply follows Leibniz")
{
    // e^{-t} * e^{-2t} = e^{-3t}
    const auto p = series_multiply(series_exp_decay(1.0, 0.5, 4), series_exp_decay(2.0, 0.5, 4));
    const auto want = series_exp_decay(3.0, 0.5, 4);
    for (int k = 0; k <= 4; ++k) CHECK(p[k] == Approx(want[k]).epsilon(1e-14));

    // t * t = t^2: derivatives (t^2, 2t, 2, 0)
    const auto sq = series_multiply(SeriesValue::identity(1.5, 3), SeriesValue::identity(1.5, 3));
    CHECK(sq[0] == 2.25);
    CHECK(sq[1] == 3.0);
    CHECK(sq[2] == 2.0);
    CHECK(sq[3] == 0.0);
}

TEST_CASE("add, scale and shift")
{
    const auto a = series_exp_decay(1.0, 0.2, 2);
    const auto b = SeriesValue::identity(0.2, 2);
    const auto s = series_shift(series_scale(series_add(a, b), 2.0), 1.0);
    CHECK(s[0] == Approx(2.0 * (std::exp(-0.2) + 0.2) + 1.0));
    CHECK(s[1] == Approx(2.0 * (-std::exp(-0.2) + 1.0)));
    CHECK(s[2] == Approx(2.0 * std::exp(-0.2)));
}

TEST_CASE("elementary compositions agree with closed forms")
{
    const double t = 0.8;
    const int K = 6;
    // (1 + t)^p
    const double p = -0.2;
    const auto pw = series_pow(series_shift(SeriesValue::identity(t, K), 1.0), p);
    double falling = 1.0;
    for (int k = 0; k <= K; ++k) {
        CHECK(pw[k] == Approx(falling * std::pow(1.0 + t, p - k)).epsilon(1e-13));
        falling *= p - k;
    }
    // log(1 + t)
    const auto lg = series_log(series_shift(SeriesValue::identity(t, K), 1.0));
    CHECK(lg[0] == Approx(std::log1p(t)));
    double fact = 1.0;
    for (int k = 1; k <= K; ++k) {
        CHECK(lg[k] == Approx((k % 2 ? 1.0 : -1.0) * fact / std::pow(1.0 + t, k)).epsilon(1e-13));
        fact *= k;
    }
    // exp(-2t)
    const auto ex = series_exp(series_scale(SeriesValue::identity(t, K), -2.0));
    const auto want = series_exp_decay(2.0, t, K);
    for (int k = 0; k <= K; ++k) CHECK(ex[k] == Approx(want[k]).epsilon(1e-13));
}

TEST_CASE("adjoints follow products")
{
    // f = exp(-r t) with d r / d w = (1, 2); g = exp(-q t) with d q / d w = (0, 1)
    const double t = 0.6;
    const std::vector<double> dr{1.0, 2.0};
    const std::vector<double> dq{0.0, 1.0};
    const auto f = series_exp_decay(0.5, t, 3, dr);
    const auto g = series_exp_decay(1.5, t, 3, dq);
    const auto h = series_multiply(f, g);
    REQUIRE(h.has_adjoints());
    // h = exp(-(r+q) t), rate derivative (1, 3); d h_k / d rate = -k(-R)^{k-1} e^{-Rt} - t(-R)^k e^{-Rt}
    const double R = 2.0;
    for (int k = 0; k <= 3; ++k) {
        const double dk = (k > 0 ? -k * std::pow(-R, k - 1) : 0.0) * std::exp(-R * t) -
                          t * std::pow(-R, k) * std::exp(-R * t);
        CHECK(h.adjoint(k)[0] == Approx(dk * 1.0).epsilon(1e-13));
        CHECK(h.adjoint(k)[1] == Approx(dk * 3.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(series_exp(f), Error);
}

TEST_CASE("binomial table")
{
    CHECK(binomial(0, 0) == 1.0);
    CHECK(binomial(6, 3) == 20.0);
    CHECK(binomial(24, 12) == 2704156.0);
    CHECK(binomial(5, 7) == 0.0);
}
