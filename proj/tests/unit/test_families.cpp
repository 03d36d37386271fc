#include <doctest.h>

#include <cmath>
#include <vector>

#include "acnet/copula.hpp"
#include "acnet/data.hpp"
#include "acnet/errors.hpp"
#include "acnet/families.hpp"
#include "acnet/rng.hpp"
#include "oracles.hpp"

using namespace acnet;
using doctest::Approx;

namespace {

const std::vector<ParametricFamily> kFamilies{
    ParametricFamily::independence(),      ParametricFamily(Family::clayton, 5.0), ParametricFamily(Family::clayton, 0.3),
    ParametricFamily(Family::frank, 15.0), ParametricFamily(Family::frank, 0.5),   ParametricFamily(Family::joe, 3.0),
    ParametricFamily(Family::joe, 1.0),    ParametricFamily(Family::gumbel, 2.0),  ParametricFamily(Family::gumbel, 1.0),
};

double grid_search_theta(Family family, const Dataset& data, double lo, double hi)
{
    // golden-section refinement of a coarse scan
    double best = lo;
    double best_nll = INFINITY;
    for (int g = 0; g <= 200; ++g) {
        const double th = lo + (hi - lo) * g / 200.0;
        if (!ParametricFamily::theta_valid(family, th) || th == ParametricFamily::theta_floor(family)) continue;
        const double v = parametric_nll(ParametricFamily(family, th), data);
        if (v < best_nll) {
            best_nll = v;
            best = th;
        }
    }
    const double step = (hi - lo) / 200.0;
    double a = std::max(best - step, ParametricFamily::theta_floor(family) + 1e-9);
    double b = best + step;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double c = b - r * (b - a);
        const double d = a + r * (b - a);
        if (parametric_nll(ParametricFamily(family, c), data) < parametric_nll(ParametricFamily(family, d), data))
            b = d;
        else
            a = c;
    }
    return 0.5 * (a + b);
}

Dataset as_dataset(std::vector<double> v, std::size_t d)
{
    const std::size_t n = v.size() / d;
    return Dataset(n, d, std::move(v), true);
}

} // namespace

TEST_CASE("family names and parameter ranges")
{
    CHECK(parse_family("clayton") == Family::clayton);
    CHECK_FALSE(parse_family("gaussian").has_value());
    CHECK_THROWS_AS(ParametricFamily(Family::clayton, 0.0), Error);
    CHECK_THROWS_AS(ParametricFamily(Family::frank, -2.0), Error);
    CHECK_THROWS_AS(ParametricFamily(Family::joe, 0.9), Error);
    CHECK_THROWS_AS(ParametricFamily(Family::gumbel, std::nan("")), Error);
}

TEST_CASE("generators at known points")
{
    for (const auto& f : kFamilies) CHECK(ref_generator(f, 0.0, 0)[0] == 1.0);
    CHECK(ref_generator(ParametricFamily(Family::clayton, 5.0), 31.0, 0)[0] == Approx(0.5).epsilon(1e-14));
    for (double t : {0.1, 1.0, 5.0})
        CHECK(ref_generator(ParametricFamily(Family::gumbel, 1.0), t, 0)[0] == Approx(std::exp(-t)).epsilon(1e-14));
    const double theta = 15.0;
    const double t = 0.8;
    CHECK(ref_generator(ParametricFamily(Family::frank, theta), t, 0)[0] ==
          Approx(-std::log(1.0 - (1.0 - std::exp(-theta)) * std::exp(-t)) / theta).epsilon(1e-14));
    CHECK(ref_generator(ParametricFamily(Family::joe, 3.0), t, 0)[0] ==
          Approx(1.0 - std::pow(1.0 - std::exp(-t), 1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("inverses")
{
    for (const auto& f : kFamilies) CHECK(ref_inverse(f, 1.0) == 0.0);
    CHECK(ref_inverse(ParametricFamily(Family::clayton, 5.0), 0.5) == Approx(31.0).epsilon(1e-14));
    CHECK_THROWS_AS(ref_inverse(ParametricFamily(Family::clayton, 5.0), 0.0), Error);
    for (const auto& f : kFamilies) {
        CounterRng rng(9, static_cast<std::uint64_t>(f.family()));
        for (int q = 0; q < 1000; ++q) {
            const double u = rng.uniform();
            CHECK(std::abs(ref_generator(f, ref_inverse(f, u), 0)[0] - u) <= 1e-12);
        }
    }
}

TEST_CASE("generator derivative stacks match differences of the previous order")
{
    for (const auto& f : kFamilies) {
        for (double t : {0.05, 0.6, 4.0}) {
            const auto s = ref_generator(f, t, 3);
            for (int k = 1; k <= 3; ++k) {
                const auto prev = [&](const std::vector<double>& x) { return ref_generator(f, x[0], k - 1)[k - 1]; };
                const double fd = oracle::richardson_difference(prev, {t}, 0, 1e-4 * std::max(1.0, t));
                CHECK(oracle::relative_error(fd, s[k]) <= 1e-6);
            }
            for (int k = 0; k <= 3; ++k) CHECK((k % 2 ? -1.0 : 1.0) * s[k] >= 0.0);
        }
    }
}

TEST_CASE("families pass the copula property checks")
{
    for (const auto& f : kFamilies) {
        const CopulaModel m(2, f);
        CounterRng rng(4, 4);
        for (int q = 0; q < 500; ++q) {
            const double a = rng.uniform();
            const double b = rng.uniform();
            const std::vector<double> p{a, b};
            const double c = cdf(m, p);
            CHECK(c >= std::max(a + b - 1.0, 0.0) - 1e-12);
            CHECK(c <= std::min(a, b) + 1e-12);
            Rectangle r{{a, b}, {a + (1 - a) * rng.uniform(), b + (1 - b) * rng.uniform()}};
            CHECK(rectangle_prob(m, r) >= 0.0);
        }
    }
}

TEST_CASE("bivariate sampler")
{
    SUBCASE("independence")
    {
        const auto s = ref_sample_bivariate(ParametricFamily::independence(), 100000, 3);
        double su = 0, sv = 0, suv = 0, suu = 0, svv = 0;
        const double n = 100000;
        for (std::size_t i = 0; i < 100000; ++i) {
            su += s[2 * i];
            sv += s[2 * i + 1];
            suv += s[2 * i] * s[2 * i + 1];
            suu += s[2 * i] * s[2 * i];
            svv += s[2 * i + 1] * s[2 * i + 1];
        }
        const double cov = suv / n - su * sv / n / n;
        const double corr = cov / std::sqrt((suu / n - su * su / n / n) * (svv / n - sv * sv / n / n));
        CHECK(std::abs(corr) <= 0.01);
    }
    SUBCASE("clayton matches its closed form")
    {
        const auto s = ref_sample_bivariate(ParametricFamily(Family::clayton, 5.0), 100000, 8);
        double worst = 0.0;
        for (int i = 1; i <= 20; ++i)
            for (int j = 1; j <= 20; ++j) {
                const std::vector<double> at{i / 21.0, j / 21.0};
                worst = std::max(worst, std::abs(oracle::empirical_joint(s, 2, at) - oracle::clayton_cdf(at, 5.0)));
            }
        CHECK(worst <= 0.01);
        for (int c = 0; c < 2; ++c) {
            std::vector<double> margin;
            for (std::size_t i = 0; i < 100000; ++i) margin.push_back(s[2 * i + c]);
            CHECK(oracle::ks_p_value(margin) > 0.05);
        }
    }
    SUBCASE("frank and joe match the generic cdf")
    {
        for (const auto& f : {ParametricFamily(Family::frank, 15.0), ParametricFamily(Family::joe, 3.0)}) {
            const auto s = ref_sample_bivariate(f, 50000, 2);
            const CopulaModel m(2, f);
            double worst = 0.0;
            for (int i = 1; i <= 9; ++i)
                for (int j = 1; j <= 9; ++j) {
                    const std::vector<double> at{i / 10.0, j / 10.0};
                    worst = std::max(worst, std::abs(oracle::empirical_joint(s, 2, at) - cdf(m, at)));
                }
            CHECK(worst <= 0.015);
        }
    }
    SUBCASE("deterministic under seed")
    {
        const auto a = ref_sample_bivariate(ParametricFamily(Family::joe, 3.0), 500, 42);
        const auto b = ref_sample_bivariate(ParametricFamily(Family::joe, 3.0), 500, 42);
        CHECK(a == b);
        for (double x : a) {
            CHECK(x > 0.0);
            CHECK(x < 1.0);
        }
    }
}

TEST_CASE("trivariate clayton mixture sampler")
{
    const auto s = sample_clayton_mixture(2.0, 3, 50000, 6);
    const CopulaModel m(3, ParametricFamily(Family::clayton, 2.0));
    double worst = 0.0;
    for (double a : {0.2, 0.5, 0.8})
        for (double b : {0.3, 0.6})
            for (double c : {0.25, 0.75}) {
                const std::vector<double> at{a, b, c};
                worst = std::max(worst, std::abs(oracle::empirical_joint(s, 3, at) - cdf(m, at)));
            }
    CHECK(worst <= 0.015);
}

TEST_CASE("maximum likelihood agrees with a grid search")
{
    const auto train = as_dataset(ref_sample_bivariate(ParametricFamily(Family::clayton, 5.0), 2000, 100), 2);
    const auto test = as_dataset(ref_sample_bivariate(ParametricFamily(Family::clayton, 5.0), 1000, 200), 2);
    const auto fit = fit_parametric(Family::clayton, train, &test);
    const double grid = grid_search_theta(Family::clayton, train, 0.5, 10.0);
    CHECK(fit.model.theta() >= 4.5);
    CHECK(fit.model.theta() <= 5.5);
    CHECK(fit.model.theta() == Approx(grid).epsilon(1e-3));
    REQUIRE(fit.test_nll.has_value());
    CHECK(*fit.test_nll == Approx(-0.94).epsilon(0.08));

    CounterRng rng(1, 1);
    std::vector<double> flat(4000);
    for (auto& x : flat) x = rng.uniform();
    const auto indep = as_dataset(flat, 2);
    const auto weak = fit_parametric(Family::clayton, indep);
    CHECK(weak.model.theta() <= 0.1);
    const double weak_grid = grid_search_theta(Family::clayton, indep, 1e-6, 1.0);
    CHECK(std::abs(weak.model.theta() - weak_grid) <= 1e-3);
}
