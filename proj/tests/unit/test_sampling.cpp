#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "acnet/copula.hpp"
#include "acnet/sampling.hpp"
#include "oracles.hpp"

using namespace acnet;
using doctest::Approx;

TEST_CASE("a chain of single units has a constant mixing variable")
{
    const GeneratorNetwork net({1, 1}, {0.0, 0.0, 0.0, std::log(0.4), std::log(1.9)});
    CounterRng rng(1, 0);
    for (int i = 0; i < 100; ++i) {
        const auto s = sample_m(net, rng);
        CHECK(s.m == Approx(2.3).epsilon(1e-15));
        CHECK(s.path == std::vector<int>{0, 0});
    }
}

TEST_CASE("two-atom mixing frequencies")
{
    const GeneratorNetwork net({2}, {0.0, 0.0, 0.0, std::log(0.7 / 0.3), 0.0, std::log(2.0)});
    CounterRng rng(5, 0);
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ones += sample_m(net, rng).m == 1.0 ? 1 : 0;
    CHECK(std::abs(ones / double(n) - 0.3) <= 0.005);
}

TEST_CASE("mixing histogram matches enumeration and the Laplace identity holds")
{
    const auto net = oracle::random_network({5, 4}, 3);
    const auto mix = enumerate_mixture(net);
    REQUIRE(mix.size() == 20);
    const int n = 100000;
    std::map<std::vector<int>, int> hits;
    std::vector<double> ms(n);
    CounterRng rng(17, 0);
    for (int i = 0; i < n; ++i) {
        const auto s = sample_m(net, rng);
        double path_rate = 0.0;
        for (int l = 1; l <= 2; ++l) path_rate += net.b(l, s.path[static_cast<std::size_t>(l - 1)]);
        CHECK(s.m == Approx(path_rate).epsilon(1e-14));
        ++hits[s.path];
        ms[static_cast<std::size_t>(i)] = s.m;
    }
    // path probability: A[out, z2] * A[2, z2, z1] * A[1, z1, 0]
    for (int z1 = 0; z1 < 5; ++z1)
        for (int z2 = 0; z2 < 4; ++z2) {
            const double p = net.a(3, 0, z2) * net.a(2, z2, z1) * net.a(1, z1, 0);
            const double freq = hits[{z1, z2}] / double(n);
            CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
        }
    for (int g = 1; g <= 10; ++g) {
        const double t = 0.25 * g;
        double s = 0.0;
        double s2 = 0.0;
        for (double m : ms) {
            const double x = std::exp(-t * m);
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        CHECK(std::abs(mean - phi_eval(net, t, 0, false)[0]) <= 5.0 * se);
    }
}

TEST_CASE("independence draws are uniform")
{
    const std::size_t n = 100000;
    const auto u = sample_u(independence_network(), 2, n, 9);
    for (int c = 0; c < 2; ++c) {
        std::vector<double> margin;
        for (std::size_t i = 0; i < n; ++i) margin.push_back(u[2 * i + static_cast<std::size_t>(c)]);
        CHECK(oracle::ks_uniform_statistic(margin) <= 1.36 / std::sqrt(double(n)));
    }
}

TEST_CASE("network draws follow the model cdf")
{
    const auto net = init_network(std::vector<int>{10, 10}, 2);
    const std::size_t n = 100000;
    const auto u = sample_u(net, 2, n, 4);
    for (double x : u) {
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    for (int c = 0; c < 2; ++c) {
        std::vector<double> margin;
        for (std::size_t i = 0; i < n; ++i) margin.push_back(u[2 * i + static_cast<std::size_t>(c)]);
        CHECK(oracle::ks_p_value(margin) > 0.05);
    }
    const CopulaModel model(2, net);
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            const std::vector<double> at{i / 21.0, j / 21.0};
            worst = std::max(worst, std::abs(oracle::empirical_joint(u, 2, at) - cdf(model, at)));
        }
    CHECK(worst <= 0.01);
}

TEST_CASE("sampling is deterministic and independent of worker layout")
{
    const auto net = init_network(std::vector<int>{10, 10}, 2);
    const auto a = sample_u(net, 3, 1000, 21);
    const auto b = sample_u(net, 3, 1000, 21);
    CHECK(a == b);
    // point i depends only on (seed, i)
    const auto prefix = sample_u(net, 3, 10, 21);
    CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));
    CHECK(sample_u(net, 3, 1000, 22) != a);
}
