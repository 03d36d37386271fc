#pragma once

// Independent reference formulas used as test oracles. Nothing here calls into
// the series or generator machinery under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "acnet/generator_net.hpp"
#include "acnet/rng.hpp"

namespace oracle {

inline double clayton_cdf(std::span<const double> u, double theta)
{
    double s = 0.0;
    for (double x : u) s += std::pow(x, -theta);
    return std::pow(s - static_cast<double>(u.size()) + 1.0, -1.0 / theta);
}

//! d-variate Clayton density: prod_{k<d}(1 + k theta) prod u_i^{-theta-1}
//! (sum u_i^{-theta} - d + 1)^{-d - 1/theta}.
inline double clayton_log_density(std::span<const double> u, double theta)
{
    const auto d = static_cast<double>(u.size());
    double out = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        out += std::log1p(static_cast<double>(k) * theta);
        out += (-theta - 1.0) * std::log(u[k]);
        s += std::pow(u[k], -theta);
    }
    return out + (-d - 1.0 / theta) * std::log(s - d + 1.0);
}

//! dC/du for the bivariate Clayton copula.
inline double clayton_h(double u, double v, double theta)
{
    const double s = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
    return std::pow(u, -theta - 1.0) * std::pow(s, -1.0 / theta - 1.0);
}

//! Frank bivariate density.
inline double frank_density(double u, double v, double theta)
{
    const double a = -std::expm1(-theta);
    const double eu = std::exp(-theta * u);
    const double ev = std::exp(-theta * v);
    const double den = a - (1.0 - eu) * (1.0 - ev);
    return theta * a * std::exp(-theta * (u + v)) / (den * den);
}

//! Network with raw_A ~ N-ish spread and raw_B in a moderate range, seeded.
inline acnet::GeneratorNetwork random_network(std::vector<int> widths, std::uint64_t seed, double a_spread = 2.0,
                                              double b_lo = -1.5, double b_hi = 1.0)
{
    const std::size_t w = acnet::GeneratorNetwork::weight_count_for(widths);
    std::size_t nb = 0;
    for (int h : widths) nb += static_cast<std::size_t>(h);
    acnet::CounterRng rng(seed, 0xabcdefULL);
    std::vector<double> raw(w);
    for (std::size_t k = 0; k < w - nb; ++k) raw[k] = rng.uniform(-a_spread, a_spread);
    for (std::size_t k = w - nb; k < w; ++k) raw[k] = rng.uniform(b_lo, b_hi);
    return acnet::GeneratorNetwork(std::move(widths), std::move(raw));
}

//! Brute-force mixture: sum over every path of prod A * exp(-(sum B) t), built
//! directly from the derived parameters by recursion over layers.
struct Atom {
    double weight;
    double rate;
};

inline std::vector<Atom> brute_force_mixture(const acnet::GeneratorNetwork& net)
{
    const int L = net.depth();
    // atoms[i] for nodes of the current layer
    std::vector<std::vector<Atom>> prev(1, std::vector<Atom>{{1.0, 0.0}});
    for (int l = 1; l <= L + 1; ++l) {
        std::vector<std::vector<Atom>> cur(static_cast<std::size_t>(net.width(l)));
        for (int i = 0; i < net.width(l); ++i) {
            const double b = l <= L ? net.b(l, i) : 0.0;
            for (int j = 0; j < net.width(l - 1); ++j)
                for (const Atom& a : prev[static_cast<std::size_t>(j)])
                    cur[static_cast<std::size_t>(i)].push_back({net.a(l, i, j) * a.weight, a.rate + b});
        }
        prev = std::move(cur);
    }
    return prev[0];
}

inline double mixture_derivative(const std::vector<Atom>& atoms, double t, int k)
{
    double s = 0.0;
    for (const Atom& a : atoms) s += a.weight * std::pow(-a.rate, k) * std::exp(-a.rate * t);
    return s;
}

//! Central difference of f around x along one coordinate.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t k, double h)
{
    const double x0 = x[k];
    x[k] = x0 + h;
    const double fp = f(x);
    x[k] = x0 - h;
    const double fm = f(x);
    return (fp - fm) / (2.0 * h);
}

//! Richardson-extrapolated central difference, O(h^4).
inline double richardson_difference(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x, std::size_t k, double h)
{
    const double d1 = central_difference(f, x, k, h);
    const double d2 = central_difference(f, x, k, h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

//! One-sample Kolmogorov-Smirnov statistic against U(0,1).
inline double ks_uniform_statistic(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, hi - xs[i], xs[i] - lo});
    }
    return d;
}

//! Asymptotic Kolmogorov distribution survival function P(K > x).
inline double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

inline double ks_p_value(std::vector<double> xs)
{
    const double n = static_cast<double>(xs.size());
    const double d = ks_uniform_statistic(std::move(xs));
    const double sn = std::sqrt(n);
    return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

//! Empirical copula at (a, b) from row-major n x d samples on coordinates 0, 1
//! with the remaining coordinates ignored.
inline double empirical_joint(std::span<const double> samples, std::size_t d, std::span<const double> at)
{
    const std::size_t n = samples.size() / d;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = true;
        for (std::size_t j = 0; j < at.size(); ++j) in = in && samples[i * d + j] <= at[j];
        hit += in ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(n);
}

inline double relative_error(double got, double want, double floor = 1e-300)
{
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

} // namespace oracle
