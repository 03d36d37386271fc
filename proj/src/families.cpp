#include "acnet/families.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/random/gamma_distribution.hpp>

#include "acnet/copula.hpp"
#include "acnet/data.hpp"
#include "acnet/errors.hpp"
#include "acnet/inversion.hpp"
#include "acnet/rng.hpp"

namespace acnet {

const char* family_name(Family f)
{
    switch (f) {
    case Family::independence: return "independence";
    case Family::clayton: return "clayton";
    case Family::frank: return "frank";
    case Family::joe: return "joe";
    case Family::gumbel: return "gumbel";
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name)
{
    for (Family f : {Family::independence, Family::clayton, Family::frank, Family::joe, Family::gumbel})
        if (name == family_name(f)) return f;
    return std::nullopt;
}

double ParametricFamily::theta_floor(Family f)
{
    switch (f) {
    case Family::clayton:
    case Family::frank: return 0.0;
    case Family::joe:
    case Family::gumbel: return 1.0;
    case Family::independence: return 0.0;
    }
    return 0.0;
}

bool ParametricFamily::theta_valid(Family f, double theta)
{
    if (!std::isfinite(theta)) return false;
    switch (f) {
    case Family::clayton:
    case Family::frank: return theta > 0.0;
    case Family::joe:
    case Family::gumbel: return theta >= 1.0;
    case Family::independence: return true;
    }
    return false;
}

ParametricFamily::ParametricFamily(Family family, double theta) : family_(family), theta_(theta)
{
    if (!theta_valid(family, theta))
        fail(ErrorKind::domain, std::string("theta = ") + std::to_string(theta) + " is outside the " +
                                    family_name(family) + " family's completely monotone range");
}

SeriesValue ref_generator(const ParametricFamily& f, double t, int order)
{
    if (!std::isfinite(t) || t < 0.0) fail(ErrorKind::domain, "generator is defined for finite t >= 0");
    const double theta = f.theta();
    switch (f.family()) {
    case Family::independence: return series_exp_decay(1.0, t, order);
    case Family::clayton: {
        auto s = series_pow(series_shift(SeriesValue::identity(t, order), 1.0), -1.0 / theta);
        return s;
    }
    case Family::frank: {
        // -(1/theta) log(1 - c e^{-t}), c = 1 - e^{-theta}
        const double c = -std::expm1(-theta);
        const auto scaled = series_scale(series_exp_decay(1.0, t, order), -c);
        std::vector<double> inner(scaled.coeffs().begin(), scaled.coeffs().end());
        // 1 - c e^{-t} = (1 - e^{-t}) + e^{-theta-t}, both terms positive
        inner[0] = -std::expm1(-t) + std::exp(-theta - t);
        const auto logged = series_log(SeriesValue(std::move(inner)));
        std::vector<double> out(logged.coeffs().begin(), logged.coeffs().end());
        for (auto& x : out) x *= -1.0 / theta;
        if (t == 0.0) out[0] = 1.0;
        return SeriesValue(std::move(out));
    }
    case Family::joe: {
        if (theta == 1.0) return series_exp_decay(1.0, t, order);
        if (t == 0.0) {
            if (order > 0) fail(ErrorKind::domain, "Joe generator derivatives are unbounded at t = 0");
            return SeriesValue::constant(1.0, 0);
        }
        // 1 - (1 - e^{-t})^{1/theta}
        auto w = series_shift(series_scale(series_exp_decay(1.0, t, order), -1.0), 1.0);
        std::vector<double> out(w.coeffs().begin(), w.coeffs().end());
        out[0] = -std::expm1(-t);
        auto p = series_pow(SeriesValue(std::move(out)), 1.0 / theta);
        std::vector<double> r(p.coeffs().begin(), p.coeffs().end());
        for (auto& x : r) x = -x;
        r[0] = -std::expm1(std::log(-std::expm1(-t)) / theta);
        return SeriesValue(std::move(r));
    }
    case Family::gumbel: {
        if (theta == 1.0) return series_exp_decay(1.0, t, order);
        if (t == 0.0) {
            if (order > 0) fail(ErrorKind::domain, "Gumbel generator derivatives are unbounded at t = 0");
            return SeriesValue::constant(1.0, 0);
        }
        return series_exp(series_scale(series_pow(SeriesValue::identity(t, order), 1.0 / theta), -1.0));
    }
    }
    fail(ErrorKind::domain, "unknown family");
}

double ref_inverse(const ParametricFamily& f, double u)
{
    if (!(u > 0.0 && u <= 1.0)) fail(ErrorKind::domain, "generator inverse needs u in (0, 1]");
    if (u == 1.0) return 0.0;
    const double theta = f.theta();
    switch (f.family()) {
    case Family::independence: return -std::log(u);
    case Family::clayton: return std::expm1(-theta * std::log(u));
    case Family::frank: return std::log1p(-std::exp(-theta)) - std::log1p(-std::exp(-theta * u));
    case Family::joe: return -std::log1p(-std::pow(1.0 - u, theta));
    case Family::gumbel: return std::pow(-std::log(u), theta);
    }
    fail(ErrorKind::domain, "unknown family");
}

std::vector<double> ref_sample_bivariate(const ParametricFamily& f, std::size_t n, std::uint64_t seed)
{
    if (n < 1) fail(ErrorKind::domain, "sample count must be positive");
    std::vector<double> out(2 * n);
    InversionSettings settings;
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        const double u = rng.uniform();
        const double v = rng.uniform();
        const double tu = ref_inverse(f, u);
        // Solve dC/du(u, w) = phi'(tu + tw) / phi'(tu) = v in s = tu + tw.
        // -phi' is completely monotone, hence decreasing and log-convex.
        const double base = -ref_generator(f, tu, 1)[1];
        RootSolve root;
        try {
            root = solve_decreasing(
                [&](double s, double& val, double& slope) {
                    const auto g = ref_generator(f, s, 2);
                    val = -g[1] / base;
                    slope = -g[2] / base;
                },
                v, tu, settings);
        } catch (const ConvergenceError& e) {
            throw Error(ErrorKind::convergence, std::string("conditional inversion failed: ") + e.what());
        }
        out[2 * i] = u;
        out[2 * i + 1] = std::clamp(ref_generator(f, std::max(root.t - tu, 0.0), 0)[0], 0x1.0p-60, 1.0 - 0x1.0p-53);
    }
    return out;
}

std::vector<double> sample_clayton_mixture(double theta, int dim, std::size_t n, std::uint64_t seed)
{
    if (!(theta > 0.0)) fail(ErrorKind::domain, "Clayton theta must be positive");
    if (dim < 2) fail(ErrorKind::domain, "dimension must be at least 2");
    const auto d = static_cast<std::size_t>(dim);
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        boost::random::gamma_distribution<double> gamma(1.0 / theta, 1.0);
        const double m = gamma(rng);
        for (std::size_t j = 0; j < d; ++j) {
            const double e = rng.exponential();
            out[i * d + j] = std::pow(1.0 + e / m, -1.0 / theta);
        }
    }
    return out;
}

double parametric_nll(const ParametricFamily& f, const Dataset& data)
{
    const CopulaModel model(static_cast<int>(data.cols()), f);
    double s = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) s -= log_density(model, data.row(i));
    return s / static_cast<double>(data.rows());
}

ParametricFit fit_parametric(Family family, const Dataset& train, const Dataset* test,
                             const ParametricFitConfig& config)
{
    if (train.rows() == 0) fail(ErrorKind::data, "empty training set");
    if (train.cols() < 2) fail(ErrorKind::data, "need at least two columns");
    if (family == Family::independence) {
        const ParametricFamily f = ParametricFamily::independence();
        return {f, parametric_nll(f, train), test ? std::optional(parametric_nll(f, *test)) : std::nullopt, 0};
    }

    const double floor = ParametricFamily::theta_floor(family);
    const double start = config.initial_theta.value_or(floor + 1.0);
    if (!ParametricFamily::theta_valid(family, start) || start == floor)
        fail(ErrorKind::domain, "initial theta outside the family's range");
    // theta within 1e-8 of its floor is indistinguishable from the boundary copula.
    const double lo = floor + 1e-8;
    const double hi = 1e4;
    auto objective = [&](double theta) { return parametric_nll(ParametricFamily(family, theta), train); };

    double theta = start;
    double value = objective(theta);
    double velocity = 0.0;
    double lr = config.learning_rate;
    int it = 0;
    for (; it < config.max_iterations; ++it) {
        const double h = 1e-6 * std::max(1.0, theta);
        const double a = std::max(theta - h, lo);
        const double b = theta + h;
        const double grad = (objective(b) - objective(a)) / (b - a);
        if (!std::isfinite(grad)) fail(ErrorKind::numeric_degeneracy, "parametric fit produced a non-finite gradient");
        velocity = config.momentum * velocity - lr * grad;
        const double next = std::clamp(theta + velocity, lo, hi);
        const double next_value = objective(next);
        if (!(next_value <= value + 1e-15)) {
            // overshoot: shrink the rate and restart the momentum
            lr *= 0.5;
            velocity = 0.0;
            if (lr < 1e-12) break;
            continue;
        }
        const double step = std::abs(next - theta);
        theta = next;
        value = next_value;
        if (step < config.step_tolerance * std::max(1.0, theta) && std::abs(grad) < 1e-6) break;
        if (theta == lo && grad > 0.0 && step == 0.0) break;
    }
    const ParametricFamily fitted(family, theta);
    return {fitted, parametric_nll(fitted, train), test ? std::optional(parametric_nll(fitted, *test)) : std::nullopt,
            it};
}

} // namespace acnet
