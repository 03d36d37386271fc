#include "acnet/series.hpp"

#include <array>
#include <cmath>
#include <string>

#include "acnet/errors.hpp"

namespace acnet {

namespace {

constexpr int kTableSize = kMaxSeriesOrder + 1;

struct BinomialTable {
    std::array<std::array<double, kTableSize>, kTableSize> c{};
    constexpr BinomialTable()
    {
        for (int n = 0; n < kTableSize; ++n) {
            c[n][0] = 1.0;
            for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0.0);
        }
    }
};

constexpr BinomialTable kBinomials{};

constexpr std::array<double, kTableSize> make_factorials()
{
    std::array<double, kTableSize> f{};
    f[0] = 1.0;
    for (int k = 1; k < kTableSize; ++k) f[k] = f[k - 1] * k;
    return f;
}

constexpr auto kFactorials = make_factorials();

void check_order(int order)
{
    if (order < 0 || order > kMaxSeriesOrder)
        fail(ErrorKind::domain, "series order " + std::to_string(order) + " out of range");
}

void check_finite(double x, const char* name)
{
    if (!std::isfinite(x)) fail(ErrorKind::domain, std::string(name) + " must be finite");
}

std::size_t merged_weight_count(const SeriesValue& a, const SeriesValue& b)
{
    if (a.order() != b.order()) fail(ErrorKind::structural, "series order mismatch");
    if (a.has_adjoints() && b.has_adjoints() && a.weight_count() != b.weight_count())
        fail(ErrorKind::structural, "series adjoint width mismatch");
    return a.has_adjoints() ? a.weight_count() : b.weight_count();
}

void refuse_adjoints(const SeriesValue& a)
{
    if (a.has_adjoints())
        fail(ErrorKind::structural, "elementary composition does not propagate adjoints");
}

// Derivative stack <-> normalized Taylor coefficients.
std::vector<double> to_taylor(const SeriesValue& a)
{
    std::vector<double> t(a.coeffs().begin(), a.coeffs().end());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] /= kFactorials[k];
    return t;
}

SeriesValue from_taylor(std::vector<double> t)
{
    for (std::size_t k = 0; k < t.size(); ++k) t[k] *= kFactorials[k];
    return SeriesValue(std::move(t));
}

} // namespace

double binomial(int n, int k)
{
    if (n < 0 || n > kMaxSeriesOrder || k < 0 || k > n) return 0.0;
    return kBinomials.c[n][k];
}

SeriesValue::SeriesValue(std::vector<double> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty()) fail(ErrorKind::structural, "series needs at least one coefficient");
    check_order(order());
}

SeriesValue::SeriesValue(std::vector<double> coeffs, std::vector<double> adjoints,
                         std::size_t weight_count)
    : coeffs_(std::move(coeffs)), adjoints_(std::move(adjoints)), weight_count_(weight_count)
{
    if (coeffs_.empty()) fail(ErrorKind::structural, "series needs at least one coefficient");
    check_order(order());
    if (adjoints_.size() != coeffs_.size() * weight_count_)
        fail(ErrorKind::structural, "adjoint block does not match order and weight count");
}

SeriesValue SeriesValue::constant(double value, int order)
{
    check_order(order);
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[0] = value;
    return SeriesValue(std::move(c));
}

SeriesValue SeriesValue::identity(double t, int order)
{
    check_order(order);
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[0] = t;
    if (order >= 1) c[1] = 1.0;
    return SeriesValue(std::move(c));
}

std::span<const double> SeriesValue::adjoint(int k) const
{
    if (!has_adjoints()) return {};
    return std::span<const double>(adjoints_).subspan(static_cast<std::size_t>(k) * weight_count_,
                                                      weight_count_);
}

SeriesValue series_exp_decay(double rate, double t, int order, std::span<const double> rate_gradient)
{
    check_finite(rate, "rate");
    check_finite(t, "t");
    check_order(order);
    if (rate < 0.0) fail(ErrorKind::domain, "decay rate must be non-negative");
    if (t < 0.0) fail(ErrorKind::domain, "t must be non-negative");

    const auto n = static_cast<std::size_t>(order) + 1;
    const double e = std::exp(-rate * t);
    std::vector<double> c(n);
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        c[k] = p * e;
        p *= -rate;
    }
    if (rate_gradient.empty()) return SeriesValue(std::move(c));

    // d/d(rate) of (-rate)^k e^{-rate t} = -k (-rate)^{k-1} e - t (-rate)^k e
    const std::size_t w = rate_gradient.size();
    std::vector<double> adj(n * w);
    double pk1 = 1.0; // (-rate)^{k-1}
    for (std::size_t k = 0; k < n; ++k) {
        const double dk = (k == 0 ? 0.0 : -static_cast<double>(k) * pk1 * e) - t * c[k];
        if (k > 0) pk1 *= -rate;
        for (std::size_t i = 0; i < w; ++i) adj[k * w + i] = dk * rate_gradient[i];
    }
    return SeriesValue(std::move(c), std::move(adj), w);
}

SeriesValue series_combine(std::span<const SeriesValue> values, std::span<const double> weights,
                           std::span<const double> weight_jacobian)
{
    if (values.empty()) fail(ErrorKind::structural, "combination of zero series");
    if (values.size() != weights.size())
        fail(ErrorKind::structural, "one weight per series required");
    const int order = values[0].order();
    std::size_t w = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].order() != order) fail(ErrorKind::structural, "series order mismatch");
        if (values[i].has_adjoints()) {
            if (w != 0 && values[i].weight_count() != w)
                fail(ErrorKind::structural, "series adjoint width mismatch");
            w = values[i].weight_count();
        }
        if (!(weights[i] >= 0.0)) fail(ErrorKind::domain, "combination weights must be non-negative");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::domain, "combination weights must sum to 1");
    if (!weight_jacobian.empty()) {
        if (w == 0) w = weight_jacobian.size() / values.size();
        if (weight_jacobian.size() != values.size() * w)
            fail(ErrorKind::structural, "weight jacobian shape mismatch");
    }

    const auto n = static_cast<std::size_t>(order) + 1;
    std::vector<double> c(n, 0.0);
    std::vector<double> adj(n * w, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& v = values[i];
        for (std::size_t k = 0; k < n; ++k) c[k] += weights[i] * v.coeffs()[k];
        if (w == 0) continue;
        if (v.has_adjoints()) {
            const auto a = v.adjoints();
            for (std::size_t j = 0; j < n * w; ++j) adj[j] += weights[i] * a[j];
        }
        if (!weight_jacobian.empty()) {
            const auto g = weight_jacobian.subspan(i * w, w);
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < w; ++j) adj[k * w + j] += v.coeffs()[k] * g[j];
        }
    }
    if (w == 0) return SeriesValue(std::move(c));
    return SeriesValue(std::move(c), std::move(adj), w);
}

SeriesValue series_multiply(const SeriesValue& a, const SeriesValue& b)
{
    const std::size_t w = merged_weight_count(a, b);
    const int order = a.order();
    const auto n = static_cast<std::size_t>(order) + 1;
    std::vector<double> c(n, 0.0);
    for (int k = 0; k <= order; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += binomial(k, j) * a[j] * b[k - j];
        c[static_cast<std::size_t>(k)] = s;
    }
    if (w == 0) return SeriesValue(std::move(c));

    std::vector<double> adj(n * w, 0.0);
    for (int k = 0; k <= order; ++k) {
        double* out = adj.data() + static_cast<std::size_t>(k) * w;
        for (int j = 0; j <= k; ++j) {
            const double cb = binomial(k, j);
            if (a.has_adjoints()) {
                const auto da = a.adjoint(j);
                const double f = cb * b[k - j];
                for (std::size_t i = 0; i < w; ++i) out[i] += f * da[i];
            }
            if (b.has_adjoints()) {
                const auto db = b.adjoint(k - j);
                const double f = cb * a[j];
                for (std::size_t i = 0; i < w; ++i) out[i] += f * db[i];
            }
        }
    }
    return SeriesValue(std::move(c), std::move(adj), w);
}

SeriesValue series_add(const SeriesValue& a, const SeriesValue& b)
{
    const std::size_t w = merged_weight_count(a, b);
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += b.coeffs()[k];
    if (w == 0) return SeriesValue(std::move(c));
    std::vector<double> adj(c.size() * w, 0.0);
    for (const auto* s : {&a, &b}) {
        if (!s->has_adjoints()) continue;
        for (std::size_t j = 0; j < adj.size(); ++j) adj[j] += s->adjoints()[j];
    }
    return SeriesValue(std::move(c), std::move(adj), w);
}

SeriesValue series_scale(const SeriesValue& a, double factor)
{
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& x : c) x *= factor;
    if (!a.has_adjoints()) return SeriesValue(std::move(c));
    std::vector<double> adj(a.adjoints().begin(), a.adjoints().end());
    for (auto& x : adj) x *= factor;
    return SeriesValue(std::move(c), std::move(adj), a.weight_count());
}

SeriesValue series_shift(const SeriesValue& a, double offset)
{
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    c[0] += offset;
    if (!a.has_adjoints()) return SeriesValue(std::move(c));
    return SeriesValue(std::move(c), std::vector<double>(a.adjoints().begin(), a.adjoints().end()),
                       a.weight_count());
}

SeriesValue series_exp(const SeriesValue& a)
{
    refuse_adjoints(a);
    const auto x = to_taylor(a);
    std::vector<double> y(x.size(), 0.0);
    y[0] = std::exp(x[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x[j] * y[k - j];
        y[k] = s / static_cast<double>(k);
    }
    return from_taylor(std::move(y));
}

SeriesValue series_log(const SeriesValue& a)
{
    refuse_adjoints(a);
    if (!(a[0] > 0.0)) fail(ErrorKind::domain, "log of a non-positive series");
    const auto x = to_taylor(a);
    std::vector<double> y(x.size(), 0.0);
    y[0] = std::log(x[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * y[j] * x[k - j];
        y[k] = (x[k] - s / static_cast<double>(k)) / x[0];
    }
    return from_taylor(std::move(y));
}

SeriesValue series_pow(const SeriesValue& a, double exponent)
{
    refuse_adjoints(a);
    if (!(a[0] > 0.0)) fail(ErrorKind::domain, "power of a non-positive series");
    const auto x = to_taylor(a);
    std::vector<double> y(x.size(), 0.0);
    y[0] = std::pow(x[0], exponent);
    for (std::size_t k = 1; k < x.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            s += ((exponent + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * x[j] * y[k - j];
        y[k] = s / (static_cast<double>(k) * x[0]);
    }
    return from_taylor(std::move(y));
}

} // namespace acnet
