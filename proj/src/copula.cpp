#include "acnet/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acnet/errors.hpp"

namespace acnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sorted_sum(std::vector<double>& xs)
{
    // Summation order fixed by value so C is exactly exchangeable.
    std::sort(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

void check_point(const CopulaModel& model, std::span<const double> u)
{
    if (u.size() != static_cast<std::size_t>(model.dim()))
        fail(ErrorKind::structural, "point has " + std::to_string(u.size()) + " coordinates, model has " +
                                        std::to_string(model.dim()));
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::domain, "copula arguments must lie in [0, 1]");
}

void check_interior(std::span<const double> u)
{
    for (double x : u)
        if (!(x > 0.0 && x < 1.0)) fail(ErrorKind::domain, "density needs a point strictly inside (0, 1)^d");
}

void check_order(const CopulaModel& model, int order, const char* what)
{
    if (order > model.settings().derivative_cap)
        fail(ErrorKind::capacity, std::string(what) + " needs derivative order " + std::to_string(order) +
                                      " above the cap " + std::to_string(model.settings().derivative_cap));
}

double sign_pow(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

struct Mask {
    std::vector<bool> observed;
    int count = 0;
};

Mask check_query(const CopulaModel& model, const ConditioningQuery& q)
{
    const int d = model.dim();
    if (q.point.size() != static_cast<std::size_t>(d))
        fail(ErrorKind::structural, "query point dimension does not match the model");
    Mask m{std::vector<bool>(static_cast<std::size_t>(d), false), 0};
    for (int k : q.observed) {
        if (k < 0 || k >= d) fail(ErrorKind::domain, "observed index out of range");
        if (m.observed[static_cast<std::size_t>(k)]) fail(ErrorKind::domain, "duplicate observed index");
        m.observed[static_cast<std::size_t>(k)] = true;
        ++m.count;
    }
    if (m.count == 0 || m.count == d)
        fail(ErrorKind::domain, "observed set must be non-empty and proper");
    for (int i = 0; i < d; ++i) {
        const double x = q.point[static_cast<std::size_t>(i)];
        if (m.observed[static_cast<std::size_t>(i)]) {
            if (!(x > 0.0 && x < 1.0)) fail(ErrorKind::domain, "observed values must lie in (0, 1)");
        } else if (!(x > 0.0 && x <= 1.0)) {
            fail(ErrorKind::domain, "query values must lie in (0, 1]");
        }
    }
    return m;
}

// log((-1)^k phi^(k)(s)); numeric-degeneracy when the magnitude vanishes.
double log_signed_derivative(GeneratorView& view, double s, int k, const char* what)
{
    double buf[kMaxSeriesOrder + 1];
    view.series(s, k, std::span<double>(buf, static_cast<std::size_t>(k) + 1));
    const double v = sign_pow(k) * buf[k];
    if (!(v > 0.0) || !std::isfinite(v))
        fail(ErrorKind::numeric_degeneracy, std::string(what) + ": generator derivative of order " +
                                                std::to_string(k) + " is not positive at s = " + std::to_string(s));
    return std::log(v);
}

} // namespace

CopulaModel::CopulaModel(int dim, Generator generator, EvalSettings settings)
    : dim_(dim), generator_(std::move(generator)), settings_(settings)
{
    if (dim_ < 2) fail(ErrorKind::domain, "copula dimension must be at least 2");
    if (settings_.derivative_cap < 1 || settings_.derivative_cap > kMaxSeriesOrder)
        fail(ErrorKind::domain, "derivative cap out of range");
}

GeneratorView::GeneratorView(const CopulaModel& model) : model_(&model)
{
    if (const auto* net = model.network()) eval_.emplace(*net);
}

void GeneratorView::series(double t, int order, std::span<double> out)
{
    if (eval_) {
        if (!std::isfinite(t) || t < 0.0) fail(ErrorKind::domain, "phi is defined for finite t >= 0");
        const auto s = eval_->forward(t, order);
        std::copy(s.begin(), s.end(), out.begin());
        return;
    }
    const auto s = ref_generator(*model_->family(), t, order);
    std::copy(s.coeffs().begin(), s.coeffs().end(), out.begin());
}

double GeneratorView::value(double t)
{
    double v[1];
    series(t, 0, v);
    return v[0];
}

double GeneratorView::inverse(double u)
{
    const double x = std::max(u, model_->settings().clamp_floor);
    if (eval_) return invert_value(*eval_, x, model_->settings().inversion).t;
    return ref_inverse(*model_->family(), x);
}

double cdf(const CopulaModel& model, std::span<const double> u)
{
    check_point(model, u);
    for (double x : u)
        if (x == 0.0) return 0.0;
    GeneratorView view(model);
    std::vector<double> ts;
    ts.reserve(u.size());
    for (double x : u)
        if (x < 1.0) ts.push_back(view.inverse(x));
    if (ts.empty()) return 1.0;
    return std::clamp(view.value(sorted_sum(ts)), 0.0, 1.0);
}

double log_density(const CopulaModel& model, std::span<const double> u)
{
    check_point(model, u);
    check_interior(u);
    const int d = model.dim();
    check_order(model, d, "density");
    GeneratorView view(model);
    std::vector<double> ts;
    std::vector<double> slopes;
    ts.reserve(u.size());
    slopes.reserve(u.size());
    for (double x : u) {
        const double t = view.inverse(x);
        ts.push_back(t);
        slopes.push_back(log_signed_derivative(view, t, 1, "density"));
    }
    return log_signed_derivative(view, sorted_sum(ts), d, "density") - sorted_sum(slopes);
}

double conditional_cdf(const CopulaModel& model, const ConditioningQuery& q)
{
    const Mask m = check_query(model, q);
    check_order(model, m.count + 1, "conditional distribution");
    GeneratorView view(model);
    std::vector<double> all;
    std::vector<double> observed;
    for (std::size_t i = 0; i < q.point.size(); ++i) {
        const double x = q.point[i];
        if (x == 1.0) continue;
        const double t = view.inverse(x);
        all.push_back(t);
        if (m.observed[i]) observed.push_back(t);
    }
    const double s_obs = sorted_sum(observed);
    const double s_all = sorted_sum(all);
    if (s_all == s_obs) return 1.0;
    const int k = m.count;
    double num[kMaxSeriesOrder + 1];
    double den[kMaxSeriesOrder + 1];
    view.series(s_all, k, std::span<double>(num, static_cast<std::size_t>(k) + 1));
    view.series(s_obs, k, std::span<double>(den, static_cast<std::size_t>(k) + 1));
    const double n = sign_pow(k) * num[k];
    const double dd = sign_pow(k) * den[k];
    if (!(dd > 0.0) || !std::isfinite(dd))
        fail(ErrorKind::numeric_degeneracy, "conditional distribution has a vanishing normalizer");
    return std::clamp(n / dd, 0.0, 1.0);
}

double conditional_log_density(const CopulaModel& model, const ConditioningQuery& q)
{
    const Mask m = check_query(model, q);
    check_interior(q.point);
    const double joint = log_density(model, q.point);
    GeneratorView view(model);
    std::vector<double> observed;
    std::vector<double> slopes;
    for (std::size_t i = 0; i < q.point.size(); ++i) {
        if (!m.observed[i]) continue;
        const double t = view.inverse(q.point[i]);
        observed.push_back(t);
        slopes.push_back(log_signed_derivative(view, t, 1, "conditional density"));
    }
    const double log_marginal =
        log_signed_derivative(view, sorted_sum(observed), m.count, "conditional density") - sorted_sum(slopes);
    return joint - log_marginal;
}

double rectangle_prob(const CopulaModel& model, const Rectangle& r)
{
    const int d = model.dim();
    check_point(model, r.lower);
    check_point(model, r.upper);
    for (int i = 0; i < d; ++i)
        if (r.lower[static_cast<std::size_t>(i)] > r.upper[static_cast<std::size_t>(i)])
            fail(ErrorKind::domain, "rectangle lower bound exceeds upper bound");
    if (d > 24) fail(ErrorKind::capacity, "rectangle probability limited to d <= 24");

    GeneratorView view(model);
    // Per coordinate: inverse at the lower and upper bound; NaN marks a zero bound.
    std::vector<double> t_lo(static_cast<std::size_t>(d));
    std::vector<double> t_hi(static_cast<std::size_t>(d));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < t_lo.size(); ++i) {
        t_lo[i] = r.lower[i] == 0.0 ? nan : view.inverse(r.lower[i]);
        t_hi[i] = r.upper[i] == 0.0 ? nan : view.inverse(r.upper[i]);
    }

    double total = 0.0;
    std::vector<double> ts(static_cast<std::size_t>(d));
    const std::uint64_t corners = std::uint64_t{1} << d;
    for (std::uint64_t mask = 0; mask < corners; ++mask) {
        int lower_count = 0;
        bool zero = false;
        for (int i = 0; i < d; ++i) {
            const bool use_lower = (mask >> i) & 1U;
            const double t = use_lower ? t_lo[static_cast<std::size_t>(i)] : t_hi[static_cast<std::size_t>(i)];
            lower_count += use_lower ? 1 : 0;
            if (std::isnan(t)) zero = true;
            ts[static_cast<std::size_t>(i)] = t;
        }
        if (zero) continue;
        auto sorted = ts;
        const double c = view.value(sorted_sum(sorted));
        total += (lower_count % 2 == 0) ? c : -c;
    }
    if (total < -1e-9)
        fail(ErrorKind::invariant_violation,
             "rectangle probability " + std::to_string(total) + " is negative beyond rounding");
    return std::max(total, 0.0);
}

double rectangle_log_prob(const CopulaModel& model, const Rectangle& r)
{
    const double p = rectangle_prob(model, r);
    return p > 0.0 ? std::log(p) : kNegInf;
}

std::vector<TailRatio> tail_dependence_profile(const CopulaModel& model, std::span<const double> levels)
{
    if (model.dim() != 2) fail(ErrorKind::unsupported, "tail dependence is defined for d = 2");
    std::vector<TailRatio> out;
    out.reserve(levels.size());
    for (double u : levels) {
        if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::domain, "tail levels must lie in (0, 1)");
        const double pt[2] = {u, u};
        const double c = cdf(model, pt);
        out.push_back({u, c / u, (c - 2.0 * u + 1.0) / (1.0 - u)});
    }
    return out;
}

} // namespace acnet
