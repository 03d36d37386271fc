#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "acnet/errors.hpp"
#include "acnet/generator_net.hpp"

namespace acnet {

struct InversionSettings {
    //! Required absolute residual |phi(t) - u| at the returned point.
    double tolerance = 1e-10;
    int max_iterations = 200;
};

struct RootSolve {
    double t = 0.0;
    int iterations = 0;
    double value = 1.0; // f(t) at the returned point
};

//! Solves f(t) = target on [start, inf) for f positive, strictly decreasing
//! and log-convex, with f(start) >= target.
//!
//! Newton steps on log f keep the iterate inside the bracket [lo, hi]
//! (phi(lo) >= target >= phi(hi)); a step that leaves it falls back to
//! bisection, or to doubling while no upper end is known yet. `eval(t, f, df)`
//! must set f(t) and f'(t).
template <class Eval>
RootSolve solve_decreasing(Eval&& eval, double target, double start, const InversionSettings& settings)
{
    // The bracket cap is 2^100 beyond the start (plain 2^100 from t = 0).
    const double kMaxT = std::max(0x1.0p100, start * 0x1.0p100);
    const double log_target = std::log(target);
    double lo = start;
    double hi = std::numeric_limits<double>::infinity();
    double t = start;
    double best_t = start;
    double best_res = std::numeric_limits<double>::infinity();
    double best_f = 1.0;

    for (int it = 1; it <= settings.max_iterations; ++it) {
        double f = 0.0;
        double df = 0.0;
        eval(t, f, df);
        const double res = std::abs(f - target);
        if (res < best_res || (res == best_res && f >= target)) {
            best_res = res;
            best_t = t;
            best_f = f;
        }
        if (f == target) return {t, it, f};
        if (f > target && t >= kMaxT) throw ConvergenceError("no upper bracket below the cap", lo, hi);
        if (f > target)
            lo = std::max(lo, t);
        else
            hi = std::min(hi, t);

        double next = std::numeric_limits<double>::quiet_NaN();
        if (f > 0.0 && df < 0.0) {
            const double g = std::log(f) - log_target;
            next = t - g * f / df;
            if (std::abs(g) <= 1e-15 && res <= settings.tolerance) return {t, it, f};
        }
        if (!(next > lo && next < hi)) {
            if (std::isinf(hi)) {
                next = std::max(2.0 * t, 1.0);
                if (next > kMaxT)
                    throw ConvergenceError("no upper bracket below the cap", lo, hi);
            } else {
                next = 0.5 * (lo + hi);
            }
        }
        next = std::min(next, kMaxT);
        const double step = std::abs(next - t);
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1e-300) ||
            (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)) {
            if (best_res <= settings.tolerance) return {best_t, it, best_f};
            break;
        }
        t = next;
    }
    if (best_res <= settings.tolerance) return {best_t, settings.max_iterations, best_f};
    throw ConvergenceError("root search did not reach the residual tolerance", lo, hi);
}

//! Result of inverting the generator, with derivatives of the inverse.
struct InverseResult {
    double t_star = 0.0;
    double residual = 0.0;
    int iterations = 0;
    //! d t_star / d u = 1 / phi'(t_star).
    double d_du = 0.0;
    //! d t_star / d raw weights = -(d phi / d weights) / phi'(t_star).
    std::vector<double> d_dphi;
};

//! phi^{-1}(u) for u in (0, 1], with derivatives.
InverseResult invert(const GeneratorNetwork& net, double u, const InversionSettings& settings = {});

//! phi^{-1}(u) only, reusing an evaluator. Shares validation with invert().
RootSolve invert_value(PhiEvaluator& eval, double u, const InversionSettings& settings = {});

} // namespace acnet
