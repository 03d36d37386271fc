#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "acnet/families.hpp"
#include "acnet/generator_net.hpp"
#include "acnet/inversion.hpp"

namespace acnet {

using Generator = std::variant<GeneratorNetwork, ParametricFamily>;

struct EvalSettings {
    int derivative_cap = kDefaultDerivativeCap;
    //! Inputs below this are raised to it before inversion.
    double clamp_floor = 1e-12;
    InversionSettings inversion{};
};

//! An Archimedean copula C(u) = phi(sum_i phi^{-1}(u_i)) in dimension d >= 2.
class CopulaModel {
public:
    CopulaModel(int dim, Generator generator, EvalSettings settings = {});

    int dim() const { return dim_; }
    const Generator& generator() const { return generator_; }
    const EvalSettings& settings() const { return settings_; }

    const GeneratorNetwork* network() const { return std::get_if<GeneratorNetwork>(&generator_); }
    const ParametricFamily* family() const { return std::get_if<ParametricFamily>(&generator_); }

    CopulaModel with_dim(int dim) const { return CopulaModel(dim, generator_, settings_); }

private:
    int dim_;
    Generator generator_;
    EvalSettings settings_;
};

//! Uniform access to phi, its derivatives and its inverse for either kind of
//! generator. Holds evaluator scratch; one per thread.
class GeneratorView {
public:
    explicit GeneratorView(const CopulaModel& model);

    //! Fills out[0..order] with phi^(k)(t).
    void series(double t, int order, std::span<double> out);
    double value(double t);
    double inverse(double u);

private:
    const CopulaModel* model_;
    std::optional<PhiEvaluator> eval_;
};

//! Observed coordinates K with their values taken from `point`; the remaining
//! coordinates of `point` are the query values.
struct ConditioningQuery {
    std::vector<int> observed;
    std::vector<double> point;
};

struct Rectangle {
    std::vector<double> lower;
    std::vector<double> upper;
};

double cdf(const CopulaModel& model, std::span<const double> u);

//! log of (-1)^d phi^(d)(s) / prod_i (-phi'(t_i)).
double log_density(const CopulaModel& model, std::span<const double> u);

//! P(U_Kbar <= x_Kbar | U_K = x_K) = phi^(k)(s) / phi^(k)(s_K).
double conditional_cdf(const CopulaModel& model, const ConditioningQuery& q);

//! log p(x_Kbar | x_K): joint log density minus the log of the k-fold mixed
//! partial of C at (x_K, 1).
double conditional_log_density(const CopulaModel& model, const ConditioningQuery& q);

//! Inclusion-exclusion probability of the rectangle, clamped at 0 after a
//! -1e-9 sanity check.
double rectangle_prob(const CopulaModel& model, const Rectangle& r);
double rectangle_log_prob(const CopulaModel& model, const Rectangle& r);

struct TailRatio {
    double u;
    double lower; // C(u,u) / u
    double upper; // (C(u,u) - 2u + 1) / (1 - u)
};

std::vector<TailRatio> tail_dependence_profile(const CopulaModel& model, std::span<const double> levels);

} // namespace acnet
