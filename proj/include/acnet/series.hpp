#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acnet {

//! Default cap on the derivative order the generator machinery will produce.
inline constexpr int kDefaultDerivativeCap = 6;

//! Hard structural limit for any series, independent of the configured cap.
inline constexpr int kMaxSeriesOrder = 24;

//! Truncated derivative stack of a scalar function of t.
//!
//! coeffs()[k] is the k-th derivative with respect to t (not the Taylor
//! coefficient). Optionally carries, for every coefficient, its gradient
//! with respect to a flat vector of raw weights (forward-mode adjoints).
class SeriesValue {
public:
    SeriesValue() = default;
    explicit SeriesValue(std::vector<double> coeffs);
    SeriesValue(std::vector<double> coeffs, std::vector<double> adjoints,
                std::size_t weight_count);

    static SeriesValue constant(double value, int order);
    //! The identity function f(t) = t at the given point.
    static SeriesValue identity(double t, int order);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const { return coeffs_; }
    double operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }

    bool has_adjoints() const { return weight_count_ > 0; }
    std::size_t weight_count() const { return weight_count_; }
    //! Gradient of coefficient k over the raw weights.
    std::span<const double> adjoint(int k) const;
    //! Row-major (order+1) x weight_count block, empty without adjoints.
    std::span<const double> adjoints() const { return adjoints_; }

private:
    std::vector<double> coeffs_;
    std::vector<double> adjoints_;
    std::size_t weight_count_ = 0;
};

//! exp(-rate * t) and its derivatives. When rate_gradient is non-empty it is
//! d(rate)/d(weights) and the result carries adjoints.
SeriesValue series_exp_decay(double rate, double t, int order,
                             std::span<const double> rate_gradient = {});

//! Convex combination sum_i weights[i] * values[i]. weight_jacobian, when
//! given, is row-major values.size() x weight_count holding d(weight_i)/dW.
SeriesValue series_combine(std::span<const SeriesValue> values,
                           std::span<const double> weights,
                           std::span<const double> weight_jacobian = {});

//! Truncated Leibniz product.
SeriesValue series_multiply(const SeriesValue& a, const SeriesValue& b);

SeriesValue series_add(const SeriesValue& a, const SeriesValue& b);
SeriesValue series_scale(const SeriesValue& a, double factor);
SeriesValue series_shift(const SeriesValue& a, double offset);

// Composition with elementary functions. Adjoint-carrying inputs are refused.
SeriesValue series_exp(const SeriesValue& a);
SeriesValue series_log(const SeriesValue& a);
SeriesValue series_pow(const SeriesValue& a, double exponent);

//! Binomial coefficient C(n, k) as a double, exact for n <= kMaxSeriesOrder.
double binomial(int n, int k);

} // namespace acnet
