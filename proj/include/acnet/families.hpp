#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "acnet/series.hpp"

namespace acnet {

enum class Family { independence, clayton, frank, joe, gumbel };

const char* family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

//! A closed-form Archimedean family restricted to its completely monotone range
//! (Clayton, Frank: theta > 0; Joe, Gumbel: theta >= 1).
class ParametricFamily {
public:
    ParametricFamily(Family family, double theta);

    static ParametricFamily independence() { return {Family::independence, 1.0}; }

    Family family() const { return family_; }
    double theta() const { return theta_; }

    //! Smallest admissible theta (exclusive for Clayton/Frank).
    static double theta_floor(Family f);
    static bool theta_valid(Family f, double theta);

private:
    Family family_;
    double theta_;
};

//! Generator and its derivatives up to `order`.
SeriesValue ref_generator(const ParametricFamily& f, double t, int order);

//! Closed-form generator inverse, u in (0, 1].
double ref_inverse(const ParametricFamily& f, double u);

//! n exact draws from the bivariate copula by conditional inversion,
//! row-major n x 2. Point i uses CounterRng(seed, i).
std::vector<double> ref_sample_bivariate(const ParametricFamily& f, std::size_t n, std::uint64_t seed);

//! n draws from the d-dimensional Clayton copula via a Gamma(1/theta, 1)
//! mixing variable, row-major n x d.
std::vector<double> sample_clayton_mixture(double theta, int dim, std::size_t n, std::uint64_t seed);

class Dataset;

struct ParametricFitConfig {
    double learning_rate = 1.0;
    double momentum = 0.9;
    int max_iterations = 2000;
    //! Stop once a step moves theta by less than this (relative above 1).
    double step_tolerance = 1e-9;
    std::optional<double> initial_theta;
};

struct ParametricFit {
    ParametricFamily model;
    double train_nll;
    std::optional<double> test_nll;
    int iterations;
};

//! Maximum-likelihood fit of theta by momentum gradient descent, projected
//! onto the family's range. A step that raises the loss is rejected and halves
//! the rate.
ParametricFit fit_parametric(Family family, const Dataset& train, const Dataset* test = nullptr,
                             const ParametricFitConfig& config = {});

//! Mean negative log density of the data under the family.
double parametric_nll(const ParametricFamily& f, const Dataset& data);

} // namespace acnet
