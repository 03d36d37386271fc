#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acnet/series.hpp"

namespace acnet {

//! Layered convex combination of negative exponentials.
//!
//! Hidden layer l (1..L) node i computes
//!     phi[l,i](t) = exp(-B[l,i] t) * sum_j A[l,i,j] phi[l-1,j](t)
//! with phi[0,1] = 1, and the output is sum_j A[L+1,1,j] phi[L,j](t).
//! A rows are softmax(raw_A row), B = exp(raw_B).
//!
//! Raw weight layout: every raw_A entry for layers 1..L+1 (row-major
//! H[l] x H[l-1]), then every raw_B entry for layers 1..L.
class GeneratorNetwork {
public:
    GeneratorNetwork(std::vector<int> hidden_widths, std::vector<double> raw_weights);

    static std::size_t weight_count_for(std::span<const int> hidden_widths);

    int depth() const { return static_cast<int>(hidden_.size()); }
    std::span<const int> hidden_widths() const { return hidden_; }
    //! Width of layer l for l in [0, L+1]; layers 0 and L+1 have width 1.
    int width(int layer) const;

    std::span<const double> raw_weights() const { return raw_; }
    std::size_t weight_count() const { return raw_.size(); }

    std::size_t a_index(int layer, int i, int j) const;
    std::size_t b_index(int layer, int i) const;

    //! Derived (constrained) parameters.
    double a(int layer, int i, int j) const { return a_[a_index(layer, i, j)]; }
    double b(int layer, int i) const { return b_[b_index(layer, i) - b_offset_]; }
    std::span<const double> a_row(int layer, int i) const;

    //! Number of input-to-output paths, saturating at SIZE_MAX.
    std::size_t path_count() const;

    GeneratorNetwork with_weights(std::vector<double> raw_weights) const;

private:
    std::vector<int> hidden_;
    std::vector<double> raw_;
    std::vector<std::size_t> a_offsets_; // per layer 1..L+1 (index layer-1)
    std::size_t b_offset_ = 0;
    std::vector<std::size_t> b_offsets_; // per layer 1..L, absolute
    std::vector<double> a_;              // softmaxed, aligned with raw layout
    std::vector<double> b_;              // exp, aligned with raw_B part
};

//! Default architecture: two hidden layers of width 10.
std::vector<int> default_hidden_widths();

//! raw_A ~ U[0,1], raw_B ~ U(0,2), drawn from CounterRng(seed).
GeneratorNetwork init_network(std::span<const int> hidden_widths, std::uint64_t seed);

//! A single unit with B = 1: phi(t) = exp(-t), the independence copula.
GeneratorNetwork independence_network();

//! Reusable forward/backward evaluator of the generator's derivative stack.
//!
//! forward() records the intermediate series so that backward() can return
//! seed^T * d(coeffs)/d(raw weights) by reverse accumulation. Not thread safe;
//! use one evaluator per worker.
class PhiEvaluator {
public:
    explicit PhiEvaluator(const GeneratorNetwork& net);

    //! Evaluates phi and its first `order` derivatives at t >= 0.
    std::span<const double> forward(double t, int order);
    std::span<const double> output() const { return {out_.data(), static_cast<std::size_t>(order_) + 1}; }

    //! grad += sum_k seed[k] * d(coeff_k)/d(raw weights), for the last forward().
    void backward(std::span<const double> seed, std::span<double> grad);

    //! Fast order-0 / order-1 evaluation without recording.
    double value(double t);
    void value_and_slope(double t, double& value, double& slope);

    const GeneratorNetwork& network() const { return *net_; }

private:
    const GeneratorNetwork* net_;
    int order_ = -1;
    double t_ = 0.0;
    std::vector<std::size_t> node_offset_; // first node of each hidden layer
    std::vector<double> c_, e_, v_;        // node x kMaxSeriesOrder+1
    std::vector<double> cbar_, ebar_, vbar_;
    std::vector<double> decay_;            // exp(-B t) per node
    std::vector<double> out_;
    std::vector<double> scratch_;
};

//! phi and its derivatives up to `order`; with want_adjoints every
//! coefficient carries its gradient over the raw weights.
SeriesValue phi_eval(const GeneratorNetwork& net, double t, int order, bool want_adjoints,
                     int max_order = kDefaultDerivativeCap);

struct MixtureAtom {
    double weight;
    double rate;
};

//! Explicit finite mixture phi(t) = sum_k weight_k exp(-rate_k t), one atom
//! per path through the layer graph.
class MixtureRepresentation {
public:
    explicit MixtureRepresentation(std::vector<MixtureAtom> atoms) : atoms_(std::move(atoms)) {}

    std::span<const MixtureAtom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double total_weight() const;
    //! Closed-form derivative stack sum_k w_k (-r_k)^j exp(-r_k t).
    SeriesValue evaluate(double t, int order) const;
    //! E[M] = -phi'(0).
    double mean_rate() const;

private:
    std::vector<MixtureAtom> atoms_;
};

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

MixtureRepresentation enumerate_mixture(const GeneratorNetwork& net,
                                        std::size_t max_paths = kDefaultPathCap);

} // namespace acnet
