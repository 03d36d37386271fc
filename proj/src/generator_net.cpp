#include "acnet/generator_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acnet/errors.hpp"
#include "acnet/rng.hpp"

namespace acnet {

namespace {

void softmax_rows(std::span<const double> raw, int rows, int cols, std::span<double> out)
{
    for (int i = 0; i < rows; ++i) {
        const auto r = raw.subspan(static_cast<std::size_t>(i * cols), static_cast<std::size_t>(cols));
        auto o = out.subspan(static_cast<std::size_t>(i * cols), static_cast<std::size_t>(cols));
        const double m = *std::max_element(r.begin(), r.end());
        double s = 0.0;
        for (int j = 0; j < cols; ++j) {
            o[j] = std::exp(r[j] - m);
            s += o[j];
        }
        for (int j = 0; j < cols; ++j) o[j] /= s;
    }
}

// grad_raw += A .* (abar - <A, abar>) for one softmax row.
void softmax_backward(std::span<const double> a, std::span<const double> abar, double* grad)
{
    double dot = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) dot += a[j] * abar[j];
    for (std::size_t j = 0; j < a.size(); ++j) grad[j] += a[j] * (abar[j] - dot);
}

} // namespace

GeneratorNetwork::GeneratorNetwork(std::vector<int> hidden_widths, std::vector<double> raw_weights)
    : hidden_(std::move(hidden_widths)), raw_(std::move(raw_weights))
{
    if (hidden_.empty()) fail(ErrorKind::domain, "generator needs at least one hidden layer");
    for (int h : hidden_)
        if (h < 1) fail(ErrorKind::domain, "layer widths must be positive");
    const std::size_t expected = weight_count_for(hidden_);
    if (raw_.size() != expected)
        fail(ErrorKind::structural, "expected " + std::to_string(expected) + " raw weights, got " +
                                        std::to_string(raw_.size()));
    for (double w : raw_)
        if (!std::isfinite(w)) fail(ErrorKind::domain, "raw weights must be finite");

    const int L = depth();
    std::size_t off = 0;
    for (int l = 1; l <= L + 1; ++l) {
        a_offsets_.push_back(off);
        off += static_cast<std::size_t>(width(l) * width(l - 1));
    }
    b_offset_ = off;
    for (int l = 1; l <= L; ++l) {
        b_offsets_.push_back(off);
        off += static_cast<std::size_t>(width(l));
    }

    a_.assign(b_offset_, 0.0);
    for (int l = 1; l <= L + 1; ++l) {
        const auto n = static_cast<std::size_t>(width(l) * width(l - 1));
        softmax_rows(std::span<const double>(raw_).subspan(a_offsets_[l - 1], n), width(l), width(l - 1),
                     std::span<double>(a_).subspan(a_offsets_[l - 1], n));
    }
    b_.resize(raw_.size() - b_offset_);
    for (std::size_t k = 0; k < b_.size(); ++k) b_[k] = std::exp(raw_[b_offset_ + k]);
}

std::size_t GeneratorNetwork::weight_count_for(std::span<const int> hidden_widths)
{
    std::size_t n = 0;
    int prev = 1;
    for (int h : hidden_widths) {
        n += static_cast<std::size_t>(h) * static_cast<std::size_t>(prev) + static_cast<std::size_t>(h);
        prev = h;
    }
    return n + static_cast<std::size_t>(prev);
}

int GeneratorNetwork::width(int layer) const
{
    if (layer == 0 || layer == depth() + 1) return 1;
    return hidden_[static_cast<std::size_t>(layer - 1)];
}

std::size_t GeneratorNetwork::a_index(int layer, int i, int j) const
{
    return a_offsets_[static_cast<std::size_t>(layer - 1)] + static_cast<std::size_t>(i * width(layer - 1) + j);
}

std::size_t GeneratorNetwork::b_index(int layer, int i) const
{
    return b_offsets_[static_cast<std::size_t>(layer - 1)] + static_cast<std::size_t>(i);
}

std::span<const double> GeneratorNetwork::a_row(int layer, int i) const
{
    return std::span<const double>(a_).subspan(a_index(layer, i, 0), static_cast<std::size_t>(width(layer - 1)));
}

std::size_t GeneratorNetwork::path_count() const
{
    std::size_t n = 1;
    for (int h : hidden_) {
        const auto hh = static_cast<std::size_t>(h);
        if (n > std::numeric_limits<std::size_t>::max() / hh) return std::numeric_limits<std::size_t>::max();
        n *= hh;
    }
    return n;
}

GeneratorNetwork GeneratorNetwork::with_weights(std::vector<double> raw_weights) const
{
    return GeneratorNetwork(hidden_, std::move(raw_weights));
}

std::vector<int> default_hidden_widths() { return {10, 10}; }

GeneratorNetwork init_network(std::span<const int> hidden_widths, std::uint64_t seed)
{
    std::vector<int> widths(hidden_widths.begin(), hidden_widths.end());
    if (widths.empty()) fail(ErrorKind::domain, "generator needs at least one hidden layer");
    for (int h : widths)
        if (h < 1) fail(ErrorKind::domain, "layer widths must be positive");
    const std::size_t n = GeneratorNetwork::weight_count_for(widths);
    std::size_t n_b = 0;
    for (int h : widths) n_b += static_cast<std::size_t>(h);

    CounterRng rng(seed);
    std::vector<double> raw(n);
    for (std::size_t k = 0; k < n - n_b; ++k) raw[k] = rng.uniform();
    for (std::size_t k = n - n_b; k < n; ++k) raw[k] = rng.uniform(0.0, 2.0);
    return GeneratorNetwork(std::move(widths), std::move(raw));
}

GeneratorNetwork independence_network()
{
    // raw_A: layer 1 (1x1), output (1x1); raw_B: 0 so B = 1.
    return GeneratorNetwork({1}, {0.0, 0.0, 0.0});
}

// ---------------------------------------------------------------------------

PhiEvaluator::PhiEvaluator(const GeneratorNetwork& net) : net_(&net)
{
    std::size_t nodes = 0;
    for (int l = 1; l <= net.depth(); ++l) {
        node_offset_.push_back(nodes);
        nodes += static_cast<std::size_t>(net.width(l));
    }
    const std::size_t stride = kMaxSeriesOrder + 1;
    c_.resize(nodes * stride);
    e_.resize(nodes * stride);
    v_.resize(nodes * stride);
    vbar_.resize(nodes * stride);
    decay_.resize(nodes);
    out_.resize(stride);
    cbar_.resize(stride);
    ebar_.resize(stride);
    int widest = 1;
    for (int h : net.hidden_widths()) widest = std::max(widest, h);
    scratch_.resize(static_cast<std::size_t>(widest) + stride);
}

std::span<const double> PhiEvaluator::forward(double t, int order)
{
    const GeneratorNetwork& net = *net_;
    const auto n = static_cast<std::size_t>(order) + 1;
    order_ = order;
    t_ = t;

    // Input layer: the constant 1.
    double input[kMaxSeriesOrder + 1] = {1.0};
    const double* prev = input;
    int prev_width = 1;

    for (int l = 1; l <= net.depth(); ++l) {
        const int h = net.width(l);
        const std::size_t base = node_offset_[static_cast<std::size_t>(l - 1)];
        for (int i = 0; i < h; ++i) {
            const std::size_t node = base + static_cast<std::size_t>(i);
            double* c = &c_[node * n];
            double* e = &e_[node * n];
            double* v = &v_[node * n];
            const auto a = net.a_row(l, i);
            std::fill(c, c + n, 0.0);
            for (int j = 0; j < prev_width; ++j) {
                const double w = a[static_cast<std::size_t>(j)];
                const double* pj = prev + static_cast<std::size_t>(j) * n;
                for (std::size_t k = 0; k < n; ++k) c[k] += w * pj[k];
            }
            const double rate = net.b(l, i);
            const double decay = std::exp(-rate * t);
            decay_[node] = decay;
            double p = decay;
            for (std::size_t k = 0; k < n; ++k) {
                e[k] = p;
                p *= -rate;
            }
            for (std::size_t k = 0; k < n; ++k) {
                double s = 0.0;
                for (std::size_t m = 0; m <= k; ++m)
                    s += binomial(static_cast<int>(k), static_cast<int>(m)) * c[m] * e[k - m];
                v[k] = s;
            }
        }
        prev = &v_[base * n];
        prev_width = h;
    }

    const auto a_out = net.a_row(net.depth() + 1, 0);
    std::fill(out_.begin(), out_.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    for (int j = 0; j < prev_width; ++j) {
        const double w = a_out[static_cast<std::size_t>(j)];
        const double* pj = prev + static_cast<std::size_t>(j) * n;
        for (std::size_t k = 0; k < n; ++k) out_[k] += w * pj[k];
    }
    // Every layer is a convex combination of ones at t = 0; drop the rounding.
    if (t == 0.0) out_[0] = 1.0;
    return output();
}

void PhiEvaluator::backward(std::span<const double> seed, std::span<double> grad)
{
    const GeneratorNetwork& net = *net_;
    if (order_ < 0) fail(ErrorKind::structural, "backward() before forward()");
    const auto n = static_cast<std::size_t>(order_) + 1;
    if (seed.size() != n) fail(ErrorKind::structural, "seed length must equal order + 1");
    if (grad.size() != net.weight_count()) fail(ErrorKind::structural, "gradient length mismatch");
    const int L = net.depth();

    std::fill(vbar_.begin(), vbar_.end(), 0.0);
    double* abar = scratch_.data();

    // Output layer.
    {
        const int h = net.width(L);
        const std::size_t base = node_offset_[static_cast<std::size_t>(L - 1)];
        const auto a = net.a_row(L + 1, 0);
        for (int j = 0; j < h; ++j) {
            const std::size_t node = base + static_cast<std::size_t>(j);
            const double* v = &v_[node * n];
            double* vb = &vbar_[node * n];
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += seed[k] * v[k];
                vb[k] = a[static_cast<std::size_t>(j)] * seed[k];
            }
            abar[j] = s;
        }
        softmax_backward(a, std::span<const double>(abar, static_cast<std::size_t>(h)),
                         &grad[net.a_index(L + 1, 0, 0)]);
    }

    const double input[kMaxSeriesOrder + 1] = {1.0};
    for (int l = L; l >= 1; --l) {
        const int h = net.width(l);
        const int hp = net.width(l - 1);
        const std::size_t base = node_offset_[static_cast<std::size_t>(l - 1)];
        const double* prev = l > 1 ? &v_[node_offset_[static_cast<std::size_t>(l - 2)] * n] : input;
        double* prev_bar = l > 1 ? &vbar_[node_offset_[static_cast<std::size_t>(l - 2)] * n] : nullptr;

        for (int i = 0; i < h; ++i) {
            const std::size_t node = base + static_cast<std::size_t>(i);
            const double* c = &c_[node * n];
            const double* e = &e_[node * n];
            const double* vb = &vbar_[node * n];

            // v[k] = sum_m C(k,m) c[m] e[k-m]
            for (std::size_t m = 0; m < n; ++m) {
                double cb = 0.0;
                double eb = 0.0;
                for (std::size_t k = m; k < n; ++k) {
                    const double bk = binomial(static_cast<int>(k), static_cast<int>(m));
                    cb += bk * vb[k] * e[k - m];
                    eb += bk * vb[k] * c[k - m];
                }
                cbar_[m] = cb;
                ebar_[m] = eb;
            }

            // e[k] = (-B)^k exp(-B t); de[k]/dB = -k (-B)^{k-1} exp(-B t) - t e[k]
            const double rate = net.b(l, i);
            const double decay = decay_[node];
            double rbar = 0.0;
            double pk1 = decay; // (-B)^{k-1} exp(-B t)
            for (std::size_t k = 0; k < n; ++k) {
                double de = -t_ * e[k];
                if (k > 0) {
                    de -= static_cast<double>(k) * pk1;
                    pk1 *= -rate;
                }
                rbar += ebar_[k] * de;
            }
            grad[net.b_index(l, i)] += rbar * rate;

            const auto a = net.a_row(l, i);
            for (int j = 0; j < hp; ++j) {
                const double* pj = prev + static_cast<std::size_t>(j) * n;
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += cbar_[k] * pj[k];
                abar[j] = s;
                if (prev_bar != nullptr) {
                    double* pb = prev_bar + static_cast<std::size_t>(j) * n;
                    const double w = a[static_cast<std::size_t>(j)];
                    for (std::size_t k = 0; k < n; ++k) pb[k] += w * cbar_[k];
                }
            }
            softmax_backward(a, std::span<const double>(abar, static_cast<std::size_t>(hp)),
                             &grad[net.a_index(l, i, 0)]);
        }
    }
}

double PhiEvaluator::value(double t) { return forward(t, 0)[0]; }

void PhiEvaluator::value_and_slope(double t, double& value, double& slope)
{
    const auto out = forward(t, 1);
    value = out[0];
    slope = out[1];
}

SeriesValue phi_eval(const GeneratorNetwork& net, double t, int order, bool want_adjoints, int max_order)
{
    if (!std::isfinite(t) || t < 0.0) fail(ErrorKind::domain, "phi is defined for finite t >= 0");
    if (order < 0) fail(ErrorKind::domain, "derivative order must be non-negative");
    if (order > max_order || order > kMaxSeriesOrder)
        fail(ErrorKind::capacity, "derivative order " + std::to_string(order) + " exceeds the configured cap " +
                                      std::to_string(max_order));

    PhiEvaluator eval(net);
    const auto out = eval.forward(t, order);
    std::vector<double> coeffs(out.begin(), out.end());
    if (!want_adjoints) return SeriesValue(std::move(coeffs));

    const std::size_t n = coeffs.size();
    const std::size_t w = net.weight_count();
    std::vector<double> adj(n * w, 0.0);
    std::vector<double> seed(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        seed.assign(n, 0.0);
        seed[k] = 1.0;
        eval.backward(seed, std::span<double>(adj).subspan(k * w, w));
    }
    return SeriesValue(std::move(coeffs), std::move(adj), w);
}

// ---------------------------------------------------------------------------

double MixtureRepresentation::total_weight() const
{
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

double MixtureRepresentation::mean_rate() const
{
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * a.rate;
    return s;
}

SeriesValue MixtureRepresentation::evaluate(double t, int order) const
{
    if (order < 0 || order > kMaxSeriesOrder) fail(ErrorKind::domain, "derivative order out of range");
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    for (const auto& atom : atoms_) {
        double p = atom.weight * std::exp(-atom.rate * t);
        for (auto& ck : c) {
            ck += p;
            p *= -atom.rate;
        }
    }
    return SeriesValue(std::move(c));
}

MixtureRepresentation enumerate_mixture(const GeneratorNetwork& net, std::size_t max_paths)
{
    const std::size_t paths = net.path_count();
    if (paths > max_paths)
        fail(ErrorKind::capacity, "network has " + std::to_string(paths) + " paths, above the cap of " +
                                      std::to_string(max_paths));

    // Atoms reaching each node of the current layer, forward from the input.
    std::vector<std::vector<MixtureAtom>> layer{{MixtureAtom{1.0, 0.0}}};
    for (int l = 1; l <= net.depth(); ++l) {
        std::vector<std::vector<MixtureAtom>> next(static_cast<std::size_t>(net.width(l)));
        for (int i = 0; i < net.width(l); ++i) {
            const double rate = net.b(l, i);
            auto& atoms = next[static_cast<std::size_t>(i)];
            for (int j = 0; j < net.width(l - 1); ++j) {
                const double w = net.a(l, i, j);
                for (const auto& atom : layer[static_cast<std::size_t>(j)])
                    atoms.push_back({w * atom.weight, atom.rate + rate});
            }
        }
        layer = std::move(next);
    }
    std::vector<MixtureAtom> out;
    out.reserve(paths);
    const int L = net.depth();
    for (int j = 0; j < net.width(L); ++j) {
        const double w = net.a(L + 1, 0, j);
        for (const auto& atom : layer[static_cast<std::size_t>(j)]) out.push_back({w * atom.weight, atom.rate});
    }
    return MixtureRepresentation(std::move(out));
}

} // namespace acnet
