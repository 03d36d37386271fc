#include "acnet/training.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "acnet/errors.hpp"
#include "acnet/parallel.hpp"
#include "acnet/rng.hpp"

namespace acnet {

namespace {

constexpr double kClampFloor = 1e-12;

double sorted_sum(double* xs, std::size_t n)
{
    std::sort(xs, xs + n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
}

// -log p(u) and, when grad is non-empty, its gradient (accumulated into grad).
double point_loss(PhiEvaluator& ev, std::span<const double> u, std::span<double> grad,
                  const InversionSettings& settings)
{
    const int d = static_cast<int>(u.size());
    const bool want = !grad.empty();
    double ts[kMaxSeriesOrder + 1];
    double sorted[kMaxSeriesOrder + 1];
    for (int i = 0; i < d; ++i) {
        const double x = u[static_cast<std::size_t>(i)];
        if (!(x > 0.0 && x < 1.0)) fail(ErrorKind::domain, "training points must lie strictly inside (0, 1)^d");
        ts[i] = invert_value(ev, std::max(x, kClampFloor), settings).t;
        sorted[i] = ts[i];
    }
    const double s = sorted_sum(sorted, static_cast<std::size_t>(d));

    const double sign_d = (d % 2 == 0) ? 1.0 : -1.0;
    const auto top = ev.forward(s, want ? d + 1 : d);
    const double phi_d = top[static_cast<std::size_t>(d)];
    const double numer = sign_d * phi_d;
    if (!(numer > 0.0) || !std::isfinite(numer))
        fail(ErrorKind::numeric_degeneracy, "density numerator vanished");
    const double ratio = want ? top[static_cast<std::size_t>(d) + 1] / phi_d : 0.0;
    double loss = -std::log(numer);

    if (want) {
        double seed[kMaxSeriesOrder + 1] = {};
        seed[d] = -1.0 / phi_d;
        ev.backward(std::span<const double>(seed, static_cast<std::size_t>(d) + 2), grad);
    }

    for (int i = 0; i < d; ++i) {
        const auto c = ev.forward(ts[i], want ? 2 : 1);
        const double slope = c[1];
        if (!(slope < 0.0)) fail(ErrorKind::numeric_degeneracy, "generator slope vanished");
        loss += std::log(-slope);
        if (want) {
            // dt_i/dW = -dphi(t_i)/dW / phi'(t_i)
            const double seed[3] = {ratio / slope - c[2] / (slope * slope), 1.0 / slope, 0.0};
            ev.backward(seed, grad);
        }
    }
    return loss;
}

// -log P(rectangle) and its gradient.
double rectangle_loss(PhiEvaluator& ev, std::span<const double> lo, std::span<const double> hi,
                      std::span<double> grad, const InversionSettings& settings)
{
    const int d = static_cast<int>(lo.size());
    if (d > 16) fail(ErrorKind::capacity, "censored loss limited to d <= 16");
    const bool want = !grad.empty();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // t[i][0] lower bound, t[i][1] upper bound; NaN marks a zero bound (C = 0).
    double t[16][2];
    for (int i = 0; i < d; ++i) {
        const double a = lo[static_cast<std::size_t>(i)];
        const double b = hi[static_cast<std::size_t>(i)];
        t[i][0] = a == 0.0 ? nan : invert_value(ev, std::max(a, kClampFloor), settings).t;
        t[i][1] = b == 0.0 ? nan : invert_value(ev, std::max(b, kClampFloor), settings).t;
    }

    const std::uint32_t corners = 1U << d;
    std::vector<double> sums(corners, nan);
    std::vector<double> slopes(corners, 0.0);
    double prob = 0.0;
    double buf[16];
    for (std::uint32_t mask = 0; mask < corners; ++mask) {
        bool zero = false;
        for (int i = 0; i < d; ++i) {
            buf[i] = t[i][(mask >> i) & 1U ? 0 : 1];
            zero = zero || std::isnan(buf[i]);
        }
        if (zero) continue;
        const double s = sorted_sum(buf, static_cast<std::size_t>(d));
        const auto c = ev.forward(s, 1);
        sums[mask] = s;
        slopes[mask] = c[1];
        prob += (std::popcount(mask) % 2 == 0) ? c[0] : -c[0];
    }
    if (prob < -1e-9) fail(ErrorKind::invariant_violation, "rectangle probability is negative");
    if (!(prob > 0.0)) fail(ErrorKind::data, "rectangle has zero probability under the model");
    const double loss = -std::log(prob);
    if (!want) return loss;

    double kappa[16][2] = {};
    for (std::uint32_t mask = 0; mask < corners; ++mask) {
        if (std::isnan(sums[mask])) continue;
        const double sign = (std::popcount(mask) % 2 == 0) ? 1.0 : -1.0;
        ev.forward(sums[mask], 0);
        const double seed[1] = {-sign / prob};
        ev.backward(seed, grad);
        for (int i = 0; i < d; ++i) kappa[i][(mask >> i) & 1U ? 0 : 1] += -sign * slopes[mask] / prob;
    }
    for (int i = 0; i < d; ++i) {
        for (int side = 0; side < 2; ++side) {
            const double ti = t[i][side];
            if (std::isnan(ti) || ti == 0.0 || kappa[i][side] == 0.0) continue;
            const auto c = ev.forward(ti, 1);
            const double seed[2] = {-kappa[i][side] / c[1], 0.0};
            ev.backward(seed, grad);
        }
    }
    return loss;
}

template <class PointFn>
LossResult batch_loss(const GeneratorNetwork& net, std::size_t n, bool want_gradient, PointFn&& point)
{
    if (n == 0) fail(ErrorKind::data, "empty batch");
    const std::size_t w = net.weight_count();
    std::vector<double> losses(n, 0.0);
    std::vector<double> grads(want_gradient ? n * w : 0, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end, int) {
        PhiEvaluator ev(net);
        for (std::size_t i = begin; i < end; ++i) {
            std::span<double> g = want_gradient ? std::span<double>(grads).subspan(i * w, w) : std::span<double>();
            try {
                losses[i] = point(ev, i, g);
            } catch (const Error& e) {
                throw Error(e.kind(), "row " + std::to_string(i) + ": " + e.what());
            }
        }
    });

    // Reduce in index order so the result does not depend on the worker count.
    LossResult r;
    for (double l : losses) r.nll += l;
    r.nll /= static_cast<double>(n);
    if (want_gradient) {
        r.gradient.assign(w, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < w; ++k) r.gradient[k] += grads[i * w + k];
        for (double& g : r.gradient) g /= static_cast<double>(n);
    }
    return r;
}

void check_training_dim(std::size_t d, bool want_gradient)
{
    if (d < 2) fail(ErrorKind::data, "need at least two columns");
    const std::size_t needed = d + (want_gradient ? 1 : 0);
    if (needed > static_cast<std::size_t>(kDefaultDerivativeCap))
        fail(ErrorKind::capacity, "dimension " + std::to_string(d) + " needs derivative order " +
                                      std::to_string(needed) + " above the cap");
}

} // namespace

LossResult loss_pointwise(const GeneratorNetwork& net, const Dataset& batch, bool want_gradient,
                          const InversionSettings& settings)
{
    check_training_dim(batch.cols(), want_gradient);
    return batch_loss(net, batch.rows(), want_gradient, [&](PhiEvaluator& ev, std::size_t i, std::span<double> g) {
        return point_loss(ev, batch.row(i), g, settings);
    });
}

LossResult loss_censored(const GeneratorNetwork& net, const CensoredDataset& batch, bool want_gradient,
                         const InversionSettings& settings)
{
    if (batch.cols() < 2) fail(ErrorKind::data, "need at least two columns");
    return batch_loss(net, batch.rows(), want_gradient, [&](PhiEvaluator& ev, std::size_t i, std::span<double> g) {
        return rectangle_loss(ev, batch.lower_row(i), batch.upper_row(i), g, settings);
    });
}

std::size_t rows_of(const TrainingSet& data)
{
    return std::visit([](const auto& d) { return d.rows(); }, data);
}

std::size_t cols_of(const TrainingSet& data)
{
    return std::visit([](const auto& d) { return d.cols(); }, data);
}

namespace {

LossResult loss_of(const GeneratorNetwork& net, const TrainingSet& data, bool want_gradient,
                   const InversionSettings& settings)
{
    if (const auto* d = std::get_if<Dataset>(&data)) return loss_pointwise(net, *d, want_gradient, settings);
    return loss_censored(net, std::get<CensoredDataset>(data), want_gradient, settings);
}

TrainingSet select_rows(const TrainingSet& data, std::span<const std::size_t> rows)
{
    return std::visit([&](const auto& d) -> TrainingSet { return d.select(rows); }, data);
}

} // namespace

double evaluate_nll(const GeneratorNetwork& net, const TrainingSet& data, const InversionSettings& settings)
{
    return loss_of(net, data, false, settings).nll;
}

TrainReport fit(TrainState state, const TrainingSet& train, const TrainingSet* test, const TrainConfig& config,
                const std::function<void(const EpochRecord&)>& on_epoch)
{
    if (!(config.learning_rate > 0.0)) fail(ErrorKind::domain, "learning rate must be positive");
    if (!(config.momentum >= 0.0 && config.momentum < 1.0)) fail(ErrorKind::domain, "momentum must lie in [0, 1)");
    if (config.batch_size < 1) fail(ErrorKind::domain, "batch size must be at least 1");
    if (config.epochs < 0) fail(ErrorKind::domain, "epoch count must be non-negative");
    const std::size_t n = rows_of(train);
    if (n == 0) fail(ErrorKind::data, "empty training set");
    if (test && cols_of(*test) != cols_of(train)) fail(ErrorKind::data, "train and test dimensions differ");

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const std::size_t w = state.weights.weight_count();
    std::vector<double> weights(state.weights.raw_weights().begin(), state.weights.raw_weights().end());
    std::vector<double> velocity = state.velocity;
    if (velocity.size() != w) velocity.assign(w, 0.0);

    TrainReport report{.epochs = {},
                       .final_train_nll = 0.0,
                       .final_test_nll = {},
                       .seconds = 0.0,
                       .weights = state.weights,
                       .epoch = state.epoch,
                       .velocity = {},
                       .aborted = false,
                       .abort_reason = {}};
    GeneratorNetwork net = state.weights;
    std::vector<double> last_good_velocity = velocity;
    std::vector<std::size_t> order(n);

    auto abort_with = [&](const std::string& why) {
        report.aborted = true;
        report.abort_reason = why;
    };

    for (int e = 0; e < config.epochs && !report.aborted; ++e) {
        const int epoch = state.epoch + e + 1;
        std::iota(order.begin(), order.end(), std::size_t{0});
        CounterRng rng(config.seed, static_cast<std::uint64_t>(epoch));
        shuffle(std::span<std::size_t>(order), rng);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t end = std::min(n, start + config.batch_size);
            const auto rows = std::span<const std::size_t>(order).subspan(start, end - start);
            LossResult r;
            try {
                r = loss_of(net, select_rows(train, rows), true, config.inversion);
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::numeric_degeneracy && err.kind() != ErrorKind::convergence &&
                    err.kind() != ErrorKind::invariant_violation)
                    throw;
                abort_with(std::string("epoch ") + std::to_string(epoch) + ": " + err.what());
                break;
            }
            bool finite = std::isfinite(r.nll);
            for (double g : r.gradient) finite = finite && std::isfinite(g);
            if (!finite) {
                abort_with("epoch " + std::to_string(epoch) + ": non-finite loss or gradient");
                break;
            }
            // Loss at `net` is finite: it is the last good state.
            report.weights = net;
            last_good_velocity = velocity;
            epoch_loss += r.nll * static_cast<double>(end - start);

            const double scale = config.reduction == GradientReduction::sum ? static_cast<double>(end - start) : 1.0;
            double norm = 0.0;
            for (double& g : r.gradient) {
                g *= scale;
                norm += g * g;
            }
            norm = std::sqrt(norm);
            const double clip = (config.grad_clip > 0.0 && norm > config.grad_clip) ? config.grad_clip / norm : 1.0;
            for (std::size_t k = 0; k < w; ++k) {
                const double g = r.gradient[k] * clip + config.weight_decay * weights[k];
                velocity[k] = config.momentum * velocity[k] - config.learning_rate * g;
                weights[k] += velocity[k];
            }
            try {
                net = net.with_weights(weights);
            } catch (const Error&) {
                abort_with("epoch " + std::to_string(epoch) + ": weights became non-finite");
                break;
            }
        }
        if (report.aborted) break;
        report.weights = net;
        last_good_velocity = velocity;

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_nll = epoch_loss / static_cast<double>(n);
        const bool eval_now = test && ((config.eval_every > 0 && epoch % config.eval_every == 0) ||
                                       e + 1 == config.epochs);
        if (eval_now) {
            try {
                rec.test_nll = evaluate_nll(net, *test, config.inversion);
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::usage) throw;
                rec.test_nll = std::numeric_limits<double>::quiet_NaN();
            }
        }
        rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        report.epochs.push_back(rec);
        report.epoch = epoch;
        if (on_epoch) on_epoch(rec);
    }

    report.velocity = last_good_velocity;
    try {
        report.final_train_nll = evaluate_nll(report.weights, train, config.inversion);
        if (test) report.final_test_nll = evaluate_nll(report.weights, *test, config.inversion);
    } catch (const Error& err) {
        if (!report.aborted) abort_with(std::string("final evaluation: ") + err.what());
    }
    report.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return report;
}

} // namespace acnet
