#include <doctest.h>

#include <cmath>
#include <vector>

#include "acnet/copula.hpp"
#include "acnet/data.hpp"
#include "acnet/errors.hpp"
#include "acnet/families.hpp"
#include "acnet/rng.hpp"
#include "acnet/training.hpp"
#include "oracles.hpp"

using namespace acnet;
using doctest::Approx;

namespace {

Dataset uniform_points(std::size_t n, std::size_t d, std::uint64_t seed)
{
    CounterRng rng(seed, 0);
    std::vector<double> v(n * d);
    for (auto& x : v) x = rng.uniform();
    return Dataset(n, d, v, true);
}

Dataset clayton_points(std::size_t n, std::uint64_t seed)
{
    return Dataset(n, 2, ref_sample_bivariate(ParametricFamily(Family::clayton, 5.0), n, seed), true);
}

bool gradient_close(double got, double want)
{
    const double err = std::abs(got - want);
    return err <= 1e-5 * std::abs(want) || err <= 1e-9;
}

std::vector<double> raw_of(const GeneratorNetwork& net)
{
    return {net.raw_weights().begin(), net.raw_weights().end()};
}

} // namespace

TEST_CASE("independence network has zero loss")
{
    const auto data = uniform_points(50, 3, 1);
    const auto r = loss_pointwise(independence_network(), data);
    CHECK(std::abs(r.nll) <= 1e-12);
    for (double g : r.gradient) CHECK(std::isfinite(g));
}

TEST_CASE("pointwise loss equals the mean negative log density")
{
    const auto net = init_network(std::vector<int>{10, 10}, 3);
    const auto data = clayton_points(40, 4);
    const CopulaModel model(2, net);
    double want = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) want -= log_density(model, data.row(i));
    CHECK(loss_pointwise(net, data).nll == Approx(want / 40.0).epsilon(1e-12));
}

TEST_CASE("pointwise gradient matches finite differences")
{
    for (std::size_t d : {2, 3}) {
        const auto net = oracle::random_network({3, 3}, 31 + d);
        const auto data = Dataset(10, d, sample_clayton_mixture(2.0, static_cast<int>(d), 10, 5), true);
        const auto r = loss_pointwise(net, data);
        const auto f = [&](const std::vector<double>& w) { return loss_pointwise(net.with_weights(w), data, false).nll; };
        const auto raw = raw_of(net);
        for (std::size_t k = 0; k < raw.size(); ++k)
            CHECK(gradient_close(r.gradient[k], oracle::richardson_difference(f, raw, k, 1e-3)));
    }
}

TEST_CASE("censored loss")
{
    const auto net = oracle::random_network({3, 3}, 8);
    SUBCASE("full squares carry no information")
    {
        const CensoredDataset full(3, 2, std::vector<double>(6, 0.0), std::vector<double>(6, 1.0));
        CHECK(std::abs(loss_censored(net, full).nll) <= 1e-12);
    }
    SUBCASE("gradient matches finite differences")
    {
        const auto pts = clayton_points(5, 9);
        const auto boxes = censor(pts, 0.2, 4);
        const auto r = loss_censored(net, boxes);
        const auto f = [&](const std::vector<double>& w) { return loss_censored(net.with_weights(w), boxes, false).nll; };
        const auto raw = raw_of(net);
        for (std::size_t k = 0; k < raw.size(); ++k)
            CHECK(gradient_close(r.gradient[k], oracle::richardson_difference(f, raw, k, 1e-3)));
    }
    SUBCASE("small boxes approach the pointwise loss")
    {
        const auto pts = clayton_points(20, 10);
        const double w = 1e-4;
        std::vector<double> lo;
        std::vector<double> hi;
        for (double x : pts.values()) {
            lo.push_back(x - w / 2);
            hi.push_back(x + w / 2);
        }
        const CensoredDataset boxes(20, 2, lo, hi);
        const double censored = loss_censored(net, boxes, false).nll + 2.0 * std::log(w);
        CHECK(std::abs(censored - loss_pointwise(net, pts, false).nll) <= 1e-2);
    }
    SUBCASE("zero-probability boxes are data errors")
    {
        const CensoredDataset flat(1, 2, {0.3, 0.2}, {0.3, 0.6});
        try {
            loss_censored(net, flat);
            FAIL("expected a data error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::data);
        }
    }
}

TEST_CASE("parametric baseline on clayton data")
{
    const auto test = clayton_points(1000, 2);
    const double nll = parametric_nll(ParametricFamily(Family::clayton, 5.0), test);
    // sampling spread of a 1000-point mean is about 0.03
    CHECK(nll == Approx(-0.9416).epsilon(0.1));
}

TEST_CASE("zero epochs return the initial state")
{
    const auto net = init_network(std::vector<int>{10, 10}, 1);
    const TrainingSet train = clayton_points(100, 1);
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto rep = fit({net, {}, 0}, train, &train, cfg);
    CHECK(rep.epochs.empty());
    CHECK(std::equal(rep.weights.raw_weights().begin(), rep.weights.raw_weights().end(), net.raw_weights().begin()));
    CHECK(rep.final_train_nll == Approx(evaluate_nll(net, train)).epsilon(1e-14));
    REQUIRE(rep.final_test_nll.has_value());
}

TEST_CASE("a small full-batch step decreases the training loss")
{
    const auto net = init_network(std::vector<int>{10, 10}, 2);
    const auto data = clayton_points(200, 3);
    const TrainingSet train = data;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.momentum = 0.0;
    cfg.learning_rate = 1e-7;
    cfg.batch_size = 200;
    cfg.seed = 5;
    const auto rep = fit({net, {}, 0}, train, nullptr, cfg);
    CHECK(evaluate_nll(rep.weights, train) < evaluate_nll(net, train));
}

TEST_CASE("training is deterministic and resumable")
{
    const auto net = init_network(std::vector<int>{4, 4}, 3);
    const TrainingSet train = clayton_points(300, 6);
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.seed = 11;
    cfg.batch_size = 64;
    const auto a = fit({net, {}, 0}, train, nullptr, cfg);
    const auto b = fit({net, {}, 0}, train, nullptr, cfg);
    CHECK(std::equal(a.weights.raw_weights().begin(), a.weights.raw_weights().end(), b.weights.raw_weights().begin()));
    REQUIRE(a.epochs.size() == 6);
    CHECK(a.epoch == 6);

    cfg.epochs = 3;
    const auto half = fit({net, {}, 0}, train, nullptr, cfg);
    const auto rest = fit({half.weights, half.velocity, half.epoch}, train, nullptr, cfg);
    CHECK(rest.epoch == 6);
    CHECK(std::equal(rest.weights.raw_weights().begin(), rest.weights.raw_weights().end(),
                     a.weights.raw_weights().begin()));
    for (double g : loss_pointwise(rest.weights, std::get<Dataset>(train)).gradient) CHECK(std::isfinite(g));
}

TEST_CASE("divergence aborts with the last finite weights")
{
    const auto net = init_network(std::vector<int>{4, 4}, 3);
    const TrainingSet train = clayton_points(200, 7);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 1e3;
    const auto rep = fit({net, {}, 0}, train, nullptr, cfg);
    CHECK(rep.aborted);
    CHECK_FALSE(rep.abort_reason.empty());
    CHECK(rep.epoch < 50);
    for (double w : rep.weights.raw_weights()) CHECK(std::isfinite(w));
}

TEST_CASE("configuration is validated")
{
    const TrainingSet train = clayton_points(10, 1);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(fit({independence_network(), {}, 0}, train, nullptr, cfg), Error);
    cfg = {};
    cfg.momentum = 1.0;
    CHECK_THROWS_AS(fit({independence_network(), {}, 0}, train, nullptr, cfg), Error);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(fit({independence_network(), {}, 0}, train, nullptr, cfg), Error);
    const TrainingSet wide = uniform_points(10, 3, 1);
    cfg = {};
    CHECK_THROWS_AS(fit({independence_network(), {}, 0}, train, &wide, cfg), Error);
}

TEST_CASE("independent data trains towards zero loss")
{
    const auto train_pts = uniform_points(2000, 2, 21);
    const auto test_pts = uniform_points(1000, 2, 22);
    const TrainingSet train = train_pts;
    const TrainingSet test = test_pts;
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.eval_every = 0;
    const auto rep = fit({init_network(default_hidden_widths(), 0), {}, 0}, train, &test, cfg);
    REQUIRE(rep.final_test_nll.has_value());
    CHECK(*rep.final_test_nll >= -0.05);
    CHECK(*rep.final_test_nll <= 0.10);
}
