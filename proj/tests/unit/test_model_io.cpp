#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "acnet/errors.hpp"
#include "acnet/model_io.hpp"
#include "oracles.hpp"

using namespace acnet;

TEST_CASE("network round trip is bit exact")
{
    const auto net = oracle::random_network({3, 5, 2}, 4);
    const auto back = model_from_json(model_to_json(net));
    const auto* got = std::get_if<GeneratorNetwork>(&back.generator);
    REQUIRE(got != nullptr);
    CHECK(std::vector<int>(got->hidden_widths().begin(), got->hidden_widths().end()) == std::vector<int>{3, 5, 2});
    CHECK(std::equal(got->raw_weights().begin(), got->raw_weights().end(), net.raw_weights().begin()));
    CHECK_FALSE(back.optimizer.has_value());
}

TEST_CASE("optimizer state and files")
{
    const auto net = init_network(std::vector<int>{10, 10}, 9);
    OptimizerState st{17, std::vector<double>(net.weight_count(), 1.0 / 3.0)};
    const auto path = (std::filesystem::temp_directory_path() / "acnet_model_io_test.json").string();
    save_model(path, net, &st);
    const auto back = load_model(path);
    REQUIRE(back.optimizer.has_value());
    CHECK(back.optimizer->epoch == 17);
    CHECK(back.optimizer->velocity == st.velocity);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model(path), Error);
}

TEST_CASE("parametric models")
{
    const auto back = model_from_json(model_to_json(ParametricFamily(Family::frank, 0.1 + 0.2)));
    const auto* f = std::get_if<ParametricFamily>(&back.generator);
    REQUIRE(f != nullptr);
    CHECK(f->family() == Family::frank);
    CHECK(f->theta() == 0.1 + 0.2);
}

TEST_CASE("malformed documents are data errors")
{
    const char* bad[] = {
        "not json",
        "{}",
        R"({"format_version": 99, "L": 1, "H": [1], "phi_A": [[[0]], [[0]]], "phi_B": [[0]]})",
        R"({"format_version": 1, "L": 2, "H": [1], "phi_A": [[[0]], [[0]]], "phi_B": [[0]]})",
        R"({"format_version": 1, "L": 1, "H": [2], "phi_A": [[[0]], [[0, 0]]], "phi_B": [[0, 0]]})",
        R"({"format_version": 1, "L": 1, "H": [1], "phi_A": [[[0]], [["x"]]], "phi_B": [[0]]})",
        R"({"format_version": 1, "family": "gaussian", "theta": 1})",
        R"({"format_version": 1, "family": "clayton", "theta": -1})",
    };
    for (const char* doc : bad) {
        try {
            model_from_json(doc);
            FAIL("accepted: " << doc);
        } catch (const Error& e) {
            CHECK((e.kind() == ErrorKind::data || e.kind() == ErrorKind::domain));
        }
    }
}

TEST_CASE("dimension tag")
{
    const auto text = model_to_json(independence_network(), nullptr, 3);
    CHECK(model_from_json(text).dim == 3);
    CHECK_FALSE(model_from_json(model_to_json(independence_network())).dim.has_value());
    CHECK_THROWS_AS(model_from_json(R"({"format_version": 1, "dim": 1, "family": "clayton", "theta": 2})"), Error);
}
