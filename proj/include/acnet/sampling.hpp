#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "acnet/generator_net.hpp"
#include "acnet/rng.hpp"

namespace acnet {

//! One realization of the mixing variable M.
struct MixingSample {
    double m = 0.0;
    //! Node index chosen in hidden layers 1..L.
    std::vector<int> path;
};

//! Backward walk from the output node: at each layer pick the next node with
//! probabilities given by the current node's A row and collect its B reward.
MixingSample sample_m(const GeneratorNetwork& net, CounterRng& rng);

//! n draws (phi(E_1/M), ..., phi(E_d/M)), row-major n x d. Point i uses
//! CounterRng(seed, i).
std::vector<double> sample_u(const GeneratorNetwork& net, int dim, std::size_t n, std::uint64_t seed);

} // namespace acnet
