#include "acnet/sampling.hpp"

#include <algorithm>

#include "acnet/errors.hpp"
#include "acnet/parallel.hpp"

namespace acnet {

MixingSample sample_m(const GeneratorNetwork& net, CounterRng& rng)
{
    MixingSample s;
    const int L = net.depth();
    s.path.assign(static_cast<std::size_t>(L), 0);
    int node = 0; // output node
    for (int l = L + 1; l >= 2; --l) {
        const auto row = net.a_row(l, node);
        const double x = rng.uniform();
        double acc = 0.0;
        int next = static_cast<int>(row.size()) - 1;
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += row[j];
            if (x < acc) {
                next = static_cast<int>(j);
                break;
            }
        }
        node = next;
        s.path[static_cast<std::size_t>(l - 2)] = node;
        s.m += net.b(l - 1, node);
    }
    return s;
}

std::vector<double> sample_u(const GeneratorNetwork& net, int dim, std::size_t n, std::uint64_t seed)
{
    if (dim < 2) fail(ErrorKind::domain, "sample dimension must be at least 2");
    const auto d = static_cast<std::size_t>(dim);
    std::vector<double> out(n * d);
    parallel_for(n, [&](std::size_t begin, std::size_t end, int) {
        PhiEvaluator eval(net);
        for (std::size_t i = begin; i < end; ++i) {
            CounterRng rng(seed, i);
            const double m = sample_m(net, rng).m;
            for (std::size_t j = 0; j < d; ++j) {
                const double e = rng.exponential();
                // phi(0) = 1 is the only way to reach the boundary; keep draws interior.
                out[i * d + j] = std::clamp(eval.value(e / m), 1e-300, 1.0 - 0x1.0p-53);
            }
        }
    });
    return out;
}

} // namespace acnet
