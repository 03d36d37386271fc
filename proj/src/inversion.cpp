#include "acnet/inversion.hpp"

#include <string>

namespace acnet {

namespace {

void check_level(double u)
{
    if (!(u > 0.0 && u <= 1.0))
        fail(ErrorKind::domain, "generator inverse needs u in (0, 1], got " + std::to_string(u));
}

} // namespace

RootSolve invert_value(PhiEvaluator& eval, double u, const InversionSettings& settings)
{
    check_level(u);
    if (u == 1.0) return {0.0, 0, 1.0};
    return solve_decreasing([&](double t, double& f, double& df) { eval.value_and_slope(t, f, df); }, u, 0.0,
                            settings);
}

InverseResult invert(const GeneratorNetwork& net, double u, const InversionSettings& settings)
{
    PhiEvaluator eval(net);
    const RootSolve root = invert_value(eval, u, settings);

    InverseResult r;
    r.t_star = root.t;
    r.iterations = root.iterations;
    const auto out = eval.forward(root.t, 1);
    r.residual = std::abs(out[0] - u);
    const double slope = out[1];
    if (!(slope < 0.0))
        fail(ErrorKind::numeric_degeneracy, "generator slope vanished at the inverse point");
    r.d_du = 1.0 / slope;

    r.d_dphi.assign(net.weight_count(), 0.0);
    const double seed[2] = {1.0, 0.0};
    eval.backward(seed, r.d_dphi);
    for (double& g : r.d_dphi) g = -g / slope;
    return r;
}

} // namespace acnet
