#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acnet/copula.hpp"
#include "acnet/data.hpp"
#include "acnet/errors.hpp"
#include "acnet/families.hpp"
#include "acnet/generator_net.hpp"
#include "acnet/inversion.hpp"
#include "acnet/model_io.hpp"
#include "acnet/sampling.hpp"
#include "acnet/training.hpp"

namespace py = pybind11;
using namespace acnet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

//! Accepts a 1-D point (one row) or an n x d matrix.
Dataset as_dataset(const Array& a)
{
    if (a.ndim() == 1) return Dataset(1, static_cast<std::size_t>(a.shape(0)), {a.data(), a.data() + a.size()});
    if (a.ndim() != 2) throw py::value_error("expected a 1-D point or a 2-D array of points");
    return Dataset(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                   {a.data(), a.data() + a.size()});
}

Array to_array(std::vector<double> v, std::size_t rows, std::size_t cols)
{
    Array out({rows, cols});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array to_array(std::span<const double> v)
{
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <class F>
Array map_rows(const CopulaModel& model, const Array& u, F&& f)
{
    const Dataset d = as_dataset(u);
    Array out(static_cast<py::ssize_t>(d.rows()));
    auto* o = out.mutable_data();
    for (std::size_t i = 0; i < d.rows(); ++i) o[i] = f(model, d.row(i));
    return out;
}

TrainingSet training_set(const py::object& data)
{
    if (py::isinstance<py::tuple>(data)) {
        const auto t = data.cast<py::tuple>();
        if (t.size() != 2) throw py::value_error("censored data is a (lower, upper) pair");
        const Dataset lo = as_dataset(t[0].cast<Array>());
        const Dataset hi = as_dataset(t[1].cast<Array>());
        if (lo.rows() != hi.rows() || lo.cols() != hi.cols())
            throw py::value_error("lower and upper bounds differ in shape");
        return CensoredDataset(lo.rows(), lo.cols(), {lo.values().begin(), lo.values().end()},
                               {hi.values().begin(), hi.values().end()});
    }
    return as_dataset(data.cast<Array>());
}

Generator as_generator(const py::object& g)
{
    if (py::isinstance<GeneratorNetwork>(g)) return g.cast<GeneratorNetwork>();
    if (py::isinstance<ParametricFamily>(g)) return g.cast<ParametricFamily>();
    throw py::type_error("expected a Network or a Family");
}

py::object from_generator(const Generator& g)
{
    return std::visit([](const auto& x) { return py::cast(x); }, g);
}

} // namespace

PYBIND11_MODULE(acnet, m)
{
    m.doc() = "Archimedean copulas with learned completely monotone generators";

    py::register_exception<Error>(m, "AcnetError", PyExc_RuntimeError);

    py::class_<GeneratorNetwork>(m, "Network")
        .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("hidden_widths"), py::arg("raw_weights"))
        .def_property_readonly("hidden_widths",
                               [](const GeneratorNetwork& n) {
                                   return std::vector<int>(n.hidden_widths().begin(), n.hidden_widths().end());
                               })
        .def_property_readonly("depth", &GeneratorNetwork::depth)
        .def_property_readonly("raw_weights", [](const GeneratorNetwork& n) { return to_array(n.raw_weights()); })
        .def("with_weights", &GeneratorNetwork::with_weights, py::arg("raw_weights"))
        .def("mixture",
             [](const GeneratorNetwork& n, std::size_t max_paths) {
                 const auto mix = enumerate_mixture(n, max_paths);
                 std::vector<std::pair<double, double>> atoms;
                 for (const auto& a : mix.atoms()) atoms.emplace_back(a.weight, a.rate);
                 return atoms;
             },
             py::arg("max_paths") = kDefaultPathCap, "(weight, rate) atoms of the exponential mixture");

    m.def("init_network", [](std::vector<int> widths, std::uint64_t seed) { return init_network(widths, seed); },
          py::arg("hidden_widths") = default_hidden_widths(), py::arg("seed") = 0);
    m.def("independence_network", &independence_network);

    py::class_<ParametricFamily>(m, "Family")
        .def(py::init([](const std::string& name, double theta) {
                 const auto f = parse_family(name);
                 if (!f) throw py::value_error("unknown family '" + name + "'");
                 if (!ParametricFamily::theta_valid(*f, theta)) throw py::value_error("theta outside the family's range");
                 return ParametricFamily(*f, theta);
             }),
             py::arg("name"), py::arg("theta"))
        .def_property_readonly("name", [](const ParametricFamily& f) { return std::string(family_name(f.family())); })
        .def_property_readonly("theta", &ParametricFamily::theta);

    m.def("phi_eval",
          [](const GeneratorNetwork& net, double t, int order) {
              const auto s = phi_eval(net, t, order, false, std::max(order, kDefaultDerivativeCap));
              return std::vector<double>(s.coeffs().begin(), s.coeffs().end());
          },
          py::arg("net"), py::arg("t"), py::arg("order") = 0, "phi and its derivatives up to `order`");
    m.def("invert", [](const GeneratorNetwork& net, double u) { return invert(net, u).t_star; }, py::arg("net"),
          py::arg("u"));

    py::class_<CopulaModel>(m, "Copula")
        .def(py::init([](int dim, const py::object& g) { return CopulaModel(dim, as_generator(g)); }), py::arg("dim"),
             py::arg("generator"))
        .def_property_readonly("dim", &CopulaModel::dim)
        .def_property_readonly("generator", [](const CopulaModel& c) { return from_generator(c.generator()); })
        .def("cdf", [](const CopulaModel& c, const Array& u) { return map_rows(c, u, cdf); }, py::arg("u"))
        .def("log_density", [](const CopulaModel& c, const Array& u) { return map_rows(c, u, log_density); },
             py::arg("u"))
        .def("conditional_cdf",
             [](const CopulaModel& c, std::vector<int> observed, std::vector<double> point) {
                 return conditional_cdf(c, {std::move(observed), std::move(point)});
             },
             py::arg("observed"), py::arg("point"))
        .def("conditional_log_density",
             [](const CopulaModel& c, std::vector<int> observed, std::vector<double> point) {
                 return conditional_log_density(c, {std::move(observed), std::move(point)});
             },
             py::arg("observed"), py::arg("point"))
        .def("rectangle_prob",
             [](const CopulaModel& c, std::vector<double> lower, std::vector<double> upper) {
                 return rectangle_prob(c, {std::move(lower), std::move(upper)});
             },
             py::arg("lower"), py::arg("upper"))
        .def("sample",
             [](const CopulaModel& c, std::size_t n, std::uint64_t seed) {
                 const auto d = static_cast<std::size_t>(c.dim());
                 if (const auto* net = c.network()) return to_array(sample_u(*net, c.dim(), n, seed), n, d);
                 const auto& f = *c.family();
                 if (c.dim() == 2) return to_array(ref_sample_bivariate(f, n, seed), n, d);
                 if (f.family() == Family::clayton)
                     return to_array(sample_clayton_mixture(f.theta(), c.dim(), n, seed), n, d);
                 throw py::value_error("this family is only sampled in two dimensions");
             },
             py::arg("n"), py::arg("seed") = 0);

    m.def("rank_normalize",
          [](const Array& raw) {
              const auto d = rank_normalize(as_dataset(raw));
              return to_array({d.values().begin(), d.values().end()}, d.rows(), d.cols());
          },
          py::arg("data"));
    m.def("censor",
          [](const Array& data, double noise, std::uint64_t seed) {
              const auto c = censor(as_dataset(data), noise, seed);
              return py::make_tuple(to_array({c.lower().begin(), c.lower().end()}, c.rows(), c.cols()),
                                    to_array({c.upper().begin(), c.upper().end()}, c.rows(), c.cols()));
          },
          py::arg("data"), py::arg("noise"), py::arg("seed") = 0);

    m.def("nll",
          [](const GeneratorNetwork& net, const py::object& data) { return evaluate_nll(net, training_set(data)); },
          py::arg("net"), py::arg("data"), "mean negative log-likelihood; pass (lower, upper) for censored data");

    m.def("fit",
          [](const GeneratorNetwork& net, const py::object& train, const py::object& test, int epochs, double lr,
             double momentum, std::size_t batch, std::uint64_t seed, const std::string& reduction) {
              TrainConfig cfg;
              cfg.epochs = epochs;
              cfg.learning_rate = lr;
              cfg.momentum = momentum;
              cfg.batch_size = batch;
              cfg.seed = seed;
              cfg.eval_every = 0;
              if (reduction != "sum" && reduction != "mean") throw py::value_error("reduction must be sum or mean");
              cfg.reduction = reduction == "sum" ? GradientReduction::sum : GradientReduction::mean;
              const TrainingSet tr = training_set(train);
              std::optional<TrainingSet> te;
              if (!test.is_none()) te = training_set(test);
              std::optional<TrainReport> result;
              {
                  py::gil_scoped_release release;
                  result = fit({net, {}, 0}, tr, te ? &*te : nullptr, cfg);
              }
              const TrainReport& rep = *result;
              py::dict out;
              out["network"] = rep.weights;
              out["train_nll"] = rep.final_train_nll;
              out["test_nll"] = rep.final_test_nll;
              out["epochs"] = rep.epoch;
              out["aborted"] = rep.aborted;
              out["abort_reason"] = rep.abort_reason;
              return out;
          },
          py::arg("net"), py::arg("train"), py::arg("test") = py::none(), py::arg("epochs") = 100,
          py::arg("lr") = 1e-5, py::arg("momentum") = 0.9, py::arg("batch") = 200, py::arg("seed") = 0,
          py::arg("reduction") = "sum");

    m.def("fit_parametric",
          [](const std::string& name, const Array& train, const std::optional<Array>& test) {
              const auto f = parse_family(name);
              if (!f) throw py::value_error("unknown family '" + name + "'");
              const Dataset tr = as_dataset(train);
              std::optional<Dataset> te;
              if (test) te = as_dataset(*test);
              const auto r = fit_parametric(*f, tr, te ? &*te : nullptr);
              return py::make_tuple(r.model, r.train_nll, r.test_nll);
          },
          py::arg("family"), py::arg("train"), py::arg("test") = py::none(),
          "returns (family, train_nll, test_nll)");

    m.def("save_model",
          [](const std::string& path, const py::object& g, std::optional<int> dim) {
              save_model(path, as_generator(g), nullptr, dim);
          },
          py::arg("path"), py::arg("generator"), py::arg("dim") = py::none());
    m.def("load_model", [](const std::string& path) { return from_generator(load_model(path).generator); }, py::arg("path"));
}
