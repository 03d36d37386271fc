#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acnet/copula.hpp"
#include "acnet/data.hpp"
#include "acnet/errors.hpp"
#include "acnet/families.hpp"
#include "acnet/model_io.hpp"
#include "acnet/rng.hpp"
#include "acnet/sampling.hpp"
#include "acnet/training.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace acnet;
using cli::RunManifest;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4, kConvergence = 5 };

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::data: return kData;
    case ErrorKind::numeric_degeneracy:
    case ErrorKind::invariant_violation: return kNumeric;
    case ErrorKind::convergence: return kConvergence;
    default: return kUsage;
    }
}

std::vector<double> parse_doubles(const std::string& text, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < tok.size() && tok[used] == ' ') ++used;
        if (tok.empty() || used != tok.size())
            fail(ErrorKind::usage, std::string(what) + ": cannot parse '" + tok + "' as a number");
        out.push_back(x);
    }
    if (out.empty()) fail(ErrorKind::usage, std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what)
{
    std::vector<int> out;
    if (text.empty()) return out;
    for (double x : parse_doubles(text, what)) {
        if (x != static_cast<double>(static_cast<int>(x)))
            fail(ErrorKind::usage, std::string(what) + ": '" + format_g17(x) + "' is not an integer");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

Family family_or_usage(const std::string& name)
{
    const auto f = parse_family(name);
    if (!f) fail(ErrorKind::usage, "unknown family '" + name + "'");
    return *f;
}

ParametricFamily family_model(const std::string& name, double theta)
{
    const Family f = family_or_usage(name);
    if (!ParametricFamily::theta_valid(f, theta))
        fail(ErrorKind::usage, "theta = " + format_g17(theta) + " is outside the " + name + " family's range");
    return ParametricFamily(f, theta);
}

struct LoadedModel {
    ModelFile file;
    int dim(std::optional<int> requested, std::size_t data_cols = 0) const
    {
        int d = requested.value_or(file.dim.value_or(data_cols ? static_cast<int>(data_cols) : 2));
        if (file.dim && *file.dim != d)
            fail(ErrorKind::usage, "model was built for dimension " + std::to_string(*file.dim) + ", got " +
                                       std::to_string(d));
        if (data_cols && static_cast<int>(data_cols) != d)
            fail(ErrorKind::usage, "data has " + std::to_string(data_cols) + " columns, model dimension is " +
                                       std::to_string(d));
        return d;
    }
};

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::data, "cannot create directory " + dir + ": " + ec.message());
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string family;
    double theta = 0.0;
    std::size_t n_train = 2000;
    std::size_t n_test = 1000;
    std::uint64_t seed = 0;
    int dim = 2;
    std::string out;
};

int cmd_synth(const SynthArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    const ParametricFamily f = family_model(a.family, a.theta);
    if (a.n_train < 1 || a.n_test < 1) fail(ErrorKind::usage, "sample counts must be positive");
    if (a.dim < 2) fail(ErrorKind::usage, "dimension must be at least 2");
    if (a.dim > 2 && f.family() != Family::clayton)
        fail(ErrorKind::unsupported, "only the Clayton family is sampled above two dimensions");
    ensure_dir(a.out);
    const std::uint64_t test_seed = mix64(a.seed + CounterRng::kGolden);
    const auto draw = [&](std::size_t n, std::uint64_t seed) {
        auto v = a.dim == 2 ? ref_sample_bivariate(f, n, seed) : sample_clayton_mixture(f.theta(), a.dim, n, seed);
        return Dataset(n, static_cast<std::size_t>(a.dim), std::move(v), true);
    };
    const std::string train = (fs::path(a.out) / "train.csv").string();
    const std::string test = (fs::path(a.out) / "test.csv").string();
    const std::string truth = (fs::path(a.out) / "truth.json").string();
    write_csv_file(train, draw(a.n_train, a.seed));
    write_csv_file(test, draw(a.n_test, test_seed));
    save_model(truth, f, nullptr, a.dim);

    m.config() = {{"family", a.family}, {"theta", a.theta}, {"n_train", a.n_train}, {"n_test", a.n_test},
                  {"dim", a.dim}, {"out", a.out}};
    m.seed("train", a.seed);
    m.seed("test", test_seed);
    m.output(train);
    m.output(test);
    m.output(truth);
    wall = seconds_since(t0);
    m.write((fs::path(a.out) / "synth.manifest.json").string(), wall, kOk);
    std::printf("wrote %s (%zu rows), %s (%zu rows), %s\n", train.c_str(), a.n_train, test.c_str(), a.n_test,
                truth.c_str());
    return kOk;
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
    std::string data;
    double ratio = 3.0;
    std::uint64_t seed = 0;
    std::string flip;
    std::string out;
};

int cmd_prepare(const PrepareArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    const Dataset raw = read_csv_file(a.data);
    auto parts = split(raw, a.ratio, a.seed);
    const auto coords = parse_ints(a.flip, "--flip");
    if (!coords.empty()) {
        parts.train = flip(parts.train, coords);
        parts.test = flip(parts.test, coords);
    }
    ensure_dir(a.out);
    const std::string train = (fs::path(a.out) / "train.csv").string();
    const std::string test = (fs::path(a.out) / "test.csv").string();
    write_csv_file(train, parts.train);
    write_csv_file(test, parts.test);
    m.config() = {{"data", a.data}, {"ratio", a.ratio}, {"flip", coords}, {"out", a.out}};
    m.seed("split", a.seed);
    m.input(a.data);
    m.output(train);
    m.output(test);
    wall = seconds_since(t0);
    m.write((fs::path(a.out) / "prepare.manifest.json").string(), wall, kOk);
    std::printf("train %zu rows, test %zu rows, %zu columns\n", parts.train.rows(), parts.test.rows(),
                parts.train.cols());
    return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string train;
    std::string test;
    std::string hidden = "10,10";
    double lr = 1e-5;
    double momentum = 0.9;
    std::size_t batch = 200;
    int epochs = 40000;
    std::uint64_t seed = 0;
    std::uint64_t init_seed = 0;
    std::string loss = "pointwise";
    std::string reduction = "sum";
    double censor = 0.0;
    double outliers = 0.0;
    int eval_every = 100;
    double grad_clip = 0.0;
    double weight_decay = 0.0;
    std::string resume;
    std::string family;
    std::string out;
    std::string telemetry;
};

TrainingSet load_set(const std::string& path, bool censored_file)
{
    if (censored_file) return read_censored_csv_file(path);
    return read_csv_file(path);
}

int cmd_fit(const FitArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    if (a.loss != "pointwise" && a.loss != "censored") fail(ErrorKind::usage, "--loss must be pointwise or censored");
    if (a.reduction != "sum" && a.reduction != "mean") fail(ErrorKind::usage, "--reduction must be sum or mean");
    if (a.censor < 0.0) fail(ErrorKind::usage, "--censor must be positive");
    const bool censored = a.loss == "censored";
    // Censored loss reads interval files unless the intervals are generated here.
    const bool censored_files = censored && a.censor == 0.0;

    TrainingSet train = load_set(a.train, censored_files);
    std::optional<TrainingSet> test;
    if (!a.test.empty()) test = load_set(a.test, censored_files);
    m.input(a.train);
    if (!a.test.empty()) m.input(a.test);

    if (a.outliers > 0.0) {
        if (censored_files) fail(ErrorKind::usage, "--outliers applies to point data");
        train = inject_outliers(std::get<Dataset>(train), a.outliers, a.seed);
    }
    if (censored && a.censor > 0.0) {
        train = censor(std::get<Dataset>(train), a.censor, a.seed);
        if (test) test = censor(std::get<Dataset>(*test), a.censor, mix64(a.seed));
    }
    const int dim = static_cast<int>(cols_of(train));

    m.config() = {{"train", a.train},         {"test", a.test},     {"hidden", a.hidden},
                  {"learning_rate", a.lr},    {"momentum", a.momentum}, {"batch", a.batch},
                  {"epochs", a.epochs},       {"loss", a.loss},     {"reduction", a.reduction},
                  {"censor", a.censor},       {"outliers", a.outliers}, {"eval_every", a.eval_every},
                  {"grad_clip", a.grad_clip}, {"weight_decay", a.weight_decay}, {"resume", a.resume},
                  {"family", a.family},       {"out", a.out},       {"workers_env", std::getenv("ACNET_WORKERS") ? std::getenv("ACNET_WORKERS") : ""}};
    m.seed("shuffle", a.seed);
    m.seed("init", a.init_seed);

    if (!a.family.empty()) {
        if (censored) fail(ErrorKind::usage, "parametric fits use pointwise data");
        const Family fam = family_or_usage(a.family);
        const Dataset* test_ptr = test ? &std::get<Dataset>(*test) : nullptr;
        const auto fitted = fit_parametric(fam, std::get<Dataset>(train), test_ptr);
        save_model(a.out, fitted.model, nullptr, dim);
        m.output(a.out);
        m.set("theta", fitted.model.theta());
        m.set("final_train_nll", fitted.train_nll);
        if (fitted.test_nll) m.set("final_test_nll", *fitted.test_nll);
        wall = seconds_since(t0);
        m.write(manifest_path_for(a.out), wall, kOk);
        std::printf("theta %.12g\ntrain_nll %.12g\n", fitted.model.theta(), fitted.train_nll);
        if (fitted.test_nll) std::printf("test_nll %.12g\n", *fitted.test_nll);
        return kOk;
    }

    TrainState state{init_network(parse_ints(a.hidden, "--hidden"), a.init_seed), {}, 0};
    if (!a.resume.empty()) {
        auto loaded = load_model(a.resume);
        const auto* net = std::get_if<GeneratorNetwork>(&loaded.generator);
        if (!net) fail(ErrorKind::usage, "--resume needs a network model");
        if (loaded.dim && *loaded.dim != dim) fail(ErrorKind::usage, "resumed model has a different dimension");
        state.weights = *net;
        if (loaded.optimizer) {
            state.velocity = loaded.optimizer->velocity;
            state.epoch = loaded.optimizer->epoch;
        }
        m.input(a.resume);
    }

    TrainConfig cfg;
    cfg.learning_rate = a.lr;
    cfg.momentum = a.momentum;
    cfg.batch_size = a.batch;
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    cfg.reduction = a.reduction == "sum" ? GradientReduction::sum : GradientReduction::mean;
    cfg.eval_every = a.eval_every;
    cfg.grad_clip = a.grad_clip;
    cfg.weight_decay = a.weight_decay;

    const std::string telemetry = a.telemetry.empty() ? a.out + ".telemetry.csv" : a.telemetry;
    const bool fresh = !fs::exists(telemetry) || fs::file_size(telemetry) == 0;
    std::ofstream tel(telemetry, std::ios::app);
    if (!tel) fail(ErrorKind::data, "cannot write " + telemetry);
    if (fresh) tel << "epoch,train_nll,test_nll,seconds\n";
    const auto report = fit(state, train, test ? &*test : nullptr, cfg, [&](const EpochRecord& r) {
        tel << r.epoch << ',' << format_g17(r.train_nll) << ',' << (r.test_nll ? format_g17(*r.test_nll) : "") << ','
            << format_g17(r.seconds) << '\n';
        tel.flush();
    });
    tel.close();

    const OptimizerState opt{report.epoch, report.velocity};
    save_model(a.out, report.weights, &opt, dim);
    m.output(a.out);
    m.output(telemetry, false);
    m.set("final_epoch", report.epoch);
    m.set("final_train_nll", report.final_train_nll);
    if (report.final_test_nll) m.set("final_test_nll", *report.final_test_nll);
    m.set("aborted", report.aborted);
    if (report.aborted) m.set("abort_reason", report.abort_reason);
    const int code = report.aborted ? kNumeric : kOk;
    wall = seconds_since(t0);
    m.write(manifest_path_for(a.out), wall, code);
    std::printf("epochs %d\ntrain_nll %.12g\n", report.epoch, report.final_train_nll);
    if (report.final_test_nll) std::printf("test_nll %.12g\n", *report.final_test_nll);
    if (report.aborted) std::fprintf(stderr, "training aborted: %s (last good weights saved)\n", report.abort_reason.c_str());
    return code;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model;
    std::string data;
    std::string loss = "pointwise";
    std::string manifest;
};

double model_nll(const Generator& g, int dim, const TrainingSet& data)
{
    if (const auto* net = std::get_if<GeneratorNetwork>(&g)) return evaluate_nll(*net, data);
    const CopulaModel model(dim, g);
    double s = 0.0;
    const std::size_t n = rows_of(data);
    if (const auto* d = std::get_if<Dataset>(&data)) {
        for (std::size_t i = 0; i < n; ++i) s -= log_density(model, d->row(i));
    } else {
        const auto& c = std::get<CensoredDataset>(data);
        for (std::size_t i = 0; i < n; ++i) {
            const auto lo = c.lower_row(i);
            const auto hi = c.upper_row(i);
            s -= rectangle_log_prob(model, {{lo.begin(), lo.end()}, {hi.begin(), hi.end()}});
        }
    }
    return s / static_cast<double>(n);
}

int cmd_eval(const EvalArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    if (a.loss != "pointwise" && a.loss != "censored") fail(ErrorKind::usage, "--loss must be pointwise or censored");
    const LoadedModel lm{load_model(a.model)};
    const TrainingSet data = load_set(a.data, a.loss == "censored");
    const int dim = lm.dim(std::nullopt, cols_of(data));
    const double nll = model_nll(lm.file.generator, dim, data);
    char line[64];
    std::snprintf(line, sizeof line, "%.12g", nll);
    std::printf("%s\n", line);
    m.config() = {{"model", a.model}, {"data", a.data}, {"loss", a.loss}};
    m.input(a.model);
    m.input(a.data);
    m.set("nll", line);
    wall = seconds_since(t0);
    m.write(a.manifest.empty() ? manifest_path_for(a.model + ".eval") : a.manifest, wall, kOk);
    return kOk;
}

// ---------------------------------------------------------------------------

struct QueryArgs {
    std::string model;
    std::string kind;
    std::string point;
    std::string observed;
    std::string lower;
    std::string upper;
    std::string manifest;
};

int cmd_query(const QueryArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    const LoadedModel lm{load_model(a.model)};
    double value = 0.0;
    if (a.kind == "rect") {
        if (a.lower.empty() || a.upper.empty()) fail(ErrorKind::usage, "rect needs --lower and --upper");
        Rectangle r{parse_doubles(a.lower, "--lower"), parse_doubles(a.upper, "--upper")};
        if (r.lower.size() != r.upper.size()) fail(ErrorKind::usage, "--lower and --upper differ in length");
        const CopulaModel model(lm.dim(static_cast<int>(r.lower.size())), lm.file.generator);
        value = rectangle_prob(model, r);
    } else {
        if (a.point.empty()) fail(ErrorKind::usage, a.kind + " needs --point");
        const auto u = parse_doubles(a.point, "--point");
        const CopulaModel model(lm.dim(static_cast<int>(u.size())), lm.file.generator);
        if (a.kind == "cdf") {
            value = cdf(model, u);
        } else if (a.kind == "logpdf") {
            value = log_density(model, u);
        } else if (a.kind == "condcdf" || a.kind == "condpdf") {
            const ConditioningQuery q{parse_ints(a.observed, "--observed"), u};
            value = a.kind == "condcdf" ? conditional_cdf(model, q) : conditional_log_density(model, q);
        } else {
            fail(ErrorKind::usage, "unknown query kind '" + a.kind + "'");
        }
    }
    const std::string text = format_g17(value);
    std::printf("%s\n", text.c_str());
    m.config() = {{"model", a.model}, {"kind", a.kind}, {"point", a.point}, {"observed", a.observed},
                  {"lower", a.lower}, {"upper", a.upper}};
    m.input(a.model);
    m.set("value", text);
    wall = seconds_since(t0);
    m.write(a.manifest.empty() ? manifest_path_for(a.model + ".query") : a.manifest, wall, kOk);
    return kOk;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
    std::string model;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::optional<int> dim;
    std::string out;
};

int cmd_sample(const SampleArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    const LoadedModel lm{load_model(a.model)};
    const int dim = lm.dim(a.dim);
    if (a.n < 1) fail(ErrorKind::usage, "--n must be positive");
    std::vector<double> v;
    if (const auto* net = std::get_if<GeneratorNetwork>(&lm.file.generator)) {
        v = sample_u(*net, dim, a.n, a.seed);
    } else {
        const auto& f = std::get<ParametricFamily>(lm.file.generator);
        if (dim == 2)
            v = ref_sample_bivariate(f, a.n, a.seed);
        else if (f.family() == Family::clayton)
            v = sample_clayton_mixture(f.theta(), dim, a.n, a.seed);
        else
            fail(ErrorKind::unsupported, "this family is only sampled in two dimensions");
    }
    write_csv_file(a.out, Dataset(a.n, static_cast<std::size_t>(dim), std::move(v), true));
    m.config() = {{"model", a.model}, {"n", a.n}, {"dim", dim}, {"out", a.out}};
    m.seed("sample", a.seed);
    m.input(a.model);
    m.output(a.out);
    wall = seconds_since(t0);
    m.write(manifest_path_for(a.out), wall, kOk);
    return kOk;
}

// ---------------------------------------------------------------------------

struct GridArgs {
    std::string model;
    std::string kind = "logpdf";
    int resolution = 50;
    std::string out;
};

int cmd_grid(const GridArgs& a, RunManifest& m, double& wall, std::chrono::steady_clock::time_point t0)
{
    const LoadedModel lm{load_model(a.model)};
    if (lm.file.dim && *lm.file.dim != 2) fail(ErrorKind::unsupported, "grids are drawn for two-dimensional models");
    if (a.kind != "cdf" && a.kind != "logpdf") fail(ErrorKind::usage, "--kind must be cdf or logpdf");
    if (a.resolution < 1) fail(ErrorKind::usage, "--resolution must be positive");
    const CopulaModel model(2, lm.file.generator);
    std::ofstream out(a.out, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + a.out);
    const auto coord = [&](int i) { return a.resolution == 1 ? 0.5 : std::lerp(0.01, 0.99, static_cast<double>(i) / (a.resolution - 1)); };
    for (int i = 0; i < a.resolution; ++i)
        for (int j = 0; j < a.resolution; ++j) {
            const std::vector<double> p{coord(i), coord(j)};
            const double v = a.kind == "cdf" ? cdf(model, p) : log_density(model, p);
            out << format_g17(p[0]) << ',' << format_g17(p[1]) << ',' << format_g17(v) << '\n';
        }
    out.close();
    m.config() = {{"model", a.model}, {"kind", a.kind}, {"resolution", a.resolution}, {"out", a.out}};
    m.input(a.model);
    m.output(a.out);
    wall = seconds_since(t0);
    m.write(manifest_path_for(a.out), wall, kOk);
    return kOk;
}

int run(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------

int cmd_replay(const std::string& manifest_path)
{
    std::ifstream in(manifest_path);
    if (!in) fail(ErrorKind::data, "cannot open " + manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::data, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.contains("argv") || !j["argv"].is_array()) fail(ErrorKind::data, "manifest lacks argv");
    const auto argv = j["argv"].get<std::vector<std::string>>();
    if (!argv.empty() && argv[1 % argv.size()] == "replay") fail(ErrorKind::usage, "cannot replay a replay");
    const int code = run(argv);
    int mismatches = 0;
    for (const auto& o : j.value("outputs", nlohmann::json::array())) {
        if (!o.value("primary", true)) continue;
        const std::string path = o["path"].get<std::string>();
        const std::string now = fs::exists(path) ? cli::sha256_file(path) : "missing";
        const bool same = now == o["sha256"].get<std::string>();
        mismatches += same ? 0 : 1;
        std::printf("%s %s\n", same ? "identical" : "DIFFERS", path.c_str());
    }
    if (code != j.value("exit_code", 0)) {
        std::printf("exit code %d, recorded %d\n", code, j.value("exit_code", 0));
        ++mismatches;
    }
    return mismatches == 0 ? kOk : kData;
}

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Archimedean copulas with learned completely monotone generators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "acnet 1.0.0");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "sample train/test sets from a parametric family");
    s->add_option("--family", synth.family, "clayton, frank, joe, gumbel or independence")->required();
    s->add_option("--theta", synth.theta, "family parameter")->required();
    s->add_option("--n-train", synth.n_train, "training rows")->capture_default_str();
    s->add_option("--n-test", synth.n_test, "test rows")->capture_default_str();
    s->add_option("--seed", synth.seed, "sampling seed")->capture_default_str();
    s->add_option("--dim", synth.dim, "dimension (above 2 for Clayton only)")->capture_default_str();
    s->add_option("--out", synth.out, "output directory")->required();

    PrepareArgs prep;
    auto* p = app.add_subcommand("prepare", "split raw data 3:1 and rank-normalize each part");
    p->add_option("--data", prep.data, "raw CSV")->required();
    p->add_option("--ratio", prep.ratio, "train:test ratio")->capture_default_str();
    p->add_option("--seed", prep.seed, "split seed")->capture_default_str();
    p->add_option("--flip", prep.flip, "comma-separated coordinates to map u -> 1 - u");
    p->add_option("--out", prep.out, "output directory")->required();

    FitArgs fa;
    auto* f = app.add_subcommand("fit", "train a generator network (or a parametric family)");
    f->add_option("--train", fa.train, "training CSV")->required();
    f->add_option("--test", fa.test, "test CSV");
    f->add_option("--hidden", fa.hidden, "hidden widths, comma-separated")->capture_default_str();
    f->add_option("--lr", fa.lr, "learning rate")->capture_default_str();
    f->add_option("--momentum", fa.momentum, "momentum")->capture_default_str();
    f->add_option("--batch", fa.batch, "batch size")->capture_default_str();
    f->add_option("--epochs", fa.epochs, "epochs")->capture_default_str();
    f->add_option("--seed", fa.seed, "shuffle / outlier / censoring seed")->capture_default_str();
    f->add_option("--init-seed", fa.init_seed, "weight initialization seed")->capture_default_str();
    f->add_option("--loss", fa.loss, "pointwise or censored")->capture_default_str();
    f->add_option("--reduction", fa.reduction, "minibatch gradient reduction: sum or mean")->capture_default_str();
    f->add_option("--censor", fa.censor, "censor point data with this noise level before training");
    f->add_option("--outliers", fa.outliers, "append this fraction of uniform points to the training set");
    f->add_option("--eval-every", fa.eval_every, "test evaluation cadence in epochs")->capture_default_str();
    f->add_option("--grad-clip", fa.grad_clip, "clip the gradient norm (0 disables)");
    f->add_option("--weight-decay", fa.weight_decay, "L2 penalty on raw weights (0 disables)");
    f->add_option("--resume", fa.resume, "continue from a saved network model");
    f->add_option("--family", fa.family, "fit this parametric family instead of a network");
    f->add_option("--out", fa.out, "model JSON to write")->required();
    f->add_option("--telemetry", fa.telemetry, "telemetry CSV (default: <out>.telemetry.csv)");

    EvalArgs ea;
    auto* e = app.add_subcommand("eval", "mean negative log-likelihood of a model on data");
    e->add_option("--model", ea.model, "model JSON")->required();
    e->add_option("--data", ea.data, "data CSV")->required();
    e->add_option("--loss", ea.loss, "pointwise or censored")->capture_default_str();
    e->add_option("--manifest", ea.manifest, "manifest path");

    QueryArgs qa;
    auto* q = app.add_subcommand("query", "evaluate one probabilistic query");
    q->add_option("--model", qa.model, "model JSON")->required();
    q->add_option("--kind", qa.kind, "cdf, logpdf, condcdf, condpdf or rect")->required();
    q->add_option("--point", qa.point, "comma-separated point");
    q->add_option("--observed", qa.observed, "comma-separated observed coordinates (conditional kinds)");
    q->add_option("--lower", qa.lower, "rectangle lower corner");
    q->add_option("--upper", qa.upper, "rectangle upper corner");
    q->add_option("--manifest", qa.manifest, "manifest path");

    SampleArgs sa;
    auto* sm = app.add_subcommand("sample", "draw points from a model");
    sm->add_option("--model", sa.model, "model JSON")->required();
    sm->add_option("--n", sa.n, "number of points")->capture_default_str();
    sm->add_option("--seed", sa.seed, "sampling seed")->capture_default_str();
    sm->add_option("--dim", sa.dim, "dimension (default: the model's)");
    sm->add_option("--out", sa.out, "output CSV")->required();

    GridArgs ga;
    auto* g = app.add_subcommand("grid", "tabulate cdf or log density on a grid for plotting");
    g->add_option("--model", ga.model, "model JSON")->required();
    g->add_option("--kind", ga.kind, "cdf or logpdf")->capture_default_str();
    g->add_option("--resolution", ga.resolution, "points per axis")->capture_default_str();
    g->add_option("--out", ga.out, "output CSV")->required();

    std::string replay_manifest;
    auto* r = app.add_subcommand("replay", "rerun a manifest and compare its primary outputs");
    r->add_option("manifest", replay_manifest, "manifest JSON")->required();

    std::vector<const char*> cargv;
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::string command = app.get_subcommands().front()->get_name();
    RunManifest manifest(command, args);
    double wall = 0.0;
    if (command == "synth") return cmd_synth(synth, manifest, wall, t0);
    if (command == "prepare") return cmd_prepare(prep, manifest, wall, t0);
    if (command == "fit") return cmd_fit(fa, manifest, wall, t0);
    if (command == "eval") return cmd_eval(ea, manifest, wall, t0);
    if (command == "query") return cmd_query(qa, manifest, wall, t0);
    if (command == "sample") return cmd_sample(sa, manifest, wall, t0);
    if (command == "grid") return cmd_grid(ga, manifest, wall, t0);
    return cmd_replay(replay_manifest);
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    try {
        return run(args);
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kData;
    }
}
