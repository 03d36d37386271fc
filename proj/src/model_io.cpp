#include "acnet/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "acnet/data.hpp"
#include "acnet/errors.hpp"

namespace acnet {

namespace {

using nlohmann::json;

void write_list(std::ostringstream& out, std::span<const double> xs)
{
    out << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << format_g17(xs[i]);
    out << ']';
}

double number(const json& j, const char* what)
{
    if (!j.is_number()) fail(ErrorKind::data, std::string("model file: ") + what + " must be numeric");
    return j.get<double>();
}

} // namespace

std::string model_to_json(const Generator& generator, const OptimizerState* optimizer, std::optional<int> dim)
{
    std::ostringstream out;
    out << "{\n  \"format_version\": " << kModelFormatVersion;
    if (dim) out << ",\n  \"dim\": " << *dim;
    if (const auto* f = std::get_if<ParametricFamily>(&generator)) {
        out << ",\n  \"family\": \"" << family_name(f->family()) << "\",\n  \"theta\": " << format_g17(f->theta())
            << "\n}\n";
        return out.str();
    }
    const auto& net = std::get<GeneratorNetwork>(generator);
    const int L = net.depth();
    out << ",\n  \"L\": " << L << ",\n  \"H\": [";
    for (int l = 1; l <= L; ++l) out << (l > 1 ? ", " : "") << net.width(l);
    out << "],\n  \"phi_A\": [";
    const auto raw = net.raw_weights();
    for (int l = 1; l <= L + 1; ++l) {
        out << (l > 1 ? "," : "") << "\n    [";
        for (int i = 0; i < net.width(l); ++i) {
            out << (i ? ", " : "");
            write_list(out, raw.subspan(net.a_index(l, i, 0), static_cast<std::size_t>(net.width(l - 1))));
        }
        out << ']';
    }
    out << "\n  ],\n  \"phi_B\": [";
    for (int l = 1; l <= L; ++l) {
        out << (l > 1 ? "," : "") << "\n    ";
        write_list(out, raw.subspan(net.b_index(l, 0), static_cast<std::size_t>(net.width(l))));
    }
    out << "\n  ]";
    if (optimizer) {
        out << ",\n  \"optimizer\": {\"epoch\": " << optimizer->epoch << ", \"velocity\": ";
        write_list(out, optimizer->velocity);
        out << '}';
    }
    out << "\n}\n";
    return out.str();
}

ModelFile model_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::data, std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("format_version")) fail(ErrorKind::data, "model file lacks format_version");
    if (j["format_version"] != kModelFormatVersion)
        fail(ErrorKind::data, "unsupported model format_version " + j["format_version"].dump());
    std::optional<int> dim;
    if (j.contains("dim")) {
        if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 2)
            fail(ErrorKind::data, "model file: dim must be an integer >= 2");
        dim = j["dim"].get<int>();
    }

    if (j.contains("family")) {
        if (!j["family"].is_string()) fail(ErrorKind::data, "model file: family must be a string");
        const auto name = j["family"].get<std::string>();
        const auto fam = parse_family(name);
        if (!fam) fail(ErrorKind::data, "unknown copula family '" + name + "'");
        const double theta = j.contains("theta") ? number(j["theta"], "theta") : 1.0;
        return {ParametricFamily(*fam, theta), std::nullopt, dim};
    }

    try {
        const int L = j.at("L").get<int>();
        const auto H = j.at("H").get<std::vector<int>>();
        if (L < 1 || static_cast<int>(H.size()) != L) fail(ErrorKind::data, "model file: H must list L widths");
        const auto& A = j.at("phi_A");
        const auto& B = j.at("phi_B");
        if (!A.is_array() || A.size() != static_cast<std::size_t>(L + 1) || !B.is_array() ||
            B.size() != static_cast<std::size_t>(L))
            fail(ErrorKind::data, "model file: phi_A needs L+1 layers and phi_B needs L");
        std::vector<double> raw;
        std::vector<int> widths{1};
        widths.insert(widths.end(), H.begin(), H.end());
        widths.push_back(1);
        for (int l = 1; l <= L + 1; ++l) {
            const auto& m = A[static_cast<std::size_t>(l - 1)];
            if (!m.is_array() || m.size() != static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]))
                fail(ErrorKind::data, "model file: phi_A layer " + std::to_string(l) + " has the wrong row count");
            for (const auto& row : m) {
                if (!row.is_array() || row.size() != static_cast<std::size_t>(widths[static_cast<std::size_t>(l - 1)]))
                    fail(ErrorKind::data, "model file: phi_A layer " + std::to_string(l) + " has the wrong width");
                for (const auto& x : row) raw.push_back(number(x, "phi_A"));
            }
        }
        for (int l = 1; l <= L; ++l) {
            const auto& v = B[static_cast<std::size_t>(l - 1)];
            if (!v.is_array() || v.size() != static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]))
                fail(ErrorKind::data, "model file: phi_B layer " + std::to_string(l) + " has the wrong size");
            for (const auto& x : v) raw.push_back(number(x, "phi_B"));
        }
        ModelFile out{GeneratorNetwork(H, std::move(raw)), std::nullopt, dim};
        if (j.contains("optimizer")) {
            OptimizerState st;
            st.epoch = j["optimizer"].at("epoch").get<int>();
            st.velocity = j["optimizer"].at("velocity").get<std::vector<double>>();
            out.optimizer = std::move(st);
        }
        return out;
    } catch (const json::exception& e) {
        fail(ErrorKind::data, std::string("model file: ") + e.what());
    }
}

void save_model(const std::string& path, const Generator& generator, const OptimizerState* optimizer,
                std::optional<int> dim)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path);
    out << model_to_json(generator, optimizer, dim);
}

ModelFile load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::data, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace acnet
