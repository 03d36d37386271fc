#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "acnet/errors.hpp"

namespace acnet::cli {

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::data, "cannot read " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(two, sizeof two, "%02x", md[i]);
        hex += two;
    }
    return hex;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv))
{
}

void RunManifest::input(const std::string& path)
{
    inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void RunManifest::output(const std::string& path, bool primary)
{
    outputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}, {"primary", primary}});
}

void RunManifest::write(const std::string& path, double seconds, int exit_code) const
{
    nlohmann::ordered_json j;
    j["manifest_version"] = 1;
    j["command"] = command_;
    j["argv"] = argv_;
    j["config"] = config_;
    j["seeds"] = seeds_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    j["exit_code"] = exit_code;
    j["wall_clock_seconds"] = seconds;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::data, "cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace acnet::cli
