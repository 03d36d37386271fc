#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace acnet::cli {

std::string sha256_file(const std::string& path);

//! Record of one CLI run, written as JSON beside its outputs.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv);

    nlohmann::ordered_json& config() { return config_; }
    void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
    void input(const std::string& path);
    //! Primary outputs must be byte-identical when the run is replayed.
    void output(const std::string& path, bool primary = true);
    void set(const std::string& key, nlohmann::ordered_json value) { extra_[key] = std::move(value); }

    void write(const std::string& path, double seconds, int exit_code) const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json seeds_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json extra_ = nlohmann::ordered_json::object();
};

} // namespace acnet::cli
