#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acnet/copula.hpp"

namespace acnet {

inline constexpr int kModelFormatVersion = 1;

//! Optimizer state stored next to network weights so that training resumes
//! exactly where it stopped.
struct OptimizerState {
    int epoch = 0;
    std::vector<double> velocity;
};

struct ModelFile {
    Generator generator;
    std::optional<OptimizerState> optimizer;
    //! Dimension of the data the model was fitted to or generated, if known.
    std::optional<int> dim;
};

//! Versioned JSON. Networks: {format_version, L, H, phi_A, phi_B} with phi_A a
//! list of per-layer matrices and phi_B a list of per-layer vectors; families:
//! {format_version, family, theta}. Numbers carry 17 significant digits.
//! Optional keys: "dim" and "optimizer" {epoch, velocity}.
std::string model_to_json(const Generator& generator, const OptimizerState* optimizer = nullptr,
                          std::optional<int> dim = std::nullopt);
ModelFile model_from_json(const std::string& text);

void save_model(const std::string& path, const Generator& generator, const OptimizerState* optimizer = nullptr,
                std::optional<int> dim = std::nullopt);
ModelFile load_model(const std::string& path);

} // namespace acnet
