#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acnet/data.hpp"
#include "acnet/generator_net.hpp"
#include "acnet/inversion.hpp"

namespace acnet {

enum class LossKind { pointwise, censored };

//! How a minibatch's per-point gradients are reduced before the SGD step.
//! The reported loss is always the per-point mean.
enum class GradientReduction { sum, mean };

struct LossResult {
    double nll = 0.0;              // mean over the batch
    std::vector<double> gradient;  // d(mean nll)/d(raw weights); empty when not requested
};

//! Mean of -log density over the rows (each row a point in (0,1)^d).
LossResult loss_pointwise(const GeneratorNetwork& net, const Dataset& batch, bool want_gradient = true,
                          const InversionSettings& settings = {});

//! Mean of -log P(rectangle) over the rows.
LossResult loss_censored(const GeneratorNetwork& net, const CensoredDataset& batch, bool want_gradient = true,
                         const InversionSettings& settings = {});

using TrainingSet = std::variant<Dataset, CensoredDataset>;

std::size_t rows_of(const TrainingSet& data);
std::size_t cols_of(const TrainingSet& data);

//! Mean loss of the matching kind on the whole set, no gradient.
double evaluate_nll(const GeneratorNetwork& net, const TrainingSet& data, const InversionSettings& settings = {});

struct TrainConfig {
    double learning_rate = 1e-5;
    double momentum = 0.9;
    std::size_t batch_size = 200;
    int epochs = 40000;
    std::uint64_t seed = 0;
    GradientReduction reduction = GradientReduction::sum;
    //! Test NLL cadence in epochs; 0 evaluates only after the last epoch.
    int eval_every = 100;
    //! Opt-in robustness knobs, off by default.
    double grad_clip = 0.0;
    double weight_decay = 0.0;
    InversionSettings inversion{};
};

struct EpochRecord {
    int epoch = 0;
    double train_nll = 0.0;
    std::optional<double> test_nll;
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    double final_train_nll = 0.0;
    std::optional<double> final_test_nll;
    double seconds = 0.0;
    GeneratorNetwork weights;
    //! Index of the last completed epoch (counting from any resumed state).
    int epoch = 0;
    std::vector<double> velocity;
    bool aborted = false;
    std::string abort_reason;
};

//! Resumable optimizer state: weights plus momentum buffer.
struct TrainState {
    GeneratorNetwork weights;
    std::vector<double> velocity;
    int epoch = 0;
};

//! Minibatch SGD with classical momentum:
//!     v <- mu v - lr g,  w <- w + v
//! over a freshly shuffled training set each epoch. Deterministic given the
//! seed. A non-finite loss or weight aborts with the last weights that had a
//! finite loss.
TrainReport fit(TrainState state, const TrainingSet& train, const TrainingSet* test, const TrainConfig& config,
                const std::function<void(const EpochRecord&)>& on_epoch = {});

} // namespace acnet
