#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tqn/data.hpp"
#include "tqn/losses.hpp"
#include "tqn/model.hpp"
#include "tqn/params.hpp"

namespace tqn {

struct TripletStageConfig {
    std::uint32_t epochs = 40;
    double lr = 0.001;
    double margin = 1.6;
};

struct QuantizationStageConfig {
    std::uint32_t epochs = 40;
    double lr = 0.0001;
    double beta = 8.0;
    double gamma = 1.0;
};

/// Two-stage schedule: triplet loss, then fine-tuning with the triplet
/// quantization loss. hash.classes = 0 means "take C from the training data".
struct TrainConfig {
    TripletStageConfig stage1;
    QuantizationStageConfig stage2;
    std::uint32_t batch_size = 32;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    std::vector<std::size_t> hidden{256, 128};
    HashParams hash{.bits = 12, .classes = 0, .margin = 0.4, .omega = 1.0, .epsilon = 0.3,
                    .mode = AlphaDMode::Eq16};
    std::uint64_t seed = 1;

    void validate() const;
};

enum class TrainStage : std::uint8_t { Triplet = 1, Quantization = 2 };

/// Mean per-batch losses over one epoch. Both losses are logged in either stage.
struct EpochLoss {
    TrainStage stage;
    std::uint32_t epoch;  // 1-based within its stage
    double triplet_loss;
    double tqn_loss;
};

enum class MetricKind { Map, TopK };

struct MetricSpec {
    MetricKind kind = MetricKind::Map;
    std::size_t k = 20;

    std::string name() const;
};

/// Real-valued (Euclidean) vs binary-code (Hamming) retrieval quality of one model.
struct EvalReport {
    std::string metric;
    double rf = 0.0;
    double bc = 0.0;
    double drop_rel = 0.0;  // (bc − rf) / rf
};

struct RunReport {
    std::vector<EpochLoss> curve;
    DerivedParams derived;
    std::optional<EvalReport> eval;

    std::vector<EpochLoss> stage_curve(TrainStage stage) const;
};

/// Owns the model, optimizer and triplet sampler for one training run.
class TwoStageTrainer {
public:
    TwoStageTrainer(const LabeledDataset& train, TrainConfig cfg);

    void run_triplet_stage();
    void run_quantization_stage();

    const EmbeddingModel& model() const { return model_; }
    const RunReport& report() const { return report_; }
    const TrainConfig& config() const { return cfg_; }

private:
    EpochLoss run_epoch(TrainStage stage, std::uint32_t epoch, OptimizerState& opt);

    const LabeledDataset* data_;
    TrainConfig cfg_;
    TqnWeights tqn_;
    EmbeddingModel model_;
    TripletSampler sampler_;
    RunReport report_;
};

struct TrainResult {
    EmbeddingModel model;
    RunReport report;
};

TrainResult train_two_stage(const LabeledDataset& data, const TrainConfig& cfg);

EvalReport evaluate(const EmbeddingModel& model, const LabeledDataset& db, const LabeledDataset& queries,
                    const MetricSpec& metric);

/// `epoch,stage,triplet_loss,tqn_loss` rows, 17 significant digits.
void write_curve_csv(const RunReport& report, const std::filesystem::path& path);
/// Flat key=value lines.
void write_report(const RunReport& report, const std::filesystem::path& path);

/// %.17g formatting, exact on round trip.
std::string format_exact(double v);

}  // namespace tqn
