#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tqn/linalg.hpp"

namespace tqn {

/// Fully connected layer computing x·W + b, with W stored fan_in × fan_out.
struct DenseLayer {
    Matrix weights;
    std::vector<double> bias;

    std::size_t fan_in() const { return weights.rows(); }
    std::size_t fan_out() const { return weights.cols(); }
    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward embedding network: rectifier hidden layers, sigmoid latent layer.
/// The width of the last layer is the code length N.
class EmbeddingModel {
public:
    EmbeddingModel() = default;
    explicit EmbeddingModel(std::vector<DenseLayer> layers);

    /// Glorot-uniform weights, zero biases; deterministic in `seed`.
    static EmbeddingModel init(const std::vector<std::size_t>& layer_dims, std::uint64_t seed);

    std::size_t input_dim() const { return layers_.front().fan_in(); }
    std::size_t code_bits() const { return layers_.back().fan_out(); }
    std::vector<std::size_t> layer_dims() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

private:
    std::vector<DenseLayer> layers_;
};

/// Layer inputs and the final activation from one forward pass.
struct ForwardTrace {
    std::vector<Matrix> inputs;  // inputs[l] feeds layer l (post-activation of l−1)
    Matrix output;               // sigmoid features, bs × N
};

/// Gradients with the same shapes as the model parameters.
struct ModelGrads {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static ModelGrads zeros_like(const EmbeddingModel& m);
};

struct ForwardResult {
    Matrix features;
    ForwardTrace trace;
};

ForwardResult forward(const EmbeddingModel& m, const Matrix& x);
/// Features only, for inference.
Matrix embed(const EmbeddingModel& m, const Matrix& x);

ModelGrads backward(const EmbeddingModel& m, const ForwardTrace& trace, const Matrix& dl_dfeatures);

/// SGD with momentum; weight decay is folded into the weight gradient only.
struct OptimizerState {
    double lr = 0.001;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    ModelGrads velocity;

    static OptimizerState for_model(const EmbeddingModel& m, double lr, double momentum,
                                    double weight_decay);
};

/// v ← μ·v − lr·(g + λ·w); w ← w + v. Biases use λ = 0.
void sgd_step(EmbeddingModel& m, const ModelGrads& grads, OptimizerState& st);

/// TQNM checkpoint: magic, version, layer count, then per layer fan_in, fan_out,
/// f64 weights (row-major) and f64 biases, all little-endian.
void save_model(const EmbeddingModel& m, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

}  // namespace tqn
