#include "tqn/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "tqn/binary_io.hpp"

namespace tqn {

namespace {

constexpr std::uint32_t kModelVersion = 1;

void check_grads_shape(const EmbeddingModel& m, const ModelGrads& g, const char* op) {
    const auto& layers = m.layers();
    bool ok = g.weights.size() == layers.size() && g.biases.size() == layers.size();
    for (std::size_t l = 0; ok && l < layers.size(); ++l) {
        ok = g.weights[l].same_shape(layers[l].weights) && g.biases[l].size() == layers[l].bias.size();
    }
    if (!ok) throw std::invalid_argument(std::string(op) + ": gradient shapes do not match model");
}

}  // namespace

EmbeddingModel::EmbeddingModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("EmbeddingModel: no layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.fan_in() == 0 || layer.fan_out() == 0 || layer.bias.size() != layer.fan_out()) {
            throw std::invalid_argument("EmbeddingModel: layer " + std::to_string(l) +
                                        " has inconsistent shape");
        }
        if (l > 0 && layers_[l - 1].fan_out() != layer.fan_in()) {
            throw std::invalid_argument("EmbeddingModel: layer " + std::to_string(l) +
                                        " fan_in does not match previous fan_out");
        }
    }
}

EmbeddingModel EmbeddingModel::init(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
    if (layer_dims.size() < 2) throw std::invalid_argument("init_model: need at least two layer sizes");
    for (auto d : layer_dims) {
        if (d == 0) throw std::invalid_argument("init_model: layer sizes must be positive");
    }
    std::mt19937_64 rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer layer{Matrix(fan_in, fan_out), std::vector<double>(fan_out, 0.0)};
        for (auto& w : layer.weights.data()) w = dist(rng);
        layers.push_back(std::move(layer));
    }
    return EmbeddingModel(std::move(layers));
}

std::vector<std::size_t> EmbeddingModel::layer_dims() const {
    std::vector<std::size_t> dims{input_dim()};
    for (const auto& l : layers_) dims.push_back(l.fan_out());
    return dims;
}

ModelGrads ModelGrads::zeros_like(const EmbeddingModel& m) {
    ModelGrads g;
    for (const auto& l : m.layers()) {
        g.weights.emplace_back(l.fan_in(), l.fan_out());
        g.biases.emplace_back(l.fan_out(), 0.0);
    }
    return g;
}

ForwardResult forward(const EmbeddingModel& m, const Matrix& x) {
    if (m.layers().empty()) throw std::invalid_argument("forward: empty model");
    if (x.cols() != m.input_dim()) {
        throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                    " columns, model expects " + std::to_string(m.input_dim()));
    }
    ForwardResult out;
    Matrix h = x;
    const auto& layers = m.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix z = matmul(h, layers[l].weights);
        for (std::size_t r = 0; r < z.rows(); ++r) {
            auto row = z.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) row[c] += layers[l].bias[c];
        }
        out.trace.inputs.push_back(std::move(h));
        if (l + 1 < layers.size()) {
            for (auto& v : z.data()) v = v > 0.0 ? v : 0.0;
            h = std::move(z);
        } else {
            h = sigmoid(z);
        }
    }
    out.trace.output = h;
    out.features = std::move(h);
    return out;
}

Matrix embed(const EmbeddingModel& m, const Matrix& x) { return forward(m, x).features; }

ModelGrads backward(const EmbeddingModel& m, const ForwardTrace& trace, const Matrix& dl_dfeatures) {
    const auto& layers = m.layers();
    if (trace.inputs.size() != layers.size()) {
        throw std::invalid_argument("backward: trace has " + std::to_string(trace.inputs.size()) +
                                    " layers, model has " + std::to_string(layers.size()));
    }
    if (!dl_dfeatures.same_shape(trace.output)) {
        throw std::invalid_argument("backward: upstream gradient shape does not match features");
    }

    ModelGrads g;
    g.weights.resize(layers.size());
    g.biases.resize(layers.size());

    // delta = dL/dz for the current layer's pre-activation
    Matrix delta = sigmoid_grad(trace.output);
    for (std::size_t k = 0; k < delta.size(); ++k) delta.data()[k] *= dl_dfeatures.data()[k];

    for (std::size_t l = layers.size(); l-- > 0;) {
        const Matrix& input = trace.inputs[l];
        g.weights[l] = matmul_tn(input, delta);
        g.biases[l].assign(delta.cols(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            const auto row = delta.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) g.biases[l][c] += row[c];
        }
        if (l == 0) break;
        Matrix upstream = matmul_nt(delta, layers[l].weights);
        // input of layer l is relu(z_{l-1}); relu'(z) = 1 iff output > 0
        for (std::size_t k = 0; k < upstream.size(); ++k) {
            if (input.data()[k] <= 0.0) upstream.data()[k] = 0.0;
        }
        delta = std::move(upstream);
    }
    return g;
}

OptimizerState OptimizerState::for_model(const EmbeddingModel& m, double lr, double momentum,
                                         double weight_decay) {
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    return {lr, momentum, weight_decay, ModelGrads::zeros_like(m)};
}

void sgd_step(EmbeddingModel& m, const ModelGrads& grads, OptimizerState& st) {
    check_grads_shape(m, grads, "sgd_step");
    check_grads_shape(m, st.velocity, "sgd_step (velocity)");
    auto& layers = m.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = layers[l].weights.data();
        auto& vw = st.velocity.weights[l].data();
        const auto& gw = grads.weights[l].data();
        for (std::size_t k = 0; k < w.size(); ++k) {
            vw[k] = st.momentum * vw[k] - st.lr * (gw[k] + st.weight_decay * w[k]);
            w[k] += vw[k];
        }
        auto& b = layers[l].bias;
        auto& vb = st.velocity.biases[l];
        const auto& gb = grads.biases[l];
        for (std::size_t k = 0; k < b.size(); ++k) {
            vb[k] = st.momentum * vb[k] - st.lr * gb[k];
            b[k] += vb[k];
        }
    }
}

void save_model(const EmbeddingModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    LeWriter w(out);
    w.magic("TQNM");
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(m.layers().size()));
    for (const auto& layer : m.layers()) {
        w.u32(static_cast<std::uint32_t>(layer.fan_in()));
        w.u32(static_cast<std::uint32_t>(layer.fan_out()));
        for (double v : layer.weights.data()) w.f64(v);
        for (double v : layer.bias) w.f64(v);
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

EmbeddingModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    LeReader r(in, path.string());
    r.expect_magic("TQNM");
    if (const auto version = r.u32(); version != kModelVersion) {
        throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    if (count == 0) throw FormatError(path.string() + ": checkpoint has no layers");
    std::vector<DenseLayer> layers;
    for (std::uint32_t l = 0; l < count; ++l) {
        const std::uint64_t at = r.offset();
        const std::uint32_t fan_in = r.u32(), fan_out = r.u32();
        if (fan_in == 0 || fan_out == 0 || (l > 0 && layers.back().fan_out() != fan_in)) {
            throw FormatError(path.string() + ": inconsistent shape for layer " + std::to_string(l) +
                              " at byte offset " + std::to_string(at));
        }
        DenseLayer layer{Matrix(fan_in, fan_out), std::vector<double>(fan_out)};
        for (auto& v : layer.weights.data()) v = r.f64();
        for (auto& v : layer.bias) v = r.f64();
        layers.push_back(std::move(layer));
    }
    r.expect_end();
    return EmbeddingModel(std::move(layers));
}

}  // namespace tqn
