#include "tqn/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tqn/binary_io.hpp"
#include "tqn/hashing.hpp"

namespace tqn {

namespace {

// separates the sampler stream from the weight-init stream
constexpr std::uint64_t kSamplerSalt = 0x9E3779B97F4A7C15ULL;

Matrix gather_rows(const Matrix& m, const TripletIndexBatch& batch) {
    const std::size_t bs = batch.size();
    Matrix out(3 * bs, m.cols());
    for (std::size_t i = 0; i < bs; ++i) {
        const std::uint32_t src[3] = {batch[i].anchor, batch[i].positive, batch[i].negative};
        for (std::size_t role = 0; role < 3; ++role) {
            const auto row = m.row(src[role]);
            std::copy(row.begin(), row.end(), out.row(role * bs + i).begin());
        }
    }
    return out;
}

HashParams resolve_hash(const TrainConfig& cfg, const LabeledDataset& data) {
    HashParams hp = cfg.hash;
    if (hp.classes == 0) hp.classes = data.num_classes;
    return hp;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(stage1.lr > 0.0) || !(stage2.lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
    if (stage1.margin < 0.0) throw std::invalid_argument("stage1.margin must be non-negative");
    if (stage2.beta < 0.0 || stage2.gamma < 0.0) throw std::invalid_argument("stage2.beta and stage2.gamma must be non-negative");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be at least 1");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must lie in [0,1)");
    if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
    if (hash.bits == 0) throw std::invalid_argument("hash.bits must be positive");
    for (auto h : hidden) {
        if (h == 0) throw std::invalid_argument("hidden layer sizes must be positive");
    }
}

std::string MetricSpec::name() const {
    return kind == MetricKind::Map ? std::string("map") : "top" + std::to_string(k);
}

std::vector<EpochLoss> RunReport::stage_curve(TrainStage stage) const {
    std::vector<EpochLoss> out;
    for (const auto& e : curve) {
        if (e.stage == stage) out.push_back(e);
    }
    return out;
}

TwoStageTrainer::TwoStageTrainer(const LabeledDataset& train, TrainConfig cfg)
    : data_(&train), cfg_(std::move(cfg)), sampler_(train, cfg_.seed ^ kSamplerSalt) {
    cfg_.validate();
    cfg_.hash = resolve_hash(cfg_, train);
    report_.derived = derive(cfg_.hash);
    tqn_ = {cfg_.stage2.beta, cfg_.stage2.gamma, report_.derived.alpha_s, report_.derived.alpha_d,
            report_.derived.delta};

    std::vector<std::size_t> dims{train.dim()};
    dims.insert(dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    dims.push_back(cfg_.hash.bits);
    model_ = EmbeddingModel::init(dims, cfg_.seed);
}

EpochLoss TwoStageTrainer::run_epoch(TrainStage stage, std::uint32_t epoch, OptimizerState& opt) {
    const std::size_t batches = sampler_.batches_per_epoch(cfg_.batch_size);
    double triplet_sum = 0.0, tqn_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const TripletIndexBatch batch = sampler_.next(cfg_.batch_size);
        const std::size_t bs = batch.size();
        auto fwd = forward(model_, gather_rows(data_->features, batch));

        const TripletFeatures t{slice_rows(fwd.features, 0, bs), slice_rows(fwd.features, bs, bs),
                                slice_rows(fwd.features, 2 * bs, bs)};
        const LossResult lt = triplet_loss(t, cfg_.stage1.margin);
        const LossResult lq = tqn_loss(t, tqn_);
        triplet_sum += lt.value;
        tqn_sum += lq.value;

        const LossResult& active = stage == TrainStage::Triplet ? lt : lq;
        const Matrix parts[3] = {active.grad_a, active.grad_p, active.grad_n};
        const ModelGrads grads = backward(model_, fwd.trace, vstack(parts));
        sgd_step(model_, grads, opt);
    }
    const double n = static_cast<double>(batches);
    return {stage, epoch, triplet_sum / n, tqn_sum / n};
}

void TwoStageTrainer::run_triplet_stage() {
    auto opt = OptimizerState::for_model(model_, cfg_.stage1.lr, cfg_.momentum, cfg_.weight_decay);
    for (std::uint32_t e = 1; e <= cfg_.stage1.epochs; ++e) {
        report_.curve.push_back(run_epoch(TrainStage::Triplet, e, opt));
    }
}

void TwoStageTrainer::run_quantization_stage() {
    // fresh velocity buffers for the fine-tuning stage
    auto opt = OptimizerState::for_model(model_, cfg_.stage2.lr, cfg_.momentum, cfg_.weight_decay);
    for (std::uint32_t e = 1; e <= cfg_.stage2.epochs; ++e) {
        report_.curve.push_back(run_epoch(TrainStage::Quantization, e, opt));
    }
}

TrainResult train_two_stage(const LabeledDataset& data, const TrainConfig& cfg) {
    TwoStageTrainer trainer(data, cfg);
    trainer.run_triplet_stage();
    trainer.run_quantization_stage();
    return {trainer.model(), trainer.report()};
}

EvalReport evaluate(const EmbeddingModel& model, const LabeledDataset& db, const LabeledDataset& queries,
                    const MetricSpec& metric) {
    const Matrix db_feats = embed(model, db.features);
    const Matrix query_feats = embed(model, queries.features);
    const Ranking rf_rank = rank_by_euclidean(query_feats, db_feats);
    const Ranking bc_rank = rank_by_hamming(quantize(query_feats), quantize(db_feats));

    EvalReport out;
    out.metric = metric.name();
    if (metric.kind == MetricKind::Map) {
        out.rf = mean_average_precision(rf_rank, queries.labels, db.labels);
        out.bc = mean_average_precision(bc_rank, queries.labels, db.labels);
    } else {
        out.rf = topk_accuracy(rf_rank, queries.labels, db.labels, metric.k);
        out.bc = topk_accuracy(bc_rank, queries.labels, db.labels, metric.k);
    }
    if (out.rf == 0.0) {
        throw std::domain_error("relative drop undefined: real-valued " + out.metric + " is zero");
    }
    out.drop_rel = (out.bc - out.rf) / out.rf;
    return out;
}

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_curve_csv(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "epoch,stage,triplet_loss,tqn_loss\n";
    for (const auto& e : report.curve) {
        out << e.epoch << ',' << static_cast<int>(e.stage) << ',' << format_exact(e.triplet_loss) << ','
            << format_exact(e.tqn_loss) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "min_bits=" << report.derived.min_bits << '\n'
        << "alpha_s=" << format_exact(report.derived.alpha_s) << '\n'
        << "alpha_d=" << format_exact(report.derived.alpha_d) << '\n'
        << "delta=" << format_exact(report.derived.delta) << '\n';
    for (auto stage : {TrainStage::Triplet, TrainStage::Quantization}) {
        const auto curve = report.stage_curve(stage);
        const std::string prefix = stage == TrainStage::Triplet ? "stage1" : "stage2";
        out << prefix << ".epochs=" << curve.size() << '\n';
        if (curve.empty()) continue;
        out << prefix << ".final_triplet_loss=" << format_exact(curve.back().triplet_loss) << '\n'
            << prefix << ".final_tqn_loss=" << format_exact(curve.back().tqn_loss) << '\n';
    }
    if (report.eval) {
        out << "metric=" << report.eval->metric << '\n'
            << "rf=" << format_exact(report.eval->rf) << '\n'
            << "bc=" << format_exact(report.eval->bc) << '\n'
            << "drop_rel=" << format_exact(report.eval->drop_rel) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace tqn
