#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "tqn/hashing.hpp"
#include "tqn/pipeline.hpp"

using namespace tqn;

namespace {

TrainConfig small_config(std::uint32_t e1, std::uint32_t e2) {
    TrainConfig cfg;
    cfg.stage1.epochs = e1;
    cfg.stage2.epochs = e2;
    cfg.hidden = {16};
    cfg.hash.bits = 8;
    cfg.seed = 3;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("skipping stage 2 yields pure triplet training") {
    const auto d = gen_clusters(4, 6, 20, 0.1, 1);
    const auto r = train_two_stage(d, small_config(3, 0));
    CHECK(r.report.curve.size() == 3);
    CHECK(r.report.stage_curve(TrainStage::Quantization).empty());
    for (std::uint32_t e = 0; e < 3; ++e) {
        CHECK(r.report.curve[e].stage == TrainStage::Triplet);
        CHECK(r.report.curve[e].epoch == e + 1);
    }
}

TEST_CASE("training is deterministic") {
    const auto d = gen_clusters(4, 6, 20, 0.1, 1);
    const auto a = train_two_stage(d, small_config(2, 2));
    const auto b = train_two_stage(d, small_config(2, 2));
    CHECK(a.model == b.model);
    REQUIRE(a.report.curve.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.report.curve[i].triplet_loss == b.report.curve[i].triplet_loss);
        CHECK(a.report.curve[i].tqn_loss == b.report.curve[i].tqn_loss);
    }
    auto other = small_config(2, 2);
    other.seed = 4;
    CHECK_FALSE(train_two_stage(d, other).model == a.model);
}

TEST_CASE("derived parameters come from the data's class count") {
    const auto d = gen_clusters(8, 6, 10, 0.1, 1);
    TwoStageTrainer t(d, small_config(0, 0));
    CHECK(t.config().hash.classes == 8);
    CHECK(t.report().derived.min_bits == 3);
    CHECK(t.report().derived.alpha_s == doctest::Approx(0.16));
    CHECK(t.report().derived.delta == doctest::Approx(0.64));
}

TEST_CASE("untrained zero model degenerates binary ranking to index order") {
    const auto d = gen_clusters(3, 4, 10, 0.1, 2);
    const Split s = split_holdout(d, 0.2);
    std::vector<DenseLayer> layers{{Matrix(4, 5), std::vector<double>(5, 0.0)}};
    const EmbeddingModel zero(std::move(layers));
    const EvalReport r = evaluate(zero, s.database, s.queries, {});

    Ranking index_order(s.queries.size(), std::vector<std::uint32_t>(s.database.size()));
    for (auto& o : index_order) std::iota(o.begin(), o.end(), 0u);
    CHECK(r.bc == mean_average_precision(index_order, s.queries.labels, s.database.labels));
    CHECK(r.metric == "map");
}

TEST_CASE("metrics stay in range and separable data reaches perfect RF MAP") {
    const auto d = gen_clusters(4, 8, 30, 0.05, 6);
    const Split s = split_holdout(d, 1.0 / 6.0);
    auto cfg = small_config(40, 0);
    cfg.stage1.lr = 0.01;
    const auto trained = train_two_stage(s.database, cfg);
    const EvalReport map = evaluate(trained.model, s.database, s.queries, {});
    CHECK(map.rf == 1.0);
    CHECK(map.bc >= 0.0);
    CHECK(map.bc <= 1.0);
    CHECK(map.drop_rel == doctest::Approx((map.bc - map.rf) / map.rf));

    const EvalReport top = evaluate(trained.model, s.database, s.queries, {MetricKind::TopK, 5});
    CHECK(top.metric == "top5");
    CHECK(top.rf >= 0.0);
    CHECK(top.rf <= 1.0);
    CHECK(top.bc >= 0.0);
    CHECK(top.bc <= 1.0);
}

TEST_CASE("stage-2 loss converges on the synthetic benchmark") {
    const auto d = gen_clusters(8, 32, 100, 0.05, 1);
    const Split s = split_holdout(d, 1.0 / 6.0);
    TrainConfig cfg;
    cfg.seed = 1;
    const auto r = train_two_stage(s.database, cfg);
    const auto stage2 = r.report.stage_curve(TrainStage::Quantization);
    REQUIRE(stage2.size() == 40);
    CHECK(stage2.back().tqn_loss < 0.5 * stage2.front().tqn_loss);
    const auto stage1 = r.report.stage_curve(TrainStage::Triplet);
    CHECK(stage1.back().triplet_loss < stage1.front().triplet_loss);
}

TEST_CASE("curve and report files") {
    const auto dir = std::filesystem::temp_directory_path() / "tqn_pipeline_test";
    std::filesystem::create_directories(dir);
    const auto d = gen_clusters(4, 6, 20, 0.1, 1);
    const Split s = split_holdout(d, 0.25);
    auto r = train_two_stage(s.database, small_config(2, 1));
    r.report.eval = evaluate(r.model, s.database, s.queries, {});
    write_curve_csv(r.report, dir / "c.csv");
    write_report(r.report, dir / "r.txt");

    const std::string csv = slurp(dir / "c.csv");
    CHECK(csv.rfind("epoch,stage,triplet_loss,tqn_loss\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const std::string rep = slurp(dir / "r.txt");
    for (const char* key : {"alpha_d=", "stage1.epochs=2", "stage2.epochs=1", "metric=map", "rf=", "bc=", "drop_rel="}) {
        CHECK(rep.find(key) != std::string::npos);
    }
    CHECK(format_exact(0.1) == "0.10000000000000001");
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.stage2.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    const auto d = gen_clusters(4, 6, 20, 0.1, 1);
    cfg = {};
    cfg.hash.bits = 1;  // below ⌈log₂ 4⌉
    CHECK_THROWS_AS(TwoStageTrainer(d, cfg), std::invalid_argument);
}
