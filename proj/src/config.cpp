#include "tqn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "tqn/binary_io.hpp"

namespace tqn {

namespace {

constexpr ConfigKey kKeys[] = {
    {"seed", "--seed", "RNG seed for weights and triplet sampling"},
    {"batch_size", "--batch-size", "triplets per mini-batch"},
    {"momentum", "--momentum", "SGD momentum"},
    {"weight_decay", "--weight-decay", "L2 weight decay on weights"},
    {"stage1.epochs", "--stage1-epochs", "triplet-loss epochs"},
    {"stage1.lr", "--stage1-lr", "triplet-loss learning rate"},
    {"stage1.margin", "--stage1-margin", "triplet margin alpha"},
    {"stage2.epochs", "--stage2-epochs", "quantization fine-tuning epochs"},
    {"stage2.lr", "--stage2-lr", "fine-tuning learning rate"},
    {"stage2.beta", "--stage2-beta", "weight of the similar-pair loss"},
    {"stage2.gamma", "--stage2-gamma", "weight of the dissimilar-pair loss"},
    {"hash.bits", "--bits", "code length N"},
    {"hash.classes", "--classes", "class count C (0 = from data)"},
    {"hash.delta", "--delta", "threshold margin Delta"},
    {"hash.omega", "--omega", "slack bits omega"},
    {"hash.eps", "--eps", "residual margin epsilon"},
    {"hash.mode", "--mode", "alpha_d mode: eq16 | cifar-table | inshop-table"},
    {"model.hidden", "--model-hidden", "comma-separated hidden layer sizes"},
    {"data.path", "--data", "training dataset (CSV or TQNF)"},
    {"data.format", "--data-format", "csv | tqnf (default: by extension)"},
    {"data.holdout", "--holdout", "per-class query fraction"},
    {"eval.metric", "--metric", "map | topk"},
    {"eval.k", "--k", "cutoff for topk"},
    {"out.checkpoint", "--checkpoint", "model checkpoint output"},
    {"out.curves", "--curves", "loss-curve CSV output"},
    {"out.report", "--report", "key=value report output"},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::size_t> parse_dims(std::string_view text, const std::string& what) {
    std::vector<std::size_t> dims;
    if (trim(text).empty()) return dims;  // no hidden layers
    while (true) {
        const auto comma = text.find(',');
        dims.push_back(parse_u32(trim(text.substr(0, comma)), what));
        if (dims.back() == 0) throw ConfigError(what + ": layer sizes must be positive");
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return dims;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

double parse_double(std::string_view text, const std::string& what) {
    text = trim(text);
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(what + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
        throw ConfigError(what + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint32_t parse_u32(std::string_view text, const std::string& what) {
    const auto v = parse_u64(text, what);
    if (v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(what + ": value too large");
    return static_cast<std::uint32_t>(v);
}

void apply_setting(RunSettings& s, std::string_view key, std::string_view value, const std::string& where) {
    const std::string what = where + " (" + std::string(key) + ")";
    auto& t = s.train;
    try {
        if (key == "seed") t.seed = parse_u64(value, what);
        else if (key == "batch_size") t.batch_size = parse_u32(value, what);
        else if (key == "momentum") t.momentum = parse_double(value, what);
        else if (key == "weight_decay") t.weight_decay = parse_double(value, what);
        else if (key == "stage1.epochs") t.stage1.epochs = parse_u32(value, what);
        else if (key == "stage1.lr") t.stage1.lr = parse_double(value, what);
        else if (key == "stage1.margin") t.stage1.margin = parse_double(value, what);
        else if (key == "stage2.epochs") t.stage2.epochs = parse_u32(value, what);
        else if (key == "stage2.lr") t.stage2.lr = parse_double(value, what);
        else if (key == "stage2.beta") t.stage2.beta = parse_double(value, what);
        else if (key == "stage2.gamma") t.stage2.gamma = parse_double(value, what);
        else if (key == "hash.bits") t.hash.bits = parse_u32(value, what);
        else if (key == "hash.classes") t.hash.classes = parse_u32(value, what);
        else if (key == "hash.delta") t.hash.margin = parse_double(value, what);
        else if (key == "hash.omega") t.hash.omega = parse_double(value, what);
        else if (key == "hash.eps") t.hash.epsilon = parse_double(value, what);
        else if (key == "hash.mode") t.hash.mode = parse_alpha_d_mode(trim(value));
        else if (key == "model.hidden") t.hidden = parse_dims(value, what);
        else if (key == "data.path") s.data_path = std::string(trim(value));
        else if (key == "data.format") s.data_format = parse_data_format(trim(value));
        else if (key == "data.holdout") s.holdout = parse_double(value, what);
        else if (key == "eval.metric") {
            const auto m = trim(value);
            if (m == "map") s.metric.kind = MetricKind::Map;
            else if (m == "topk") s.metric.kind = MetricKind::TopK;
            else throw ConfigError(what + ": expected map or topk, got '" + std::string(m) + "'");
        }
        else if (key == "eval.k") s.metric.k = parse_u32(value, what);
        else if (key == "out.checkpoint") s.checkpoint = std::string(trim(value));
        else if (key == "out.curves") s.curves = std::string(trim(value));
        else if (key == "out.report") s.report = std::string(trim(value));
        else throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

void load_config_file(RunSettings& s, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value");
        const auto key = trim(view.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        apply_setting(s, key, view.substr(eq + 1), where);
    }
}

}  // namespace tqn
