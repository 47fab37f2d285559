#include "tqn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tqn/binary_io.hpp"

namespace tqn {

namespace {

constexpr std::uint32_t kDataVersion = 1;

[[noreturn]] void csv_error(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
    throw FormatError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

LabeledDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path.string());

    std::vector<double> values;
    std::vector<std::uint32_t> labels;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const char* p = line.data();
        const char* end = p + line.size();
        long long label = 0;
        auto [lp, lec] = std::from_chars(p, end, label);
        if (lec != std::errc{} || (lp != end && *lp != ',')) csv_error(path, line_no, "bad label");
        if (label < 0) csv_error(path, line_no, "negative label");
        if (label > std::numeric_limits<std::uint32_t>::max() - 1) csv_error(path, line_no, "label too large");
        p = lp;

        std::size_t fields = 0;
        while (p != end) {
            ++p;  // ','
            double v = 0.0;
            auto [vp, vec] = std::from_chars(p, end, v);
            if (vec != std::errc{} || (vp != end && *vp != ',') || !std::isfinite(v)) {
                csv_error(path, line_no, "bad value in column " + std::to_string(fields + 2));
            }
            values.push_back(v);
            ++fields;
            p = vp;
        }
        if (fields == 0) csv_error(path, line_no, "no feature values");
        if (labels.empty()) {
            dim = fields;
        } else if (fields != dim) {
            csv_error(path, line_no, "expected " + std::to_string(dim) + " values, found " +
                                         std::to_string(fields));
        }
        labels.push_back(static_cast<std::uint32_t>(label));
    }
    if (labels.empty()) throw FormatError(path.string() + ": no items");

    LabeledDataset d;
    d.features = Matrix(labels.size(), dim, std::move(values));
    d.num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    d.labels = std::move(labels);
    return d;
}

void save_csv(const LabeledDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    char buf[64];
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.labels[i];
        for (double v : d.features.row(i)) {
            // shortest representation that parses back to the same double
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

LabeledDataset load_tqnf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path.string());
    LeReader r(in, path.string());
    r.expect_magic("TQNF");
    if (const auto version = r.u32(); version != kDataVersion) {
        throw FormatError(path.string() + ": unsupported TQNF version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32(), dim = r.u32(), classes = r.u32();
    if (dim == 0 && count > 0) throw FormatError(path.string() + ": zero feature dimension");

    LabeledDataset d;
    d.num_classes = classes;
    d.labels.resize(count);
    for (auto& label : d.labels) {
        const std::uint64_t at = r.offset();
        label = r.u32();
        if (label >= classes) {
            throw FormatError(path.string() + ": label " + std::to_string(label) + " at byte offset " +
                              std::to_string(at) + " exceeds class count " + std::to_string(classes));
        }
    }
    d.features = Matrix(count, dim);
    for (auto& v : d.features.data()) {
        const std::uint64_t at = r.offset();
        v = static_cast<double>(r.f32());
        if (!std::isfinite(v)) {
            throw FormatError(path.string() + ": non-finite feature at byte offset " + std::to_string(at));
        }
    }
    r.expect_end();
    return d;
}

void save_tqnf(const LabeledDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    LeWriter w(out);
    w.magic("TQNF");
    w.u32(kDataVersion);
    w.u32(static_cast<std::uint32_t>(d.size()));
    w.u32(static_cast<std::uint32_t>(d.dim()));
    w.u32(d.num_classes);
    for (auto label : d.labels) w.u32(label);
    for (double v : d.features.data()) w.f32(static_cast<float>(v));
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void LabeledDataset::validate() const {
    if (features.rows() != labels.size()) {
        throw std::invalid_argument("dataset: " + std::to_string(labels.size()) + " labels for " +
                                    std::to_string(features.rows()) + " feature rows");
    }
    for (auto l : labels) {
        if (l >= num_classes) throw std::invalid_argument("dataset: label exceeds class count");
    }
}

std::vector<std::vector<std::uint32_t>> LabeledDataset::members_by_class() const {
    std::vector<std::vector<std::uint32_t>> out(num_classes);
    for (std::uint32_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
    return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::uint32_t>& items) const {
    LabeledDataset out;
    out.num_classes = num_classes;
    out.features = Matrix(items.size(), dim());
    out.labels.reserve(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        const auto src = features.row(items[k]);
        std::copy(src.begin(), src.end(), out.features.row(k).begin());
        out.labels.push_back(labels[items[k]]);
    }
    return out;
}

LabeledDataset gen_clusters(std::uint32_t classes, std::uint32_t dim, std::uint32_t per_class,
                            double spread, std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("gen_clusters: need at least 2 classes");
    if (per_class < 2) throw std::invalid_argument("gen_clusters: need at least 2 items per class");
    if (dim == 0) throw std::invalid_argument("gen_clusters: dim must be positive");
    if (!(spread > 0.0) || !std::isfinite(spread)) throw std::invalid_argument("gen_clusters: spread must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center_dist(-1.0, 1.0);
    Matrix centers(classes, dim);
    for (auto& v : centers.data()) v = center_dist(rng);

    std::normal_distribution<double> noise(0.0, spread);
    LabeledDataset d;
    d.num_classes = classes;
    d.features = Matrix(std::size_t{classes} * per_class, dim);
    d.labels.reserve(d.features.rows());
    std::size_t item = 0;
    for (std::uint32_t c = 0; c < classes; ++c) {
        for (std::uint32_t k = 0; k < per_class; ++k, ++item) {
            auto row = d.features.row(item);
            for (std::size_t j = 0; j < dim; ++j) row[j] = centers(c, j) + noise(rng);
            d.labels.push_back(c);
        }
    }
    return d;
}

DataFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? DataFormat::Csv : DataFormat::Tqnf;
}

DataFormat parse_data_format(std::string_view text) {
    if (text == "csv") return DataFormat::Csv;
    if (text == "tqnf") return DataFormat::Tqnf;
    throw std::invalid_argument("unknown data format '" + std::string(text) + "' (expected csv or tqnf)");
}

LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    return format == DataFormat::Csv ? load_csv(path) : load_tqnf(path);
}

void save_dataset(const LabeledDataset& d, const std::filesystem::path& path, DataFormat format) {
    d.validate();
    if (format == DataFormat::Csv) {
        save_csv(d, path);
    } else {
        save_tqnf(d, path);
    }
}

Split split_holdout(const LabeledDataset& d, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0,1)");
    d.validate();
    std::vector<std::uint32_t> db_items, query_items;
    for (const auto& members : d.members_by_class()) {
        if (members.empty()) continue;
        if (members.size() < 2) {
            throw std::invalid_argument("split_holdout: every class needs at least 2 items");
        }
        const auto held = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::floor(static_cast<double>(members.size()) * fraction)), 1,
            members.size() - 1);
        const std::size_t keep = members.size() - held;
        db_items.insert(db_items.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
        query_items.insert(query_items.end(), members.begin() + static_cast<std::ptrdiff_t>(keep), members.end());
    }
    std::sort(db_items.begin(), db_items.end());
    std::sort(query_items.begin(), query_items.end());
    return {d.subset(db_items), d.subset(query_items)};
}

TripletSampler::TripletSampler(const LabeledDataset& d, std::uint64_t seed)
    : data_(&d), by_class_(d.members_by_class()), rng_(seed) {
    d.validate();
    std::size_t populated = 0;
    for (std::size_t c = 0; c < by_class_.size(); ++c) {
        if (by_class_[c].empty()) continue;
        if (by_class_[c].size() < 2) {
            throw std::invalid_argument("sample_triplets: class " + std::to_string(c) +
                                        " has fewer than 2 items");
        }
        ++populated;
    }
    if (populated < 2) throw std::invalid_argument("sample_triplets: need at least 2 classes");
    order_.resize(d.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    reshuffle();
}

void TripletSampler::reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
}

std::size_t TripletSampler::batches_per_epoch(std::size_t batch_size) const {
    return (order_.size() + batch_size - 1) / batch_size;
}

TripletIndexBatch TripletSampler::next(std::size_t batch_size) {
    if (batch_size == 0) throw std::invalid_argument("sample_triplets: batch size must be positive");
    if (cursor_ == order_.size()) reshuffle();
    const std::size_t count = std::min(batch_size, order_.size() - cursor_);
    const std::size_t n = order_.size();

    TripletIndexBatch batch;
    batch.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint32_t a = order_[cursor_++];
        const auto label = data_->labels[a];
        const auto& same = by_class_[label];

        // uniform over same-label items other than a
        std::uniform_int_distribution<std::size_t> pick_pos(0, same.size() - 2);
        std::uint32_t p = same[pick_pos(rng_)];
        if (p == a) p = same.back();

        // uniform over items with a different label, by indexing the complement
        std::uniform_int_distribution<std::size_t> pick_neg(0, n - same.size() - 1);
        std::size_t r = pick_neg(rng_);
        std::uint32_t neg = 0;
        for (std::size_t c = 0; c < by_class_.size(); ++c) {
            if (c == label) continue;
            if (r < by_class_[c].size()) {
                neg = by_class_[c][r];
                break;
            }
            r -= by_class_[c].size();
        }
        batch.push_back({a, p, neg});
    }
    return batch;
}

}  // namespace tqn
