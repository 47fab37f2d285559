#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string_view>
#include <vector>

#include "tqn/linalg.hpp"

namespace tqn {

/// Feature vectors with integer class labels. Items with equal labels are similar.
struct LabeledDataset {
    Matrix features;                    // items × dim
    std::vector<std::uint32_t> labels;  // one per item, each < num_classes
    std::uint32_t num_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }

    /// Throws std::invalid_argument when label/feature counts or label ranges disagree.
    void validate() const;
    /// Items of each class, in item order.
    std::vector<std::vector<std::uint32_t>> members_by_class() const;
    LabeledDataset subset(const std::vector<std::uint32_t>& items) const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Gaussian clusters around centers drawn uniformly on [−1,1]^dim. Items are
/// grouped by class: items [c·per_class, (c+1)·per_class) carry label c.
LabeledDataset gen_clusters(std::uint32_t classes, std::uint32_t dim, std::uint32_t per_class,
                            double spread, std::uint64_t seed);

enum class DataFormat { Csv, Tqnf };

/// Infers the format from the extension: ".csv" is CSV, anything else TQNF.
DataFormat format_for_path(const std::filesystem::path& path);
DataFormat parse_data_format(std::string_view text);

LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format);
void save_dataset(const LabeledDataset& d, const std::filesystem::path& path, DataFormat format);

/// Disjoint query/database split: the last ⌊n_c·fraction⌋ items of each class
/// (at least one) become queries, the rest form the database.
struct Split {
    LabeledDataset database;
    LabeledDataset queries;
};
Split split_holdout(const LabeledDataset& d, double fraction);

struct Triplet {
    std::uint32_t anchor;
    std::uint32_t positive;
    std::uint32_t negative;
};
using TripletIndexBatch = std::vector<Triplet>;

/// Draws triplets with anchors taken from a shuffled pass over all items. A batch
/// never crosses a pass boundary, so ⌈n/bs⌉ calls to next() make one epoch.
class TripletSampler {
public:
    TripletSampler(const LabeledDataset& d, std::uint64_t seed);

    TripletIndexBatch next(std::size_t batch_size);
    std::size_t batches_per_epoch(std::size_t batch_size) const;

private:
    void reshuffle();

    const LabeledDataset* data_;
    std::vector<std::vector<std::uint32_t>> by_class_;
    std::vector<std::uint32_t> order_;
    std::size_t cursor_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace tqn
