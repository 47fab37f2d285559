#include "tqn/hashing.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tqn/binary_io.hpp"

namespace tqn {

namespace {

constexpr std::uint32_t kCodesVersion = 1;

std::uint64_t tail_mask(std::size_t n_bits) {
    const std::size_t used = n_bits % 64;
    return used == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
}

void check_ranking_inputs(const Ranking& r, std::span<const std::uint32_t> query_labels,
                          std::span<const std::uint32_t> db_labels, const char* op) {
    if (r.size() != query_labels.size()) {
        throw std::invalid_argument(std::string(op) + ": ranking has " + std::to_string(r.size()) +
                                    " queries, " + std::to_string(query_labels.size()) + " labels given");
    }
    for (const auto& order : r) {
        if (order.size() != db_labels.size()) {
            throw std::invalid_argument(std::string(op) + ": ranking length differs from database size");
        }
    }
}

}  // namespace

BinaryCodeSet::BinaryCodeSet(std::size_t count, std::size_t n_bits)
    : count_(count), n_bits_(n_bits), words_((n_bits + 63) / 64), packed_(count * words_, 0) {
    if (n_bits == 0) throw std::invalid_argument("BinaryCodeSet: n_bits must be positive");
}

void BinaryCodeSet::set_bit(std::size_t i, std::size_t j, bool value) {
    auto& word = packed_[i * words_ + j / 64];
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    word = value ? (word | mask) : (word & ~mask);
}

BinaryCodeSet BinaryCodeSet::from_words(std::size_t count, std::size_t n_bits,
                                        std::vector<std::uint64_t> words) {
    BinaryCodeSet out(count, n_bits);
    if (words.size() != out.packed_.size()) {
        throw std::invalid_argument("BinaryCodeSet: word count does not match count × words_per_code");
    }
    const std::uint64_t mask = tail_mask(n_bits);
    for (std::size_t i = 0; i < count; ++i) {
        if (words[i * out.words_ + out.words_ - 1] & ~mask) {
            throw std::invalid_argument("BinaryCodeSet: padding bits set in code " + std::to_string(i));
        }
    }
    out.packed_ = std::move(words);
    return out;
}

BinaryCodeSet quantize(const Matrix& features) {
    BinaryCodeSet codes(features.rows(), features.cols());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double f = row[j];
            if (!(f >= 0.0 && f <= 1.0)) {
                throw std::invalid_argument("quantize: feature " + std::to_string(f) + " outside [0,1]");
            }
            if (f > 0.5) codes.set_bit(i, j, true);
        }
    }
    return codes;
}

std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: code lengths differ");
    std::uint32_t d = 0;
    for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::uint32_t>(std::popcount(a[w] ^ b[w]));
    return d;
}

Ranking rank_by_hamming(const BinaryCodeSet& queries, const BinaryCodeSet& db) {
    if (queries.n_bits() != db.n_bits()) {
        throw std::invalid_argument("rank_by_hamming: query codes have " + std::to_string(queries.n_bits()) +
                                    " bits, database codes " + std::to_string(db.n_bits()));
    }
    // counting sort over distances 0..n_bits keeps index order within a bucket
    const std::size_t buckets = db.n_bits() + 1;
    Ranking out(queries.count());
    std::vector<std::uint32_t> dist(db.count());
    std::vector<std::size_t> start(buckets + 1);
    for (std::size_t q = 0; q < queries.count(); ++q) {
        std::fill(start.begin(), start.end(), 0);
        const auto qc = queries.code(q);
        for (std::size_t i = 0; i < db.count(); ++i) {
            dist[i] = hamming(qc, db.code(i));
            ++start[dist[i] + 1];
        }
        std::partial_sum(start.begin(), start.end(), start.begin());
        auto& order = out[q];
        order.resize(db.count());
        for (std::uint32_t i = 0; i < db.count(); ++i) order[start[dist[i]]++] = i;
    }
    return out;
}

Ranking rank_by_euclidean(const Matrix& queries, const Matrix& db) {
    if (queries.cols() != db.cols()) {
        throw std::invalid_argument("rank_by_euclidean: query dim " + std::to_string(queries.cols()) +
                                    " differs from database dim " + std::to_string(db.cols()));
    }
    Ranking out(queries.rows());
    std::vector<double> dist(db.rows());
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        const auto qr = queries.row(q);
        for (std::size_t i = 0; i < db.rows(); ++i) {
            const auto dr = db.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < qr.size(); ++j) acc += (qr[j] - dr[j]) * (qr[j] - dr[j]);
            dist[i] = acc;
        }
        auto& order = out[q];
        order.resize(db.rows());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t x, std::uint32_t y) { return dist[x] < dist[y]; });
    }
    return out;
}

double mean_average_precision(const Ranking& r, std::span<const std::uint32_t> query_labels,
                              std::span<const std::uint32_t> db_labels) {
    check_ranking_inputs(r, query_labels, db_labels, "mean_average_precision");
    if (r.empty()) throw std::invalid_argument("mean_average_precision: no queries");
    double total = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
        double precision_sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t k = 0; k < r[q].size(); ++k) {
            if (db_labels[r[q][k]] != query_labels[q]) continue;
            ++hits;
            precision_sum += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
        if (hits == 0) {
            throw std::invalid_argument("mean_average_precision: query " + std::to_string(q) +
                                        " has no relevant database items");
        }
        total += precision_sum / static_cast<double>(hits);
    }
    return total / static_cast<double>(r.size());
}

double topk_accuracy(const Ranking& r, std::span<const std::uint32_t> query_labels,
                     std::span<const std::uint32_t> db_labels, std::size_t k) {
    check_ranking_inputs(r, query_labels, db_labels, "topk_accuracy");
    if (k == 0) throw std::invalid_argument("topk_accuracy: k must be at least 1");
    if (k > db_labels.size()) {
        throw std::invalid_argument("topk_accuracy: k=" + std::to_string(k) + " exceeds database size " +
                                    std::to_string(db_labels.size()));
    }
    if (r.empty()) throw std::invalid_argument("topk_accuracy: no queries");
    std::size_t found = 0;
    for (std::size_t q = 0; q < r.size(); ++q) {
        const auto top = std::span(r[q]).first(k);
        if (std::any_of(top.begin(), top.end(),
                        [&](std::uint32_t i) { return db_labels[i] == query_labels[q]; })) {
            ++found;
        }
    }
    return static_cast<double>(found) / static_cast<double>(r.size());
}

void save_codes(const BinaryCodeSet& codes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    LeWriter w(out);
    w.magic("TQNC");
    w.u32(kCodesVersion);
    w.u32(static_cast<std::uint32_t>(codes.count()));
    w.u32(static_cast<std::uint32_t>(codes.n_bits()));
    for (auto word : codes.packed()) w.u64(word);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

BinaryCodeSet load_codes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open codes " + path.string());
    LeReader r(in, path.string());
    r.expect_magic("TQNC");
    if (const auto version = r.u32(); version != kCodesVersion) {
        throw FormatError(path.string() + ": unsupported TQNC version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32(), n_bits = r.u32();
    if (n_bits == 0) throw FormatError(path.string() + ": zero code length");
    std::vector<std::uint64_t> words(std::size_t{count} * ((n_bits + 63) / 64));
    for (auto& w : words) w = r.u64();
    r.expect_end();
    try {
        return BinaryCodeSet::from_words(count, n_bits, std::move(words));
    } catch (const std::invalid_argument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace tqn
