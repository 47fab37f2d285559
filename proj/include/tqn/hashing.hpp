#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tqn/linalg.hpp"

namespace tqn {

/// N-bit codes packed LSB-first into 64-bit words: bit j of a code lives in
/// word j/64 at position j%64. Unused high bits of the last word are zero.
class BinaryCodeSet {
public:
    BinaryCodeSet() = default;
    BinaryCodeSet(std::size_t count, std::size_t n_bits);

    std::size_t count() const { return count_; }
    std::size_t n_bits() const { return n_bits_; }
    std::size_t words_per_code() const { return words_; }

    std::span<const std::uint64_t> code(std::size_t i) const {
        return {packed_.data() + i * words_, words_};
    }
    bool bit(std::size_t i, std::size_t j) const {
        return (packed_[i * words_ + j / 64] >> (j % 64)) & 1u;
    }
    void set_bit(std::size_t i, std::size_t j, bool value);

    const std::vector<std::uint64_t>& packed() const { return packed_; }
    /// Takes ownership of raw words; throws if any padding bit is set.
    static BinaryCodeSet from_words(std::size_t count, std::size_t n_bits, std::vector<std::uint64_t> words);

    friend bool operator==(const BinaryCodeSet&, const BinaryCodeSet&) = default;

private:
    std::size_t count_ = 0;
    std::size_t n_bits_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> packed_;
};

/// bit = 1 iff feature > 0.5. Entries must lie in [0,1].
BinaryCodeSet quantize(const Matrix& features);

/// Popcount of XOR across words.
std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// One permutation of database indices per query, most similar first.
using Ranking = std::vector<std::vector<std::uint32_t>>;

/// Ascending Hamming distance; ties by ascending database index.
Ranking rank_by_hamming(const BinaryCodeSet& queries, const BinaryCodeSet& db);
/// Ascending squared Euclidean distance; ties by ascending database index.
Ranking rank_by_euclidean(const Matrix& queries, const Matrix& db);

/// Mean over queries of average precision over the full ranking.
/// Throws std::invalid_argument if some query has no relevant database item.
double mean_average_precision(const Ranking& r, std::span<const std::uint32_t> query_labels,
                              std::span<const std::uint32_t> db_labels);

/// Fraction of queries with at least one same-label item among the first k.
double topk_accuracy(const Ranking& r, std::span<const std::uint32_t> query_labels,
                     std::span<const std::uint32_t> db_labels, std::size_t k);

/// TQNC file: magic, version, count, n_bits, then packed u64 words per code.
void save_codes(const BinaryCodeSet& codes, const std::filesystem::path& path);
BinaryCodeSet load_codes(const std::filesystem::path& path);

}  // namespace tqn
