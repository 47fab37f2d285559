#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tqn {

/// Counting convention used when deriving α_d.
///   Eq16        4Δ²(⌈M/2⌉+ω) + ε²(N−⌈M/2⌉−ω), the closed-form bound
///   CifarTable  4Δ²(M+ω) + ε²(N−M−ω), reproduces the published CIFAR-10 settings
///   InshopTable 4Δ²(⌈M/2⌉+ω) + ε²(N−M), reproduces the published In-shop settings
enum class AlphaDMode { Eq16, CifarTable, InshopTable };

std::string_view to_string(AlphaDMode mode);
/// Accepts "eq16", "cifar-table", "inshop-table".
AlphaDMode parse_alpha_d_mode(std::string_view text);

struct HashParams {
    std::uint32_t bits = 12;      // N
    std::uint32_t classes = 10;   // C
    double margin = 0.4;          // Δ, distance of every feature from the threshold
    double omega = 1.0;           // ω, slack bits for imperfect similar pairs
    double epsilon = 0.3;         // ε, residual per-dimension margin
    AlphaDMode mode = AlphaDMode::Eq16;

    /// Throws std::invalid_argument when any field violates its range.
    void validate() const;
};

struct DerivedParams {
    std::uint32_t min_bits = 0;
    double alpha_s = 0.0;
    double alpha_d = 0.0;
    double delta = 0.0;
};

/// ⌈log₂ C⌉ via integer arithmetic.
std::uint32_t min_bits(std::uint64_t classes);

/// Expected Hamming distance between two distinct, uniformly drawn M-bit codes:
/// p·M with p = 2^(M−1)/(2^M−1).
double expected_hamming(std::uint32_t m);

double compute_alpha_s(double margin);
double compute_delta(double margin);
double compute_alpha_d(const HashParams& p);

DerivedParams derive(const HashParams& p);

/// Published per-configuration settings (ω, ε) for the two benchmark datasets.
struct ParamPreset {
    const char* dataset;
    std::uint32_t bits;
    std::uint32_t classes;
    double omega;
    double epsilon;
    AlphaDMode table_mode;
    double published_alpha_d;
};

inline constexpr ParamPreset kPublishedPresets[] = {
    {"cifar10", 12, 10, 1, 0.3, AlphaDMode::CifarTable, 3.83},
    {"cifar10", 24, 10, 2, 0.3, AlphaDMode::CifarTable, 5.46},
    {"cifar10", 48, 10, 2, 0.3, AlphaDMode::CifarTable, 7.62},
    {"inshop", 48, 7982, 3, 0.4, AlphaDMode::InshopTable, 12.00},
    {"inshop", 96, 7982, 3, 0.4, AlphaDMode::InshopTable, 19.68},
    {"inshop", 192, 7982, 3, 0.4, AlphaDMode::InshopTable, 35.04},
};

}  // namespace tqn
