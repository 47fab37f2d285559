#include "tqn/params.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace tqn {

namespace {

void check_unit_half(double v, const char* name) {
    if (!(v >= 0.0 && v <= 0.5)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 0.5], got " +
                                    std::to_string(v));
    }
}

}  // namespace

std::string_view to_string(AlphaDMode mode) {
    switch (mode) {
        case AlphaDMode::Eq16: return "eq16";
        case AlphaDMode::CifarTable: return "cifar-table";
        case AlphaDMode::InshopTable: return "inshop-table";
    }
    return "?";
}

AlphaDMode parse_alpha_d_mode(std::string_view text) {
    if (text == "eq16") return AlphaDMode::Eq16;
    if (text == "cifar-table") return AlphaDMode::CifarTable;
    if (text == "inshop-table") return AlphaDMode::InshopTable;
    throw std::invalid_argument("unknown alpha_d mode '" + std::string(text) +
                                "' (expected eq16, cifar-table or inshop-table)");
}

std::uint32_t min_bits(std::uint64_t classes) {
    if (classes < 2) throw std::invalid_argument("min_bits: need at least 2 classes");
    return static_cast<std::uint32_t>(std::bit_width(classes - 1));
}

double expected_hamming(std::uint32_t m) {
    if (m < 1 || m > 62) throw std::invalid_argument("expected_hamming: M must lie in [1, 62]");
    const double half = std::ldexp(1.0, static_cast<int>(m) - 1);
    const double distinct = static_cast<double>((std::uint64_t{1} << m) - 1);
    return half / distinct * static_cast<double>(m);
}

double compute_alpha_s(double margin) {
    check_unit_half(margin, "Delta");
    return margin * margin;
}

double compute_delta(double margin) {
    check_unit_half(margin, "Delta");
    return 4.0 * margin * margin;
}

void HashParams::validate() const {
    if (classes < 2) throw std::invalid_argument("C must be at least 2");
    const std::uint32_t m = min_bits(classes);
    if (bits < m) {
        throw std::invalid_argument("N=" + std::to_string(bits) + " is below the minimum " +
                                    std::to_string(m) + " bits for C=" + std::to_string(classes));
    }
    check_unit_half(margin, "Delta");
    check_unit_half(epsilon, "epsilon");
    if (!(omega >= 0.0 && omega <= static_cast<double>(bits))) {
        throw std::invalid_argument("omega must lie in [0, N]");
    }
}

double compute_alpha_d(const HashParams& p) {
    p.validate();
    const double n = p.bits;
    const double m = min_bits(p.classes);
    const double half_m = std::ceil(m / 2.0);
    const double sep = 4.0 * p.margin * p.margin;
    const double eps2 = p.epsilon * p.epsilon;

    double separated = 0.0;
    double residual = 0.0;
    switch (p.mode) {
        case AlphaDMode::Eq16:
            separated = half_m + p.omega;
            residual = n - half_m - p.omega;
            break;
        case AlphaDMode::CifarTable:
            separated = m + p.omega;
            residual = n - m - p.omega;
            break;
        case AlphaDMode::InshopTable:
            separated = half_m + p.omega;
            residual = n - m;
            break;
    }
    if (separated < 0.0 || residual < 0.0) {
        throw std::invalid_argument("compute_alpha_d: negative bit count (" + std::to_string(residual) +
                                    " residual bits); increase N or lower omega");
    }
    return sep * separated + eps2 * residual;
}

DerivedParams derive(const HashParams& p) {
    p.validate();
    DerivedParams d{min_bits(p.classes), compute_alpha_s(p.margin), compute_alpha_d(p),
                    compute_delta(p.margin)};
    if (!(d.alpha_d > 0.0)) throw std::invalid_argument("derived alpha_d must be positive");
    return d;
}

}  // namespace tqn
