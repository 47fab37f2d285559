#include <doctest.h>

#include <stdexcept>

#include <bit>
#include <cmath>
#include <random>

#include "tqn/params.hpp"

using namespace tqn;

TEST_CASE("min_bits") {
    CHECK(min_bits(10) == 4);
    CHECK(min_bits(7982) == 13);
    CHECK(min_bits(2) == 1);
    CHECK(min_bits(1024) == 10);
    CHECK(min_bits(1025) == 11);
    CHECK_THROWS_AS(min_bits(1), std::invalid_argument);
    CHECK_THROWS_AS(min_bits(0), std::invalid_argument);
}

TEST_CASE("min_bits brackets C between consecutive powers of two") {
    for (std::uint64_t c = 2; c <= 1'000'000; ++c) {
        const std::uint32_t m = min_bits(c);
        if (!((std::uint64_t{1} << (m - 1)) < c && c <= (std::uint64_t{1} << m))) {
            FAIL("min_bits(" << c << ") = " << m);
        }
    }
}

TEST_CASE("expected_hamming values") {
    CHECK(expected_hamming(1) == 1.0);
    CHECK(expected_hamming(4) == doctest::Approx(32.0 / 15.0).epsilon(1e-15));
    CHECK(std::abs(expected_hamming(30) - 15.0) < 1e-7);
    CHECK_THROWS_AS(expected_hamming(0), std::invalid_argument);
    CHECK_THROWS_AS(expected_hamming(63), std::invalid_argument);
}

TEST_CASE("expected_hamming equals the mean distance over all distinct code pairs") {
    for (std::uint32_t m = 1; m <= 10; ++m) {
        const std::uint64_t codes = std::uint64_t{1} << m;
        double sum = 0.0, pairs = 0.0;
        for (std::uint64_t a = 0; a < codes; ++a) {
            for (std::uint64_t b = 0; b < codes; ++b) {
                if (a == b) continue;
                sum += std::popcount(a ^ b);
                pairs += 1.0;
            }
        }
        CHECK(expected_hamming(m) == doctest::Approx(sum / pairs).epsilon(1e-12));
    }
}

TEST_CASE("expected_hamming agrees with Monte Carlo over distinct Bernoulli pairs, M=4") {
    std::mt19937_64 rng(4);
    std::bernoulli_distribution bit(0.5);
    const int samples = 200000;
    double sum = 0.0, sum_sq = 0.0;
    int accepted = 0;
    while (accepted < samples) {
        int d = 0;
        for (int j = 0; j < 4; ++j) d += bit(rng) != bit(rng) ? 1 : 0;
        if (d == 0) continue;  // anchor and negative codes differ
        sum += d;
        sum_sq += static_cast<double>(d) * d;
        ++accepted;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
    CHECK(std::abs(mean - expected_hamming(4)) < 4 * se);
}

TEST_CASE("expected_hamming is increasing and bracketed by M/2 and M") {
    for (std::uint32_t m = 1; m <= 62; ++m) {
        const double e = expected_hamming(m);
        // the excess over M/2 is M/(2(2^M−1)), below one ulp once M reaches ~50
        if (m < 45) CHECK(e > m / 2.0);
        else CHECK(e >= m / 2.0);
        CHECK(e <= static_cast<double>(m));
        if (m > 1) CHECK(e > expected_hamming(m - 1));
    }
}

TEST_CASE("alpha_s and delta") {
    CHECK(compute_alpha_s(0.4) == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(compute_alpha_s(0.0) == 0.0);
    CHECK(compute_alpha_s(0.5) == 0.25);
    CHECK(compute_delta(0.4) == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(compute_delta(0.0) == 0.0);
    CHECK(compute_delta(0.5) == 1.0);
    CHECK_THROWS_AS(compute_alpha_s(0.6), std::invalid_argument);
    CHECK_THROWS_AS(compute_delta(-0.1), std::invalid_argument);
}

TEST_CASE("alpha_d examples") {
    CHECK(compute_alpha_d({12, 10, 0.4, 1, 0.3, AlphaDMode::CifarTable}) == doctest::Approx(3.83).epsilon(1e-12));
    CHECK(compute_alpha_d({96, 7982, 0.4, 3, 0.4, AlphaDMode::InshopTable}) == doctest::Approx(19.68).epsilon(1e-12));
    CHECK(compute_alpha_d({12, 10, 0.4, 1, 0.3, AlphaDMode::Eq16}) == doctest::Approx(2.73).epsilon(1e-12));
}

TEST_CASE("alpha_d reproduces every published setting to two decimals") {
    for (const auto& p : kPublishedPresets) {
        const double v = compute_alpha_d({p.bits, p.classes, 0.4, p.omega, p.epsilon, p.table_mode});
        CHECK(std::round(v * 100.0) / 100.0 == doctest::Approx(p.published_alpha_d).epsilon(1e-12));
    }
}

TEST_CASE("alpha_d rejects invalid parameters") {
    CHECK_THROWS_AS(compute_alpha_d({3, 10, 0.4, 0, 0.3, AlphaDMode::Eq16}), std::invalid_argument);   // N < M
    CHECK_THROWS_AS(compute_alpha_d({12, 10, 0.6, 1, 0.3, AlphaDMode::Eq16}), std::invalid_argument);  // Δ
    CHECK_THROWS_AS(compute_alpha_d({12, 10, 0.4, 13, 0.3, AlphaDMode::Eq16}), std::invalid_argument); // ω > N
    CHECK_THROWS_AS(compute_alpha_d({12, 1, 0.4, 1, 0.3, AlphaDMode::Eq16}), std::invalid_argument);   // C
    // CIFAR counting needs N ≥ M + ω
    CHECK_THROWS_AS(compute_alpha_d({4, 10, 0.4, 2, 0.3, AlphaDMode::CifarTable}), std::invalid_argument);
}

TEST_CASE("alpha_d monotonicity") {
    const HashParams base{24, 10, 0.4, 2, 0.3, AlphaDMode::Eq16};
    double prev = compute_alpha_d(base);
    for (std::uint32_t n = 25; n <= 64; ++n) {
        HashParams p = base;
        p.bits = n;
        const double v = compute_alpha_d(p);
        CHECK(v >= prev);
        prev = v;
    }
    prev = compute_alpha_d(base);
    for (double w = 2.5; w <= 20; w += 0.5) {
        HashParams p = base;
        p.omega = w;
        const double v = compute_alpha_d(p);  // ε ≤ 2Δ
        CHECK(v >= prev);
        prev = v;
    }
    for (auto mode : {AlphaDMode::Eq16, AlphaDMode::CifarTable, AlphaDMode::InshopTable}) {
        HashParams p = base;
        p.mode = mode;
        double last = -1.0;
        for (double d = 0.0; d <= 0.5; d += 0.05) {
            p.margin = d;
            const double v = compute_alpha_d(p);
            CHECK(v >= last);
            last = v;
        }
        p.margin = 0.4;
        last = -1.0;
        for (double e = 0.0; e <= 0.5; e += 0.05) {
            p.epsilon = e;
            const double v = compute_alpha_d(p);
            CHECK(v >= last);
            last = v;
        }
    }
}

TEST_CASE("alpha_d modes coincide at M = 1, omega = 0") {
    for (std::uint32_t n = 1; n <= 16; ++n) {
        const HashParams p{n, 2, 0.3, 0, 0.2, AlphaDMode::Eq16};
        HashParams c = p, i = p;
        c.mode = AlphaDMode::CifarTable;
        i.mode = AlphaDMode::InshopTable;
        CHECK(compute_alpha_d(p) == compute_alpha_d(c));
        CHECK(compute_alpha_d(p) == compute_alpha_d(i));
    }
}

TEST_CASE("derive and mode names") {
    const DerivedParams d = derive({12, 10, 0.4, 1, 0.3, AlphaDMode::Eq16});
    CHECK(d.min_bits == 4);
    CHECK(d.alpha_s == doctest::Approx(0.16));
    CHECK(d.delta == doctest::Approx(0.64));
    CHECK(d.alpha_d == doctest::Approx(2.73));
    for (auto m : {AlphaDMode::Eq16, AlphaDMode::CifarTable, AlphaDMode::InshopTable}) {
        CHECK(parse_alpha_d_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_alpha_d_mode("table"), std::invalid_argument);
    CHECK_THROWS_AS(derive({12, 10, 0.0, 0, 0.0, AlphaDMode::Eq16}), std::invalid_argument);
}
