#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "support/gradcheck.hpp"
#include "tqn/linalg.hpp"

using namespace tqn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (auto& v : m.data()) v = n(rng);
    return m;
}

}  // namespace

TEST_CASE("matmul examples") {
    const Matrix m{{1, 2}, {3, 4}};
    CHECK(matmul(Matrix::identity(2), m) == m);
    CHECK(matmul(m, Matrix{{0}, {1}}) == Matrix{{2}, {4}});
    CHECK(matmul(Matrix(2, 2), Matrix{{1, 2, 3}, {4, 5, 6}}) == Matrix(2, 3));
    CHECK_THROWS_AS(matmul(m, Matrix(3, 1)), std::invalid_argument);
}

TEST_CASE("transposed products agree with explicit transposes") {
    std::mt19937_64 rng(7);
    const Matrix a = random_matrix(4, 3, rng), b = random_matrix(4, 5, rng), c = random_matrix(6, 3, rng);
    Matrix at(3, 4), ct(3, 6);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) at(j, i) = a(i, j);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 3; ++j) ct(j, i) = c(i, j);
    const Matrix tn = matmul_tn(a, b), ref_tn = matmul(at, b);
    const Matrix nt = matmul_nt(a, c), ref_nt = matmul(a, ct);
    for (std::size_t k = 0; k < tn.size(); ++k) CHECK(tn.data()[k] == doctest::Approx(ref_tn.data()[k]).epsilon(1e-12));
    for (std::size_t k = 0; k < nt.size(); ++k) CHECK(nt.data()[k] == doctest::Approx(ref_nt.data()[k]).epsilon(1e-12));
}

TEST_CASE("matmul is associative on random chains") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(1, 7);
        const std::size_t p = dim(rng), q = dim(rng), r = dim(rng), s = dim(rng);
        const Matrix a = random_matrix(p, q, rng), b = random_matrix(q, r, rng), c = random_matrix(r, s, rng);
        const Matrix left = matmul(matmul(a, b), c), right = matmul(a, matmul(b, c));
        double scale = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < left.size(); ++k) {
            scale = std::max(scale, std::abs(left.data()[k]));
            diff = std::max(diff, std::abs(left.data()[k] - right.data()[k]));
        }
        CHECK(diff <= 1e-9 * std::max(scale, 1.0));
    }
}

TEST_CASE("sigmoid values and symmetry") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-15);
    }
}

TEST_CASE("sigmoid saturates without overflow") {
    const Matrix y = sigmoid(Matrix{{-1e6, 1e6, -800, 800}});
    CHECK(y.all_finite());
    CHECK(y(0, 0) >= 0.0);
    CHECK(y(0, 0) < 1e-200);
    CHECK(y(0, 1) == 1.0);
}

TEST_CASE("sigmoid_grad examples and range check") {
    const Matrix g = sigmoid_grad(Matrix{{0.5, 0.0, 1.0, 0.8}});
    CHECK(g(0, 0) == 0.25);
    CHECK(g(0, 1) == 0.0);
    CHECK(g(0, 2) == 0.0);
    CHECK(g(0, 3) == doctest::Approx(0.16).epsilon(1e-15));
    CHECK_THROWS_AS(sigmoid_grad(Matrix{{1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(sigmoid_grad(Matrix{{-0.1}}), std::invalid_argument);
}

TEST_CASE("sigmoid_grad matches central differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    const double h = 1e-5;
    for (int i = 0; i < 500; ++i) {
        const double x = u(rng);
        const double numeric = (sigmoid(x + h) - sigmoid(x - h)) / (2 * h);
        const double analytic = sigmoid_grad(Matrix{{sigmoid(x)}})(0, 0);
        CHECK(testing::rel_error(analytic, numeric, 1e-12) < 1e-6);
    }
}

TEST_CASE("row helpers") {
    const Matrix m{{1, 2}, {3, 4}, {5, 6}};
    CHECK(slice_rows(m, 1, 2) == Matrix{{3, 4}, {5, 6}});
    const Matrix parts[] = {slice_rows(m, 0, 1), slice_rows(m, 1, 2)};
    CHECK(vstack(parts) == m);
    CHECK_THROWS(slice_rows(m, 2, 2));
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
}
