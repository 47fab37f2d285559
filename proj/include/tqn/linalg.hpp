#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tqn {

/// Dense row-major matrix of doubles. One row is one sample.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a·bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// Elementwise logistic function. The exponent argument is clamped to ±500.
double sigmoid(double x);
Matrix sigmoid(const Matrix& x);

/// Elementwise y·(1−y), where y is a sigmoid output. Throws if any y lies outside [0,1].
Matrix sigmoid_grad(const Matrix& y);

/// Rows [begin, begin+count) as a new matrix.
Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t count);
/// Stacks matrices with equal column counts.
Matrix vstack(std::span<const Matrix> parts);

}  // namespace tqn
