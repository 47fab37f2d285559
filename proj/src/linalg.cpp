#include "tqn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tqn {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const Matrix& m, const char* op) {
    if (!m.all_finite()) {
        throw std::overflow_error(std::string(op) + ": result has non-finite entries");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: " + shape(a) + " times " + shape(b));
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out_row = out.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* b_row = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) out_row[j] += aik * b_row[j];
        }
    }
    require_finite(out, "matmul");
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("matmul_tn: " + shape(a) + "^T times " + shape(b));
    }
    Matrix out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* b_row = b.row(r).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ari = a(r, i);
            if (ari == 0.0) continue;
            double* out_row = out.row(i).data();
            for (std::size_t j = 0; j < n; ++j) out_row[j] += ari * b_row[j];
        }
    }
    require_finite(out, "matmul_tn");
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("matmul_nt: " + shape(a) + " times " + shape(b) + "^T");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto a_row = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const auto b_row = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a_row.size(); ++k) acc += a_row[k] * b_row[k];
            out(i, j) = acc;
        }
    }
    require_finite(out, "matmul_nt");
    return out;
}

double sigmoid(double x) {
    const double z = std::clamp(-x, -500.0, 500.0);
    return 1.0 / (1.0 + std::exp(z));
}

Matrix sigmoid(const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    std::transform(x.data().begin(), x.data().end(), out.data().begin(),
                   [](double v) { return sigmoid(v); });
    return out;
}

Matrix sigmoid_grad(const Matrix& y) {
    Matrix out(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = y.data()[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("sigmoid_grad: entry " + std::to_string(v) +
                                        " outside [0,1]");
        }
        out.data()[i] = v * (1.0 - v);
    }
    return out;
}

Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t count) {
    if (begin + count > m.rows()) throw std::out_of_range("slice_rows: range exceeds matrix");
    const auto first = m.data().begin() + static_cast<std::ptrdiff_t>(begin * m.cols());
    return Matrix(count, m.cols(),
                  std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * m.cols())));
}

Matrix vstack(std::span<const Matrix> parts) {
    if (parts.empty()) return {};
    const std::size_t cols = parts.front().cols();
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols) throw std::invalid_argument("vstack: column counts differ");
        rows += p.rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
    return Matrix(rows, cols, std::move(data));
}

}  // namespace tqn
