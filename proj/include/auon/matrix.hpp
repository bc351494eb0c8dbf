#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace auon {

/// Row-major dense matrix of doubles. The only tensor type in the library;
/// row and column vectors are 1xN / Nx1 matrices. Entries are validated to be
/// finite whenever a matrix is built from caller-supplied data.
class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(check_shape(rows, cols), 0.0) {}

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != check_shape(rows, cols)) {
            throw std::invalid_argument("DenseMatrix: data length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        validate_finite();
    }

    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows_init)
        : rows_(rows_init.size()), cols_(rows_init.size() ? rows_init.begin()->size() : 0) {
        check_shape(rows_, cols_);
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows_init) {
            if (row.size() != cols_) {
                throw std::invalid_argument("DenseMatrix: ragged initializer rows");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
        validate_finite();
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    double* row_ptr(std::size_t i) noexcept { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const noexcept { return data_.data() + i * cols_; }

    bool same_shape(const DenseMatrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool is_zero() const noexcept {
        for (double x : data_) {
            if (x != 0.0) return false;
        }
        return true;
    }

    bool all_finite() const noexcept {
        for (double x : data_) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

    void validate_finite() const {
        if (!all_finite()) {
            throw std::invalid_argument("DenseMatrix: non-finite entry");
        }
    }

private:
    static std::size_t check_shape(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("DenseMatrix: rows and cols must be positive");
        }
        return rows * cols;
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

inline void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}

inline DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(j, i) = m(i, j);
        }
    }
    return out;
}

/// C = A * B
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("multiply: inner dimensions disagree");
    }
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

/// C = A * B^T (rows of both operands are traversed contiguously)
inline DenseMatrix multiply_abt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("multiply_abt: column counts disagree");
    }
    DenseMatrix c(a.rows(), b.rows());
    const std::size_t k = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                acc += arow[t] * brow[t];
            }
            c(i, j) = acc;
        }
    }
    return c;
}

/// C = A^T * B
inline DenseMatrix multiply_atb(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("multiply_atb: row counts disagree");
    }
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row_ptr(k);
        const double* brow = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.row_ptr(i);
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
    return c;
}

inline DenseMatrix scaled(const DenseMatrix& m, double factor) {
    DenseMatrix out = m;
    for (double& x : out.data()) {
        x *= factor;
    }
    return out;
}

/// a + factor * b
inline DenseMatrix add_scaled(const DenseMatrix& a, const DenseMatrix& b, double factor) {
    require_same_shape(a, b, "add_scaled");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] += factor * b.data()[i];
    }
    return out;
}

inline DenseMatrix identity_matrix(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

inline double max_abs(const DenseMatrix& m) {
    double best = 0.0;
    for (double x : m.data()) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

inline double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "max_abs_difference");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
    }
    return best;
}

/// Inner product over flattened entries.
inline double dot(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a.data()[i] * b.data()[i];
    }
    return acc;
}

}  // namespace auon
