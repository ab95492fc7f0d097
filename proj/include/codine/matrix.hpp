#ifndef CODINE_MATRIX_HPP
#define CODINE_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace codine {

// Dense row-major matrix of doubles. Rows are observations, columns are
// dimensions. The factorization routines below are written for the small
// covariance matrices this project needs (d <= 16), not for general use.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double> row_copy(std::size_t i) const {
        auto r = row(i);
        return {r.begin(), r.end()};
    }

    std::vector<double> &data() { return data_; }
    const std::vector<double> &data() const { return data_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const Matrix &other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Lower Cholesky factor of a symmetric positive definite matrix.
// Throws std::domain_error if the matrix is not positive definite.
inline Matrix cholesky(const Matrix &a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0))
            throw std::domain_error("cholesky: matrix not positive definite at pivot " +
                                    std::to_string(j));
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

// log(det(A)) for symmetric positive definite A, via Cholesky.
inline double log_det_spd(const Matrix &a) {
    Matrix l = cholesky(a);
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

inline double det_spd(const Matrix &a) { return std::exp(log_det_spd(a)); }

// Inverse of a symmetric positive definite matrix via its Cholesky factor.
inline Matrix inverse_spd(const Matrix &a) {
    const std::size_t n = a.rows();
    Matrix l = cholesky(a);
    // Solve L L^T X = I column by column.
    Matrix inv(n, n);
    std::vector<double> y(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = y[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, c);
            inv(i, c) = s / l(i, i);
        }
    }
    // Symmetrize to scrub factorization round-off.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double m = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = m;
            inv(j, i) = m;
        }
    return inv;
}

// x^T A x
inline double quad_form(const Matrix &a, std::span<const double> x) {
    const std::size_t n = a.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += a(i, j) * x[j];
        s += x[i] * r;
    }
    return s;
}

}  // namespace codine

#endif  // CODINE_MATRIX_HPP
