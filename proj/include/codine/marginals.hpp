#ifndef CODINE_MARGINALS_HPP
#define CODINE_MARGINALS_HPP

#include <cstddef>
#include <vector>

#include "codine/matrix.hpp"

namespace codine {

enum class MarginalKind { Empirical, Gaussian, Identity };

// One univariate marginal: a cdf/quantile pair.
//
// Empirical: rank-based cdf with denominator n+1 (ties get their average
// rank), piecewise-linear between the distinct order statistics and clamped
// to [1/(n+1), n/(n+1)] outside the observed range. Gaussian: exact
// N(mu, sigma^2) cdf/quantile, used when the true marginal is known.
// Identity: data already lives on (0,1).
struct Marginal1D {
    MarginalKind kind = MarginalKind::Empirical;
    std::vector<double> values;  // distinct sorted support (empirical only)
    std::vector<double> levels;  // cdf level at each support point, ascending
    double mu = 0.0;
    double sigma = 1.0;

    double cdf(double x) const;
    double quantile(double u) const;  // throws unless u in (0,1)
};

struct MarginalModel {
    std::vector<Marginal1D> dims;
    std::size_t dim() const { return dims.size(); }
};

// Fit rank-based empirical marginals, one per column. Requires n >= 2 and
// finite entries; a constant column has no usable marginal and is rejected.
MarginalModel fit_marginals(const Matrix &samples);

// Exact analytic backends.
MarginalModel gaussian_marginals(const std::vector<double> &mu, const std::vector<double> &sigma);
MarginalModel standard_gaussian_marginals(std::size_t d);
MarginalModel identity_marginals(std::size_t d);

// Probability integral transform: u_ij = F_j(x_ij). Output entries are
// strictly inside (0,1).
Matrix pit(const MarginalModel &model, const Matrix &samples);

// Inverse transform x_ij = F_j^{-1}(u_ij). Requires every entry in (0,1).
Matrix inverse_pit(const MarginalModel &model, const Matrix &pseudo);

}  // namespace codine

#endif  // CODINE_MARGINALS_HPP
