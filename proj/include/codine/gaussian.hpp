#ifndef CODINE_GAUSSIAN_HPP
#define CODINE_GAUSSIAN_HPP

namespace codine {

// Standard normal pdf, cdf and quantile.
//
// The cdf is evaluated through erfc, which keeps the lower tail accurate in a
// relative sense down to ~1e-308. The quantile uses Acklam's rational
// approximation refined with Halley steps against the erfc-based cdf; over
// the central region (|x| <= ~4.2) the pair round-trips to better than 1e-12
// absolute, and in the tails the quantile stays relatively accurate in x.
// Round-tripping x -> cdf -> quantile for large positive x is limited by the
// spacing of doubles just below 1, not by these routines.

double gaussian_pdf(double x);
double gaussian_cdf(double x);

// Inverse of gaussian_cdf. Throws std::domain_error unless u is in (0,1).
double gaussian_quantile(double u);

}  // namespace codine

#endif  // CODINE_GAUSSIAN_HPP
