#ifndef CODINE_ORACLE_HPP
#define CODINE_ORACLE_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "codine/marginals.hpp"
#include "codine/matrix.hpp"

namespace codine {

// Additive Gaussian channel Y = X + N with X ~ N(0, I) and N ~ N(0, Sigma_N),
// Sigma_N = sigma^2 R, R tridiagonal with unit diagonal and rho on the first
// off-diagonals; sigma^2 = 1/snr. Everything the closed forms need is
// precomputed at construction.
struct AwgnSpec {
    std::size_t d = 2;
    double snr = 1.0;  // linear
    double rho = 0.0;

    Matrix sigma_n;        // noise covariance
    Matrix sigma_y;        // Sigma_N + I
    Matrix chol_n;         // lower Cholesky factor of sigma_n
    Matrix inv_sigma_y;    // (Sigma_N + I)^{-1}
    double log_det_y = 0.0;      // ln det(Sigma_N + I)
    double log_det_tilde = 0.0;  // ln det(diag(Sigma_N) + I)
    double log_det_n = 0.0;      // ln det(Sigma_N)
};

// Validates d >= 1, snr > 0, rho in (-1,1) and Sigma_N positive definite.
AwgnSpec make_awgn(std::size_t d, double snr_linear, double rho);
AwgnSpec make_awgn_db(std::size_t d, double snr_db, double rho);

double snr_from_db(double snr_db);

// n draws of (X, Y), deterministic per seed.
std::pair<Matrix, Matrix> sample_channel(const AwgnSpec &spec, std::size_t n,
                                         std::uint64_t seed);

// Copula density of the channel output at v in (0,1)^d; identically 1 when
// rho = 0.
double true_copula_density(const AwgnSpec &spec, std::span<const double> v);
double true_copula_log_density(const AwgnSpec &spec, std::span<const double> v);

// KL divergence of the output copula from the flat copula,
// 0.5 * ln(det(diag(Sigma_N)+I) / det(Sigma_N+I)).
double kl_to_flat_nats(const AwgnSpec &spec);
double kl_to_flat_bits(const AwgnSpec &spec);

// Exact channel mutual information 0.5 * log2(det(Sigma_N+I)/det(Sigma_N));
// reduces to d/2 * log2(1+snr) for white noise.
double true_mi_bits(const AwgnSpec &spec);

// Exact per-component marginals of Y: N(0, (Sigma_N+I)_ii).
MarginalModel output_marginals(const AwgnSpec &spec);

// Pearson correlation of (Y_i, Y_j).
double output_pearson(const AwgnSpec &spec, std::size_t i, std::size_t j);

// Spearman rank correlation of a bivariate Gaussian pair with Pearson r.
double spearman_from_pearson(double r);

// Noisy spiral x = [sin(t), t cos(t)] + noise, t ~ N(0,1).
std::array<double, 2> spiral_point(double t);
Matrix spiral_toy(std::size_t n, double sigma, std::uint64_t seed);

}  // namespace codine

#endif  // CODINE_ORACLE_HPP
