#include "codine/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "codine/gaussian.hpp"
#include "codine/rng.hpp"

namespace codine {

double snr_from_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

AwgnSpec make_awgn(std::size_t d, double snr_linear, double rho) {
    if (d < 1) throw std::invalid_argument("make_awgn: d must be >= 1");
    if (!(snr_linear > 0.0)) throw std::invalid_argument("make_awgn: snr must be > 0");
    if (!(rho > -1.0 && rho < 1.0))
        throw std::invalid_argument("make_awgn: rho must lie in (-1,1)");

    AwgnSpec spec;
    spec.d = d;
    spec.snr = snr_linear;
    spec.rho = rho;

    const double var = 1.0 / snr_linear;  // sigma_N^2
    spec.sigma_n = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        spec.sigma_n(i, i) = var;
        if (i + 1 < d) {
            spec.sigma_n(i, i + 1) = var * rho;
            spec.sigma_n(i + 1, i) = var * rho;
        }
    }
    try {
        spec.chol_n = cholesky(spec.sigma_n);
    } catch (const std::domain_error &) {
        throw std::invalid_argument("make_awgn: rho=" + std::to_string(rho) +
                                    " makes the noise covariance non positive definite at d=" +
                                    std::to_string(d));
    }

    spec.sigma_y = spec.sigma_n;
    for (std::size_t i = 0; i < d; ++i) spec.sigma_y(i, i) += 1.0;
    spec.inv_sigma_y = inverse_spd(spec.sigma_y);
    spec.log_det_y = log_det_spd(spec.sigma_y);
    // Same factorization route as log_det_y so the two cancel bit-exactly
    // at rho = 0.
    Matrix tilde(d, d);
    for (std::size_t i = 0; i < d; ++i) tilde(i, i) = var + 1.0;
    spec.log_det_tilde = log_det_spd(tilde);
    spec.log_det_n = log_det_spd(spec.sigma_n);
    return spec;
}

AwgnSpec make_awgn_db(std::size_t d, double snr_db, double rho) {
    return make_awgn(d, snr_from_db(snr_db), rho);
}

std::pair<Matrix, Matrix> sample_channel(const AwgnSpec &spec, std::size_t n,
                                         std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_channel: n must be >= 1");
    auto rng = make_engine(seed);
    Matrix x = normal_matrix(n, spec.d, rng);
    Matrix z = normal_matrix(n, spec.d, rng);
    Matrix y(n, spec.d);
    // y = x + L z with L the Cholesky factor of Sigma_N.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < spec.d; ++r) {
            double noise = 0.0;
            for (std::size_t c = 0; c <= r; ++c) noise += spec.chol_n(r, c) * z(i, c);
            y(i, r) = x(i, r) + noise;
        }
    return {std::move(x), std::move(y)};
}

double true_copula_log_density(const AwgnSpec &spec, std::span<const double> v) {
    if (v.size() != spec.d)
        throw std::invalid_argument("true_copula_density: point has wrong dimension");
    const double inv_tilde = 1.0 / (1.0 + 1.0 / spec.snr);
    std::vector<double> z(spec.d);
    for (std::size_t i = 0; i < spec.d; ++i) {
        if (!(v[i] > 0.0 && v[i] < 1.0))
            throw std::domain_error("true_copula_density: point on or outside the cube boundary");
        z[i] = std::sqrt(spec.sigma_y(i, i)) * gaussian_quantile(v[i]);
    }
    double quad = quad_form(spec.inv_sigma_y, z);
    for (std::size_t i = 0; i < spec.d; ++i) quad -= inv_tilde * z[i] * z[i];
    return 0.5 * (spec.log_det_tilde - spec.log_det_y) - 0.5 * quad;
}

double true_copula_density(const AwgnSpec &spec, std::span<const double> v) {
    return std::exp(true_copula_log_density(spec, v));
}

double kl_to_flat_nats(const AwgnSpec &spec) {
    return 0.5 * (spec.log_det_tilde - spec.log_det_y);
}

double kl_to_flat_bits(const AwgnSpec &spec) { return kl_to_flat_nats(spec) / std::numbers::ln2; }

double true_mi_bits(const AwgnSpec &spec) {
    return 0.5 * (spec.log_det_y - spec.log_det_n) / std::numbers::ln2;
}

MarginalModel output_marginals(const AwgnSpec &spec) {
    std::vector<double> mu(spec.d, 0.0), sd(spec.d);
    for (std::size_t i = 0; i < spec.d; ++i) sd[i] = std::sqrt(spec.sigma_y(i, i));
    return gaussian_marginals(mu, sd);
}

double output_pearson(const AwgnSpec &spec, std::size_t i, std::size_t j) {
    return spec.sigma_y(i, j) / std::sqrt(spec.sigma_y(i, i) * spec.sigma_y(j, j));
}

double spearman_from_pearson(double r) {
    return 6.0 / std::numbers::pi * std::asin(0.5 * r);
}

std::array<double, 2> spiral_point(double t) { return {std::sin(t), t * std::cos(t)}; }

Matrix spiral_toy(std::size_t n, double sigma, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("spiral_toy: n must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("spiral_toy: sigma must be >= 0");
    auto rng = make_engine(seed);
    Matrix draws = normal_matrix(n, 3, rng);  // t and two noise components
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = spiral_point(draws(i, 0));
        x(i, 0) = p[0] + sigma * draws(i, 1);
        x(i, 1) = p[1] + sigma * draws(i, 2);
    }
    return x;
}

}  // namespace codine
