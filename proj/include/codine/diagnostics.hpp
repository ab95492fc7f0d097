#ifndef CODINE_DIAGNOSTICS_HPP
#define CODINE_DIAGNOSTICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "codine/matrix.hpp"
#include "codine/oracle.hpp"
#include "codine/trainer.hpp"

namespace codine {

// Any nonnegative density on the unit cube, evaluated batch-wise: given an
// m x d matrix of points it returns m density values. Trained models, the
// Gaussian oracle and analytic test stubs all fit this shape.
using BatchDensityFn = std::function<std::vector<double>(const Matrix &)>;

BatchDensityFn density_of(const CopulaModel &model);
BatchDensityFn density_of(const AwgnSpec &spec);

struct DiagnosticsOptions {
    double pass_sigma = 3.0;  // |lhs - rhs| <= pass_sigma * stderr passes
};

struct MassCheck {
    double estimate = 0.0;
    double stderr_value = 0.0;
    std::size_t n_mc = 0;
    bool pass = false;
};

struct MomentCheck {
    int order = 0;
    std::size_t dim = 0;
    double lhs = 0.0;  // E_pi[u^n * c(u)]
    double rhs = 0.0;  // sample moment of the pseudo-observations
    double stderr_value = 0.0;
    bool pass = false;
};

struct SpearmanEstimate {
    Matrix matrix;       // d x d, unit diagonal
    Matrix stderr_mat;   // matching standard errors, zero diagonal
    std::size_t n_mc = 0;
};

struct QcResult {
    double nats = 0.0;
    double bits = 0.0;
    double stderr_nats = 0.0;
    std::size_t floored = 0;  // points where the estimate hit the density floor
    std::size_t n_mc = 0;
};

// E_pi[c(u)] with Monte-Carlo standard error; 1 for any well-formed density.
MassCheck check_mass(const BatchDensityFn &density, std::size_t d, std::size_t n_mc,
                     std::uint64_t seed, const DiagnosticsOptions &opts = {});

// E_pi[u_i^n c(u)] against the n-th sample moment of the pseudo-observations,
// per order and dimension.
std::vector<MomentCheck> check_moments(const BatchDensityFn &density, std::size_t d,
                                       const Matrix &pseudo_data, const std::vector<int> &orders,
                                       std::size_t n_mc, std::uint64_t seed,
                                       const DiagnosticsOptions &opts = {});

// Pairwise Spearman rank correlations read off the density:
// rho_ij = 12 E_pi[u_i u_j c(u)] - 3.
SpearmanEstimate check_spearman(const BatchDensityFn &density, std::size_t d, std::size_t n_mc,
                                std::uint64_t seed);

// Q_c = D_KL(c_true || c_est) in nats/bits, Monte Carlo over true-copula
// samples obtained from the channel oracle. Estimates below the 1e-12 floor
// are clipped and counted.
QcResult q_c(const BatchDensityFn &estimated, const AwgnSpec &spec, std::size_t n_mc,
             std::uint64_t seed);

struct DiagnosticsReport {
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::size_t n_mc = 0;
    MassCheck mass;
    std::vector<MomentCheck> moments;
    SpearmanEstimate spearman;
    std::optional<QcResult> qc;

    bool all_pass() const;
};

// Full battery for a trained model. Moment checks run only when
// pseudo-observations are supplied; Q_c only when an oracle spec is.
DiagnosticsReport run_diagnostics(const CopulaModel &model, const Matrix *pseudo_data,
                                  const AwgnSpec *oracle_spec, std::size_t n_mc,
                                  std::uint64_t seed, const DiagnosticsOptions &opts = {});

std::string report_to_json(const DiagnosticsReport &report);

}  // namespace codine

#endif  // CODINE_DIAGNOSTICS_HPP
