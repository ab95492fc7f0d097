#ifndef CODINE_GIBBS_HPP
#define CODINE_GIBBS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "codine/marginals.hpp"
#include "codine/matrix.hpp"
#include "codine/trainer.hpp"

namespace codine {

struct GibbsConfig {
    int grid_size = 256;
    int burn_in = 500;   // full sweeps discarded before collecting
    int thinning = 5;    // sweeps between collected states
    int n_chains = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GibbsStats {
    std::size_t fallback_slices = 0;          // slices that degenerated to uniform
    std::vector<double> lag1_autocorr;        // per dimension, over collected states
};

// Log-density on the unit cube, batch-wise; -inf marks zero density. The
// sampler works in log space so badly scaled densities cannot overflow the
// slice normalization.
using BatchLogDensityFn = std::function<std::vector<double>(const Matrix &)>;

BatchLogDensityFn log_density_of(const CopulaModel &model);

// Discretized conditional along `axis` given the other coordinates of
// `current`: the density on grid-cell midpoints, normalized to a probability
// vector. The conditional's unknown normalizer cancels in the normalization.
std::vector<double> conditional_slice(const BatchLogDensityFn &log_density, std::size_t d,
                                      std::span<const double> current, std::size_t axis,
                                      int grid_size, std::size_t *fallback_count = nullptr);

// Systematic-scan Gibbs sampling of n_out pseudo-observations. Each kept
// state follows `thinning` full sweeps; within a chosen cell the coordinate
// is placed uniformly at random. Chains are independent and seeded from
// config.seed, so output is deterministic.
Matrix gibbs_sample(const BatchLogDensityFn &log_density, std::size_t d, std::size_t n_out,
                    const GibbsConfig &config, GibbsStats *stats = nullptr);
Matrix gibbs_sample(const CopulaModel &model, std::size_t n_out, const GibbsConfig &config,
                    GibbsStats *stats = nullptr);

// Gibbs sampling followed by inverse transform through the marginals:
// new observations in the sample domain.
Matrix generate(const CopulaModel &model, const MarginalModel &marginals, std::size_t n_out,
                const GibbsConfig &config, GibbsStats *stats = nullptr);

}  // namespace codine

#endif  // CODINE_GIBBS_HPP
