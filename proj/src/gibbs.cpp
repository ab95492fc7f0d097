#include "codine/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "codine/rng.hpp"

namespace codine {

namespace {

// Per-dimension lag-1 autocorrelation of the collected chain states.
std::vector<double> lag1_autocorr(const Matrix &samples) {
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    std::vector<double> out(d, 0.0);
    if (n < 3) return out;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += samples(i, j);
        mean /= static_cast<double>(n);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = samples(i, j) - mean;
            den += c * c;
            if (i + 1 < n) num += c * (samples(i + 1, j) - mean);
        }
        out[j] = den > 0.0 ? num / den : 0.0;
    }
    return out;
}

}  // namespace

void GibbsConfig::validate() const {
    if (grid_size < 16) throw std::invalid_argument("GibbsConfig: grid_size must be >= 16");
    if (burn_in < 0) throw std::invalid_argument("GibbsConfig: burn_in must be >= 0");
    if (thinning < 1) throw std::invalid_argument("GibbsConfig: thinning must be >= 1");
    if (n_chains < 1) throw std::invalid_argument("GibbsConfig: n_chains must be >= 1");
}

BatchLogDensityFn log_density_of(const CopulaModel &model) {
    return [model](const Matrix &points) { return model.log_density(points); };
}

std::vector<double> conditional_slice(const BatchLogDensityFn &log_density, std::size_t d,
                                      std::span<const double> current, std::size_t axis,
                                      int grid_size, std::size_t *fallback_count) {
    if (current.size() != d) throw std::invalid_argument("conditional_slice: bad point size");
    if (axis >= d) throw std::invalid_argument("conditional_slice: axis out of range");
    const std::size_t g = static_cast<std::size_t>(grid_size);

    Matrix grid(g, d);
    for (std::size_t k = 0; k < g; ++k) {
        auto row = grid.row(k);
        std::copy(current.begin(), current.end(), row.begin());
        row[axis] = (static_cast<double>(k) + 0.5) / static_cast<double>(g);
    }
    std::vector<double> logd = log_density(grid);

    // Normalize in log space: exp(logd - max) is safe against overflow.
    double top = -std::numeric_limits<double>::infinity();
    for (double v : logd) top = std::fmax(top, v);
    std::vector<double> probs(g);
    if (!std::isfinite(top)) {
        if (fallback_count) ++*fallback_count;
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(g));
        return probs;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < g; ++k) {
        probs[k] = std::exp(logd[k] - top);
        sum += probs[k];
    }
    for (double &p : probs) p /= sum;
    return probs;
}

Matrix gibbs_sample(const BatchLogDensityFn &log_density, std::size_t d, std::size_t n_out,
                    const GibbsConfig &config, GibbsStats *stats) {
    config.validate();
    if (d < 1) throw std::invalid_argument("gibbs_sample: dimension must be >= 1");
    if (n_out < 1) throw std::invalid_argument("gibbs_sample: n_out must be >= 1");

    const std::size_t g = static_cast<std::size_t>(config.grid_size);
    const std::size_t chains = static_cast<std::size_t>(config.n_chains);
    std::size_t fallbacks = 0;

    Matrix out(n_out, d);
    std::size_t written = 0;
    std::vector<double> acorr_sum(d, 0.0);

    for (std::size_t chain = 0; chain < chains; ++chain) {
        // First chains take the remainder so the row counts partition n_out.
        std::size_t quota = n_out / chains + (chain < n_out % chains ? 1 : 0);
        if (quota == 0) continue;
        auto rng = make_engine(derive_seed(config.seed, chain));

        std::vector<double> state(d);
        for (double &v : state) v = uniform_open(rng);

        auto sweep = [&] {
            for (std::size_t axis = 0; axis < d; ++axis) {
                const auto probs =
                    conditional_slice(log_density, d, state, axis, config.grid_size, &fallbacks);
                const double r = uniform_open(rng);
                double acc = 0.0;
                std::size_t cell = g - 1;
                for (std::size_t k = 0; k < g; ++k) {
                    acc += probs[k];
                    if (r <= acc) {
                        cell = k;
                        break;
                    }
                }
                state[axis] =
                    (static_cast<double>(cell) + uniform_open(rng)) / static_cast<double>(g);
            }
        };

        for (int s = 0; s < config.burn_in; ++s) sweep();
        Matrix chain_states(quota, d);
        for (std::size_t i = 0; i < quota; ++i) {
            for (int s = 0; s < config.thinning; ++s) sweep();
            std::copy(state.begin(), state.end(), chain_states.row(i).begin());
        }
        const auto ac = lag1_autocorr(chain_states);
        for (std::size_t j = 0; j < d; ++j) acorr_sum[j] += ac[j];
        for (std::size_t i = 0; i < quota; ++i)
            std::copy(chain_states.row(i).begin(), chain_states.row(i).end(),
                      out.row(written + i).begin());
        written += quota;
    }

    if (stats) {
        stats->fallback_slices = fallbacks;
        stats->lag1_autocorr.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            stats->lag1_autocorr[j] = acorr_sum[j] / static_cast<double>(chains);
    }
    return out;
}

Matrix gibbs_sample(const CopulaModel &model, std::size_t n_out, const GibbsConfig &config,
                    GibbsStats *stats) {
    return gibbs_sample(log_density_of(model), model.dim, n_out, config, stats);
}

Matrix generate(const CopulaModel &model, const MarginalModel &marginals, std::size_t n_out,
                const GibbsConfig &config, GibbsStats *stats) {
    if (marginals.dim() != model.dim)
        throw std::invalid_argument("generate: marginal model dimension " +
                                    std::to_string(marginals.dim()) +
                                    " does not match copula dimension " +
                                    std::to_string(model.dim));
    return inverse_pit(marginals, gibbs_sample(model, n_out, config, stats));
}

}  // namespace codine
