#include "codine/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "codine/gaussian.hpp"

namespace codine {

namespace {

void check_dim(const MarginalModel &model, const Matrix &m, const char *who) {
    if (model.dim() != m.cols())
        throw std::invalid_argument(std::string(who) + ": model has " +
                                    std::to_string(model.dim()) + " dimensions but data has " +
                                    std::to_string(m.cols()) + " columns");
}

}  // namespace

double Marginal1D::cdf(double x) const {
    switch (kind) {
        case MarginalKind::Gaussian: return gaussian_cdf((x - mu) / sigma);
        case MarginalKind::Identity: return x;
        case MarginalKind::Empirical: break;
    }
    // Clamp outside the observed range; extrapolating an empirical cdf is
    // not meaningful.
    if (x <= values.front()) return levels.front();
    if (x >= values.back()) return levels.back();
    const auto it = std::upper_bound(values.begin(), values.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - values.begin());
    const std::size_t lo = hi - 1;
    if (x == values[lo]) return levels[lo];
    const double t = (x - values[lo]) / (values[hi] - values[lo]);
    return levels[lo] + t * (levels[hi] - levels[lo]);
}

double Marginal1D::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("Marginal1D::quantile: argument must lie in (0,1)");
    switch (kind) {
        case MarginalKind::Gaussian: return mu + sigma * gaussian_quantile(u);
        case MarginalKind::Identity: return u;
        case MarginalKind::Empirical: break;
    }
    if (u <= levels.front()) return values.front();
    if (u >= levels.back()) return values.back();
    const auto it = std::upper_bound(levels.begin(), levels.end(), u);
    const std::size_t hi = static_cast<std::size_t>(it - levels.begin());
    const std::size_t lo = hi - 1;
    if (u == levels[lo]) return values[lo];
    const double t = (u - levels[lo]) / (levels[hi] - levels[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

MarginalModel fit_marginals(const Matrix &samples) {
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    if (n < 2) throw std::invalid_argument("fit_marginals: need at least 2 observations");
    if (d < 1) throw std::invalid_argument("fit_marginals: need at least 1 dimension");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (!std::isfinite(samples(i, j)))
                throw std::invalid_argument("fit_marginals: non-finite value at row " +
                                            std::to_string(i) + ", dimension " +
                                            std::to_string(j));

    MarginalModel model;
    model.dims.resize(d);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = samples(i, j);
        std::sort(col.begin(), col.end());
        if (col.front() == col.back())
            throw std::invalid_argument("fit_marginals: dimension " + std::to_string(j) +
                                        " is constant; its marginal is degenerate");

        // Collapse ties to one support point carrying the average rank,
        // so evaluating the cdf at a tied value returns the averaged level.
        Marginal1D &m = model.dims[j];
        m.kind = MarginalKind::Empirical;
        std::size_t i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && col[k + 1] == col[i]) ++k;
            // ranks i+1 .. k+1 (1-based); average rank = (i+k)/2 + 1
            const double avg_rank = 0.5 * static_cast<double>(i + k) + 1.0;
            m.values.push_back(col[i]);
            m.levels.push_back(avg_rank / static_cast<double>(n + 1));
            i = k + 1;
        }
    }
    return model;
}

MarginalModel gaussian_marginals(const std::vector<double> &mu,
                                 const std::vector<double> &sigma) {
    if (mu.size() != sigma.size())
        throw std::invalid_argument("gaussian_marginals: mu/sigma size mismatch");
    MarginalModel model;
    model.dims.resize(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (!(sigma[j] > 0.0))
            throw std::invalid_argument("gaussian_marginals: sigma must be positive");
        model.dims[j].kind = MarginalKind::Gaussian;
        model.dims[j].mu = mu[j];
        model.dims[j].sigma = sigma[j];
    }
    return model;
}

MarginalModel standard_gaussian_marginals(std::size_t d) {
    return gaussian_marginals(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
}

MarginalModel identity_marginals(std::size_t d) {
    MarginalModel model;
    model.dims.resize(d);
    for (auto &m : model.dims) m.kind = MarginalKind::Identity;
    return model;
}

Matrix pit(const MarginalModel &model, const Matrix &samples) {
    check_dim(model, samples, "pit");
    Matrix u(samples.rows(), samples.cols());
    for (std::size_t i = 0; i < samples.rows(); ++i)
        for (std::size_t j = 0; j < samples.cols(); ++j) {
            const double x = samples(i, j);
            if (!std::isfinite(x))
                throw std::invalid_argument("pit: non-finite value at row " + std::to_string(i) +
                                            ", dimension " + std::to_string(j));
            u(i, j) = model.dims[j].cdf(x);
        }
    return u;
}

Matrix inverse_pit(const MarginalModel &model, const Matrix &pseudo) {
    check_dim(model, pseudo, "inverse_pit");
    Matrix x(pseudo.rows(), pseudo.cols());
    for (std::size_t i = 0; i < pseudo.rows(); ++i)
        for (std::size_t j = 0; j < pseudo.cols(); ++j) {
            const double u = pseudo(i, j);
            if (!(u > 0.0 && u < 1.0))
                throw std::domain_error("inverse_pit: entry outside (0,1) at row " +
                                        std::to_string(i) + ", dimension " + std::to_string(j));
            x(i, j) = model.dims[j].quantile(u);
        }
    return x;
}

}  // namespace codine
