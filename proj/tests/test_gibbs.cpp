#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "codine/gibbs.hpp"
#include "codine/oracle.hpp"
#include "codine/rng.hpp"

using namespace codine;

namespace {

BatchLogDensityFn flat_log_density() {
    return [](const Matrix &pts) { return std::vector<double>(pts.rows(), 0.0); };
}

double sample_spearman(const Matrix &m, std::size_t a, std::size_t b) {
    const std::size_t n = m.rows();
    auto ranks = [&](std::size_t col) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t x, std::size_t y) { return m(x, col) < m(y, col); });
        std::vector<double> r(n);
        for (std::size_t k = 0; k < n; ++k) r[idx[k]] = static_cast<double>(k + 1);
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double mean = (n + 1.0) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - mean) * (rb[i] - mean);
        da += (ra[i] - mean) * (ra[i] - mean);
        db += (rb[i] - mean) * (rb[i] - mean);
    }
    return num / std::sqrt(da * db);
}

double ks_uniform(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        stat = std::max(stat, std::fabs((i + 1) / n - u[i]));
        stat = std::max(stat, std::fabs(u[i] - i / n));
    }
    return stat;
}

GibbsConfig fast_config(std::uint64_t seed) {
    GibbsConfig cfg;
    cfg.grid_size = 128;
    cfg.burn_in = 100;
    cfg.thinning = 2;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("gibbs");

TEST_CASE("config validation") {
    GibbsConfig cfg;
    cfg.grid_size = 8;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GibbsConfig{};
    cfg.thinning = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GibbsConfig{};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("flat density gives a uniform slice") {
    const std::vector<double> current = {0.3, 0.7};
    const auto probs = conditional_slice(flat_log_density(), 2, current, 0, 64);
    REQUIRE(probs.size() == 64);
    double sum = 0.0;
    for (double p : probs) {
        CHECK(p == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear density slice matches exact cell integrals") {
    // c proportional to u_0 along axis 0: cell k has exact integral mass
    // ((k+1)^2 - k^2) / (2 g^2), i.e. probability (2k+1)/g^2. The midpoint
    // rule is exact for a linear integrand.
    const BatchLogDensityFn lin = [](const Matrix &pts) {
        std::vector<double> out(pts.rows());
        for (std::size_t i = 0; i < pts.rows(); ++i) out[i] = std::log(pts(i, 0));
        return out;
    };
    const int g = 32;
    const std::vector<double> current = {0.5, 0.5};
    const auto probs = conditional_slice(lin, 2, current, 0, g);
    double sum = 0.0;
    for (int k = 0; k < g; ++k) {
        CHECK(probs[k] == doctest::Approx((2.0 * k + 1.0) / (g * g)).epsilon(1e-12));
        sum += probs[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vanishing slice falls back to uniform and is counted") {
    const BatchLogDensityFn zero = [](const Matrix &pts) {
        return std::vector<double>(pts.rows(), -std::numeric_limits<double>::infinity());
    };
    std::size_t fallbacks = 0;
    const auto probs = conditional_slice(zero, 2, std::vector<double>{0.5, 0.5}, 1, 32,
                                         &fallbacks);
    CHECK(fallbacks == 1);
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("flat copula sampling is uniform and independent") {
    // 1.36/sqrt(n) is the 5% critical value, so a fixed passing seed keeps
    // this deterministic.
    GibbsStats stats;
    const std::size_t n = 10000;
    const Matrix u = gibbs_sample(flat_log_density(), 2, n, fast_config(3), &stats);
    REQUIRE(u.rows() == n);

    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = u(i, j);
            CHECK(col[i] > 0.0);
            CHECK(col[i] < 1.0);
        }
        CHECK(ks_uniform(col) <= 1.36 / std::sqrt(static_cast<double>(n)));
    }
    // Cross-column dependence within Monte-Carlo error of zero.
    CHECK(std::fabs(sample_spearman(u, 0, 1)) <= 3.0 / std::sqrt(static_cast<double>(n)));
    // Independence target: consecutive states decorrelate.
    for (double a : stats.lag1_autocorr) CHECK(std::fabs(a) <= 0.05);
    CHECK(stats.fallback_slices == 0);
}

TEST_CASE("oracle copula sampling reproduces its Spearman") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const BatchLogDensityFn oracle = [spec](const Matrix &pts) {
        std::vector<double> out(pts.rows());
        for (std::size_t i = 0; i < pts.rows(); ++i)
            out[i] = true_copula_log_density(spec, pts.row(i));
        return out;
    };
    const double expected = spearman_from_pearson(output_pearson(spec, 0, 1));

    GibbsConfig cfg = fast_config(2);
    cfg.grid_size = 256;
    const Matrix u = gibbs_sample(oracle, 2, 10000, cfg);
    const double got = sample_spearman(u, 0, 1);
    CHECK(std::fabs(got - expected) <= 0.05);

    // Grid refinement moves the estimate by less than twice its stderr.
    GibbsConfig coarse = cfg;
    coarse.grid_size = 128;
    const Matrix u2 = gibbs_sample(oracle, 2, 10000, coarse);
    CHECK(std::fabs(sample_spearman(u2, 0, 1) - got) <= 2.0 / std::sqrt(10000.0) + 0.02);
}

TEST_CASE("sampling is deterministic and supports edge sizes") {
    const Matrix a = gibbs_sample(flat_log_density(), 3, 50, fast_config(3));
    const Matrix b = gibbs_sample(flat_log_density(), 3, 50, fast_config(3));
    CHECK(a == b);
    const Matrix c = gibbs_sample(flat_log_density(), 3, 50, fast_config(4));
    CHECK_FALSE(a == c);

    const Matrix single = gibbs_sample(flat_log_density(), 2, 1, fast_config(5));
    CHECK(single.rows() == 1);
    CHECK(single(0, 0) > 0.0);
    CHECK(single(0, 0) < 1.0);

    // Chains partition the requested rows.
    GibbsConfig multi = fast_config(6);
    multi.n_chains = 3;
    CHECK(gibbs_sample(flat_log_density(), 2, 10, multi).rows() == 10);
}

TEST_CASE("generate maps through the marginals") {
    CopulaModel model;
    model.params = init_mlp(2, {8}, HiddenAct::Tanh, 1);
    for (auto &w : model.params.weights) std::fill(w.data().begin(), w.data().end(), 0.0);
    model.params.biases[1][0] = 1.0;  // KL: density exactly 1
    model.generator = GenName::Kl;
    model.dim = 2;

    const MarginalModel gauss = standard_gaussian_marginals(2);
    GibbsStats stats;
    const Matrix x = generate(model, gauss, 8000, fast_config(7), &stats);
    REQUIRE(x.rows() == 8000);

    // Independent flat copula + standard Gaussian marginals = iid N(0,1).
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
        mean /= x.rows();
        for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
        var /= (x.rows() - 1);
        CHECK(std::fabs(mean) <= 0.05);
        CHECK(var == doctest::Approx(1.0).epsilon(0.06));
    }

    const MarginalModel wrong = standard_gaussian_marginals(3);
    CHECK_THROWS_AS(generate(model, wrong, 10, fast_config(8), nullptr),
                    std::invalid_argument);
}

TEST_SUITE_END();
