#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "codine/diagnostics.hpp"
#include "codine/rng.hpp"

using namespace codine;

namespace {

BatchDensityFn constant_density(double value) {
    return [value](const Matrix &pts) { return std::vector<double>(pts.rows(), value); };
}

// Piecewise-constant density on a g x g grid, doubly normalized by Sinkhorn
// scaling so both marginals are exactly uniform: a genuine discrete copula
// density concentrated near the diagonal.
struct GridCopula {
    int g;
    std::vector<double> cells;  // row-major, row sums = col sums = g

    static GridCopula near_comonotone(int g, double bandwidth) {
        GridCopula c{g, std::vector<double>(g * g)};
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                const double du = (i + 0.5) / g - (j + 0.5) / g;
                c.cells[i * g + j] = std::exp(-du * du / (2.0 * bandwidth * bandwidth));
            }
        for (int it = 0; it < 500; ++it) {
            for (int i = 0; i < g; ++i) {
                double s = 0.0;
                for (int j = 0; j < g; ++j) s += c.cells[i * g + j];
                for (int j = 0; j < g; ++j) c.cells[i * g + j] *= g / s;
            }
            for (int j = 0; j < g; ++j) {
                double s = 0.0;
                for (int i = 0; i < g; ++i) s += c.cells[i * g + j];
                for (int i = 0; i < g; ++i) c.cells[i * g + j] *= g / s;
            }
        }
        return c;
    }

    double at(double u, double v) const {
        const int i = std::min(g - 1, static_cast<int>(u * g));
        const int j = std::min(g - 1, static_cast<int>(v * g));
        return cells[i * g + j];
    }

    BatchDensityFn density() const {
        return [*this](const Matrix &pts) {
            std::vector<double> out(pts.rows());
            for (std::size_t r = 0; r < pts.rows(); ++r) out[r] = at(pts(r, 0), pts(r, 1));
            return out;
        };
    }

    // 12 E[uv c] - 3 integrated cell-exactly (u and v are linear per cell).
    double exact_spearman() const {
        double s = 0.0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                s += cells[i * g + j] * ((i + 0.5) / g) * ((j + 0.5) / g);
        return 12.0 * s / (g * g) - 3.0;
    }
};

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("mass check on analytic stubs") {
    const MassCheck unit = check_mass(constant_density(1.0), 2, 1000, 1);
    CHECK(unit.estimate == doctest::Approx(1.0));
    CHECK(unit.stderr_value == doctest::Approx(0.0));
    CHECK(unit.pass);

    const MassCheck bad = check_mass(constant_density(2.0), 2, 1000, 1);
    CHECK(bad.estimate == doctest::Approx(2.0));
    CHECK_FALSE(bad.pass);

    CHECK_THROWS_AS(check_mass(constant_density(1.0), 2, 10, 1), std::invalid_argument);
}

TEST_CASE("mass check on the oracle density") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const MassCheck check = check_mass(density_of(spec), 2, 100000, 5);
    CHECK(std::fabs(check.estimate - 1.0) <= 3.0 * check.stderr_value);
    CHECK(check.pass);
}

TEST_CASE("stderr shrinks like one over root n") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const MassCheck small = check_mass(density_of(spec), 2, 20000, derive_seed(100, seed));
        const MassCheck big = check_mass(density_of(spec), 2, 80000, derive_seed(200, seed));
        ratio_sum += big.stderr_value / small.stderr_value;
    }
    CHECK(ratio_sum / 5.0 == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("moment checks at independence") {
    auto rng = make_engine(2);
    const Matrix pseudo = uniform_matrix(50000, 2, rng);
    const auto checks = check_moments(constant_density(1.0), 2, pseudo, {1, 2}, 50000, 3);
    REQUIRE(checks.size() == 4);
    for (const auto &c : checks) {
        const double expected = c.order == 1 ? 0.5 : 1.0 / 3.0;
        CHECK(std::fabs(c.lhs - expected) <= 4.0 * c.stderr_value + 1e-9);
        CHECK(std::fabs(c.rhs - expected) <= 4.0 * c.stderr_value + 1e-9);
        CHECK(c.pass);
    }
    CHECK_THROWS_AS(check_moments(constant_density(1.0), 2, pseudo, {9}, 1000, 3),
                    std::invalid_argument);
}

TEST_CASE("moment checks against oracle pseudo-samples") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const auto [x, y] = sample_channel(spec, 100000, 7);
    const Matrix pseudo = pit(output_marginals(spec), y);
    const auto checks = check_moments(density_of(spec), 2, pseudo, {1, 2}, 100000, 8);
    for (const auto &c : checks) CHECK(c.pass);
}

TEST_CASE("spearman of the flat copula is zero") {
    const SpearmanEstimate est = check_spearman(constant_density(1.0), 2, 50000, 4);
    CHECK(est.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(est.matrix(1, 1) == doctest::Approx(1.0));
    CHECK(est.matrix(0, 1) == doctest::Approx(est.matrix(1, 0)));
    CHECK(std::fabs(est.matrix(0, 1)) <= 3.0 * est.stderr_mat(0, 1));
}

TEST_CASE("spearman of a near-comonotone grid copula") {
    const GridCopula grid = GridCopula::near_comonotone(64, 0.05);

    // The Sinkhorn scaling really produced a copula: mass is exactly 1.
    const MassCheck mass = check_mass(grid.density(), 2, 100000, 9);
    CHECK(std::fabs(mass.estimate - 1.0) <= 3.0 * mass.stderr_value);

    const double exact = grid.exact_spearman();
    CHECK(exact > 0.9);
    const SpearmanEstimate est = check_spearman(grid.density(), 2, 200000, 10);
    CHECK(std::fabs(est.matrix(0, 1) - exact) <= 3.0 * est.stderr_mat(0, 1) + 0.01);
    CHECK(est.matrix(0, 1) > 0.9);
}

TEST_CASE("spearman of the Gaussian oracle matches the closed form") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const double expected = spearman_from_pearson(output_pearson(spec, 0, 1));
    const SpearmanEstimate est = check_spearman(density_of(spec), 2, 200000, 11);
    CHECK(std::fabs(est.matrix(0, 1) - expected) <= 3.0 * est.stderr_mat(0, 1) + 0.005);
}

TEST_CASE("q_c of the oracle against itself is zero") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const QcResult qc = q_c(density_of(spec), spec, 20000, 12);
    CHECK(std::fabs(qc.nats) <= 3.0 * qc.stderr_nats + 1e-12);
    CHECK(qc.floored == 0);
}

TEST_CASE("q_c of the flat density equals the closed-form baseline") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const QcResult qc = q_c(constant_density(1.0), spec, 200000, 13);
    CHECK(std::fabs(qc.nats - kl_to_flat_nats(spec)) <= 3.0 * qc.stderr_nats);
    CHECK(qc.bits == doctest::Approx(qc.nats / std::numbers::ln2));
}

TEST_CASE("q_c across a spec grid is zero for the oracle itself") {
    for (std::size_t d : {2u, 5u})
        for (double rho : {0.0, 0.5})
            for (double snr_db : {-10.0, 0.0, 10.0}) {
                const AwgnSpec spec = make_awgn_db(d, snr_db, rho);
                const QcResult qc = q_c(density_of(spec), spec, 5000, 14);
                CHECK(std::fabs(qc.nats) <= 3.0 * qc.stderr_nats + 1e-12);
            }
}

TEST_CASE("density floor is counted") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const QcResult qc = q_c(constant_density(0.0), spec, 500, 15);
    CHECK(qc.floored == 500);
    CHECK(qc.nats > 20.0);  // log(1e-12) dominates
}

TEST_SUITE_END();
