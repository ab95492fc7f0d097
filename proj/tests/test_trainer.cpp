#include <doctest.h>

#include <cmath>
#include <numbers>

#include "codine/oracle.hpp"
#include "codine/rng.hpp"
#include "codine/trainer.hpp"

using namespace codine;

namespace {

// A network that outputs the same raw value everywhere: zero weights,
// chosen output bias.
MlpParams constant_net(int dim, double raw) {
    MlpParams p = init_mlp(dim, {8}, HiddenAct::Tanh, 1);
    for (auto &w : p.weights) std::fill(w.data().begin(), w.data().end(), 0.0);
    p.biases[1][0] = raw;
    return p;
}

TrainConfig quick_config(int epochs, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 256;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("value function is tight at independence for constant optimal T") {
    auto rng = make_engine(1);
    const Matrix pos = uniform_matrix(512, 2, rng);
    const Matrix neg = uniform_matrix(512, 2, rng);

    // KL: T = f'(1) = 1 gives J = 1 - f*(1) = 0 exactly.
    const FGenerator kl = make_generator(GenName::Kl);
    CHECK(value_function(kl, constant_net(2, 1.0), pos, neg) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // GAN: zero raw activates to t = -ln 2 = f'(1); with the conjugate of
    // the shifted generator, J = 0 exactly as well.
    const FGenerator gan = make_generator(GenName::Gan);
    CHECK(value_function(gan, constant_net(2, 0.0), pos, neg) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // Direct f-divergence of identical distributions on a uniform grid is 0;
    // the constant-T value function agrees with it.
    double d_gan = 0.0;
    for (int i = 0; i < 101; ++i) d_gan += gan.f(1.0) / 101.0;
    CHECK(d_gan == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("constant suboptimal T gives J below the divergence") {
    auto rng = make_engine(2);
    const Matrix pos = uniform_matrix(256, 2, rng);
    const Matrix neg = uniform_matrix(256, 2, rng);
    const FGenerator kl = make_generator(GenName::Kl);
    // Both batches are uniform so D_f = 0; any non-optimal T strictly lowers J.
    CHECK(value_function(kl, constant_net(2, 0.2), pos, neg) < 0.0);
    CHECK(value_function(kl, constant_net(2, 1.7), pos, neg) < 0.0);
}

TEST_CASE("untrained zero network evaluates to exp(-1) under KL") {
    CopulaModel model;
    model.params = constant_net(2, 0.0);
    model.generator = GenName::Kl;
    model.dim = 2;
    auto rng = make_engine(3);
    for (double v : model.evaluate(uniform_matrix(32, 2, rng)))
        CHECK(v == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("evaluation domain handling") {
    CopulaModel model;
    model.params = constant_net(2, 0.0);
    model.generator = GenName::Kl;
    model.dim = 2;

    // Boundary points are nudged inward rather than rejected.
    Matrix boundary(1, 2);
    boundary(0, 0) = 0.0;
    boundary(0, 1) = 1.0;
    CHECK(model.evaluate(boundary)[0] == doctest::Approx(std::exp(-1.0)));

    Matrix outside(1, 2);
    outside(0, 0) = -0.1;
    outside(0, 1) = 0.5;
    CHECK_THROWS_AS(model.evaluate(outside), std::domain_error);
    Matrix wrong(1, 3, 0.5);
    CHECK_THROWS_AS(model.evaluate(wrong), std::invalid_argument);
}

TEST_CASE("smoke: ten samples, one epoch") {
    auto rng = make_engine(4);
    const Matrix pseudo = uniform_matrix(10, 2, rng);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 10;
    cfg.seed = 4;
    const CopulaModel model = train(pseudo, GenName::Kl, cfg);
    CHECK(model.curve.size() == 1);
    CHECK(std::isfinite(model.final_objective));
    CHECK(model.epochs_trained == 1);
    CHECK(model.dim == 2);
}

TEST_CASE("invalid inputs are rejected") {
    auto rng = make_engine(5);
    Matrix pseudo = uniform_matrix(50, 2, rng);
    TrainConfig cfg = quick_config(1, 5);
    cfg.batch_size = 51;
    CHECK_THROWS_AS(train(pseudo, GenName::Kl, cfg), std::invalid_argument);

    cfg.batch_size = 10;
    pseudo(3, 1) = 1.0;  // not strictly inside (0,1)
    CHECK_THROWS_AS(train(pseudo, GenName::Kl, cfg), std::invalid_argument);
}

TEST_CASE("diverging run aborts with context") {
    auto rng = make_engine(6);
    const Matrix pseudo = uniform_matrix(200, 2, rng);
    TrainConfig cfg = quick_config(50, 6);
    cfg.batch_size = 64;
    cfg.learning_rate = 1e18;  // guaranteed blow-up
    CHECK_THROWS_AS(train(pseudo, GenName::Kl, cfg), TrainingError);
}

TEST_CASE("training on independent uniforms recovers the flat copula") {
    auto rng = make_engine(7);
    const Matrix pseudo = uniform_matrix(6000, 2, rng);
    const CopulaModel model = train(pseudo, GenName::Kl, quick_config(150, 7));

    Matrix grid(21 * 21, 2);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            grid(i * 21 + j, 0) = i / 20.0;
            grid(i * 21 + j, 1) = j / 20.0;
        }
    double worst = 0.0;
    for (double c : model.evaluate(grid)) worst = std::max(worst, std::fabs(c - 1.0));
    CHECK(worst <= 0.15);

    // Self-normalization: mean density over fresh uniforms near 1.
    auto rng2 = make_engine(8);
    const Matrix fresh = uniform_matrix(100000, 2, rng2);
    double mass = 0.0;
    for (double c : model.evaluate(fresh)) mass += c;
    mass /= fresh.rows();
    CHECK(mass == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("objective improves and stays below the true divergence") {
    const AwgnSpec spec = make_awgn_db(2, 0.0, 0.5);
    const auto [x, y] = sample_channel(spec, 6000, 42);
    const Matrix pseudo = pit(output_marginals(spec), y);

    std::vector<EpochRecord> seen;
    const CopulaModel model = train(pseudo, GenName::Kl, quick_config(120, 42),
                                    [&](const EpochRecord &r) { seen.push_back(r); });
    CHECK(seen.size() == 120);
    CHECK(seen.back().wall_ms >= seen.front().wall_ms);

    // Window-10 smoothed curve is non-decreasing over the first half.
    auto smooth = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t k = i; k < i + 10; ++k) s += model.curve[k].j_value;
        return s / 10.0;
    };
    for (std::size_t i = 0; i + 10 + 10 <= model.curve.size() / 2; i += 10)
        CHECK(smooth(i + 10) >= smooth(i) - 0.01);

    // Lower-bound property: J at convergence cannot exceed D_KL(c||pi) by
    // more than Monte-Carlo noise.
    const double truth = kl_to_flat_nats(spec);
    CHECK(model.final_objective <= truth + 0.05);
}

TEST_CASE("training is deterministic per seed") {
    auto rng = make_engine(9);
    const Matrix pseudo = uniform_matrix(600, 2, rng);
    const CopulaModel a = train(pseudo, GenName::Gan, quick_config(5, 11));
    const CopulaModel b = train(pseudo, GenName::Gan, quick_config(5, 11));
    CHECK(a.params == b.params);
    CHECK(a.final_objective == b.final_objective);
}

TEST_SUITE_END();
