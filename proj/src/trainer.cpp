#include "codine/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "codine/rng.hpp"

namespace codine {

namespace {

constexpr double kBoundaryNudge = 1e-12;

Matrix clamp_to_open_cube(const Matrix &points) {
    Matrix out = points;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) {
            double &v = out(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw std::domain_error("evaluate: point outside [0,1]^d at row " +
                                        std::to_string(i) + ", dimension " + std::to_string(j));
            if (v == 0.0) v = kBoundaryNudge;
            if (v == 1.0) v = 1.0 - kBoundaryNudge;
        }
    return out;
}

void check_pseudo(const Matrix &pseudo) {
    for (std::size_t i = 0; i < pseudo.rows(); ++i)
        for (std::size_t j = 0; j < pseudo.cols(); ++j) {
            const double v = pseudo(i, j);
            if (!(v > 0.0 && v < 1.0))
                throw std::invalid_argument(
                    "train: pseudo-observation outside (0,1) at row " + std::to_string(i) +
                    ", dimension " + std::to_string(j));
        }
}

Matrix gather_rows(const Matrix &data, const std::vector<std::size_t> &idx, std::size_t begin,
                   std::size_t end) {
    Matrix out(end - begin, data.cols());
    for (std::size_t r = begin; r < end; ++r) {
        const auto src = data.row(idx[r]);
        std::copy(src.begin(), src.end(), out.row(r - begin).begin());
    }
    return out;
}

}  // namespace

std::vector<double> CopulaModel::evaluate(const Matrix &points) const {
    std::vector<double> out = log_density(points);
    for (double &v : out) v = std::exp(v);
    return out;
}

std::vector<double> CopulaModel::log_density(const Matrix &points) const {
    if (points.cols() != dim)
        throw std::invalid_argument("evaluate: expected " + std::to_string(dim) +
                                    "-dimensional points");
    const Matrix clamped = clamp_to_open_cube(points);
    const FGenerator gen = make_generator(generator);
    std::vector<double> raw = forward(params, clamped);
    for (double &v : raw) v = gen.log_f_star_prime(gen.activation(v));
    return raw;
}

double value_function(const FGenerator &gen, const MlpParams &params, const Matrix &data_batch,
                      const Matrix &reference_batch) {
    if (data_batch.cols() != reference_batch.cols())
        throw std::invalid_argument("value_function: batch widths differ");
    const std::vector<double> raw_pos = forward(params, data_batch);
    const std::vector<double> raw_neg = forward(params, reference_batch);
    double pos = 0.0;
    for (double r : raw_pos) pos += gen.activation(r);
    double neg = 0.0;
    for (double r : raw_neg) neg += gen.f_star(gen.activation(r));
    return pos / static_cast<double>(raw_pos.size()) - neg / static_cast<double>(raw_neg.size());
}

CopulaModel train_with_negatives(const Matrix &data, GenName gen_name, const TrainConfig &config,
                                 const NegativeSampler &negatives, const MetricsSink &sink) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    config.validate(n);
    if (d < 1) throw std::invalid_argument("train: data has no columns");

    const FGenerator gen = make_generator(gen_name);
    MlpParams params = init_mlp(static_cast<int>(d), config.hidden, config.hidden_act,
                                derive_seed(config.seed, 0));
    Optimizer opt(params, config);
    auto rng = make_engine(derive_seed(config.seed, 1));

    CopulaModel model;
    model.generator = gen_name;
    model.dim = d;
    model.curve.reserve(config.epochs);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);

    const auto t0 = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_j = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start + batch <= n; start += batch) {
            const Matrix pos = gather_rows(data, order, start, start + batch);
            const Matrix neg = negatives(pos, rng);

            const std::vector<double> raw_pos = forward(params, pos);
            const std::vector<double> raw_neg = forward(params, neg);
            const double m_pos = static_cast<double>(raw_pos.size());
            const double m_neg = static_cast<double>(raw_neg.size());

            // J = mean(act(raw_pos)) - mean(f*(act(raw_neg))); ascend on J.
            double j = 0.0;
            std::vector<double> gpos(raw_pos.size()), gneg(raw_neg.size());
            for (std::size_t i = 0; i < raw_pos.size(); ++i) {
                j += gen.activation(raw_pos[i]) / m_pos;
                gpos[i] = gen.activation_deriv(raw_pos[i]) / m_pos;
            }
            for (std::size_t i = 0; i < raw_neg.size(); ++i) {
                const double t = gen.activation(raw_neg[i]);
                j -= gen.f_star(t) / m_neg;
                gneg[i] = -gen.f_star_prime(t) * gen.activation_deriv(raw_neg[i]) / m_neg;
            }
            if (!std::isfinite(j))
                throw TrainingError("train: non-finite objective at epoch " +
                                    std::to_string(epoch) + ", batch " +
                                    std::to_string(n_batches));

            GradBuffer grads = backward(params, pos, gpos);
            grads.add(backward(params, neg, gneg));
            opt.step(params, grads);

            epoch_j += j;
            ++n_batches;
        }
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        EpochRecord rec{epoch + 1, epoch_j / static_cast<double>(n_batches), wall_ms};
        model.curve.push_back(rec);
        if (sink) sink(rec);
    }

    model.params = std::move(params);
    model.final_objective = model.curve.back().j_value;
    model.epochs_trained = config.epochs;
    return model;
}

CopulaModel train(const Matrix &pseudo, GenName gen_name, const TrainConfig &config,
                  const MetricsSink &sink) {
    check_pseudo(pseudo);
    // Fresh uniform reference draws every batch.
    NegativeSampler uniforms = [](const Matrix &pos, std::mt19937_64 &rng) {
        return uniform_matrix(pos.rows(), pos.cols(), rng);
    };
    return train_with_negatives(pseudo, gen_name, config, uniforms, sink);
}

}  // namespace codine
