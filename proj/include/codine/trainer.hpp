#ifndef CODINE_TRAINER_HPP
#define CODINE_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "codine/fgen.hpp"
#include "codine/matrix.hpp"
#include "codine/net.hpp"

namespace codine {

struct EpochRecord {
    int epoch = 0;
    double j_value = 0.0;  // mean batch estimate of the objective, nats
    double wall_ms = 0.0;
};

using MetricsSink = std::function<void(const EpochRecord &)>;

// A trained copula density estimator: the network T together with the
// generator that decodes its output into a density value.
struct CopulaModel {
    MlpParams params;
    GenName generator = GenName::Kl;
    std::size_t dim = 0;
    double final_objective = 0.0;
    int epochs_trained = 0;
    std::vector<EpochRecord> curve;

    // Density at each row of points; rows must lie in [0,1]^dim. Entries
    // numerically on the cube boundary are nudged inward by 1e-12.
    std::vector<double> evaluate(const Matrix &points) const;
    // Natural log of the density; same domain handling.
    std::vector<double> log_density(const Matrix &points) const;
};

// Batch estimate of the variational objective
//   J_f(T) = E_data[T(u)] - E_ref[f*(T(u))]
// with the generator's output activation applied to the raw network output.
double value_function(const FGenerator &gen, const MlpParams &params,
                      const Matrix &data_batch, const Matrix &reference_batch);

// Produces the reference ("negative") batch paired with a positive batch.
// CODINE training draws fresh uniforms; the mutual-information ratio
// estimator permutes block rows instead.
using NegativeSampler = std::function<Matrix(const Matrix &positive_batch, std::mt19937_64 &rng)>;

// Core ascent loop shared by the copula trainer and the MI ratio estimator.
CopulaModel train_with_negatives(const Matrix &data, GenName gen_name, const TrainConfig &config,
                                 const NegativeSampler &negatives,
                                 const MetricsSink &sink = {});

// CODINE: fit the copula density of the pseudo-observations. Entries of
// `pseudo` must lie strictly inside (0,1).
CopulaModel train(const Matrix &pseudo, GenName gen_name, const TrainConfig &config,
                  const MetricsSink &sink = {});

}  // namespace codine

#endif  // CODINE_TRAINER_HPP
