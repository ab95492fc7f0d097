#ifndef CODINE_NET_HPP
#define CODINE_NET_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "codine/matrix.hpp"

namespace codine {

// Thrown when an optimization run hits non-finite numbers; carries enough
// context to locate the failing step.
class TrainingError : public std::runtime_error {
  public:
    explicit TrainingError(const std::string &msg) : std::runtime_error(msg) {}
};

enum class HiddenAct { Tanh, Softplus };
enum class OptimizerKind { Adam, Sgd };

HiddenAct parse_hidden_act(const std::string &name);      // "tanh" | "softplus"
OptimizerKind parse_optimizer(const std::string &name);   // "adam" | "sgd"
std::string to_string(HiddenAct act);
std::string to_string(OptimizerKind kind);

struct TrainConfig {
    int epochs = 300;
    int batch_size = 256;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::vector<int> hidden = {64, 64};
    HiddenAct hidden_act = HiddenAct::Tanh;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate(std::size_t n_samples) const;
};

// Fully-connected network with a single linear output unit. weights[l] has
// shape layer_sizes[l+1] x layer_sizes[l].
struct MlpParams {
    std::vector<int> layer_sizes;  // {input, hidden..., 1}
    HiddenAct hidden_act = HiddenAct::Tanh;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::size_t input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
    std::size_t n_layers() const { return weights.size(); }
    std::size_t param_count() const;
    bool all_finite() const;

    bool operator==(const MlpParams &other) const = default;
};

// Parameter-shaped gradient buffer.
struct GradBuffer {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static GradBuffer zeros_like(const MlpParams &params);
    void add(const GradBuffer &other);
    bool all_finite() const;
};

// Symmetric uniform fan-in initialization (U[-sqrt(3/fan_in), +sqrt(3/fan_in)]),
// biases zero, seeded.
MlpParams init_mlp(int input_dim, const std::vector<int> &hidden, HiddenAct act,
                   std::uint64_t seed);

// Raw (pre-activation) outputs of the final unit, one per batch row.
std::vector<double> forward(const MlpParams &params, const Matrix &batch);

// Gradients of sum_i output_grad[i] * raw_i with respect to every parameter.
GradBuffer backward(const MlpParams &params, const Matrix &batch,
                    const std::vector<double> &output_grad);

// First-order ascent: parameters move along +gradient.
class Optimizer {
  public:
    Optimizer(const MlpParams &shape, const TrainConfig &config);
    void step(MlpParams &params, const GradBuffer &grads);

  private:
    OptimizerKind kind_;
    double lr_, beta1_, beta2_, eps_;
    long step_count_ = 0;
    GradBuffer m_, v_;
};

}  // namespace codine

#endif  // CODINE_NET_HPP
