#include "codine/net.hpp"

#include <cmath>

#include "codine/fgen.hpp"
#include "codine/rng.hpp"

namespace codine {

namespace {

double hidden_apply(HiddenAct act, double z) {
    return act == HiddenAct::Tanh ? std::tanh(z) : softplus(z);
}

// Derivative of the hidden activation expressed through its output value:
// tanh' = 1 - a^2, softplus' = sigmoid = 1 - exp(-a).
double hidden_deriv_from_output(HiddenAct act, double a) {
    return act == HiddenAct::Tanh ? 1.0 - a * a : 1.0 - std::exp(-a);
}

// Forward pass keeping every layer's activations; activations[0] is the input.
std::vector<Matrix> forward_cached(const MlpParams &params, const Matrix &batch) {
    if (batch.cols() != params.input_dim())
        throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols()) +
                                    " columns, network expects " +
                                    std::to_string(params.input_dim()));
    const std::size_t m = batch.rows();
    std::vector<Matrix> acts;
    acts.reserve(params.n_layers() + 1);
    acts.push_back(batch);
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        const Matrix &w = params.weights[l];
        const std::vector<double> &b = params.biases[l];
        const Matrix &in = acts.back();
        const bool last = (l + 1 == params.n_layers());
        Matrix out(m, w.rows());
        for (std::size_t i = 0; i < m; ++i) {
            const auto x = in.row(i);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                double z = b[o];
                const auto wr = w.row(o);
                for (std::size_t k = 0; k < x.size(); ++k) z += wr[k] * x[k];
                out(i, o) = last ? z : hidden_apply(params.hidden_act, z);
            }
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

}  // namespace

HiddenAct parse_hidden_act(const std::string &name) {
    if (name == "tanh") return HiddenAct::Tanh;
    if (name == "softplus") return HiddenAct::Softplus;
    throw std::invalid_argument("unknown hidden activation '" + name + "'");
}

OptimizerKind parse_optimizer(const std::string &name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd") return OptimizerKind::Sgd;
    throw std::invalid_argument("unknown optimizer '" + name + "'");
}

std::string to_string(HiddenAct act) {
    return act == HiddenAct::Tanh ? "tanh" : "softplus";
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

void TrainConfig::validate(std::size_t n_samples) const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (static_cast<std::size_t>(batch_size) > n_samples)
        throw std::invalid_argument("TrainConfig: batch_size " + std::to_string(batch_size) +
                                    " exceeds sample count " + std::to_string(n_samples));
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("TrainConfig: hidden sizes must be >= 1");
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].rows() * weights[l].cols() + biases[l].size();
    return n;
}

bool MlpParams::all_finite() const {
    for (const auto &w : weights)
        if (!w.all_finite()) return false;
    for (const auto &b : biases)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

GradBuffer GradBuffer::zeros_like(const MlpParams &params) {
    GradBuffer g;
    g.weights.reserve(params.weights.size());
    g.biases.reserve(params.biases.size());
    for (const auto &w : params.weights) g.weights.emplace_back(w.rows(), w.cols());
    for (const auto &b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void GradBuffer::add(const GradBuffer &other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        auto &w = weights[l].data();
        const auto &ow = other.weights[l].data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] += ow[k];
        for (std::size_t k = 0; k < biases[l].size(); ++k) biases[l][k] += other.biases[l][k];
    }
}

bool GradBuffer::all_finite() const {
    for (const auto &w : weights)
        if (!w.all_finite()) return false;
    for (const auto &b : biases)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

MlpParams init_mlp(int input_dim, const std::vector<int> &hidden, HiddenAct act,
                   std::uint64_t seed) {
    if (input_dim < 1) throw std::invalid_argument("init_mlp: input_dim must be >= 1");
    MlpParams p;
    p.hidden_act = act;
    p.layer_sizes.push_back(input_dim);
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("init_mlp: hidden sizes must be >= 1");
        p.layer_sizes.push_back(h);
    }
    p.layer_sizes.push_back(1);

    auto rng = make_engine(seed);
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        const int fan_in = p.layer_sizes[l];
        const int fan_out = p.layer_sizes[l + 1];
        const double a = std::sqrt(3.0 / fan_in);
        Matrix w(fan_out, fan_in);
        for (double &v : w.data()) v = a * (2.0 * uniform_open(rng) - 1.0);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

std::vector<double> forward(const MlpParams &params, const Matrix &batch) {
    const auto acts = forward_cached(params, batch);
    const Matrix &out = acts.back();
    std::vector<double> raw(out.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) raw[i] = out(i, 0);
    return raw;
}

GradBuffer backward(const MlpParams &params, const Matrix &batch,
                    const std::vector<double> &output_grad) {
    if (output_grad.size() != batch.rows())
        throw std::invalid_argument("backward: output_grad length does not match batch rows");
    const auto acts = forward_cached(params, batch);
    const std::size_t m = batch.rows();
    const std::size_t n_layers = params.n_layers();

    GradBuffer grads = GradBuffer::zeros_like(params);

    // delta holds dJ/dz for the current layer, one row per sample.
    Matrix delta(m, 1);
    for (std::size_t i = 0; i < m; ++i) delta(i, 0) = output_grad[i];

    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix &w = params.weights[l];
        const Matrix &below = acts[l];  // input to layer l
        Matrix &dw = grads.weights[l];
        std::vector<double> &db = grads.biases[l];

        for (std::size_t i = 0; i < m; ++i) {
            const auto x = below.row(i);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double dlt = delta(i, o);
                if (dlt == 0.0) continue;
                db[o] += dlt;
                auto dwr = dw.row(o);
                for (std::size_t k = 0; k < x.size(); ++k) dwr[k] += dlt * x[k];
            }
        }

        if (l == 0) break;
        // Propagate to the previous layer's activations and through its
        // nonlinearity (acts[l] holds the activated values of layer l-1's
        // output when l >= 1).
        Matrix next_delta(m, w.cols());
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < w.cols(); ++k) {
                double s = 0.0;
                for (std::size_t o = 0; o < w.rows(); ++o) s += delta(i, o) * w(o, k);
                next_delta(i, k) =
                    s * hidden_deriv_from_output(params.hidden_act, below(i, k));
            }
        }
        delta = std::move(next_delta);
    }
    return grads;
}

Optimizer::Optimizer(const MlpParams &shape, const TrainConfig &config)
    : kind_(config.optimizer),
      lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_eps),
      m_(GradBuffer::zeros_like(shape)),
      v_(GradBuffer::zeros_like(shape)) {}

void Optimizer::step(MlpParams &params, const GradBuffer &grads) {
    if (!grads.all_finite())
        throw TrainingError("optimizer step " + std::to_string(step_count_ + 1) +
                            ": non-finite gradient");
    ++step_count_;
    auto update = [&](std::vector<double> &theta, const std::vector<double> &g,
                      std::vector<double> &m, std::vector<double> &v) {
        if (kind_ == OptimizerKind::Sgd) {
            for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += lr_ * g[k];
            return;
        }
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
            v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
            const double mhat = m[k] / c1;
            const double vhat = v[k] / c2;
            theta[k] += lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        update(params.weights[l].data(), grads.weights[l].data(), m_.weights[l].data(),
               v_.weights[l].data());
        update(params.biases[l], grads.biases[l], m_.biases[l], v_.biases[l]);
    }
    if (!params.all_finite())
        throw TrainingError("optimizer step " + std::to_string(step_count_) +
                            ": parameters became non-finite");
}

}  // namespace codine
