#ifndef CODINE_MODEL_IO_HPP
#define CODINE_MODEL_IO_HPP

#include <map>
#include <stdexcept>
#include <string>

#include "codine/marginals.hpp"
#include "codine/trainer.hpp"

namespace codine {

class ModelFormatError : public std::runtime_error {
  public:
    explicit ModelFormatError(const std::string &msg) : std::runtime_error(msg) {}
};

// Model files are JSON documents:
//
//   {
//     "format": "codine-model", "version": 1,
//     "generator": "kl",
//     "dim": 2,
//     "hidden_act": "tanh",
//     "layer_sizes": [2, 64, 64, 1],
//     "weights": [[...row-major...], ...], "biases": [[...], ...],
//     "final_objective": ..., "epochs_trained": ...,
//     "meta": { ...resolved run configuration, seed... }
//   }
//
// Marginal files use format "codine-marginals" (version 1) with one entry
// per dimension: {"kind": "empirical"|"gaussian"|"identity", ...params}.
// Doubles are serialized with shortest round-trip precision, so a load
// restores parameters bit-exactly.

void save_model(const std::string &path, const CopulaModel &model,
                const std::map<std::string, std::string> &meta = {});
CopulaModel load_model(const std::string &path);

void save_marginals(const std::string &path, const MarginalModel &model,
                    const std::map<std::string, std::string> &meta = {});
MarginalModel load_marginals(const std::string &path);

}  // namespace codine

#endif  // CODINE_MODEL_IO_HPP
