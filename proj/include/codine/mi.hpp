#ifndef CODINE_MI_HPP
#define CODINE_MI_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "codine/matrix.hpp"
#include "codine/net.hpp"
#include "codine/fgen.hpp"

namespace codine {

enum class MiMethod { ThreeCopula, DirectRatio };

MiMethod parse_mi_method(const std::string &name);  // "three-copula" | "direct-ratio"
std::string to_string(MiMethod method);

struct MiConfig {
    TrainConfig train;
    double eval_fraction = 0.2;  // held-out share of the pseudo-observations
};

struct MiEstimate {
    double bits = 0.0;
    double stderr_bits = 0.0;
    MiMethod method = MiMethod::ThreeCopula;
    GenName generator = GenName::Kl;
    std::size_t n_train = 0;
    std::size_t n_eval = 0;
    // Held-out value-function estimate (bits) for the direct-ratio method
    // with the KL generator; equals the log-ratio reading at convergence.
    double heldout_j_bits = 0.0;
    bool marginal_copulas_trained = false;  // three-copula only
};

// I(X;Y) from three copula densities: the joint over (u,v) and the two
// block marginals. One-dimensional blocks have unit copula density and are
// not trained.
MiEstimate mi_three_copula(const Matrix &x, const Matrix &y, GenName gen, const MiConfig &config);

// I(X;Y) from a single density-ratio network over (u,v), trained against
// negatives drawn from the product of the block copulas by permuting the
// v-block rows within each batch.
MiEstimate mi_direct_ratio(const Matrix &x, const Matrix &y, GenName gen, const MiConfig &config);

// Permute the columns [block_start, end) across rows, in place; used for
// product-distribution negatives and directly testable.
void permute_block_rows(Matrix &m, std::size_t block_start, std::mt19937_64 &rng);

struct MiSweepCell {
    double snr_db = 0.0;
    std::size_t d = 1;
    double rho = 0.0;
};

struct MiSweepRow {
    double snr_db = 0.0;
    std::size_t d = 1;
    double rho = 0.0;
    GenName generator = GenName::Kl;
    MiMethod method = MiMethod::ThreeCopula;
    double mi_bits = 0.0;
    double truth_bits = 0.0;
    double stderr_bits = 0.0;
    std::uint64_t seed = 0;
    std::string error;  // non-empty when this cell failed
};

// One row per (cell, generator, method) over AWGN data with n samples per
// cell. Individual failures are recorded in `error` and the sweep continues.
std::vector<MiSweepRow> mi_sweep(const std::vector<MiSweepCell> &grid,
                                 const std::vector<GenName> &generators,
                                 const std::vector<MiMethod> &methods, std::size_t n,
                                 const MiConfig &config);

}  // namespace codine

#endif  // CODINE_MI_HPP
