#include "codine/mi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "codine/marginals.hpp"
#include "codine/oracle.hpp"
#include "codine/rng.hpp"
#include "codine/trainer.hpp"

namespace codine {

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double> &values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

Matrix hcat(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto row = out.row(i);
        const auto ra = a.row(i);
        const auto rb = b.row(i);
        std::copy(ra.begin(), ra.end(), row.begin());
        std::copy(rb.begin(), rb.end(), row.begin() + a.cols());
    }
    return out;
}

Matrix take_columns(const Matrix &m, std::size_t begin, std::size_t end) {
    Matrix out(m.rows(), end - begin);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = m(i, j);
    return out;
}

// Shuffled train/eval row split of the joint pseudo-observations.
struct Split {
    Matrix train;
    Matrix eval;
};

Split split_rows(const Matrix &m, double eval_fraction, std::uint64_t seed) {
    const std::size_t n = m.rows();
    std::size_t n_eval = static_cast<std::size_t>(std::floor(eval_fraction * n));
    n_eval = std::min(n_eval, n - 1);
    if (n_eval == 0) throw std::invalid_argument("mi: too few samples for an eval split");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_engine(seed);
    std::shuffle(order.begin(), order.end(), rng);
    Split s{Matrix(n - n_eval, m.cols()), Matrix(n_eval, m.cols())};
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = m.row(order[i]);
        auto dst = i < n - n_eval ? s.train.row(i) : s.eval.row(i - (n - n_eval));
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return s;
}

void check_pair(const Matrix &x, const Matrix &y) {
    if (x.rows() != y.rows())
        throw std::invalid_argument("mi: x and y must have the same number of rows");
    if (x.rows() < 10) throw std::invalid_argument("mi: too few samples");
    if (x.cols() < 1 || y.cols() < 1)
        throw std::invalid_argument("mi: x and y must each have at least one column");
}

TrainConfig seeded(TrainConfig cfg, std::uint64_t seed, std::size_t n_train) {
    cfg.seed = seed;
    cfg.batch_size = std::min<int>(cfg.batch_size, static_cast<int>(n_train));
    return cfg;
}

}  // namespace

MiMethod parse_mi_method(const std::string &name) {
    if (name == "three-copula") return MiMethod::ThreeCopula;
    if (name == "direct-ratio") return MiMethod::DirectRatio;
    throw std::invalid_argument("unknown MI method '" + name +
                                "' (expected three-copula or direct-ratio)");
}

std::string to_string(MiMethod method) {
    return method == MiMethod::ThreeCopula ? "three-copula" : "direct-ratio";
}

void permute_block_rows(Matrix &m, std::size_t block_start, std::mt19937_64 &rng) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix block = take_columns(m, block_start, m.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = block.row(perm[i]);
        std::copy(src.begin(), src.end(), m.row(i).begin() + block_start);
    }
}

MiEstimate mi_three_copula(const Matrix &x, const Matrix &y, GenName gen,
                           const MiConfig &config) {
    check_pair(x, y);
    const std::size_t dx = x.cols();
    const std::size_t dy = y.cols();

    const Matrix u = pit(fit_marginals(x), x);
    const Matrix v = pit(fit_marginals(y), y);
    const Split joint = split_rows(hcat(u, v), config.eval_fraction, derive_seed(config.train.seed, 100));

    MiEstimate est;
    est.method = MiMethod::ThreeCopula;
    est.generator = gen;
    est.n_train = joint.train.rows();
    est.n_eval = joint.eval.rows();

    CopulaModel c_joint;
    try {
        c_joint = train(joint.train, gen, seeded(config.train, derive_seed(config.train.seed, 101), joint.train.rows()));
    } catch (const TrainingError &e) {
        throw TrainingError(std::string("mi_three_copula: joint copula: ") + e.what());
    }

    std::vector<double> terms = c_joint.log_density(joint.eval);

    // One-dimensional blocks have unit copula density; skip those networks.
    est.marginal_copulas_trained = false;
    if (dx > 1) {
        est.marginal_copulas_trained = true;
        CopulaModel c_u;
        try {
            c_u = train(take_columns(joint.train, 0, dx), gen,
                        seeded(config.train, derive_seed(config.train.seed, 102), joint.train.rows()));
        } catch (const TrainingError &e) {
            throw TrainingError(std::string("mi_three_copula: u-block copula: ") + e.what());
        }
        const auto lu = c_u.log_density(take_columns(joint.eval, 0, dx));
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] -= lu[i];
    }
    if (dy > 1) {
        est.marginal_copulas_trained = true;
        CopulaModel c_v;
        try {
            c_v = train(take_columns(joint.train, dx, dx + dy), gen,
                        seeded(config.train, derive_seed(config.train.seed, 103), joint.train.rows()));
        } catch (const TrainingError &e) {
            throw TrainingError(std::string("mi_three_copula: v-block copula: ") + e.what());
        }
        const auto lv = c_v.log_density(take_columns(joint.eval, dx, dx + dy));
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] -= lv[i];
    }

    const auto [mean, se] = mean_and_se(terms);
    est.bits = mean / std::numbers::ln2;
    est.stderr_bits = se / std::numbers::ln2;
    return est;
}

MiEstimate mi_direct_ratio(const Matrix &x, const Matrix &y, GenName gen,
                           const MiConfig &config) {
    check_pair(x, y);
    const std::size_t dx = x.cols();

    const Matrix u = pit(fit_marginals(x), x);
    const Matrix v = pit(fit_marginals(y), y);
    const Split joint = split_rows(hcat(u, v), config.eval_fraction, derive_seed(config.train.seed, 200));

    // Negatives: the same batch with its v-block rows permuted, which
    // samples the product of the two block copulas.
    NegativeSampler product_negatives = [dx](const Matrix &pos, std::mt19937_64 &rng) {
        Matrix neg = pos;
        permute_block_rows(neg, dx, rng);
        return neg;
    };

    CopulaModel ratio_model;
    try {
        ratio_model = train_with_negatives(
            joint.train, gen, seeded(config.train, derive_seed(config.train.seed, 201), joint.train.rows()),
            product_negatives);
    } catch (const TrainingError &e) {
        throw TrainingError(std::string("mi_direct_ratio: ratio network: ") + e.what());
    }

    MiEstimate est;
    est.method = MiMethod::DirectRatio;
    est.generator = gen;
    est.n_train = joint.train.rows();
    est.n_eval = joint.eval.rows();

    // Mean held-out log-ratio; the ratio is recovered through (f*)'.
    const std::vector<double> log_ratio = ratio_model.log_density(joint.eval);
    const auto [mean, se] = mean_and_se(log_ratio);
    est.bits = mean / std::numbers::ln2;
    est.stderr_bits = se / std::numbers::ln2;

    // Held-out value function (KL reading of the bound) on one seeded
    // permutation of the eval rows.
    if (gen == GenName::Kl) {
        Matrix neg = joint.eval;
        auto rng = make_engine(derive_seed(config.train.seed, 202));
        permute_block_rows(neg, dx, rng);
        const FGenerator fg = make_generator(gen);
        est.heldout_j_bits =
            value_function(fg, ratio_model.params, joint.eval, neg) / std::numbers::ln2;
    }
    return est;
}

std::vector<MiSweepRow> mi_sweep(const std::vector<MiSweepCell> &grid,
                                 const std::vector<GenName> &generators,
                                 const std::vector<MiMethod> &methods, std::size_t n,
                                 const MiConfig &config) {
    if (grid.empty()) throw std::invalid_argument("mi_sweep: empty grid");
    if (generators.empty()) throw std::invalid_argument("mi_sweep: empty generator list");
    if (methods.empty()) throw std::invalid_argument("mi_sweep: empty method list");

    std::vector<MiSweepRow> rows;
    std::size_t cell_index = 0;
    for (const auto &cell : grid) {
        const std::uint64_t cell_seed = derive_seed(config.train.seed, 1000 + cell_index);
        ++cell_index;
        for (GenName gen : generators)
            for (MiMethod method : methods) {
                MiSweepRow row;
                row.snr_db = cell.snr_db;
                row.d = cell.d;
                row.rho = cell.rho;
                row.generator = gen;
                row.method = method;
                row.seed = cell_seed;
                try {
                    const AwgnSpec spec = make_awgn_db(cell.d, cell.snr_db, cell.rho);
                    row.truth_bits = true_mi_bits(spec);
                    const auto [x, y] = sample_channel(spec, n, cell_seed);
                    MiConfig cell_cfg = config;
                    cell_cfg.train.seed = cell_seed;
                    const MiEstimate est = method == MiMethod::ThreeCopula
                                               ? mi_three_copula(x, y, gen, cell_cfg)
                                               : mi_direct_ratio(x, y, gen, cell_cfg);
                    row.mi_bits = est.bits;
                    row.stderr_bits = est.stderr_bits;
                } catch (const std::exception &e) {
                    row.error = e.what();
                }
                rows.push_back(row);
            }
    }
    return rows;
}

}  // namespace codine
