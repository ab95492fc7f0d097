#include "codine/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "codine/rng.hpp"

namespace codine {

namespace {

constexpr double kDensityFloor = 1e-12;

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

}  // namespace

BatchDensityFn density_of(const CopulaModel &model) {
    return [model](const Matrix &points) { return model.evaluate(points); };
}

BatchDensityFn density_of(const AwgnSpec &spec) {
    return [spec](const Matrix &points) {
        std::vector<double> out(points.rows());
        for (std::size_t i = 0; i < points.rows(); ++i)
            out[i] = true_copula_density(spec, points.row(i));
        return out;
    };
}

MassCheck check_mass(const BatchDensityFn &density, std::size_t d, std::size_t n_mc,
                     std::uint64_t seed, const DiagnosticsOptions &opts) {
    if (n_mc < 100) throw std::invalid_argument("check_mass: n_mc must be >= 100");
    auto rng = make_engine(seed);
    const Matrix u = uniform_matrix(n_mc, d, rng);
    const auto [mean, se] = mean_and_se(density(u));
    MassCheck check{mean, se, n_mc, false};
    check.pass = std::fabs(mean - 1.0) <= opts.pass_sigma * se;
    return check;
}

std::vector<MomentCheck> check_moments(const BatchDensityFn &density, std::size_t d,
                                       const Matrix &pseudo_data, const std::vector<int> &orders,
                                       std::size_t n_mc, std::uint64_t seed,
                                       const DiagnosticsOptions &opts) {
    if (pseudo_data.cols() != d)
        throw std::invalid_argument("check_moments: pseudo data dimension mismatch");
    for (int n : orders)
        if (n < 1 || n > 8)
            throw std::invalid_argument("check_moments: orders must lie in {1,...,8}");

    auto rng = make_engine(seed);
    const Matrix u = uniform_matrix(n_mc, d, rng);
    const std::vector<double> dens = density(u);

    std::vector<MomentCheck> checks;
    std::vector<double> lhs_terms(n_mc), rhs_terms(pseudo_data.rows());
    for (int order : orders) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < n_mc; ++i)
                lhs_terms[i] = std::pow(u(i, j), order) * dens[i];
            for (std::size_t i = 0; i < pseudo_data.rows(); ++i)
                rhs_terms[i] = std::pow(pseudo_data(i, j), order);
            const auto l = mean_and_se(lhs_terms);
            const auto r = mean_and_se(rhs_terms);
            MomentCheck c;
            c.order = order;
            c.dim = j;
            c.lhs = l.mean;
            c.rhs = r.mean;
            c.stderr_value = std::sqrt(l.se * l.se + r.se * r.se);
            c.pass = std::fabs(c.lhs - c.rhs) <= opts.pass_sigma * c.stderr_value;
            checks.push_back(c);
        }
    }
    return checks;
}

SpearmanEstimate check_spearman(const BatchDensityFn &density, std::size_t d, std::size_t n_mc,
                                std::uint64_t seed) {
    auto rng = make_engine(seed);
    const Matrix u = uniform_matrix(n_mc, d, rng);
    const std::vector<double> dens = density(u);

    SpearmanEstimate est;
    est.matrix = Matrix::identity(d);
    est.stderr_mat = Matrix(d, d);
    est.n_mc = n_mc;
    std::vector<double> terms(n_mc);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            for (std::size_t i = 0; i < n_mc; ++i)
                terms[i] = 12.0 * u(i, a) * u(i, b) * dens[i] - 3.0;
            const auto [mean, se] = mean_and_se(terms);
            est.matrix(a, b) = mean;
            est.matrix(b, a) = mean;
            est.stderr_mat(a, b) = se;
            est.stderr_mat(b, a) = se;
        }
    return est;
}

QcResult q_c(const BatchDensityFn &estimated, const AwgnSpec &spec, std::size_t n_mc,
             std::uint64_t seed) {
    const auto [x, y] = sample_channel(spec, n_mc, seed);
    const Matrix v = pit(output_marginals(spec), y);

    const std::vector<double> est = estimated(v);
    QcResult result;
    result.n_mc = n_mc;
    std::vector<double> terms(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) {
        double e = est[i];
        if (e < kDensityFloor) {
            e = kDensityFloor;
            ++result.floored;
        }
        terms[i] = true_copula_log_density(spec, v.row(i)) - std::log(e);
    }
    const auto [mean, se] = mean_and_se(terms);
    result.nats = mean;
    result.bits = mean / std::numbers::ln2;
    result.stderr_nats = se;
    return result;
}

bool DiagnosticsReport::all_pass() const {
    if (!mass.pass) return false;
    for (const auto &m : moments)
        if (!m.pass) return false;
    return true;
}

DiagnosticsReport run_diagnostics(const CopulaModel &model, const Matrix *pseudo_data,
                                  const AwgnSpec *oracle_spec, std::size_t n_mc,
                                  std::uint64_t seed, const DiagnosticsOptions &opts) {
    DiagnosticsReport report;
    report.dim = model.dim;
    report.seed = seed;
    report.n_mc = n_mc;
    const BatchDensityFn density = density_of(model);
    report.mass = check_mass(density, model.dim, n_mc, derive_seed(seed, 10), opts);
    if (pseudo_data != nullptr)
        report.moments = check_moments(density, model.dim, *pseudo_data, {1, 2}, n_mc,
                                       derive_seed(seed, 11), opts);
    report.spearman = check_spearman(density, model.dim, n_mc, derive_seed(seed, 12));
    if (oracle_spec != nullptr)
        report.qc = q_c(density, *oracle_spec, n_mc, derive_seed(seed, 13));
    return report;
}

std::string report_to_json(const DiagnosticsReport &report) {
    nlohmann::ordered_json j;
    j["dim"] = report.dim;
    j["seed"] = report.seed;
    j["n_mc"] = report.n_mc;
    j["mass"] = {{"estimate", report.mass.estimate},
                 {"stderr", report.mass.stderr_value},
                 {"pass", report.mass.pass}};
    j["moments"] = nlohmann::ordered_json::array();
    for (const auto &m : report.moments)
        j["moments"].push_back({{"order", m.order},
                                {"dim", m.dim},
                                {"lhs", m.lhs},
                                {"rhs", m.rhs},
                                {"stderr", m.stderr_value},
                                {"pass", m.pass}});
    auto mat = [](const Matrix &m) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(row);
        }
        return rows;
    };
    j["spearman"] = {{"matrix", mat(report.spearman.matrix)},
                     {"stderr", mat(report.spearman.stderr_mat)},
                     {"n_mc", report.spearman.n_mc}};
    if (report.qc) {
        j["q_c"] = {{"nats", report.qc->nats},
                    {"bits", report.qc->bits},
                    {"stderr_nats", report.qc->stderr_nats},
                    {"floored", report.qc->floored},
                    {"n_mc", report.qc->n_mc}};
    }
    j["all_pass"] = report.all_pass();
    return j.dump(2);
}

}  // namespace codine
