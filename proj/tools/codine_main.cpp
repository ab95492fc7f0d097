// codine: copula density estimation, diagnostics, mutual information and
// data generation from the command line.
//
// Exit codes: 0 success, 1 failed diagnostic checks under --strict,
// 2 usage/input error, 3 numerical failure during optimization.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "codine/csv.hpp"
#include "codine/diagnostics.hpp"
#include "codine/rng.hpp"
#include "codine/fgen.hpp"
#include "codine/gibbs.hpp"
#include "codine/marginals.hpp"
#include "codine/mi.hpp"
#include "codine/model_io.hpp"
#include "codine/net.hpp"
#include "codine/oracle.hpp"
#include "codine/trainer.hpp"

namespace {

using codine::Matrix;

struct TrainFlags {
    std::string generator = "kl";
    int epochs = 300;
    int batch_size = 256;
    double learning_rate = 1e-3;
    std::string hidden = "64,64";
    std::string hidden_act = "tanh";
    std::string optimizer = "adam";
};

std::vector<int> parse_int_list(const std::string &s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw CLI::ValidationError("expected a comma-separated integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string &s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("expected a comma-separated number list");
    return out;
}

std::vector<std::string> parse_string_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

codine::TrainConfig resolve_train_config(const TrainFlags &flags, std::uint64_t seed,
                                         std::size_t n_samples) {
    codine::TrainConfig cfg;
    cfg.epochs = flags.epochs;
    cfg.batch_size = std::min<int>(flags.batch_size, static_cast<int>(n_samples));
    cfg.learning_rate = flags.learning_rate;
    cfg.seed = seed;
    cfg.optimizer = codine::parse_optimizer(flags.optimizer);
    cfg.hidden = parse_int_list(flags.hidden);
    cfg.hidden_act = codine::parse_hidden_act(flags.hidden_act);
    return cfg;
}

std::map<std::string, std::string> config_meta(const TrainFlags &flags,
                                               const codine::TrainConfig &cfg,
                                               std::uint64_t seed) {
    return {{"generator", flags.generator},
            {"epochs", std::to_string(cfg.epochs)},
            {"batch_size", std::to_string(cfg.batch_size)},
            {"learning_rate", codine::format_double(cfg.learning_rate)},
            {"hidden", flags.hidden},
            {"hidden_act", flags.hidden_act},
            {"optimizer", flags.optimizer},
            {"seed", std::to_string(seed)}};
}

std::vector<std::string> config_comments(const std::string &command,
                                         const std::map<std::string, std::string> &meta) {
    std::vector<std::string> out;
    out.push_back("codine " + command);
    for (const auto &[k, v] : meta) out.push_back(k + "=" + v);
    return out;
}

// "d=2,rho=0.5,snr_db=0" -> AwgnSpec
codine::AwgnSpec parse_oracle_arg(const std::string &s) {
    std::size_t d = 0;
    double rho = 0.0, snr_db = 0.0;
    bool have_d = false, have_snr = false;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--oracle: expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "d") {
            d = static_cast<std::size_t>(std::stoul(val));
            have_d = true;
        } else if (key == "rho") {
            rho = std::stod(val);
        } else if (key == "snr_db") {
            snr_db = std::stod(val);
            have_snr = true;
        } else {
            throw std::invalid_argument("--oracle: unknown key '" + key + "'");
        }
    }
    if (!have_d || !have_snr)
        throw std::invalid_argument("--oracle: need at least d=... and snr_db=...");
    return codine::make_awgn_db(d, snr_db, rho);
}

void note_defaulted_seed(const CLI::Option *seed_opt, std::uint64_t seed) {
    if (seed_opt->count() == 0)
        std::cerr << "note: --seed not given, using default " << seed << "\n";
}

Matrix curve_matrix(const codine::CopulaModel &model) {
    Matrix curve(model.curve.size(), 3);
    for (std::size_t i = 0; i < model.curve.size(); ++i) {
        curve(i, 0) = model.curve[i].epoch;
        curve(i, 1) = model.curve[i].j_value;
        curve(i, 2) = model.curve[i].wall_ms;
    }
    return curve;
}

int run_fit(const std::string &input, const std::string &model_path, std::string marginals_path,
            std::string curve_path, const TrainFlags &flags, std::uint64_t seed, bool verbose) {
    if (marginals_path.empty()) marginals_path = model_path + ".marginals.json";
    if (curve_path.empty()) curve_path = model_path + ".curve.csv";

    const codine::CsvTable table = codine::read_csv(input);
    const codine::MarginalModel marginals = codine::fit_marginals(table.data);
    const Matrix pseudo = codine::pit(marginals, table.data);

    const codine::TrainConfig cfg = resolve_train_config(flags, seed, pseudo.rows());
    const auto meta = config_meta(flags, cfg, seed);

    codine::MetricsSink sink;
    if (verbose)
        sink = [](const codine::EpochRecord &rec) {
            std::cerr << "epoch " << rec.epoch << "  J=" << rec.j_value << "  t=" << rec.wall_ms
                      << "ms\n";
        };
    const codine::CopulaModel model =
        codine::train(pseudo, codine::parse_generator(flags.generator), cfg, sink);

    codine::save_model(model_path, model, meta);
    codine::save_marginals(marginals_path, marginals, meta);
    codine::write_csv(curve_path, {"epoch", "j_value", "wall_ms"}, curve_matrix(model),
                      config_comments("fit", meta));
    std::cout << "fit: n=" << table.data.rows() << " d=" << table.data.cols()
              << " final J=" << model.final_objective << " nats\n";
    std::cout << "wrote " << model_path << ", " << marginals_path << ", " << curve_path << "\n";
    return 0;
}

int run_diagnose(const std::string &model_path, const std::string &data_path,
                 const std::string &marginals_path, const std::string &oracle_arg,
                 const std::string &report_path, std::size_t n_mc, std::uint64_t seed,
                 bool strict) {
    const codine::CopulaModel model = codine::load_model(model_path);

    Matrix pseudo;
    bool have_pseudo = false;
    if (!data_path.empty()) {
        if (marginals_path.empty())
            throw std::invalid_argument("--data requires --marginals (as written by fit)");
        const codine::CsvTable table = codine::read_csv(data_path);
        pseudo = codine::pit(codine::load_marginals(marginals_path), table.data);
        have_pseudo = true;
    }

    codine::AwgnSpec spec;
    bool have_oracle = false;
    if (!oracle_arg.empty()) {
        spec = parse_oracle_arg(oracle_arg);
        if (spec.d != model.dim)
            throw std::invalid_argument("--oracle dimension does not match the model");
        have_oracle = true;
    }

    const codine::DiagnosticsReport report = codine::run_diagnostics(
        model, have_pseudo ? &pseudo : nullptr, have_oracle ? &spec : nullptr, n_mc, seed);
    const std::string json = codine::report_to_json(report);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::invalid_argument("cannot write '" + report_path + "'");
        out << json << "\n";
    }
    std::cout << json << "\n";
    if (report.qc)
        std::cout << "Q_c = " << report.qc->bits << " bits (stderr "
                  << report.qc->stderr_nats / 0.6931471805599453 << ")\n";
    if (strict && !report.all_pass()) {
        std::cerr << "diagnose: checks failed under --strict\n";
        return 1;
    }
    return 0;
}

int run_mi(const std::vector<double> &snr_db, const std::vector<int> &dims,
           const std::vector<double> &rhos, const std::vector<std::string> &generators,
           const std::vector<std::string> &methods, std::size_t n, const TrainFlags &flags,
           const std::string &output, std::uint64_t seed) {
    std::vector<codine::MiSweepCell> grid;
    for (int d : dims)
        for (double s : snr_db)
            for (double r : rhos)
                grid.push_back({s, static_cast<std::size_t>(d), r});
    if (grid.empty()) throw std::invalid_argument("mi: empty sweep grid");
    if (generators.empty()) throw std::invalid_argument("mi: empty generator list");

    std::vector<codine::GenName> gens;
    for (const auto &g : generators) gens.push_back(codine::parse_generator(g));
    std::vector<codine::MiMethod> meths;
    for (const auto &m : methods) meths.push_back(codine::parse_mi_method(m));

    codine::MiConfig cfg;
    cfg.train = resolve_train_config(flags, seed, n);

    const auto rows = codine::mi_sweep(grid, gens, meths, n, cfg);

    std::ofstream out(output);
    if (!out) throw std::invalid_argument("cannot write '" + output + "'");
    const auto meta = config_meta(flags, cfg.train, seed);
    for (const auto &c : config_comments("mi", meta)) out << "# " << c << "\n";
    out << "# n=" << n << "\n";
    out << "snr_db,d,rho,generator,method,mi_bits,truth_bits,stderr,seed\n";
    for (const auto &row : rows) {
        if (!row.error.empty())
            std::cerr << "mi: cell (snr_db=" << row.snr_db << ", d=" << row.d
                      << ", rho=" << row.rho << ", " << to_string(row.generator) << ", "
                      << to_string(row.method) << ") failed: " << row.error << "\n";
        out << codine::format_double(row.snr_db) << "," << row.d << ","
            << codine::format_double(row.rho) << "," << to_string(row.generator) << ","
            << to_string(row.method) << ","
            << (row.error.empty() ? codine::format_double(row.mi_bits) : "nan") << ","
            << codine::format_double(row.truth_bits) << ","
            << (row.error.empty() ? codine::format_double(row.stderr_bits) : "nan") << ","
            << row.seed << "\n";
    }
    std::cout << "wrote " << output << " (" << rows.size() << " rows)\n";
    return 0;
}

int run_generate(const std::string &model_path, const std::string &marginals_path,
                 std::size_t n_out, const std::string &output, int grid_size, int burn_in,
                 int thinning, int chains, std::uint64_t seed) {
    const codine::CopulaModel model = codine::load_model(model_path);
    const codine::MarginalModel marginals = codine::load_marginals(marginals_path);

    codine::GibbsConfig cfg;
    cfg.grid_size = grid_size;
    cfg.burn_in = burn_in;
    cfg.thinning = thinning;
    cfg.n_chains = chains;
    cfg.seed = seed;

    codine::GibbsStats stats;
    const Matrix samples = codine::generate(model, marginals, n_out, cfg, &stats);

    std::vector<std::string> header(samples.cols());
    for (std::size_t j = 0; j < samples.cols(); ++j) header[j] = "x" + std::to_string(j + 1);
    std::map<std::string, std::string> meta = {
        {"seed", std::to_string(seed)},
        {"grid_size", std::to_string(grid_size)},
        {"burn_in", std::to_string(burn_in)},
        {"thinning", std::to_string(thinning)},
        {"chains", std::to_string(chains)},
        {"model", model_path}};
    codine::write_csv(output, header, samples, config_comments("generate", meta));

    std::cerr << "gibbs: fallback slices " << stats.fallback_slices << ", lag-1 autocorr";
    for (double a : stats.lag1_autocorr) std::cerr << " " << a;
    std::cerr << "\n";
    std::cout << "wrote " << output << " (" << samples.rows() << " rows)\n";
    return 0;
}

int run_oracle_bench(const std::vector<int> &dims, const std::vector<double> &snr_db,
                     const std::vector<double> &rhos, std::size_t n, std::size_t n_mc,
                     const TrainFlags &flags, const std::string &output, std::uint64_t seed) {
    std::ofstream out(output);
    if (!out) throw std::invalid_argument("cannot write '" + output + "'");
    codine::TrainConfig base_cfg = resolve_train_config(flags, seed, n);
    const auto meta = config_meta(flags, base_cfg, seed);
    for (const auto &c : config_comments("oracle-bench", meta)) out << "# " << c << "\n";
    out << "# n=" << n << " n_mc=" << n_mc << "\n";
    out << "d,snr_db,rho,generator,baseline_bits,qc_bits,runtime_s,seed\n";

    std::size_t cell = 0;
    for (int d : dims)
        for (double s : snr_db)
            for (double r : rhos) {
                const std::uint64_t cell_seed = codine::derive_seed(seed, 5000 + cell);
                ++cell;
                const auto t0 = std::chrono::steady_clock::now();
                std::string qc_field = "nan";
                double baseline = std::nan("");
                try {
                    const codine::AwgnSpec spec =
                        codine::make_awgn_db(static_cast<std::size_t>(d), s, r);
                    baseline = codine::kl_to_flat_bits(spec);
                    const auto [x, y] = codine::sample_channel(spec, n, cell_seed);
                    const Matrix pseudo = codine::pit(codine::output_marginals(spec), y);
                    codine::TrainConfig cfg = base_cfg;
                    cfg.seed = cell_seed;
                    const codine::CopulaModel model =
                        codine::train(pseudo, codine::parse_generator(flags.generator), cfg);
                    const codine::QcResult qc = codine::q_c(codine::density_of(model), spec,
                                                            n_mc, codine::derive_seed(cell_seed, 7));
                    qc_field = codine::format_double(qc.bits);
                } catch (const std::exception &e) {
                    std::cerr << "oracle-bench: cell (d=" << d << ", snr_db=" << s
                              << ", rho=" << r << ") failed: " << e.what() << "\n";
                }
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                out << d << "," << codine::format_double(s) << "," << codine::format_double(r)
                    << "," << flags.generator << ","
                    << (std::isnan(baseline) ? "nan" : codine::format_double(baseline)) << ","
                    << qc_field << "," << codine::format_double(secs) << "," << cell_seed
                    << "\n";
            }
    std::cout << "wrote " << output << "\n";
    return 0;
}

void add_train_flags(CLI::App *cmd, TrainFlags &flags) {
    cmd->add_option("--generator", flags.generator, "f-divergence generator: gan, kl or hd")
        ->check(CLI::IsMember({"gan", "kl", "hd"}));
    cmd->add_option("--epochs", flags.epochs, "training epochs")->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", flags.batch_size, "minibatch size (clamped to n)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--learning-rate", flags.learning_rate, "ascent step size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--hidden", flags.hidden, "hidden layer sizes, e.g. 64,64");
    cmd->add_option("--hidden-act", flags.hidden_act, "hidden activation: tanh or softplus")
        ->check(CLI::IsMember({"tanh", "softplus"}));
    cmd->add_option("--optimizer", flags.optimizer, "adam or sgd")
        ->check(CLI::IsMember({"adam", "sgd"}));
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"codine: neural copula density estimation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value config file");

    // fit
    auto *fit = app.add_subcommand("fit", "estimate a copula density from CSV observations");
    std::string fit_input, fit_model, fit_marginals, fit_curve;
    TrainFlags fit_flags;
    std::uint64_t fit_seed = 1;
    bool fit_verbose = false;
    fit->add_option("--input", fit_input, "input CSV (rows = observations)")->required();
    fit->add_option("--model", fit_model, "output model file")->required();
    fit->add_option("--marginals", fit_marginals, "output marginals file");
    fit->add_option("--curve", fit_curve, "output training-curve CSV");
    add_train_flags(fit, fit_flags);
    auto *fit_seed_opt = fit->add_option("--seed", fit_seed, "RNG seed");
    fit->add_flag("--verbose", fit_verbose, "stream per-epoch metrics to stderr");

    // diagnose
    auto *diag = app.add_subcommand("diagnose", "run self-consistency checks on a model");
    std::string diag_model, diag_data, diag_marginals, diag_oracle, diag_report;
    std::size_t diag_nmc = 100000;
    std::uint64_t diag_seed = 1;
    bool diag_strict = false;
    diag->add_option("--model", diag_model, "model file from fit")->required();
    diag->add_option("--data", diag_data, "observation CSV for moment checks");
    diag->add_option("--marginals", diag_marginals, "marginals file from fit");
    diag->add_option("--oracle", diag_oracle,
                     "ground-truth channel, e.g. d=2,rho=0.5,snr_db=0 (enables Q_c)");
    diag->add_option("--report", diag_report, "output JSON report path");
    diag->add_option("--n-mc", diag_nmc, "Monte Carlo draws per check")
        ->check(CLI::PositiveNumber);
    auto *diag_seed_opt = diag->add_option("--seed", diag_seed, "RNG seed");
    diag->add_flag("--strict", diag_strict, "exit 1 if any check fails");

    // mi
    auto *mi = app.add_subcommand("mi", "mutual information sweep over AWGN specs");
    std::string mi_snr = "0", mi_d = "1", mi_rho = "0", mi_gens = "kl",
                mi_methods = "direct-ratio", mi_output;
    std::size_t mi_n = 10000;
    TrainFlags mi_flags;
    std::uint64_t mi_seed = 1;
    mi->add_option("--snr-db", mi_snr, "comma-separated SNR values in dB");
    mi->add_option("--d", mi_d, "comma-separated dimensions");
    mi->add_option("--rho", mi_rho, "comma-separated noise correlations");
    mi->add_option("--generators", mi_gens, "comma-separated generators");
    mi->add_option("--methods", mi_methods, "three-copula and/or direct-ratio");
    mi->add_option("--n", mi_n, "samples per cell")->check(CLI::PositiveNumber);
    mi->add_option("--output", mi_output, "output CSV")->required();
    add_train_flags(mi, mi_flags);
    auto *mi_seed_opt = mi->add_option("--seed", mi_seed, "RNG seed");

    // generate
    auto *gen = app.add_subcommand("generate", "sample new observations from a fitted model");
    std::string gen_model, gen_marginals, gen_output;
    std::size_t gen_n = 1000;
    int gen_grid = 256, gen_burn = 500, gen_thin = 5, gen_chains = 1;
    std::uint64_t gen_seed = 1;
    gen->add_option("--model", gen_model, "model file from fit")->required();
    gen->add_option("--marginals", gen_marginals, "marginals file from fit")->required();
    gen->add_option("--n-out", gen_n, "rows to generate")->check(CLI::PositiveNumber);
    gen->add_option("--output", gen_output, "output CSV")->required();
    gen->add_option("--grid-size", gen_grid, "conditional grid cells")->check(CLI::PositiveNumber);
    gen->add_option("--burn-in", gen_burn, "burn-in sweeps")->check(CLI::NonNegativeNumber);
    gen->add_option("--thinning", gen_thin, "sweeps between kept states")
        ->check(CLI::PositiveNumber);
    gen->add_option("--chains", gen_chains, "independent chains")->check(CLI::PositiveNumber);
    auto *gen_seed_opt = gen->add_option("--seed", gen_seed, "RNG seed");

    // oracle-bench
    auto *bench = app.add_subcommand(
        "oracle-bench", "closed-form baseline vs trained model across channel specs");
    std::string bench_d = "2", bench_snr = "0", bench_rho = "0.5", bench_output;
    std::size_t bench_n = 10000, bench_nmc = 100000;
    TrainFlags bench_flags;
    bench_flags.generator = "gan";
    std::uint64_t bench_seed = 1;
    bench->add_option("--d", bench_d, "comma-separated dimensions");
    bench->add_option("--snr-db", bench_snr, "comma-separated SNR values in dB");
    bench->add_option("--rho", bench_rho, "comma-separated noise correlations");
    bench->add_option("--n", bench_n, "training samples per cell")->check(CLI::PositiveNumber);
    bench->add_option("--n-mc", bench_nmc, "Monte Carlo draws for Q_c")
        ->check(CLI::PositiveNumber);
    bench->add_option("--output", bench_output, "output CSV")->required();
    add_train_flags(bench, bench_flags);
    auto *bench_seed_opt = bench->add_option("--seed", bench_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit) {
            note_defaulted_seed(fit_seed_opt, fit_seed);
            return run_fit(fit_input, fit_model, fit_marginals, fit_curve, fit_flags, fit_seed,
                           fit_verbose);
        }
        if (*diag) {
            note_defaulted_seed(diag_seed_opt, diag_seed);
            return run_diagnose(diag_model, diag_data, diag_marginals, diag_oracle, diag_report,
                                diag_nmc, diag_seed, diag_strict);
        }
        if (*mi) {
            note_defaulted_seed(mi_seed_opt, mi_seed);
            return run_mi(parse_double_list(mi_snr), parse_int_list(mi_d),
                          parse_double_list(mi_rho), parse_string_list(mi_gens),
                          parse_string_list(mi_methods), mi_n, mi_flags, mi_output, mi_seed);
        }
        if (*gen) {
            note_defaulted_seed(gen_seed_opt, gen_seed);
            return run_generate(gen_model, gen_marginals, gen_n, gen_output, gen_grid, gen_burn,
                                gen_thin, gen_chains, gen_seed);
        }
        if (*bench) {
            note_defaulted_seed(bench_seed_opt, bench_seed);
            return run_oracle_bench(parse_int_list(bench_d), parse_double_list(bench_snr),
                                    parse_double_list(bench_rho), bench_n, bench_nmc,
                                    bench_flags, bench_output, bench_seed);
        }
    } catch (const codine::TrainingError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
