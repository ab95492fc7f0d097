// Exercises the codine binary end to end: exit codes, file outputs and
// byte-level determinism. Invoked with the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "codine/csv.hpp"
#include "codine/model_io.hpp"
#include "codine/oracle.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string &what) {
    if (ok) {
        std::cout << "[PASS] " << what << "\n";
    } else {
        std::cout << "[FAIL] " << what << "\n";
        ++g_failures;
    }
}

int run(const std::string &cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char **argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_integration <codine-binary>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path dir = fs::temp_directory_path() / "codine_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto at = [&](const std::string &name) { return (dir / name).string(); };

    // Input data: the bundled spiral plus a couple of malformed files.
    const codine::Matrix spiral = codine::spiral_toy(1500, 0.1, 77);
    codine::write_csv(at("spiral.csv"), {"x1", "x2"}, spiral);
    {
        std::ofstream ragged(at("ragged.csv"));
        ragged << "1,2\n3\n";
        std::ofstream text(at("text.csv"));
        text << "1,2\nfoo,bar\n";
    }

    const auto fit_cmd = [&](const std::string &model, int seed) {
        return bin + " fit --input " + at("spiral.csv") +
               " --epochs 30 --batch-size 256 --seed " + std::to_string(seed) + " --model " +
               model;
    };

    check(run(fit_cmd(at("m1.json"), 9)) == 0, "fit exits 0 on the spiral data");
    check(fs::exists(at("m1.json")), "fit writes the model file");
    check(fs::exists(at("m1.json.marginals.json")), "fit writes the marginals file");
    check(fs::exists(at("m1.json.curve.csv")), "fit writes the training curve");
    {
        const auto model = codine::load_model(at("m1.json"));
        check(std::isfinite(model.final_objective), "final objective is finite");
        const auto curve = codine::read_csv(at("m1.json.curve.csv"));
        check(curve.data.rows() == 30, "curve has one row per epoch");
    }

    check(run(fit_common + at("m2.json")) == 0, "fit reruns with the same seed");
    check(slurp(at("m1.json")) == slurp(at("m2.json")),
          "identical seeds give byte-identical model files");
    check(run(fit_common + at("m3.json") + " --seed 10") == 0, "fit runs with another seed");
    check(slurp(at("m1.json")) != slurp(at("m3.json")), "different seeds give different models");

    check(run(bin + " fit --input " + at("ragged.csv") + " --model " + at("x.json")) == 2,
          "ragged csv exits 2");
    check(run(bin + " fit --input " + at("text.csv") + " --model " + at("x.json")) == 2,
          "non-numeric csv exits 2");
    check(run(bin + " fit --input " + at("spiral.csv") + " --model " + at("x.json") +
              " --generator bogus") == 2,
          "unknown generator exits 2");
    check(run(bin + " fit --model " + at("x.json")) == 2, "missing required flag exits 2");

    // diagnose
    check(run(bin + " diagnose --model " + at("m1.json") + " --data " + at("spiral.csv") +
              " --marginals " + at("m1.json.marginals.json") + " --report " + at("report.json") +
              " --n-mc 20000 --seed 3") == 0,
          "diagnose exits 0");
    check(fs::exists(at("report.json")), "diagnose writes the report");
    check(run(bin + " diagnose --model " + at("missing.json")) == 2,
          "missing model path exits 2");

    // oracle-backed diagnose on a model of matching dimension
    check(run(bin + " diagnose --model " + at("m1.json") +
              " --oracle d=2,rho=0.5,snr_db=0 --n-mc 5000 --seed 3 --report " +
              at("report_qc.json")) == 0,
          "diagnose with oracle exits 0");
    check(slurp(at("report_qc.json")).find("q_c") != std::string::npos,
          "oracle diagnose reports Q_c");

    // generate
    const std::string gen_cmd = bin + " generate --model " + at("m1.json") + " --marginals " +
                                at("m1.json.marginals.json") +
                                " --burn-in 50 --thinning 2 --grid-size 64 --seed 5 ";
    check(run(gen_cmd + "--n-out 1 --output " + at("one.csv")) == 0, "generate a single row");
    check(codine::read_csv(at("one.csv")).data.rows() == 1, "single-row output has one row");
    check(run(gen_cmd + "--n-out 64 --output " + at("gen1.csv")) == 0, "generate 64 rows");
    check(run(gen_cmd + "--n-out 64 --output " + at("gen2.csv")) == 0, "generate again");
    check(slurp(at("gen1.csv")) == slurp(at("gen2.csv")),
          "generation is byte-deterministic per seed");
    check(codine::read_csv(at("gen1.csv")).header.size() == 2,
          "generated csv has column names");
    check(run(bin + " generate --model " + at("m1.json") + " --marginals " +
              at("missing.json") + " --n-out 2 --output " + at("g.csv")) == 2,
          "missing marginals exits 2");

    // mi
    const std::string mi_cmd = bin + " mi --snr-db 0 --d 1 --n 400 --epochs 10 --seed 4" +
                               " --methods direct-ratio --generators kl --output ";
    check(run(mi_cmd + at("mi1.csv")) == 0, "mi sweep exits 0");
    check(run(mi_cmd + at("mi2.csv")) == 0, "mi sweep reruns");
    check(slurp(at("mi1.csv")) == slurp(at("mi2.csv")), "mi sweep is byte-deterministic");
    {
        const auto mi_table = slurp(at("mi1.csv"));
        check(mi_table.find("snr_db,d,rho,generator,method,mi_bits,truth_bits,stderr,seed") !=
                  std::string::npos,
              "mi csv has the documented columns");
    }
    check(run(bin + " mi --snr-db 0 --d 1 --generators '' --n 400 --output " + at("bad.csv")) ==
              2,
          "empty generator list exits 2");

    // oracle-bench: rho=0 baseline column is exactly zero
    check(run(bin + " oracle-bench --d 2 --snr-db 0 --rho 0 --n 400 --n-mc 2000" +
              " --epochs 5 --seed 6 --output " + at("bench.csv")) == 0,
          "oracle-bench exits 0");
    {
        // Data rows carry string columns, so scan the text directly:
        // d,snr_db,rho,generator,baseline_bits,...
        const auto bench = slurp(at("bench.csv"));
        check(bench.find("\n2,0,0,gan,0,") != std::string::npos,
              "rho=0 cell has exactly zero baseline");
    }

    std::cout << (g_failures == 0 ? "cli integration: all checks passed\n"
                                  : "cli integration: FAILURES\n");
    return g_failures == 0 ? 0 : 1;
}
