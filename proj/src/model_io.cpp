#include "codine/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace codine {

namespace {

using json = nlohmann::ordered_json;

json load_document(const std::string &path, const char *expected_format) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ModelFormatError("'" + path + "': not valid JSON: " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != expected_format)
        throw ModelFormatError("'" + path + "': expected format '" +
                               std::string(expected_format) + "'");
    if (j.value("version", 0) != 1)
        throw ModelFormatError("'" + path + "': unsupported version " +
                               std::to_string(j.value("version", 0)));
    return j;
}

void write_document(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) throw ModelFormatError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw ModelFormatError("write to '" + path + "' failed");
}

json meta_to_json(const std::map<std::string, std::string> &meta) {
    json m = json::object();
    for (const auto &[k, v] : meta) m[k] = v;
    return m;
}

}  // namespace

void save_model(const std::string &path, const CopulaModel &model,
                const std::map<std::string, std::string> &meta) {
    json j;
    j["format"] = "codine-model";
    j["version"] = 1;
    j["generator"] = to_string(model.generator);
    j["dim"] = model.dim;
    j["hidden_act"] = to_string(model.params.hidden_act);
    j["layer_sizes"] = model.params.layer_sizes;
    json weights = json::array();
    for (const auto &w : model.params.weights) weights.push_back(w.data());
    j["weights"] = std::move(weights);
    json biases = json::array();
    for (const auto &b : model.params.biases) biases.push_back(b);
    j["biases"] = std::move(biases);
    j["final_objective"] = model.final_objective;
    j["epochs_trained"] = model.epochs_trained;
    j["meta"] = meta_to_json(meta);
    write_document(path, j);
}

CopulaModel load_model(const std::string &path) {
    const json j = load_document(path, "codine-model");
    CopulaModel model;
    try {
        model.generator = parse_generator(j.at("generator").get<std::string>());
        model.dim = j.at("dim").get<std::size_t>();
        model.params.hidden_act = parse_hidden_act(j.at("hidden_act").get<std::string>());
        model.params.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
        model.final_objective = j.value("final_objective", 0.0);
        model.epochs_trained = j.value("epochs_trained", 0);

        const auto &sizes = model.params.layer_sizes;
        if (sizes.size() < 2 || sizes.back() != 1)
            throw ModelFormatError("'" + path + "': bad layer_sizes");
        const auto weights = j.at("weights");
        const auto biases = j.at("biases");
        if (weights.size() != sizes.size() - 1 || biases.size() != sizes.size() - 1)
            throw ModelFormatError("'" + path + "': layer count mismatch");
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            const auto rows = static_cast<std::size_t>(sizes[l + 1]);
            const auto cols = static_cast<std::size_t>(sizes[l]);
            const auto flat = weights[l].get<std::vector<double>>();
            if (flat.size() != rows * cols)
                throw ModelFormatError("'" + path + "': weight shape mismatch at layer " +
                                       std::to_string(l));
            Matrix w(rows, cols);
            w.data() = flat;
            model.params.weights.push_back(std::move(w));
            auto b = biases[l].get<std::vector<double>>();
            if (b.size() != rows)
                throw ModelFormatError("'" + path + "': bias shape mismatch at layer " +
                                       std::to_string(l));
            model.params.biases.push_back(std::move(b));
        }
        if (model.params.input_dim() != model.dim)
            throw ModelFormatError("'" + path + "': dim does not match the input layer");
    } catch (const json::exception &e) {
        throw ModelFormatError("'" + path + "': " + e.what());
    }
    return model;
}

void save_marginals(const std::string &path, const MarginalModel &model,
                    const std::map<std::string, std::string> &meta) {
    json j;
    j["format"] = "codine-marginals";
    j["version"] = 1;
    json dims = json::array();
    for (const auto &m : model.dims) {
        json e;
        switch (m.kind) {
            case MarginalKind::Empirical:
                e["kind"] = "empirical";
                e["values"] = m.values;
                e["levels"] = m.levels;
                break;
            case MarginalKind::Gaussian:
                e["kind"] = "gaussian";
                e["mu"] = m.mu;
                e["sigma"] = m.sigma;
                break;
            case MarginalKind::Identity: e["kind"] = "identity"; break;
        }
        dims.push_back(std::move(e));
    }
    j["dims"] = std::move(dims);
    j["meta"] = meta_to_json(meta);
    write_document(path, j);
}

MarginalModel load_marginals(const std::string &path) {
    const json j = load_document(path, "codine-marginals");
    MarginalModel model;
    try {
        for (const auto &e : j.at("dims")) {
            Marginal1D m;
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "empirical") {
                m.kind = MarginalKind::Empirical;
                m.values = e.at("values").get<std::vector<double>>();
                m.levels = e.at("levels").get<std::vector<double>>();
                if (m.values.empty() || m.values.size() != m.levels.size())
                    throw ModelFormatError("'" + path + "': bad empirical marginal");
            } else if (kind == "gaussian") {
                m.kind = MarginalKind::Gaussian;
                m.mu = e.at("mu").get<double>();
                m.sigma = e.at("sigma").get<double>();
            } else if (kind == "identity") {
                m.kind = MarginalKind::Identity;
            } else {
                throw ModelFormatError("'" + path + "': unknown marginal kind '" + kind + "'");
            }
            model.dims.push_back(std::move(m));
        }
    } catch (const json::exception &e) {
        throw ModelFormatError("'" + path + "': " + e.what());
    }
    return model;
}

}  // namespace codine
