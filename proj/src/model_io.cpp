#include "snncal/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace snncal {

namespace {

using nlohmann::json;

json open_and_parse(const std::string& path, const std::string& want_kind) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ModelFormatError(path + ": not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("format_version") || !j.contains("layers")) {
        throw ModelFormatError(path + ": missing format_version or layers");
    }
    if (j["format_version"].get<int>() != kModelFormatVersion) {
        throw ModelFormatError(path + ": unsupported format_version");
    }
    if (j.value("kind", "") != want_kind) {
        throw ModelFormatError(path + ": expected kind \"" + want_kind + "\"");
    }
    return j;
}

Matrix read_weights(const json& jl, const std::string& path, std::size_t index) {
    const auto rows = jl.at("rows").get<std::size_t>();
    const auto cols = jl.at("cols").get<std::size_t>();
    const auto& w = jl.at("weights");
    if (!w.is_array() || w.size() != rows * cols) {
        throw ModelFormatError(path + ": layer " + std::to_string(index) +
                               " weight count does not match rows*cols");
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = w[i].get<double>();
    return m;
}

void write_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelFormatError("cannot open for writing: " + path);
    out << j.dump(1) << '\n';
}

}  // namespace

void save_ann(const QcfsNetwork& net, const std::string& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "qcfs-ann";
    j["L"] = net.L;
    j["seed"] = net.seed;
    j["layers"] = json::array();
    for (const QcfsLayer& l : net.layers) {
        json jl;
        jl["rows"] = l.weights.rows();
        jl["cols"] = l.weights.cols();
        jl["weights"] = l.weights.data();
        jl["lambda"] = l.lambda;
        j["layers"].push_back(std::move(jl));
    }
    write_file(j, path);
}

QcfsNetwork load_ann(const std::string& path) {
    const json j = open_and_parse(path, "qcfs-ann");
    QcfsNetwork net;
    net.L = j.at("L").get<int>();
    net.seed = j.value("seed", 0ull);
    for (std::size_t i = 0; i < j["layers"].size(); ++i) {
        const json& jl = j["layers"][i];
        QcfsLayer layer;
        layer.weights = read_weights(jl, path, i);
        layer.lambda = jl.at("lambda").get<double>();
        layer.L = net.L;
        net.layers.push_back(std::move(layer));
    }
    try {
        net.validate();
    } catch (const std::invalid_argument& e) {
        throw ModelFormatError(path + ": " + e.what());
    }
    return net;
}

void save_snn(const SnnNetwork& net, const std::string& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "snn";
    j["L"] = net.L;
    j["seed"] = net.seed;
    j["layers"] = json::array();
    for (const LayerParams& l : net.layers) {
        json jl;
        jl["rows"] = l.weights.rows();
        jl["cols"] = l.weights.cols();
        jl["weights"] = l.weights.data();
        jl["theta"] = l.theta;
        jl["v0"] = l.v0;
        j["layers"].push_back(std::move(jl));
    }
    write_file(j, path);
}

SnnNetwork load_snn(const std::string& path) {
    const json j = open_and_parse(path, "snn");
    SnnNetwork net;
    net.L = j.at("L").get<int>();
    net.seed = j.value("seed", 0ull);
    for (std::size_t i = 0; i < j["layers"].size(); ++i) {
        const json& jl = j["layers"][i];
        LayerParams layer;
        layer.weights = read_weights(jl, path, i);
        layer.theta = jl.at("theta").get<double>();
        layer.v0 = jl.at("v0").get<Vec>();
        try {
            layer.validate(i);
        } catch (const SimulationError& e) {
            throw ModelFormatError(path + ": " + e.what());
        }
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw ModelFormatError(path + ": no layers");
    return net;
}

}  // namespace snncal
