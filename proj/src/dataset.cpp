#include "snncal/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace snncal {

Dataset make_blobs(std::size_t per_class, int classes, double spread, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    Dataset ds;
    ds.classes = classes;
    for (int c = 0; c < classes; ++c) {
        const double angle = 2.0 * std::numbers::pi * c / classes;
        const double cx = std::cos(angle);
        const double cy = std::sin(angle);
        for (std::size_t i = 0; i < per_class; ++i) {
            ds.inputs.push_back({cx + noise(rng), cy + noise(rng)});
            ds.labels.push_back(c);
        }
    }
    return ds;
}

Dataset make_xor(std::size_t n, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> bit(0, 1);
    std::normal_distribution<double> jitter(0.0, noise);
    Dataset ds;
    ds.classes = 2;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = bit(rng);
        const int b = bit(rng);
        ds.inputs.push_back({static_cast<double>(a) + jitter(rng),
                             static_cast<double>(b) + jitter(rng)});
        ds.labels.push_back(a ^ b);
    }
    return ds;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    Dataset ds;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() < 2) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     " needs at least one feature and a label");
        }
        const int label = static_cast<int>(values.back());
        values.pop_back();
        if (!ds.inputs.empty() && values.size() != ds.dim()) {
            throw std::runtime_error(path + ": inconsistent feature count at row " +
                                     std::to_string(row));
        }
        ds.inputs.push_back(std::move(values));
        ds.labels.push_back(label);
        ds.classes = std::max(ds.classes, label + 1);
    }
    if (ds.inputs.empty()) throw std::runtime_error(path + ": empty dataset");
    return ds;
}

}  // namespace snncal
