#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snncal/matrix.hpp"

namespace snncal {

struct Dataset {
    std::vector<Vec> inputs;
    std::vector<int> labels;
    int classes = 0;

    std::size_t size() const { return inputs.size(); }
    std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Gaussian class clusters in the plane, centers on a circle.
Dataset make_blobs(std::size_t per_class, int classes, double spread, std::uint64_t seed);

/// Classic XOR quadrants with additive noise.
Dataset make_xor(std::size_t n, double noise, std::uint64_t seed);

/// CSV ingestion hook: one row per sample, feature columns followed by an
/// integer label in the last column. No header.
Dataset load_csv(const std::string& path);

}  // namespace snncal
