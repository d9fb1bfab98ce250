#pragma once

#include <stdexcept>
#include <string>

#include "snncal/convert.hpp"
#include "snncal/qcfs.hpp"

namespace snncal {

class ModelFormatError : public std::runtime_error {
public:
    explicit ModelFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model files. Weights are serialized with full round-trip
/// precision: load(save(net)) reproduces bit-identical forward outputs.
void save_ann(const QcfsNetwork& net, const std::string& path);
QcfsNetwork load_ann(const std::string& path);

void save_snn(const SnnNetwork& net, const std::string& path);
SnnNetwork load_snn(const std::string& path);

}  // namespace snncal
