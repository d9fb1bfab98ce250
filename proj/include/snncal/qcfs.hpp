#pragma once

#include <cstdint>
#include <vector>

#include "snncal/matrix.hpp"

namespace snncal {

/// One ANN layer with quantization clip-floor-shift activation:
/// a = (lambda/L) * clip(floor(z*L/lambda + 1/2), 0, L).
struct QcfsLayer {
    Matrix weights;       // out_dim x in_dim, no bias
    double lambda = 1.0;  // trainable threshold, > 0
    int L = 1;            // quantization step, >= 1

    std::size_t out_dim() const { return weights.rows(); }
    std::size_t in_dim() const { return weights.cols(); }
};

/// Layered QCFS network. Every layer applies the QCFS activation except the
/// last, which is a plain linear classifier head.
struct QcfsNetwork {
    std::vector<QcfsLayer> layers;
    int L = 1;
    std::uint64_t seed = 0;  // dataset seed recorded for reproducible runs

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.back().out_dim(); }
    /// Number of layers with QCFS activation (all but the linear head).
    std::size_t spiking_layers() const { return layers.size() - 1; }

    void validate() const;
};

double qcfs_activation(double z, double lambda, int L);
Vec qcfs_activation(const Vec& z, double lambda, int L);

struct AnnForward {
    std::vector<Vec> activations;  // a^l per layer; last entry = logits
    Vec logits;
};

/// Forward pass keeping every intermediate activation (diagnostics need them).
AnnForward ann_forward(const QcfsNetwork& net, const Vec& x);

/// Argmax with ties broken by lowest class index.
int argmax_class(const Vec& logits);

}  // namespace snncal
