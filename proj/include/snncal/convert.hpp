#pragma once

#include <cstdint>
#include <vector>

#include "snncal/if_core.hpp"
#include "snncal/qcfs.hpp"

namespace snncal {

/// Converted spiking network: weights copied from the source QCFS ANN,
/// theta^l = lambda^l, baseline v(0) = theta^l / 2 per neuron.
struct SnnNetwork {
    std::vector<LayerParams> layers;  // last layer is the linear head (theta unused)
    int L = 1;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.back().out_dim(); }
    std::size_t spiking_layers() const { return layers.size() - 1; }
};

SnnNetwork convert(const QcfsNetwork& net);

/// Constant-current presentation of an analog input: x replicated across T rows.
Matrix encode_input(const Vec& x, std::size_t T);

/// Next-layer drive from a spike train, per step: I(t) = W * (s(t) * theta).
/// This is the path the SNN actually computes, summing W s(t) over time.
InputCurrents per_step_currents(const Matrix& weights, const Matrix& spikes, double theta,
                                std::size_t layer_index = 0);

/// The algebraically equivalent route W * (sum_t s(t) * theta / T). The two
/// differ by floating-point rounding only; keeping both exposes that gap.
Vec rate_projected_current(const Matrix& weights, const Matrix& spikes, double theta);

}  // namespace snncal
