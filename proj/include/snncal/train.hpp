#pragma once

#include <cstdint>
#include <vector>

#include "snncal/dataset.hpp"
#include "snncal/qcfs.hpp"

namespace snncal {

/// Fresh MLP with the given hidden widths, QCFS activations and a linear
/// classifier head. lambda starts at 1.0 in every layer.
QcfsNetwork make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                     int classes, int L, std::uint64_t seed);

struct TrainResult {
    double accuracy = 0.0;  // final training accuracy
    double loss = 0.0;
};

/// Minimal straight-through-estimator trainer: softmax cross-entropy,
/// minibatch SGD, lambda trained jointly. The QCFS gradient passes through
/// inside [0, lambda] and is zero outside. Throws on non-finite loss.
TrainResult train_toy(QcfsNetwork& net, const Dataset& data, std::size_t epochs, double lr);

double evaluate_ann(const QcfsNetwork& net, const Dataset& data);

/// Mean cross-entropy loss over the dataset.
double dataset_loss(const QcfsNetwork& net, const Dataset& data);

struct GradEval {
    double loss = 0.0;              // mean loss
    std::vector<Matrix> dW;         // per layer, mean gradient
    Vec dLambda;                    // per layer
};

/// STE gradient of the mean loss, as used by the trainer.
GradEval ste_gradient(const QcfsNetwork& net, const Dataset& data);

}  // namespace snncal
