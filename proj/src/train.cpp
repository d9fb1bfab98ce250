#include "snncal/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>

namespace snncal {

QcfsNetwork make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                     int classes, int L, std::uint64_t seed) {
    QcfsNetwork net;
    net.L = L;
    net.seed = seed;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::size_t in = input_dim;
    std::vector<std::size_t> dims = hidden;
    dims.push_back(static_cast<std::size_t>(classes));
    for (std::size_t out : dims) {
        QcfsLayer layer;
        layer.weights = Matrix(out, in);
        layer.lambda = 1.0;
        layer.L = L;
        const double bound = std::sqrt(6.0 / static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : layer.weights.data()) w = dist(rng);
        net.layers.push_back(std::move(layer));
        in = out;
    }
    return net;
}

namespace {

struct Cache {
    std::vector<Vec> z;  // pre-activations per layer
    std::vector<Vec> a;  // post-activations per layer (last = logits)
};

Cache forward_cached(const QcfsNetwork& net, const Vec& x) {
    Cache c;
    Vec a = x;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const QcfsLayer& layer = net.layers[l];
        Vec z(layer.out_dim(), 0.0);
        for (std::size_t o = 0; o < layer.out_dim(); ++o) {
            const double* w = layer.weights.row(o);
            double acc = 0.0;
            for (std::size_t k = 0; k < layer.in_dim(); ++k) acc += w[k] * a[k];
            z[o] = acc;
        }
        c.z.push_back(z);
        a = l + 1 < net.layers.size() ? qcfs_activation(z, layer.lambda, layer.L)
                                      : std::move(z);
        c.a.push_back(a);
    }
    return c;
}

double softmax_ce(const Vec& logits, int label, Vec& grad) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    grad.assign(logits.size(), 0.0);
    for (std::size_t i = 0; i < logits.size(); ++i) denom += std::exp(logits[i] - mx);
    const double logp = logits[static_cast<std::size_t>(label)] - mx - std::log(denom);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        grad[i] = std::exp(logits[i] - mx) / denom;
    }
    grad[static_cast<std::size_t>(label)] -= 1.0;
    return -logp;
}

// Accumulated STE gradient over a batch of sample indices, normalized by
// the batch size.
GradEval batch_gradient(const QcfsNetwork& net, const Dataset& data,
                        std::span<const std::size_t> batch) {
    const std::size_t n_layers = net.layers.size();
    GradEval g;
    g.dW.resize(n_layers);
    g.dLambda.assign(n_layers, 0.0);
    for (std::size_t l = 0; l < n_layers; ++l) {
        g.dW[l] = Matrix(net.layers[l].out_dim(), net.layers[l].in_dim());
    }

    for (std::size_t si : batch) {
        const Vec& x = data.inputs[si];
        Cache c = forward_cached(net, x);
        Vec delta;
        g.loss += softmax_ce(c.a.back(), data.labels[si], delta);

        for (std::size_t li = n_layers; li-- > 0;) {
            const QcfsLayer& layer = net.layers[li];
            const Vec& input = li == 0 ? x : c.a[li - 1];
            if (li + 1 < n_layers) {
                // Straight-through estimator: pass inside [0, lambda], zero
                // outside; saturation above lambda feeds the lambda gradient.
                for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                    const double z = c.z[li][o];
                    if (z > layer.lambda) {
                        g.dLambda[li] += delta[o];
                        delta[o] = 0.0;
                    } else if (z < 0.0) {
                        delta[o] = 0.0;
                    }
                }
            }
            for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                if (delta[o] == 0.0) continue;
                double* dw = g.dW[li].row(o);
                for (std::size_t k = 0; k < layer.in_dim(); ++k) dw[k] += delta[o] * input[k];
            }
            if (li > 0) {
                Vec prev(layer.in_dim(), 0.0);
                for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                    if (delta[o] == 0.0) continue;
                    const double* w = layer.weights.row(o);
                    for (std::size_t k = 0; k < layer.in_dim(); ++k) prev[k] += w[k] * delta[o];
                }
                delta = std::move(prev);
            }
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    g.loss *= inv;
    for (auto& m : g.dW)
        for (double& x : m.data()) x *= inv;
    for (double& x : g.dLambda) x *= inv;
    return g;
}

}  // namespace

TrainResult train_toy(QcfsNetwork& net, const Dataset& data, std::size_t epochs, double lr) {
    net.validate();
    if (data.size() == 0) throw std::invalid_argument("train_toy: empty dataset");
    for (int label : data.labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= net.output_dim()) {
            throw std::invalid_argument("train_toy: label out of range");
        }
    }

    const double lr_lambda = lr * 0.1;
    std::mt19937_64 rng(net.seed ^ 0xdeadbeefcafef00dull);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    constexpr std::size_t kBatch = 16;

    double last_loss = 0.0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < data.size(); start += kBatch) {
            const std::size_t end = std::min(start + kBatch, data.size());
            GradEval g = batch_gradient(net, data,
                                        std::span(order).subspan(start, end - start));
            epoch_loss += g.loss;
            ++batches;
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                auto& W = net.layers[l].weights.data();
                const auto& G = g.dW[l].data();
                for (std::size_t i = 0; i < W.size(); ++i) W[i] -= lr * G[i];
                if (l + 1 < net.layers.size()) {
                    net.layers[l].lambda -= lr_lambda * g.dLambda[l];
                    net.layers[l].lambda = std::max(net.layers[l].lambda, 1e-3);
                }
            }
        }
        last_loss = epoch_loss / static_cast<double>(batches);
        if (!std::isfinite(last_loss)) {
            throw std::runtime_error("train_toy: loss diverged at epoch " +
                                     std::to_string(epoch));
        }
    }

    TrainResult result;
    result.loss = last_loss;
    result.accuracy = evaluate_ann(net, data);
    return result;
}

double evaluate_ann(const QcfsNetwork& net, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const AnnForward fwd = ann_forward(net, data.inputs[i]);
        if (argmax_class(fwd.logits) == data.labels[i]) ++correct;
    }
    return data.size() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
}

double dataset_loss(const QcfsNetwork& net, const Dataset& data) {
    double loss = 0.0;
    Vec scratch;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const AnnForward fwd = ann_forward(net, data.inputs[i]);
        loss += softmax_ce(fwd.logits, data.labels[i], scratch);
    }
    return loss / static_cast<double>(data.size());
}

GradEval ste_gradient(const QcfsNetwork& net, const Dataset& data) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    return batch_gradient(net, data, all);
}

}  // namespace snncal
