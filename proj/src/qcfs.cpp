#include "snncal/qcfs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snncal {

void QcfsNetwork::validate() const {
    if (layers.empty()) throw std::invalid_argument("QcfsNetwork: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].lambda <= 0.0) {
            throw std::invalid_argument("QcfsNetwork: layer " + std::to_string(l) +
                                        " lambda <= 0");
        }
        if (layers[l].L < 1) {
            throw std::invalid_argument("QcfsNetwork: layer " + std::to_string(l) + " L < 1");
        }
        if (l > 0 && layers[l].in_dim() != layers[l - 1].out_dim()) {
            throw std::invalid_argument("QcfsNetwork: layer " + std::to_string(l) +
                                        " input dim does not match previous layer");
        }
    }
}

double qcfs_activation(double z, double lambda, int L) {
    const double q = std::floor(z * static_cast<double>(L) / lambda + 0.5);
    const double k = std::clamp(q, 0.0, static_cast<double>(L));
    return lambda / static_cast<double>(L) * k;
}

Vec qcfs_activation(const Vec& z, double lambda, int L) {
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = qcfs_activation(z[i], lambda, L);
    return out;
}

static Vec matvec(const Matrix& W, const Vec& x, std::size_t layer) {
    if (x.size() != W.cols()) {
        throw std::invalid_argument("ann_forward: layer " + std::to_string(layer) +
                                    " expects input of size " + std::to_string(W.cols()) +
                                    ", got " + std::to_string(x.size()));
    }
    Vec y(W.rows(), 0.0);
    for (std::size_t o = 0; o < W.rows(); ++o) {
        const double* w = W.row(o);
        double acc = 0.0;
        for (std::size_t k = 0; k < W.cols(); ++k) acc += w[k] * x[k];
        y[o] = acc;
    }
    return y;
}

AnnForward ann_forward(const QcfsNetwork& net, const Vec& x) {
    AnnForward fwd;
    Vec a = x;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const QcfsLayer& layer = net.layers[l];
        Vec z = matvec(layer.weights, a, l);
        if (l + 1 < net.layers.size()) {
            a = qcfs_activation(z, layer.lambda, layer.L);
        } else {
            a = std::move(z);  // linear head
        }
        fwd.activations.push_back(a);
    }
    fwd.logits = fwd.activations.back();
    return fwd;
}

int argmax_class(const Vec& logits) {
    int best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = static_cast<int>(i);
    }
    return best;
}

}  // namespace snncal
