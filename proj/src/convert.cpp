#include "snncal/convert.hpp"

namespace snncal {

SnnNetwork convert(const QcfsNetwork& net) {
    net.validate();
    SnnNetwork snn;
    snn.L = net.L;
    snn.seed = net.seed;
    snn.layers.reserve(net.layers.size());
    for (const QcfsLayer& src : net.layers) {
        LayerParams p;
        p.weights = src.weights;
        p.theta = src.lambda;
        p.v0 = Vec(src.out_dim(), src.lambda / 2.0);
        snn.layers.push_back(std::move(p));
    }
    return snn;
}

Matrix encode_input(const Vec& x, std::size_t T) {
    Matrix rows(T, x.size());
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < x.size(); ++i) rows(t, i) = x[i];
    }
    return rows;
}

InputCurrents per_step_currents(const Matrix& weights, const Matrix& spikes, double theta,
                                std::size_t layer_index) {
    Matrix scaled(spikes.rows(), spikes.cols());
    for (std::size_t t = 0; t < spikes.rows(); ++t) {
        for (std::size_t i = 0; i < spikes.cols(); ++i) scaled(t, i) = spikes(t, i) * theta;
    }
    return project_currents(weights, scaled, layer_index);
}

Vec rate_projected_current(const Matrix& weights, const Matrix& spikes, double theta) {
    const std::size_t T = spikes.rows();
    Vec rate(spikes.cols(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < spikes.cols(); ++i) rate[i] += spikes(t, i);
    }
    for (double& r : rate) r = r * theta / static_cast<double>(T);
    Vec out(weights.rows(), 0.0);
    for (std::size_t o = 0; o < weights.rows(); ++o) {
        const double* w = weights.row(o);
        double acc = 0.0;
        for (std::size_t k = 0; k < weights.cols(); ++k) acc += w[k] * rate[k];
        out[o] = acc;
    }
    return out;
}

}  // namespace snncal
