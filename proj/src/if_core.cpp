#include "snncal/if_core.hpp"

#include <algorithm>
#include <cmath>

namespace snncal {

namespace {

void check_finite(std::span<const double> x, std::size_t layer_index, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw SimulationError("layer " + std::to_string(layer_index) +
                                  ": non-finite " + what);
        }
    }
}

}  // namespace

void LayerParams::validate(std::size_t layer_index) const {
    if (theta <= 0.0 || !std::isfinite(theta)) {
        throw SimulationError("layer " + std::to_string(layer_index) +
                              ": theta must be positive and finite");
    }
    if (v0.size() != weights.rows()) {
        throw SimulationError("layer " + std::to_string(layer_index) +
                              ": v0 length " + std::to_string(v0.size()) +
                              " != out_dim " + std::to_string(weights.rows()));
    }
    check_finite(weights.data(), layer_index, "weight");
    check_finite(v0, layer_index, "initial potential");
}

void if_step(std::span<const double> v_prev, std::span<const double> I_t, double theta,
             std::span<double> s_t, std::span<double> v_t, std::span<double> m_t) {
    if (v_prev.size() != I_t.size() || s_t.size() != v_prev.size() ||
        v_t.size() != v_prev.size() || m_t.size() != v_prev.size()) {
        throw SimulationError("if_step: dimension mismatch");
    }
    if (theta <= 0.0) throw SimulationError("if_step: theta must be positive");
    for (std::size_t i = 0; i < v_prev.size(); ++i) {
        if (!std::isfinite(I_t[i])) throw SimulationError("if_step: non-finite input current");
        const double m = v_prev[i] + I_t[i];
        const double s = m >= theta ? 1.0 : 0.0;
        m_t[i] = m;
        s_t[i] = s;
        v_t[i] = m - s * theta;
    }
}

LayerTrace run_layer(double theta, const Vec& v0, const InputCurrents& inputs, std::size_t T,
                     std::size_t layer_index) {
    const std::size_t n = v0.size();
    if (T < 1) throw SimulationError("layer " + std::to_string(layer_index) + ": T must be >= 1");
    if (inputs.steps() != T) {
        throw SimulationError("layer " + std::to_string(layer_index) + ": expected " +
                              std::to_string(T) + " input rows, got " +
                              std::to_string(inputs.steps()));
    }
    if (inputs.neurons() != n) {
        throw SimulationError("layer " + std::to_string(layer_index) + ": input width " +
                              std::to_string(inputs.neurons()) + " != neuron count " +
                              std::to_string(n));
    }
    if (theta <= 0.0) throw SimulationError("layer " + std::to_string(layer_index) + ": theta <= 0");
    check_finite(inputs.I.data(), layer_index, "input current");

    LayerTrace trace;
    trace.m = Matrix(T, n);
    trace.v = Matrix(T, n);
    trace.s = Matrix(T, n);
    trace.theta = theta;
    trace.v0 = v0;

    // Neurons are independent within a layer; each column is a serial time
    // recursion. Neurons are processed in contiguous blocks so every time
    // step touches sequential memory instead of column strides.
    constexpr std::size_t kBlock = 512;
    const long long blocks = static_cast<long long>((n + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        double vbuf[kBlock];
        for (std::size_t i = lo; i < hi; ++i) vbuf[i - lo] = v0[i];
        for (std::size_t t = 0; t < T; ++t) {
            const double* It = inputs.I.row(t);
            double* mt = trace.m.row(t);
            double* st = trace.s.row(t);
            double* vt = trace.v.row(t);
            for (std::size_t i = lo; i < hi; ++i) {
                const double m = vbuf[i - lo] + It[i];
                const double s = m >= theta ? 1.0 : 0.0;
                const double v = m - s * theta;
                vbuf[i - lo] = v;
                mt[i] = m;
                st[i] = s;
                vt[i] = v;
            }
        }
    }
    return trace;
}

LayerTrace run_layer(const LayerParams& params, const InputCurrents& inputs, std::size_t T,
                     std::size_t layer_index) {
    params.validate(layer_index);
    return run_layer(params.theta, params.v0, inputs, T, layer_index);
}

SpikeRun run_layer_spikes(double theta, const Vec& v0, const InputCurrents& inputs,
                          std::size_t layer_index) {
    const std::size_t n = v0.size();
    const std::size_t T = inputs.steps();
    if (T < 1) throw SimulationError("layer " + std::to_string(layer_index) + ": empty input");
    if (inputs.neurons() != n) {
        throw SimulationError("layer " + std::to_string(layer_index) + ": input width mismatch");
    }
    check_finite(inputs.I.data(), layer_index, "input current");

    SpikeRun run;
    run.s = Matrix(T, n);
    run.v_final = Vec(n);
    constexpr std::size_t kBlock = 512;
    const long long blocks = static_cast<long long>((n + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        double vbuf[kBlock];
        for (std::size_t i = lo; i < hi; ++i) vbuf[i - lo] = v0[i];
        for (std::size_t t = 0; t < T; ++t) {
            const double* It = inputs.I.row(t);
            double* st = run.s.row(t);
            for (std::size_t i = lo; i < hi; ++i) {
                const double m = vbuf[i - lo] + It[i];
                const double s = m >= theta ? 1.0 : 0.0;
                vbuf[i - lo] = m - s * theta;
                st[i] = s;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) run.v_final[i] = vbuf[i - lo];
    }
    return run;
}

Vec average_psp(const LayerTrace& trace) {
    const std::size_t T = trace.steps();
    const std::size_t n = trace.neurons();
    if (T == 0) throw SimulationError("average_psp: empty trace");
    Vec phi(n, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) phi[i] += trace.s(t, i);
    }
    for (std::size_t i = 0; i < n; ++i) phi[i] = phi[i] * trace.theta / static_cast<double>(T);
    return phi;
}

Vec conservation_residual(const LayerTrace& trace, const InputCurrents& inputs) {
    const std::size_t T = trace.steps();
    const std::size_t n = trace.neurons();
    if (inputs.steps() != T || inputs.neurons() != n) {
        throw SimulationError("conservation_residual: shape mismatch");
    }
    Vec phi = average_psp(trace);
    Vec res(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum_I = 0.0;
        for (std::size_t t = 0; t < T; ++t) sum_I += inputs.I(t, i);
        res[i] = phi[i] * static_cast<double>(T) - sum_I + (trace.v(T - 1, i) - trace.v0[i]);
    }
    return res;
}

InputCurrents project_currents(const Matrix& weights, const Matrix& presyn,
                               std::size_t layer_index) {
    if (presyn.cols() != weights.cols()) {
        throw SimulationError("layer " + std::to_string(layer_index) + ": presyn width " +
                              std::to_string(presyn.cols()) + " != in_dim " +
                              std::to_string(weights.cols()));
    }
    const std::size_t T = presyn.rows();
    const std::size_t out = weights.rows();
    const std::size_t in = weights.cols();
    InputCurrents currents;
    currents.I = Matrix(T, out);
#pragma omp parallel for collapse(2) schedule(static)
    for (long long t = 0; t < static_cast<long long>(T); ++t) {
        for (long long o = 0; o < static_cast<long long>(out); ++o) {
            const double* w = weights.row(static_cast<std::size_t>(o));
            const double* x = presyn.row(static_cast<std::size_t>(t));
            double acc = 0.0;
            for (std::size_t k = 0; k < in; ++k) acc += w[k] * x[k];
            currents.I(static_cast<std::size_t>(t), static_cast<std::size_t>(o)) = acc;
        }
    }
    return currents;
}

}  // namespace snncal
