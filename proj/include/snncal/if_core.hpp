#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "snncal/matrix.hpp"

namespace snncal {

/// Error raised by the simulation kernel; the message names the offending layer.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// One integrate-and-fire layer: synaptic weights, firing threshold and
/// per-neuron initial membrane potential.
struct LayerParams {
    Matrix weights;   // out_dim x in_dim
    double theta = 1.0;
    Vec v0;           // out_dim

    std::size_t out_dim() const { return weights.rows(); }
    std::size_t in_dim() const { return weights.cols(); }

    void validate(std::size_t layer_index) const;
};

/// Post-synaptic input currents I(t), one row per time-step.
struct InputCurrents {
    Matrix I;  // T x out_dim

    std::size_t steps() const { return I.rows(); }
    std::size_t neurons() const { return I.cols(); }
};

/// Full simulation record of one layer over a run window.
/// m(t) is the pre-reset accumulated potential v(t-1) + I(t),
/// v(t) the post-reset potential, s(t) the binary spike.
struct LayerTrace {
    Matrix m;  // T x out_dim
    Matrix v;  // T x out_dim
    Matrix s;  // T x out_dim, entries 0 or 1
    double theta = 1.0;
    Vec v0;

    std::size_t steps() const { return s.rows(); }
    std::size_t neurons() const { return s.cols(); }

    long spike_count(std::size_t i) const {
        long c = 0;
        for (std::size_t t = 0; t < steps(); ++t) c += s(t, i) > 0.5 ? 1 : 0;
        return c;
    }
};

/// Single IF step with reset-by-subtraction:
///   m = v_prev + I, s = [m >= theta], v = m - s*theta.
/// The threshold comparison is non-strict.
void if_step(std::span<const double> v_prev, std::span<const double> I_t, double theta,
             std::span<double> s_t, std::span<double> v_t, std::span<double> m_t);

/// Simulate T steps of one layer from params.v0, recording the full trace.
/// inputs.I must have exactly T rows of out_dim currents.
LayerTrace run_layer(const LayerParams& params, const InputCurrents& inputs, std::size_t T,
                     std::size_t layer_index = 0);

/// Same kernel with explicit theta/v0 (calibration re-runs a layer from
/// shifted initial potentials without touching the stored params).
LayerTrace run_layer(double theta, const Vec& v0, const InputCurrents& inputs, std::size_t T,
                     std::size_t layer_index = 0);

/// Streaming variant for pure inference: keeps only spikes and the final
/// potential, no m/v history.
struct SpikeRun {
    Matrix s;     // T x out_dim
    Vec v_final;  // out_dim
};
SpikeRun run_layer_spikes(double theta, const Vec& v0, const InputCurrents& inputs,
                          std::size_t layer_index = 0);

/// Average postsynaptic potential phi = (sum_t s(t)) * theta / T per neuron.
Vec average_psp(const LayerTrace& trace);

/// Charge-conservation residual phi*T - sum_t I(t) + (v(T) - v(0)) per neuron.
/// Should be zero up to accumulated rounding.
Vec conservation_residual(const LayerTrace& trace, const InputCurrents& inputs);

/// Project pre-synaptic activity through the weights: I(t) = W * presyn(t).
/// presyn is T x in_dim; result is T x out_dim.
InputCurrents project_currents(const Matrix& weights, const Matrix& presyn,
                               std::size_t layer_index = 0);

}  // namespace snncal
