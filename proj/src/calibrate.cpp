#include "snncal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace snncal {

void CalibConfig::validate() const {
    if (rho < 1) throw CalibrationError("CalibConfig: rho must be >= 1");
    if (T < 1) throw CalibrationError("CalibConfig: T must be >= 1");
    if (epsilon_fraction <= 0.0 || epsilon_fraction >= 1.0) {
        throw CalibrationError("CalibConfig: epsilon_fraction must be in (0,1)");
    }
}

OffsetSign judge_sign(double phi, double v_final, double theta) {
    if (theta <= 0.0) throw CalibrationError("judge_sign: theta must be positive");
    if (phi > 0.0 && v_final < 0.0) return OffsetSign::Negative;
    if (phi < theta && v_final >= theta) return OffsetSign::Positive;
    return OffsetSign::ZeroOrUnknown;
}

ExactJudgment judge_exact(double phi, double v_final, double theta, double sum_I,
                          std::size_t T) {
    if (theta <= 0.0) throw CalibrationError("judge_exact: theta must be positive");
    const double half = theta / 2.0;
    if (sum_I >= -half && sum_I < theta * static_cast<double>(T) + half) {
        return {static_cast<long>(std::floor(v_final / theta)), true};
    }
    // Saturated activation: a = 0 below the grid, a = theta above it.
    const long count = std::lround(phi * static_cast<double>(T) / theta);
    const long designed = sum_I < -half ? 0 : static_cast<long>(T);
    return {designed - count, false};
}

double shift_down_distance(std::span<const double> v, std::span<const double> s, double theta,
                           double epsilon) {
    if (v.size() != s.size()) throw CalibrationError("shift_down_distance: length mismatch");
    if (epsilon <= 0.0 || epsilon >= theta) {
        throw CalibrationError("shift_down_distance: epsilon must be in (0, theta)");
    }
    double min_v = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (s[t] > 0.5) min_v = std::min(min_v, v[t]);
    }
    if (!std::isfinite(min_v)) {
        throw CalibrationError("cannot shift down: no spikes in window");
    }
    return std::max(theta, min_v + epsilon);
}

double shift_up_distance(std::span<const double> v, std::span<const double> s, double theta,
                         double epsilon) {
    if (v.size() != s.size()) throw CalibrationError("shift_up_distance: length mismatch");
    if (epsilon <= 0.0 || epsilon >= theta) {
        throw CalibrationError("shift_up_distance: epsilon must be in (0, theta)");
    }
    double max_v = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (s[t] < 0.5) max_v = std::max(max_v, v[t]);
    }
    if (!std::isfinite(max_v)) {
        throw CalibrationError("cannot shift up: all steps spiked");
    }
    return std::max(theta, theta + epsilon - max_v);
}

namespace {

// Scalar re-simulation of one neuron over the probing window; used between
// consecutive shifts in aggressive mode.
struct NeuronWindow {
    std::vector<double> v;
    std::vector<double> s;
    double v_final = 0.0;
    long count = 0;
};

NeuronWindow simulate_neuron(double v0, const InputCurrents& input, std::size_t i,
                             std::size_t rho, double theta) {
    NeuronWindow w;
    w.v.resize(rho);
    w.s.resize(rho);
    double v = v0;
    for (std::size_t t = 0; t < rho; ++t) {
        const double m = v + input.I(t, i);
        const double s = m >= theta ? 1.0 : 0.0;
        v = m - s * theta;
        w.v[t] = v;
        w.s[t] = s;
        w.count += s > 0.5 ? 1 : 0;
    }
    w.v_final = v;
    return w;
}

struct NeuronDecision {
    std::string judgment;
    std::string direction;  // "up", "down", "none", "skipped"
    double distance = 0.0;
    double new_v0 = 0.0;
    bool guard_failure = false;
};

// One shift attempt for a window already judged nonzero. Returns false when
// the window cannot move in the requested direction.
bool apply_shift(NeuronDecision& d, const NeuronWindow& w, bool down, double theta,
                 double epsilon) {
    try {
        const double dist = down ? shift_down_distance(w.v, w.s, theta, epsilon)
                                 : shift_up_distance(w.v, w.s, theta, epsilon);
        d.distance += dist;
        d.new_v0 += down ? -dist : dist;
        d.direction = down ? "down" : "up";
        return true;
    } catch (const CalibrationError&) {
        d.direction = "skipped";
        return false;
    }
}

}  // namespace

LayerCalibResult calibrate_layer(const LayerParams& layer, const InputCurrents& input,
                                 const CalibConfig& cfg, int L, std::size_t layer_index,
                                 std::vector<ShiftEvent>* log) {
    cfg.validate();
    layer.validate(layer_index);
    const std::size_t n = layer.out_dim();
    const std::size_t rho = cfg.rho;
    if (input.steps() < rho) {
        throw CalibrationError("layer " + std::to_string(layer_index) +
                               ": calibration input covers " + std::to_string(input.steps()) +
                               " steps, need rho = " + std::to_string(rho));
    }
    const double theta = layer.theta;
    const double epsilon = cfg.epsilon_fraction * theta;
    const bool exact = L > 0 && rho == static_cast<std::size_t>(L);

    // Per-neuron probing window inputs, reused every epoch (Algorithm 1 replays
    // the same data^l(t) for t = 1..rho in each epoch).
    InputCurrents window;
    window.I = Matrix(rho, n);
    Vec sum_I(n, 0.0);
    for (std::size_t t = 0; t < rho; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            window.I(t, i) = input.I(t, i);
            sum_I[i] += input.I(t, i);
        }
    }

    LayerCalibResult result;
    result.v0 = layer.v0;

    for (std::size_t epoch = 0; epoch < cfg.iterations; ++epoch) {
        std::vector<NeuronDecision> decisions(n);

#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            NeuronDecision& d = decisions[i];
            d.new_v0 = result.v0[i];
            NeuronWindow w = simulate_neuron(result.v0[i], window, i, rho, theta);
            const double phi = static_cast<double>(w.count) * theta / static_cast<double>(rho);

            // Residual rebased to the theta/2 starting point the theorems assume;
            // after earlier epochs shifted v0, the raw residual carries that offset.
            const double v_rebased = w.v_final - result.v0[i] + theta / 2.0;

            long k = 0;
            if (exact) {
                const ExactJudgment j = judge_exact(phi, v_rebased, theta, sum_I[i],
                                                    rho);
                k = j.k;
                d.judgment = (j.in_range ? "exact:" : "saturated:") + std::to_string(j.k);
            } else {
                const OffsetSign sign = judge_sign(phi, v_rebased, theta);
                d.guard_failure = true;
                switch (sign) {
                    case OffsetSign::Negative: k = -1; d.judgment = "negative"; break;
                    case OffsetSign::Positive: k = 1; d.judgment = "positive"; break;
                    case OffsetSign::ZeroOrUnknown: k = 0; d.judgment = "unknown"; break;
                }
            }

            if (k == 0) {
                d.direction = "none";
                continue;
            }
            const bool down = k < 0;
            const long shifts = cfg.aggressive ? std::labs(k) : 1;
            for (long applied = 0; applied < shifts; ++applied) {
                if (!apply_shift(d, w, down, theta, epsilon)) break;
                if (applied + 1 < shifts) {
                    w = simulate_neuron(d.new_v0, window, i, rho, theta);
                }
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            const NeuronDecision& d = decisions[i];
            result.v0[i] = d.new_v0;
            if (d.direction == "up") ++result.stats.shifted_up;
            else if (d.direction == "down") ++result.stats.shifted_down;
            else if (d.direction == "skipped") ++result.stats.skipped;
            else ++result.stats.untouched;
            if (d.guard_failure) ++result.stats.guard_failures;
            if (log && d.direction != "none") {
                log->push_back({layer_index, epoch, i, d.judgment, d.direction, d.distance});
            }
        }
    }
    return result;
}

NetworkRun run_network(const SnnNetwork& snn, const Vec& x, const CalibConfig& cfg,
                       bool keep_traces, std::vector<ShiftEvent>* log,
                       const std::vector<Vec>* v0_init) {
    cfg.validate();
    if (snn.layers.size() < 2) throw CalibrationError("run_network: need at least two layers");
    const std::size_t K = snn.spiking_layers();
    const bool calibrating = cfg.mode != CalibMode::None && cfg.iterations > 0;
    const std::size_t S = calibrating ? std::max(cfg.rho, cfg.T) : cfg.T;

    NetworkRun out;
    out.v0.resize(K);
    out.stats.resize(K);

    Matrix presyn = encode_input(x, S);
    double prev_theta = 0.0;  // layer 1 receives the analog input directly

    for (std::size_t l = 0; l < K; ++l) {
        const LayerParams& layer = snn.layers[l];
        InputCurrents currents =
            l == 0 ? project_currents(layer.weights, presyn, l)
                   : per_step_currents(layer.weights, presyn, prev_theta, l);

        Vec v0 = v0_init ? (*v0_init)[l] : layer.v0;

        if (cfg.mode == CalibMode::Shift && cfg.iterations > 0) {
            LayerParams scratch = layer;
            scratch.v0 = v0;
            LayerCalibResult calib = calibrate_layer(scratch, currents, cfg, snn.L, l, log);
            v0 = std::move(calib.v0);
            out.stats[l] = calib.stats;
        } else if (cfg.mode == CalibMode::Lightweight) {
            InputCurrents probe;
            probe.I = Matrix(cfg.rho, layer.out_dim());
            for (std::size_t t = 0; t < cfg.rho; ++t)
                for (std::size_t i = 0; i < layer.out_dim(); ++i)
                    probe.I(t, i) = currents.I(t, i);
            SpikeRun pre = run_layer_spikes(layer.theta, v0, probe, l);
            v0 = std::move(pre.v_final);
        }

        LayerTrace trace = run_layer(layer.theta, v0, currents, S, l);
        if (keep_traces) {
            // Kept traces cover the inference window only.
            LayerTrace kept;
            kept.theta = trace.theta;
            kept.v0 = trace.v0;
            kept.m = Matrix(cfg.T, trace.neurons());
            kept.v = Matrix(cfg.T, trace.neurons());
            kept.s = Matrix(cfg.T, trace.neurons());
            for (std::size_t t = 0; t < cfg.T; ++t) {
                for (std::size_t i = 0; i < trace.neurons(); ++i) {
                    kept.m(t, i) = trace.m(t, i);
                    kept.v(t, i) = trace.v(t, i);
                    kept.s(t, i) = trace.s(t, i);
                }
            }
            out.traces.push_back(std::move(kept));
        }
        out.v0[l] = std::move(v0);

        presyn = std::move(trace.s);
        prev_theta = layer.theta;
    }

    // Linear head: accumulate output current over the T inference steps.
    const LayerParams& head = snn.layers.back();
    Matrix spikes_T(cfg.T, presyn.cols());
    for (std::size_t t = 0; t < cfg.T; ++t)
        for (std::size_t i = 0; i < presyn.cols(); ++i) spikes_T(t, i) = presyn(t, i);
    InputCurrents head_in = per_step_currents(head.weights, spikes_T, prev_theta, K);
    out.output_current = Vec(head.out_dim(), 0.0);
    for (std::size_t t = 0; t < cfg.T; ++t)
        for (std::size_t o = 0; o < head.out_dim(); ++o)
            out.output_current[o] += head_in.I(t, o);
    for (double& c : out.output_current) c /= static_cast<double>(cfg.T);

    int best = 0;
    for (std::size_t o = 1; o < out.output_current.size(); ++o) {
        if (out.output_current[o] > out.output_current[best]) best = static_cast<int>(o);
    }
    out.predicted = best;

    long probing = 0;
    if (cfg.mode == CalibMode::Shift) probing = static_cast<long>(cfg.rho * cfg.iterations);
    else if (cfg.mode == CalibMode::Lightweight) probing = static_cast<long>(cfg.rho);
    out.total_steps = static_cast<long>(cfg.T) + probing;
    return out;
}

NetworkRun lightweight_calibrate(const SnnNetwork& snn, const Vec& x, std::size_t rho,
                                 std::size_t T, bool keep_traces) {
    CalibConfig cfg;
    cfg.rho = rho;
    cfg.T = T;
    cfg.mode = CalibMode::Lightweight;
    return run_network(snn, x, cfg, keep_traces);
}

}  // namespace snncal
