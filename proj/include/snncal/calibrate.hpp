#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snncal/convert.hpp"
#include "snncal/if_core.hpp"

namespace snncal {

class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class OffsetSign { Negative, ZeroOrUnknown, Positive };

enum class CalibMode { None, Shift, Lightweight };

struct CalibConfig {
    std::size_t rho = 1;         // first-stage probing steps
    std::size_t T = 1;           // inference steps
    std::size_t iterations = 1;  // shift epochs (ItNum)
    double epsilon_fraction = 0.5;  // epsilon as a fraction of theta, in (0,1)
    CalibMode mode = CalibMode::Shift;
    bool aggressive = false;  // apply |k| shifts within one epoch, re-simulating between
    bool persist = false;     // keep calibrated v0 across samples (experimental)

    void validate() const;
};

/// Sign of the offset spike inferred from the residual membrane potential.
/// Negative: the neuron over-fired (phi > 0 and v_final < 0).
/// Positive: the neuron under-fired (phi < theta and v_final >= theta).
/// Both conditions are sufficient only; anything else is ZeroOrUnknown.
OffsetSign judge_sign(double phi, double v_final, double theta);

struct ExactJudgment {
    long k = 0;           // inferred offset spike
    bool in_range = true;  // total input current fell in the exact-inference interval
};

/// Exact offset inference. With total input current in [-theta/2, theta*T + theta/2)
/// the offset is floor(v_final/theta); outside, the quantized activation saturates
/// at 0 or theta and the offset follows directly from the observed rate.
/// Valid under the conversion preconditions (L = T, lambda = theta, v(0) = theta/2,
/// matched layer inputs); v_final must be measured relative to that baseline.
ExactJudgment judge_exact(double phi, double v_final, double theta, double sum_I,
                          std::size_t T);

/// Optimal downward shift of v(0) removing exactly one spike from the window:
/// max(theta, min{v(t) | s(t)=1} + epsilon). v is the POST-reset potential.
/// Requires at least one spike in the window and epsilon in (0, theta).
double shift_down_distance(std::span<const double> v, std::span<const double> s, double theta,
                           double epsilon);

/// Optimal upward shift adding exactly one spike:
/// max(theta, theta + epsilon - max{v(t) | s(t)=0}).
/// Requires at least one silent step in the window.
double shift_up_distance(std::span<const double> v, std::span<const double> s, double theta,
                         double epsilon);

struct ShiftEvent {
    std::size_t layer = 0;
    std::size_t epoch = 0;
    std::size_t neuron = 0;
    std::string judgment;   // "exact:k", "saturated:k", "negative", "positive", "unknown"
    std::string direction;  // "up", "down", "none", "skipped"
    double distance = 0.0;
};

struct LayerCalibStats {
    long shifted_up = 0;
    long shifted_down = 0;
    long untouched = 0;
    long guard_failures = 0;  // Theorem 3 interval missed, sign fallback used
    long skipped = 0;         // judged direction impossible for the window
};

struct LayerCalibResult {
    Vec v0;
    LayerCalibStats stats;
};

/// Two-stage per-layer calibration: for each epoch, simulate rho steps from the
/// current v0 keeping the full trace, judge each neuron, and shift the judged
/// ones by the optimal distance. input must provide at least cfg.rho rows.
/// L is the source quantization step; exact judging applies when rho == L,
/// otherwise only the sign rule is used.
LayerCalibResult calibrate_layer(const LayerParams& layer, const InputCurrents& input,
                                 const CalibConfig& cfg, int L, std::size_t layer_index = 0,
                                 std::vector<ShiftEvent>* log = nullptr);

struct NetworkRun {
    Vec output_current;            // output-head current accumulated over T, divided by T
    int predicted = 0;             // argmax class, ties to lowest index
    std::vector<Vec> v0;           // final per-layer initial potentials (spiking layers)
    std::vector<LayerTrace> traces;  // per spiking layer over the inference window
    std::vector<LayerCalibStats> stats;
    long total_steps = 0;          // T plus probing cost, the fairness accounting
};

/// Full per-sample pipeline: layers strictly in order, each calibrated against
/// the realized spiking input of the already-calibrated previous layer, then
/// run for the inference window that feeds the next layer.
/// v0_init, when given, overrides the stored baseline potentials (persist mode).
NetworkRun run_network(const SnnNetwork& snn, const Vec& x, const CalibConfig& cfg,
                       bool keep_traces = false, std::vector<ShiftEvent>* log = nullptr,
                       const std::vector<Vec>* v0_init = nullptr);

/// Appendix-style lightweight scheme: v(0) <- v(rho) from a probing pre-run,
/// no shift computation.
NetworkRun lightweight_calibrate(const SnnNetwork& snn, const Vec& x, std::size_t rho,
                                 std::size_t T, bool keep_traces = false);

}  // namespace snncal
