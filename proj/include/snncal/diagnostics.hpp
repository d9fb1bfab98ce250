#pragma once

#include <map>
#include <string>
#include <vector>

#include "snncal/calibrate.hpp"
#include "snncal/convert.hpp"
#include "snncal/qcfs.hpp"

namespace snncal {

class DiagnosticsError : public std::runtime_error {
public:
    explicit DiagnosticsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Offset spike psi = a*T/theta - sum_t s(t), per neuron (Definition 1).
/// a must lie on the quantization grid {k*theta/L}; with T = L the designed
/// count a*T/theta is integral up to float noise, guarded by a 1e-6 tolerance.
std::vector<long> offset_spike(const Vec& a, const LayerTrace& trace, std::size_t T);

/// Histogram plus the paper's Ratio / MSE summary for one layer,
/// aggregated over samples.
struct OffsetReport {
    std::map<long, long> histogram;  // psi value -> count
    double ratio = 0.0;              // fraction of neurons with psi = 0
    double mse = 0.0;                // ||psi||^2 normalized per neuron
    std::string mode = "free";       // "free" or "constrained"

    long total() const;
    /// Fraction of probability mass at |psi| >= threshold.
    double mass_at_least(long abs_psi) const;
    void add(const std::vector<long>& psi);
    void finalize();
};

/// Per-layer offset-spike distribution over a set of samples.
/// Free mode feeds each network its own propagated activations. Constrained
/// mode replaces the ANN's layer-l input by the SNN's realized phi^{l-1}(T),
/// isolating single-layer conversion error.
std::vector<OffsetReport> layer_distribution(const QcfsNetwork& ann, const SnnNetwork& snn,
                                             const std::vector<Vec>& samples,
                                             const CalibConfig& cfg, bool constrained);

struct SweepRow {
    std::size_t iterations = 0;
    double ratio = 0.0;
    double mse = 0.0;
};

/// Output-layer ratio and MSE as a function of the shift iteration count.
std::vector<SweepRow> ratio_mse_sweep(const QcfsNetwork& ann, const SnnNetwork& snn,
                                      const std::vector<Vec>& samples, CalibConfig cfg,
                                      const std::vector<std::size_t>& iteration_counts);

/// Matched-input harness: every SNN layer is driven by a constant current
/// built from the ANN's own activation of the previous layer, calibrated with
/// as many epochs as the largest initial |psi| in that layer, then re-run.
/// Returns the output-layer report under those exact-arithmetic conditions.
OffsetReport matched_input_report(const QcfsNetwork& ann, const SnnNetwork& snn,
                                  const std::vector<Vec>& samples, CalibConfig cfg);

/// CSV emitters. Column order is fixed:
///   distribution.csv: layer,psi,count,frequency
///   metrics.csv:      layer,iterations,ratio,mse
void write_distribution_csv(const std::string& path, const std::vector<OffsetReport>& reports);
void write_metrics_csv(const std::string& path, std::size_t layer,
                       const std::vector<SweepRow>& rows);

}  // namespace snncal
