#include "snncal/diagnostics.hpp"

#include <cmath>
#include <fstream>

namespace snncal {

std::vector<long> offset_spike(const Vec& a, const LayerTrace& trace, std::size_t T) {
    if (a.size() != trace.neurons()) {
        throw DiagnosticsError("offset_spike: activation size " + std::to_string(a.size()) +
                               " != neuron count " + std::to_string(trace.neurons()));
    }
    if (trace.steps() < T) throw DiagnosticsError("offset_spike: trace shorter than T");
    std::vector<long> psi(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double designed = a[i] * static_cast<double>(T) / trace.theta;
        const double rounded = std::round(designed);
        if (std::abs(designed - rounded) > 1e-6) {
            throw DiagnosticsError("offset_spike: designed count " + std::to_string(designed) +
                                   " is off the integer grid (lambda != theta or T != L?)");
        }
        long count = 0;
        for (std::size_t t = 0; t < T; ++t) count += trace.s(t, i) > 0.5 ? 1 : 0;
        psi[i] = static_cast<long>(rounded) - count;
    }
    return psi;
}

long OffsetReport::total() const {
    long n = 0;
    for (const auto& [psi, count] : histogram) n += count;
    return n;
}

double OffsetReport::mass_at_least(long abs_psi) const {
    const long n = total();
    if (n == 0) return 0.0;
    long hit = 0;
    for (const auto& [psi, count] : histogram) {
        if (std::labs(psi) >= abs_psi) hit += count;
    }
    return static_cast<double>(hit) / static_cast<double>(n);
}

void OffsetReport::add(const std::vector<long>& psi) {
    for (long p : psi) ++histogram[p];
}

void OffsetReport::finalize() {
    const long n = total();
    if (n == 0) return;
    long zeros = 0;
    double sq = 0.0;
    for (const auto& [psi, count] : histogram) {
        if (psi == 0) zeros += count;
        sq += static_cast<double>(psi) * static_cast<double>(psi) * static_cast<double>(count);
    }
    ratio = static_cast<double>(zeros) / static_cast<double>(n);
    mse = sq / static_cast<double>(n);
}

namespace {

Vec psp_over(const LayerTrace& trace, std::size_t T) {
    Vec phi(trace.neurons(), 0.0);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < trace.neurons(); ++i) phi[i] += trace.s(t, i);
    for (double& p : phi) p = p * trace.theta / static_cast<double>(T);
    return phi;
}

Vec matvec(const Matrix& W, const Vec& x) {
    Vec y(W.rows(), 0.0);
    for (std::size_t o = 0; o < W.rows(); ++o) {
        const double* w = W.row(o);
        double acc = 0.0;
        for (std::size_t k = 0; k < W.cols(); ++k) acc += w[k] * x[k];
        y[o] = acc;
    }
    return y;
}

}  // namespace

std::vector<OffsetReport> layer_distribution(const QcfsNetwork& ann, const SnnNetwork& snn,
                                             const std::vector<Vec>& samples,
                                             const CalibConfig& cfg, bool constrained) {
    const std::size_t K = snn.spiking_layers();
    // Per-sample psi vectors, merged in sample order for determinism.
    std::vector<std::vector<std::vector<long>>> per_sample(samples.size());

#pragma omp parallel for schedule(dynamic)
    for (long long si = 0; si < static_cast<long long>(samples.size()); ++si) {
        const Vec& x = samples[static_cast<std::size_t>(si)];
        NetworkRun run = run_network(snn, x, cfg, /*keep_traces=*/true);
        AnnForward fwd = ann_forward(ann, x);

        std::vector<std::vector<long>> psi_layers(K);
        for (std::size_t l = 0; l < K; ++l) {
            Vec a;
            if (!constrained || l == 0) {
                a = fwd.activations[l];
            } else {
                // Rectified ANN input: the realized SNN rate of layer l-1.
                Vec phi_prev = psp_over(run.traces[l - 1], cfg.T);
                const QcfsLayer& layer = ann.layers[l];
                a = qcfs_activation(matvec(layer.weights, phi_prev), layer.lambda, layer.L);
            }
            psi_layers[l] = offset_spike(a, run.traces[l], cfg.T);
        }
        per_sample[static_cast<std::size_t>(si)] = std::move(psi_layers);
    }

    std::vector<OffsetReport> reports(K);
    for (std::size_t l = 0; l < K; ++l) reports[l].mode = constrained ? "constrained" : "free";
    for (const auto& psi_layers : per_sample) {
        for (std::size_t l = 0; l < K; ++l) reports[l].add(psi_layers[l]);
    }
    for (auto& r : reports) r.finalize();
    return reports;
}

std::vector<SweepRow> ratio_mse_sweep(const QcfsNetwork& ann, const SnnNetwork& snn,
                                      const std::vector<Vec>& samples, CalibConfig cfg,
                                      const std::vector<std::size_t>& iteration_counts) {
    std::vector<SweepRow> rows;
    for (std::size_t iters : iteration_counts) {
        cfg.iterations = iters;
        cfg.mode = iters == 0 ? CalibMode::None : CalibMode::Shift;
        std::vector<OffsetReport> reports = layer_distribution(ann, snn, samples, cfg, false);
        const OffsetReport& out = reports.back();
        rows.push_back({iters, out.ratio, out.mse});
    }
    return rows;
}

OffsetReport matched_input_report(const QcfsNetwork& ann, const SnnNetwork& snn,
                                  const std::vector<Vec>& samples, CalibConfig cfg) {
    const std::size_t K = snn.spiking_layers();
    OffsetReport report;
    report.mode = "matched";

    std::vector<std::vector<long>> per_sample(samples.size());
#pragma omp parallel for schedule(dynamic)
    for (long long si = 0; si < static_cast<long long>(samples.size()); ++si) {
        const Vec& x = samples[static_cast<std::size_t>(si)];
        AnnForward fwd = ann_forward(ann, x);
        std::vector<long> psi_out;
        for (std::size_t l = 0; l < K; ++l) {
            const LayerParams& layer = snn.layers[l];
            const Vec& a_prev = l == 0 ? x : fwd.activations[l - 1];
            InputCurrents currents =
                project_currents(layer.weights, encode_input(a_prev, cfg.T), l);

            LayerTrace initial = run_layer(layer, currents, cfg.T, l);
            std::vector<long> psi0 = offset_spike(fwd.activations[l], initial, cfg.T);
            long max_abs = 0;
            for (long p : psi0) max_abs = std::max(max_abs, std::labs(p));

            Vec v0 = layer.v0;
            if (max_abs > 0) {
                CalibConfig local = cfg;
                local.iterations = static_cast<std::size_t>(max_abs);
                local.mode = CalibMode::Shift;
                LayerCalibResult calib = calibrate_layer(layer, currents, local, snn.L, l);
                v0 = std::move(calib.v0);
            }
            LayerTrace final_trace = run_layer(layer.theta, v0, currents, cfg.T, l);
            std::vector<long> psi = offset_spike(fwd.activations[l], final_trace, cfg.T);
            if (l + 1 == K) psi_out = std::move(psi);
        }
        per_sample[static_cast<std::size_t>(si)] = std::move(psi_out);
    }

    for (const auto& psi : per_sample) report.add(psi);
    report.finalize();
    return report;
}

void write_distribution_csv(const std::string& path, const std::vector<OffsetReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DiagnosticsError("cannot open " + path + " for writing");
    out << "layer,psi,count,frequency\n";
    for (std::size_t l = 0; l < reports.size(); ++l) {
        const long total = reports[l].total();
        for (const auto& [psi, count] : reports[l].histogram) {
            const double freq =
                total > 0 ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
            out << l << ',' << psi << ',' << count << ',' << freq << '\n';
        }
    }
}

void write_metrics_csv(const std::string& path, std::size_t layer,
                       const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DiagnosticsError("cannot open " + path + " for writing");
    out << "layer,iterations,ratio,mse\n";
    for (const SweepRow& r : rows) {
        out << layer << ',' << r.iterations << ',' << r.ratio << ',' << r.mse << '\n';
    }
}

}  // namespace snncal
