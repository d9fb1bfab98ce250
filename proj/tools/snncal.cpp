// snncal: train a small QCFS network, convert it to a spiking network, and
// evaluate or diagnose the converted model with optional initial-potential
// calibration.
//
// Exit codes: 0 success, 2 missing input file, 3 malformed model file,
// 4 shape/simulation error, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "snncal/calibrate.hpp"
#include "snncal/convert.hpp"
#include "snncal/dataset.hpp"
#include "snncal/diagnostics.hpp"
#include "snncal/model_io.hpp"
#include "snncal/train.hpp"

namespace {

constexpr int kExitBadPath = 2;
constexpr int kExitBadModel = 3;
constexpr int kExitShape = 4;

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "error: no such file: " << path << "\n";
        std::exit(kExitBadPath);
    }
}

struct CalibOptions {
    std::size_t T = 0;    // 0: default to L
    std::size_t rho = 0;  // 0: default to L
    std::size_t iterations = 1;
    double epsilon = 0.5;
    std::string mode = "shift";
    bool aggressive = false;
};

void add_calib_flags(CLI::App* cmd, CalibOptions& opt) {
    cmd->add_option("--T", opt.T, "inference time-steps (default: the model's L)");
    cmd->add_option("--rho", opt.rho, "probing time-steps per epoch (default: the model's L)");
    cmd->add_option("--iterations", opt.iterations, "calibration epochs")
        ->capture_default_str();
    cmd->add_option("--epsilon", opt.epsilon, "shift margin as a fraction of theta, in (0,1)")
        ->capture_default_str();
    cmd->add_option("--mode", opt.mode, "calibration mode")
        ->check(CLI::IsMember({"shift", "lightweight", "none"}))
        ->capture_default_str();
    cmd->add_flag("--aggressive", opt.aggressive,
                  "apply the full judged offset within each epoch");
}

snncal::CalibConfig make_config(const CalibOptions& opt, int L) {
    snncal::CalibConfig cfg;
    cfg.T = opt.T > 0 ? opt.T : static_cast<std::size_t>(L);
    cfg.rho = opt.rho > 0 ? opt.rho : static_cast<std::size_t>(L);
    cfg.iterations = opt.iterations;
    cfg.epsilon_fraction = opt.epsilon;
    cfg.aggressive = opt.aggressive;
    if (opt.mode == "shift") cfg.mode = snncal::CalibMode::Shift;
    else if (opt.mode == "lightweight") cfg.mode = snncal::CalibMode::Lightweight;
    else cfg.mode = snncal::CalibMode::None;
    return cfg;
}

snncal::Dataset load_dataset(const std::string& csv, const std::string& synth,
                             std::size_t samples, double spread, std::uint64_t seed) {
    if (!csv.empty()) {
        require_file(csv);
        return snncal::load_csv(csv);
    }
    if (synth == "xor") return snncal::make_xor(samples, spread, seed);
    return snncal::make_blobs(samples, 3, spread, seed);
}

std::vector<std::size_t> parse_widths(const std::string& spec) {
    std::vector<std::size_t> widths;
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) widths.push_back(std::stoul(cell));
    return widths;
}

void write_calib_log(const std::string& path, const std::vector<snncal::ShiftEvent>& events) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot open " << path << " for writing\n";
        std::exit(kExitBadPath);
    }
    for (const snncal::ShiftEvent& e : events) {
        nlohmann::json j{{"layer", e.layer},         {"epoch", e.epoch},
                         {"neuron", e.neuron},       {"judgment", e.judgment},
                         {"shift_direction", e.direction}, {"distance", e.distance}};
        out << j.dump() << '\n';
    }
}

int cmd_train(const std::string& out_path, const std::string& csv, const std::string& synth,
              std::size_t samples, double spread, const std::string& hidden, int L,
              std::size_t epochs, double lr, std::uint64_t seed) {
    snncal::Dataset data = load_dataset(csv, synth, samples, spread, seed);
    snncal::QcfsNetwork net =
        snncal::make_mlp(data.dim(), parse_widths(hidden), data.classes, L, seed);
    snncal::TrainResult r = snncal::train_toy(net, data, epochs, lr);
    snncal::save_ann(net, out_path);
    std::cout << "trained " << net.layers.size() << "-layer network, accuracy "
              << r.accuracy << ", loss " << r.loss << "\n"
              << "saved to " << out_path << "\n";
    return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path) {
    require_file(in_path);
    snncal::QcfsNetwork ann = snncal::load_ann(in_path);
    snncal::SnnNetwork snn = snncal::convert(ann);
    snncal::save_snn(snn, out_path);
    std::cout << "converted " << in_path << " -> " << out_path << " (L=" << snn.L << ")\n";
    return 0;
}

int cmd_eval(const std::string& snn_path, const std::string& ann_path, const std::string& csv,
             const std::string& synth, std::size_t samples, double spread, std::uint64_t seed,
             const CalibOptions& opt, const std::string& calib_log) {
    require_file(snn_path);
    snncal::SnnNetwork snn = snncal::load_snn(snn_path);
    snncal::Dataset data = load_dataset(csv, synth, samples, spread, seed);
    snncal::CalibConfig cfg = make_config(opt, snn.L);

    std::vector<snncal::ShiftEvent> events;
    long correct = 0;
    long total_steps = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        snncal::NetworkRun run =
            snncal::run_network(snn, data.inputs[i], cfg, false,
                                calib_log.empty() ? nullptr : &events);
        if (run.predicted == data.labels[i]) ++correct;
        total_steps = run.total_steps;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(data.size());
    std::cout << "snn accuracy " << acc << " over " << data.size() << " samples\n"
              << "time-steps per sample: " << cfg.T << " inference, " << total_steps
              << " total with calibration\n";

    if (!ann_path.empty()) {
        require_file(ann_path);
        snncal::QcfsNetwork ann = snncal::load_ann(ann_path);
        std::cout << "ann accuracy " << snncal::evaluate_ann(ann, data) << "\n";
    }
    if (!calib_log.empty()) write_calib_log(calib_log, events);
    return 0;
}

int cmd_diagnose(const std::string& ann_path, const std::string& snn_path,
                 const std::string& csv, const std::string& synth, std::size_t samples,
                 double spread, std::uint64_t seed, const CalibOptions& opt, bool constrained,
                 const std::string& sweep_spec, const std::string& dist_out,
                 const std::string& metrics_out) {
    require_file(ann_path);
    require_file(snn_path);
    snncal::QcfsNetwork ann = snncal::load_ann(ann_path);
    snncal::SnnNetwork snn = snncal::load_snn(snn_path);
    snncal::Dataset data = load_dataset(csv, synth, samples, spread, seed);
    snncal::CalibConfig cfg = make_config(opt, snn.L);

    std::vector<snncal::OffsetReport> reports =
        snncal::layer_distribution(ann, snn, data.inputs, cfg, constrained);
    for (std::size_t l = 0; l < reports.size(); ++l) {
        std::cout << "layer " << l << " (" << reports[l].mode << "): ratio "
                  << reports[l].ratio << ", mse " << reports[l].mse << "\n";
    }
    snncal::write_distribution_csv(dist_out, reports);
    std::cout << "distribution written to " << dist_out << "\n";

    if (!sweep_spec.empty()) {
        std::vector<std::size_t> counts = parse_widths(sweep_spec);
        std::vector<snncal::SweepRow> rows =
            snncal::ratio_mse_sweep(ann, snn, data.inputs, cfg, counts);
        for (const snncal::SweepRow& r : rows) {
            std::cout << "iterations " << r.iterations << ": ratio " << r.ratio << ", mse "
                      << r.mse << "\n";
        }
        snncal::write_metrics_csv(metrics_out, snn.spiking_layers() - 1, rows);
        std::cout << "metrics written to " << metrics_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QCFS-to-SNN conversion and initial-potential calibration"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a TOML/INI file");

    std::uint64_t seed = 1234;
    app.add_option("--seed", seed, "RNG seed for synthetic data and init")
        ->envname("SNNCAL_SEED")
        ->capture_default_str();
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0: library default)");

    std::string csv, synth = "blobs";
    std::size_t samples = 200;
    double spread = 0.25;
    auto add_data_flags = [&](CLI::App* cmd) {
        cmd->add_option("--csv", csv, "dataset CSV: feature columns then integer label");
        cmd->add_option("--synthetic", synth, "synthetic dataset when no CSV is given")
            ->check(CLI::IsMember({"blobs", "xor"}));
        cmd->add_option("--samples", samples,
                        "synthetic sample count (per class for blobs)");
        cmd->add_option("--spread", spread, "synthetic noise level");
    };

    // train
    auto* train = app.add_subcommand("train", "train a QCFS network on a toy dataset");
    std::string train_out = "ann.json", hidden = "16,16";
    int L = 4;
    std::size_t epochs = 200;
    double lr = 0.1;
    add_data_flags(train);
    train->add_option("--out", train_out, "output model path")->capture_default_str();
    train->add_option("--hidden", hidden, "hidden widths, comma separated")
        ->capture_default_str();
    train->add_option("--L", L, "quantization steps")->capture_default_str();
    train->add_option("--epochs", epochs, "training epochs")->capture_default_str();
    train->add_option("--lr", lr, "learning rate")->capture_default_str();

    // convert
    auto* convert = app.add_subcommand("convert", "convert a QCFS model to a spiking model");
    std::string conv_in, conv_out = "snn.json";
    convert->add_option("--in", conv_in, "QCFS model path")->required();
    convert->add_option("--out", conv_out, "output spiking model path")->capture_default_str();

    // eval
    auto* eval = app.add_subcommand("eval", "run spiking inference with calibration");
    std::string eval_snn, eval_ann, calib_log;
    CalibOptions eval_opt;
    eval->add_option("--snn", eval_snn, "spiking model path")->required();
    eval->add_option("--ann", eval_ann, "source QCFS model, for a side-by-side accuracy");
    add_data_flags(eval);
    add_calib_flags(eval, eval_opt);
    eval->add_option("--calib-log", calib_log, "write shift events as JSON lines");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "offset-spike distributions and sweeps");
    std::string diag_ann, diag_snn, sweep_spec;
    std::string dist_out = "distribution.csv", metrics_out = "metrics.csv";
    bool constrained = false;
    CalibOptions diag_opt;
    diag_opt.iterations = 0;
    diag_opt.mode = "none";
    diagnose->add_option("--ann", diag_ann, "QCFS model path")->required();
    diagnose->add_option("--snn", diag_snn, "spiking model path")->required();
    add_data_flags(diagnose);
    add_calib_flags(diagnose, diag_opt);
    diagnose->add_flag("--constrained", constrained,
                       "feed each ANN layer the realized SNN rate of the previous layer");
    diagnose->add_option("--iterations-sweep", sweep_spec,
                         "comma-separated epoch counts for a ratio/MSE sweep");
    diagnose->add_option("--dist-out", dist_out, "distribution CSV path")
        ->capture_default_str();
    diagnose->add_option("--metrics-out", metrics_out, "sweep CSV path")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (*train) return cmd_train(train_out, csv, synth, samples, spread, hidden, L,
                                     epochs, lr, seed);
        if (*convert) return cmd_convert(conv_in, conv_out);
        if (*eval) return cmd_eval(eval_snn, eval_ann, csv, synth, samples, spread, seed,
                                   eval_opt, calib_log);
        if (*diagnose) return cmd_diagnose(diag_ann, diag_snn, csv, synth, samples, spread,
                                           seed, diag_opt, constrained, sweep_spec, dist_out,
                                           metrics_out);
    } catch (const snncal::ModelFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadModel;
    } catch (const snncal::SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const snncal::CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const snncal::DiagnosticsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
