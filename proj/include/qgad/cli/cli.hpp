#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgad/data/granger.hpp"
#include "qgad/data/ingest.hpp"
#include "qgad/data/series.hpp"
#include "qgad/data/synth.hpp"
#include "qgad/detect/score.hpp"
#include "qgad/model_io.hpp"
#include "qgad/qgan/train.hpp"
#include "qgad/vqc/circuit.hpp"

namespace qgad::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit codes are a stable contract: 0 success, 2 input/config error,
// 3 training failure, 4 detection precondition failure.
enum ExitCode : int { kOk = 0, kConfigError = 2, kTrainError = 3, kDetectError = 4 };

struct RunConfig {
    // data
    std::string data_input;
    data::CsvSchema schema;
    double split_ratio = 0.5;
    int tau = 3;
    // circuit
    std::vector<vqc::Layer> gen_layers = vqc::default_generator_layers();
    std::vector<vqc::Layer> disc_layers = vqc::default_discriminator_layers();
    int gen_qubits = 4, disc_qubits = 6;
    int gen_params = 30, disc_params = 50;
    // train
    qgan::TrainConfig train;
    // detect
    double percentile = 99.99;
    detect::ScoreMode mode = detect::ScoreMode::Combined;
    std::string weight_policy = "final"; // final | window_avg
    int weight_window = 10;
    // synth
    data::SynthConfig synth;
    std::vector<data::AnomalySpan> anomalies;
    // classical baseline
    qgan::ClassicalGanConfig baseline;
};

namespace cli_detail {

inline void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

inline std::vector<vqc::Layer> parse_layers(const json& arr, const std::string& where) {
    std::vector<vqc::Layer> layers;
    for (const auto& item : arr) {
        reject_unknown_keys(item, {"type", "index", "reupload", "rx", "rz", "entangle"}, where);
        const std::string type = item.at("type").get<std::string>();
        if (type == "input") {
            vqc::InputLayer in;
            in.injection_index = item.value("index", 0);
            in.reupload_candidate = item.value("reupload", true);
            layers.emplace_back(in);
        } else if (type == "variational") {
            vqc::VariationalLayer var;
            var.rx_qubits = item.value("rx", std::vector<int>{});
            var.rz_qubits = item.value("rz", std::vector<int>{});
            var.entangle = item.value("entangle", true);
            layers.emplace_back(var);
        } else {
            throw ConfigError("unknown layer type '" + type + "' in " + where);
        }
    }
    return layers;
}

inline json layers_to_json(const std::vector<vqc::Layer>& layers) {
    json arr = json::array();
    for (const auto& layer : layers) {
        if (const auto* in = std::get_if<vqc::InputLayer>(&layer)) {
            arr.push_back({{"type", "input"},
                           {"index", in->injection_index},
                           {"reupload", in->reupload_candidate}});
        } else {
            const auto& var = std::get<vqc::VariationalLayer>(layer);
            arr.push_back({{"type", "variational"},
                           {"rx", var.rx_qubits},
                           {"rz", var.rz_qubits},
                           {"entangle", var.entangle}});
        }
    }
    return arr;
}

} // namespace cli_detail

inline RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    cli_detail::reject_unknown_keys(
        doc, {"data", "circuit", "train", "detect", "synth", "baseline"}, "config root");

    if (doc.contains("data")) {
        const auto& d = doc["data"];
        cli_detail::reject_unknown_keys(
            d, {"input", "split_ratio", "tau", "column_map", "benign_label"}, "data");
        cfg.data_input = d.value("input", cfg.data_input);
        cfg.split_ratio = d.value("split_ratio", cfg.split_ratio);
        cfg.tau = d.value("tau", cfg.tau);
        cfg.schema.benign_label = d.value("benign_label", cfg.schema.benign_label);
        if (d.contains("column_map")) {
            const auto& cm = d["column_map"];
            cli_detail::reject_unknown_keys(
                cm, {"timestamp", "fwd_iat_mean", "fwd_pkt_len_mean", "label"}, "column_map");
            cfg.schema.timestamp = cm.value("timestamp", cfg.schema.timestamp);
            cfg.schema.fwd_iat_mean = cm.value("fwd_iat_mean", cfg.schema.fwd_iat_mean);
            cfg.schema.fwd_pkt_len_mean =
                cm.value("fwd_pkt_len_mean", cfg.schema.fwd_pkt_len_mean);
            cfg.schema.label = cm.value("label", cfg.schema.label);
        }
    }
    if (doc.contains("circuit")) {
        const auto& c = doc["circuit"];
        cli_detail::reject_unknown_keys(c, {"generator", "discriminator"}, "circuit");
        if (c.contains("generator")) {
            const auto& g = c["generator"];
            cli_detail::reject_unknown_keys(g, {"n_qubits", "params", "layers"}, "generator");
            cfg.gen_qubits = g.value("n_qubits", cfg.gen_qubits);
            cfg.gen_params = g.value("params", cfg.gen_params);
            if (g.contains("layers")) {
                cfg.gen_layers = cli_detail::parse_layers(g["layers"], "generator.layers");
            }
        }
        if (c.contains("discriminator")) {
            const auto& d = c["discriminator"];
            cli_detail::reject_unknown_keys(d, {"n_qubits", "params", "layers"},
                                            "discriminator");
            cfg.disc_qubits = d.value("n_qubits", cfg.disc_qubits);
            cfg.disc_params = d.value("params", cfg.disc_params);
            if (d.contains("layers")) {
                cfg.disc_layers = cli_detail::parse_layers(d["layers"], "discriminator.layers");
            }
        }
    }
    if (doc.contains("train")) {
        const auto& t = doc["train"];
        cli_detail::reject_unknown_keys(
            t, {"learning_rate", "epochs", "seed", "backend", "optimizer", "noise", "init_scale"},
            "train");
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.seed = t.value("seed", cfg.train.seed);
        cfg.train.init_scale = t.value("init_scale", cfg.train.init_scale);
        const std::string backend = t.value("backend", std::string("pure"));
        if (backend != "pure" && backend != "noisy") {
            throw ConfigError("train.backend must be 'pure' or 'noisy'");
        }
        cfg.train.backend = backend == "noisy" ? qsim::Mode::Noisy : qsim::Mode::Pure;
        const std::string opt = t.value("optimizer", std::string("sgd"));
        if (opt != "sgd" && opt != "adam") throw ConfigError("train.optimizer must be sgd|adam");
        cfg.train.optimizer = opt == "adam" ? qgan::Optimizer::Adam : qgan::Optimizer::Sgd;
        if (t.contains("noise")) {
            const auto& n = t["noise"];
            cli_detail::reject_unknown_keys(n, {"p1", "p2", "readout_flip"}, "train.noise");
            cfg.train.noise.p1 = n.value("p1", cfg.train.noise.p1);
            cfg.train.noise.p2 = n.value("p2", cfg.train.noise.p2);
            cfg.train.noise.readout_flip = n.value("readout_flip", cfg.train.noise.readout_flip);
        }
        cfg.train.noise.enabled = cfg.train.backend == qsim::Mode::Noisy;
    }
    if (doc.contains("detect")) {
        const auto& d = doc["detect"];
        cli_detail::reject_unknown_keys(
            d, {"percentile", "mode", "weight_policy", "weight_window"}, "detect");
        cfg.percentile = d.value("percentile", cfg.percentile);
        cfg.mode = detect::mode_from_name(d.value("mode", std::string("combined")));
        cfg.weight_policy = d.value("weight_policy", cfg.weight_policy);
        if (cfg.weight_policy != "final" && cfg.weight_policy != "window_avg") {
            throw ConfigError("detect.weight_policy must be final|window_avg");
        }
        cfg.weight_window = d.value("weight_window", cfg.weight_window);
        if (cfg.weight_window < 1) throw ConfigError("detect.weight_window must be >= 1");
    }
    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        cli_detail::reject_unknown_keys(s,
                                        {"length", "walk_sigma", "wave_period", "amp_base",
                                         "amp_mod", "amp_period", "phase_mod", "phase_period",
                                         "anomalies"},
                                        "synth");
        cfg.synth.length = s.value("length", cfg.synth.length);
        cfg.synth.walk_sigma = s.value("walk_sigma", cfg.synth.walk_sigma);
        cfg.synth.wave_period = s.value("wave_period", cfg.synth.wave_period);
        cfg.synth.amp_base = s.value("amp_base", cfg.synth.amp_base);
        cfg.synth.amp_mod = s.value("amp_mod", cfg.synth.amp_mod);
        cfg.synth.amp_period = s.value("amp_period", cfg.synth.amp_period);
        cfg.synth.phase_mod = s.value("phase_mod", cfg.synth.phase_mod);
        cfg.synth.phase_period = s.value("phase_period", cfg.synth.phase_period);
        for (const auto& a : s.value("anomalies", json::array())) {
            cli_detail::reject_unknown_keys(a, {"start", "duration", "shift_a", "shift_b"},
                                            "synth.anomalies");
            data::AnomalySpan span;
            span.start = a.value("start", 0u);
            span.duration = a.value("duration", 0u);
            span.shift_a = a.value("shift_a", 0.0);
            span.shift_b = a.value("shift_b", 0.0);
            cfg.anomalies.push_back(span);
        }
    }
    if (doc.contains("baseline")) {
        const auto& b = doc["baseline"];
        cli_detail::reject_unknown_keys(b, {"gen_params", "disc_params"}, "baseline");
        cfg.baseline.gen_params = b.value("gen_params", cfg.baseline.gen_params);
        cfg.baseline.disc_params = b.value("disc_params", cfg.baseline.disc_params);
    }
    return cfg;
}

inline json config_to_json(const RunConfig& cfg) {
    json noise = {{"p1", cfg.train.noise.p1},
                  {"p2", cfg.train.noise.p2},
                  {"readout_flip", cfg.train.noise.readout_flip}};
    json anomalies = json::array();
    for (const auto& a : cfg.anomalies) {
        anomalies.push_back({{"start", a.start},
                             {"duration", a.duration},
                             {"shift_a", a.shift_a},
                             {"shift_b", a.shift_b}});
    }
    return {
        {"data",
         {{"input", cfg.data_input},
          {"split_ratio", cfg.split_ratio},
          {"tau", cfg.tau},
          {"benign_label", cfg.schema.benign_label},
          {"column_map",
           {{"timestamp", cfg.schema.timestamp},
            {"fwd_iat_mean", cfg.schema.fwd_iat_mean},
            {"fwd_pkt_len_mean", cfg.schema.fwd_pkt_len_mean},
            {"label", cfg.schema.label}}}}},
        {"circuit",
         {{"generator",
           {{"n_qubits", cfg.gen_qubits},
            {"params", cfg.gen_params},
            {"layers", cli_detail::layers_to_json(cfg.gen_layers)}}},
          {"discriminator",
           {{"n_qubits", cfg.disc_qubits},
            {"params", cfg.disc_params},
            {"layers", cli_detail::layers_to_json(cfg.disc_layers)}}}}},
        {"train",
         {{"learning_rate", cfg.train.learning_rate},
          {"epochs", cfg.train.epochs},
          {"seed", cfg.train.seed},
          {"backend", cfg.train.backend == qsim::Mode::Noisy ? "noisy" : "pure"},
          {"optimizer", cfg.train.optimizer == qgan::Optimizer::Adam ? "adam" : "sgd"},
          {"init_scale", cfg.train.init_scale},
          {"noise", noise}}},
        {"detect",
         {{"percentile", cfg.percentile},
          {"mode", detect::mode_name(cfg.mode)},
          {"weight_policy", cfg.weight_policy},
          {"weight_window", cfg.weight_window}}},
        {"synth",
         {{"length", cfg.synth.length},
          {"walk_sigma", cfg.synth.walk_sigma},
          {"wave_period", cfg.synth.wave_period},
          {"amp_base", cfg.synth.amp_base},
          {"amp_mod", cfg.synth.amp_mod},
          {"amp_period", cfg.synth.amp_period},
          {"phase_mod", cfg.synth.phase_mod},
          {"phase_period", cfg.synth.phase_period},
          {"anomalies", anomalies}}},
        {"baseline",
         {{"gen_params", cfg.baseline.gen_params},
          {"disc_params", cfg.baseline.disc_params}}},
    };
}

namespace cli_detail {

inline RunConfig load_config(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("QGAD_CONFIG")) path = env;
    }
    if (path.empty()) return RunConfig{};
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(doc);
}

struct ScaledSeries {
    std::vector<data::TimePoint> points;
    std::vector<bool> labels;
};

inline ScaledSeries scale_intervals(const std::vector<data::IntervalAggregate>& intervals,
                                    const data::Scaler& scaler) {
    ScaledSeries out;
    out.points.reserve(intervals.size());
    out.labels.reserve(intervals.size());
    for (const auto& iv : intervals) {
        out.points.push_back(scaler.scale(iv));
        out.labels.push_back(iv.is_attack());
    }
    return out;
}

inline void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw data::IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
}

inline json metrics_to_json(const detect::MetricsReport& r) {
    return {{"accuracy", r.accuracy},
            {"recall", r.recall},
            {"precision", r.precision},
            {"f1", r.f1},
            {"mse", r.mse},
            {"confusion", {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}}}};
}

// Detection weights per the configured policy: final-step losses, or the
// mean over the trailing weight_window steps.
inline std::pair<double, double> weight_losses(
    const std::vector<std::pair<double, double>>& history, double last_g, double last_d,
    const std::string& policy, int window) {
    if (policy == "final" || history.empty()) return {last_g, last_d};
    const std::size_t n = std::min<std::size_t>(history.size(), static_cast<std::size_t>(window));
    double g = 0.0, d = 0.0;
    for (std::size_t i = history.size() - n; i < history.size(); ++i) {
        g += history[i].first;
        d += history[i].second;
    }
    return {g / static_cast<double>(n), d / static_cast<double>(n)};
}

} // namespace cli_detail

// --- subcommand implementations -----------------------------------------

inline int cmd_synth(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
    auto series = data::synth_series(cfg.synth, seed);
    data::inject_anomalies(series, cfg.anomalies);
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir + "/synthetic_intervals.csv";
    data::write_intervals_csv(path, series, "config " + config_to_json(cfg).dump());
    std::cout << "wrote " << path << " (" << series.size() << " intervals)\n";
    return kOk;
}

inline int cmd_ingest(const RunConfig& cfg, const std::string& input,
                      const std::string& out_dir) {
    const auto ingest = data::ingest_csv(input, cfg.schema);
    const auto agg = data::aggregate_1s(ingest.records);
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir + "/intervals.csv";
    data::write_intervals_csv(path, agg.intervals, "config " + config_to_json(cfg).dump());

    json report = {{"rows_read", ingest.rows_read},
                   {"rows_dropped", ingest.rows_dropped},
                   {"intervals", agg.intervals.size()},
                   {"filled_buckets", agg.filled_buckets},
                   {"first_second", agg.first_second},
                   {"config", config_to_json(cfg)}};
    cli_detail::write_json(out_dir + "/ingest_report.json", report);
    std::cout << "wrote " << path << " (" << agg.intervals.size() << " intervals, "
              << ingest.rows_dropped << " rows dropped, " << agg.filled_buckets
              << " buckets filled)\n";
    return kOk;
}

inline int cmd_feature_select(const RunConfig& cfg, const std::string& input,
                              const std::vector<std::string>& features, double alpha,
                              int max_lag, const std::string& out_dir) {
    const auto table = data::read_csv(input);
    const int c_ts = table.column(cfg.schema.timestamp);
    const int c_label = table.column(cfg.schema.label);
    if (c_ts < 0) throw data::IoError("missing timestamp column: " + cfg.schema.timestamp);
    if (c_label < 0) throw data::IoError("missing label column: " + cfg.schema.label);

    std::vector<std::string> names = features;
    if (names.empty()) names = {cfg.schema.fwd_iat_mean, cfg.schema.fwd_pkt_len_mean};

    std::vector<int> cols;
    for (const auto& name : names) {
        const int c = table.column(name);
        if (c < 0) throw data::IoError("missing feature column: " + name);
        cols.push_back(c);
    }

    // per-second mean of each candidate column plus the attack-count label
    // series, on the same carry-forward bucket grid as the main pipeline
    std::map<long, std::pair<std::vector<double>, long>> buckets; // sums per feature, attacks
    std::map<long, long> counts;
    for (const auto& row : table.rows) {
        double ts = 0.0;
        if (!data::parse_timestamp(row[c_ts], cfg.schema, ts)) continue;
        const long sec = static_cast<long>(std::floor(ts));
        auto& bucket = buckets[sec];
        if (bucket.first.empty()) bucket.first.assign(cols.size(), 0.0);
        bool row_ok = true;
        std::vector<double> vals(cols.size(), 0.0);
        for (std::size_t f = 0; f < cols.size(); ++f) {
            if (!data::parse_double(row[cols[f]], vals[f]) || !std::isfinite(vals[f])) {
                row_ok = false;
                break;
            }
        }
        if (!row_ok) continue;
        for (std::size_t f = 0; f < cols.size(); ++f) bucket.first[f] += vals[f];
        counts[sec] += 1;
        if (!data::iequals(row[c_label], cfg.schema.benign_label)) {
            bucket.second += 1;
        }
    }
    if (buckets.empty()) throw data::IoError("no usable rows in " + input);

    const long first = buckets.begin()->first;
    const long last = buckets.rbegin()->first;
    std::vector<std::vector<double>> series(cols.size());
    std::vector<double> labels;
    std::vector<double> prev(cols.size(), 0.0);
    for (long sec = first; sec <= last; ++sec) {
        const auto it = buckets.find(sec);
        if (it != buckets.end() && counts[sec] > 0) {
            for (std::size_t f = 0; f < cols.size(); ++f) {
                prev[f] = it->second.first[f] / static_cast<double>(counts[sec]);
            }
            labels.push_back(static_cast<double>(it->second.second));
        } else {
            labels.push_back(0.0);
        }
        for (std::size_t f = 0; f < cols.size(); ++f) series[f].push_back(prev[f]);
    }

    std::vector<std::pair<std::string, std::vector<double>>> candidates;
    for (std::size_t f = 0; f < names.size(); ++f) candidates.emplace_back(names[f], series[f]);
    const auto selection = data::select_features(candidates, labels, alpha, max_lag);

    json results = json::array();
    for (const auto& r : selection.ranked) {
        results.push_back({{"feature", r.feature},
                           {"max_lag", r.max_lag},
                           {"f_stat", std::isinf(r.f_stat) ? 1e308 : r.f_stat},
                           {"p_value", r.p_value},
                           {"selected", r.selected}});
    }
    json report = {{"results", results},
                   {"skipped", selection.skipped},
                   {"alpha", alpha},
                   {"max_lag", max_lag},
                   {"intervals", labels.size()},
                   {"config", config_to_json(cfg)}};
    std::filesystem::create_directories(out_dir);
    cli_detail::write_json(out_dir + "/feature_report.json", report);
    std::cout << "wrote " << out_dir << "/feature_report.json (" << selection.ranked.size()
              << " candidates ranked)\n";
    return kOk;
}

inline int cmd_train(const RunConfig& cfg, const std::string& data_path, bool baseline,
                     const std::string& out_dir) {
    const auto intervals = data::read_intervals_csv(data_path);
    const auto split = data::split_benign_train(intervals, cfg.split_ratio);
    const auto scaler = data::Scaler::fit(split.train);

    const auto train_scaled = cli_detail::scale_intervals(split.train, scaler);
    const auto all_windows =
        data::make_windows(train_scaled.points, train_scaled.labels, cfg.tau);
    const auto train_windows = data::drop_attack_windows(all_windows, train_scaled.labels,
                                                         cfg.tau);
    if (train_windows.empty()) throw qgan::TrainError("no benign training windows");

    std::filesystem::create_directories(out_dir);
    data::write_intervals_csv(out_dir + "/train_intervals.csv", split.train,
                              "config " + config_to_json(cfg).dump());
    data::write_intervals_csv(out_dir + "/test_intervals.csv", split.test,
                              "config " + config_to_json(cfg).dump());

    ModelFile model;
    model.backend = cfg.train.backend;
    model.noise = cfg.train.noise;
    model.scaler_min_a = scaler.min_a();
    model.scaler_max_a = scaler.max_a();
    model.scaler_min_b = scaler.min_b();
    model.scaler_max_b = scaler.max_b();
    model.percentile = cfg.percentile;
    model.tau = cfg.tau;
    model.config_echo = config_to_json(cfg).dump();

    GeneratorFn gen_fn;
    DiscriminatorFn disc_fn;
    long steps = 0;
    if (baseline) {
        const auto st = qgan::train_classical(cfg.baseline, train_windows, cfg.train);
        model.kind = "classical";
        model.cgan = st.gan;
        model.last_loss_g = st.last_loss_g;
        model.last_loss_d = st.last_loss_d;
        const auto [wg, wd] = cli_detail::weight_losses(
            st.loss_history, st.last_loss_g, st.last_loss_d, cfg.weight_policy,
            cfg.weight_window);
        model.weight_loss_g = wg;
        model.weight_loss_d = wd;
        steps = st.step_count;
        gen_fn = qgan::make_classical_generator_fn(model.cgan.gen);
        disc_fn = qgan::make_classical_discriminator_fn(model.cgan.disc);
    } else {
        const auto gen = vqc::build_generator(cfg.gen_layers, cfg.gen_params, cfg.gen_qubits);
        const auto disc =
            vqc::build_discriminator(cfg.disc_layers, cfg.disc_params, cfg.disc_qubits);
        const auto st = qgan::train(gen, disc, train_windows, cfg.train);
        model.kind = "qgan";
        model.gen = gen;
        model.disc = disc;
        model.theta_g = st.theta_g;
        model.theta_d = st.theta_d;
        model.last_loss_g = st.last_loss_g;
        model.last_loss_d = st.last_loss_d;
        const auto [wg, wd] = cli_detail::weight_losses(
            st.loss_history, st.last_loss_g, st.last_loss_d, cfg.weight_policy,
            cfg.weight_window);
        model.weight_loss_g = wg;
        model.weight_loss_d = wd;
        steps = st.step_count;
        gen_fn = qgan::make_generator_fn(model.gen, model.theta_g, model.backend, model.noise);
        disc_fn =
            qgan::make_discriminator_fn(model.disc, model.theta_d, model.backend, model.noise);
    }

    model.thresholds = detect::compute_mode_thresholds(
        gen_fn, disc_fn, model.weight_loss_g, model.weight_loss_d, train_windows,
        cfg.percentile);
    model.has_thresholds = true;

    const auto model_path = out_dir + "/model.txt";
    save_model(model_path, model);

    const double train_mse = qgan::evaluate_mse(gen_fn, train_windows);
    json report = {{"kind", model.kind},
                   {"steps", steps},
                   {"train_windows", train_windows.size()},
                   {"train_is_second_half", split.train_is_second_half},
                   {"last_loss_g", model.last_loss_g},
                   {"last_loss_d", model.last_loss_d},
                   {"weight_loss_g", model.weight_loss_g},
                   {"weight_loss_d", model.weight_loss_d},
                   {"train_mse", train_mse},
                   {"threshold_combined", model.thresholds.combined.value},
                   {"threshold_gen_only", model.thresholds.gen_only.value},
                   {"threshold_disc_only", model.thresholds.disc_only.value},
                   {"config", config_to_json(cfg)}};
    cli_detail::write_json(out_dir + "/train_report.json", report);
    std::cout << "wrote " << model_path << " (" << model.kind << ", " << steps
              << " steps, train MSE " << train_mse << ")\n";
    return kOk;
}

inline int cmd_detect(const RunConfig& cfg, const std::string& model_path,
                      const std::string& data_path, const std::string& mode_name,
                      const std::string& backend_override,
                      const std::string& threshold_data, const std::string& out_dir) {
    ModelFile model = load_model(model_path);
    if (!model.has_thresholds && threshold_data.empty()) {
        throw detect::DetectError("model file has no thresholds: " + model_path);
    }

    qsim::Mode mode_backend = model.backend;
    qsim::NoiseModel noise = model.noise;
    if (!backend_override.empty()) {
        if (backend_override != "pure" && backend_override != "noisy") {
            throw ConfigError("--backend must be pure|noisy");
        }
        mode_backend = backend_override == "noisy" ? qsim::Mode::Noisy : qsim::Mode::Pure;
        noise = cfg.train.noise;
        noise.enabled = mode_backend == qsim::Mode::Noisy;
    }
    const auto gen_fn = model_generator_fn(model, mode_backend, noise);
    const auto disc_fn = model_discriminator_fn(model, mode_backend, noise);

    const auto mode = mode_name.empty() ? cfg.mode : detect::mode_from_name(mode_name);
    const auto scaler = model.scaler();

    detect::ModeThresholds thresholds = model.thresholds;
    if (!threshold_data.empty()) {
        const auto benign_intervals = data::read_intervals_csv(threshold_data);
        const auto scaled = cli_detail::scale_intervals(benign_intervals, scaler);
        const auto windows = data::drop_attack_windows(
            data::make_windows(scaled.points, scaled.labels, model.tau), scaled.labels,
            model.tau);
        if (windows.empty()) throw detect::DetectError("no benign threshold windows");
        thresholds = detect::compute_mode_thresholds(gen_fn, disc_fn, model.weight_loss_g,
                                                     model.weight_loss_d, windows,
                                                     model.percentile);
    } else if (mode_backend != model.backend) {
        std::cerr << "warning: backend override without --threshold-data; stored thresholds "
                     "were computed under the training backend\n";
    }

    const auto intervals = data::read_intervals_csv(data_path);
    const auto scaled = cli_detail::scale_intervals(intervals, scaler);
    const auto windows = data::make_windows(scaled.points, scaled.labels, model.tau);

    const auto result =
        detect::score_series(gen_fn, disc_fn, model.weight_loss_g, model.weight_loss_d,
                             windows, thresholds.of(mode), mode);

    std::filesystem::create_directories(out_dir);
    std::vector<bool> labels(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) labels[i] = windows[i].target_label;
    detect::write_scores_csv(out_dir + "/scores.csv", result.points, labels, result.threshold,
                             "config " + config_to_json(cfg).dump());

    json metrics = cli_detail::metrics_to_json(result.report);
    metrics["mode"] = detect::mode_name(mode);
    metrics["threshold"] = result.threshold.value;
    metrics["backend"] = mode_backend == qsim::Mode::Noisy ? "noisy" : "pure";
    metrics["config"] = config_to_json(cfg);
    cli_detail::write_json(out_dir + "/metrics.json", metrics);

    std::cout << "mode " << detect::mode_name(mode) << ": accuracy " << result.report.accuracy
              << ", recall " << result.report.recall << ", precision "
              << result.report.precision << ", f1 " << result.report.f1 << ", mse "
              << result.report.mse << "\n";
    return kOk;
}

inline int cmd_evaluate(const RunConfig& cfg, const std::string& model_path,
                        const std::string& data_path, const std::string& out_dir) {
    const ModelFile model = load_model(model_path);
    if (!model.has_thresholds) {
        throw detect::DetectError("model file has no thresholds: " + model_path);
    }
    const auto gen_fn = model_generator_fn(model);
    const auto disc_fn = model_discriminator_fn(model);
    const auto scaler = model.scaler();

    const auto intervals = data::read_intervals_csv(data_path);
    const auto scaled = cli_detail::scale_intervals(intervals, scaler);
    const auto windows = data::make_windows(scaled.points, scaled.labels, model.tau);

    json report;
    for (const auto mode :
         {detect::ScoreMode::Combined, detect::ScoreMode::GenOnly, detect::ScoreMode::DiscOnly}) {
        const auto result =
            detect::score_series(gen_fn, disc_fn, model.weight_loss_g, model.weight_loss_d,
                                 windows, model.thresholds.of(mode), mode);
        report[detect::mode_name(mode)] = cli_detail::metrics_to_json(result.report);
    }
    report["mse"] = qgan::evaluate_mse(gen_fn, windows);
    report["windows"] = windows.size();
    report["config"] = config_to_json(cfg);
    std::filesystem::create_directories(out_dir);
    cli_detail::write_json(out_dir + "/evaluation.json", report);
    std::cout << "wrote " << out_dir << "/evaluation.json (mse "
              << report["mse"].get<double>() << ")\n";
    return kOk;
}

// Command-line entry point; returns the process exit code.
inline int run(std::vector<std::string> args) {
    CLI::App app{"Quantum-GAN anomaly detection for two-feature network time series"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    app.add_option("--config", config_path, "JSON config file (or QGAD_CONFIG env var)");
    app.add_option("--seed", seed_override, "override train.seed");
    app.add_option("--out", out_dir, "output directory");

    auto* synth = app.add_subcommand("synth", "generate the synthetic two-feature series");

    std::string ingest_input;
    auto* ingest = app.add_subcommand("ingest", "aggregate a flow CSV into 1-second intervals");
    ingest->add_option("--input", ingest_input, "flow-record CSV");

    std::string fs_input, fs_features;
    double fs_alpha = 0.05;
    int fs_max_lag = 3;
    auto* fsel = app.add_subcommand("feature-select",
                                    "rank candidate features by Granger causality with the labels");
    fsel->add_option("--input", fs_input, "flow-record CSV");
    fsel->add_option("--features", fs_features, "comma-separated candidate column names");
    fsel->add_option("--alpha", fs_alpha, "selection significance level");
    fsel->add_option("--max-lag", fs_max_lag, "Granger lag order");

    std::string train_data;
    bool baseline = false;
    auto* train = app.add_subcommand("train", "train the QGAN (or classical baseline)");
    train->add_option("--data", train_data, "intervals CSV")->required();
    train->add_flag("--baseline", baseline, "train the parameter-matched classical GAN");

    std::string det_model, det_data, det_mode, det_backend, det_threshold_data;
    auto* det = app.add_subcommand("detect", "score a dataset and emit scores + metrics");
    det->add_option("--model", det_model, "model file")->required();
    det->add_option("--data", det_data, "intervals CSV to score")->required();
    det->add_option("--mode", det_mode, "combined|gen_only|disc_only");
    det->add_option("--backend", det_backend, "override backend: pure|noisy");
    det->add_option("--threshold-data", det_threshold_data,
                    "benign intervals CSV for threshold recomputation");

    std::string eval_model, eval_data;
    auto* eval = app.add_subcommand("evaluate", "all-mode metrics report for a dataset");
    eval->add_option("--model", eval_model, "model file")->required();
    eval->add_option("--data", eval_data, "intervals CSV")->required();

    std::vector<const char*> argv;
    argv.push_back("qgad");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg = cli_detail::load_config(config_path);
        if (seed_override) cfg.train.seed = *seed_override;

        if (synth->parsed()) return cmd_synth(cfg, cfg.train.seed, out_dir);
        if (ingest->parsed()) {
            const std::string input = !ingest_input.empty() ? ingest_input : cfg.data_input;
            if (input.empty()) throw ConfigError("ingest: no input file (--input or data.input)");
            return cmd_ingest(cfg, input, out_dir);
        }
        if (fsel->parsed()) {
            const std::string input = !fs_input.empty() ? fs_input : cfg.data_input;
            if (input.empty()) throw ConfigError("feature-select: no input file");
            std::vector<std::string> features;
            std::istringstream ss(fs_features);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) features.push_back(item);
            }
            return cmd_feature_select(cfg, input, features, fs_alpha, fs_max_lag, out_dir);
        }
        if (train->parsed()) return cmd_train(cfg, train_data, baseline, out_dir);
        if (det->parsed()) {
            return cmd_detect(cfg, det_model, det_data, det_mode, det_backend,
                              det_threshold_data, out_dir);
        }
        if (eval->parsed()) return cmd_evaluate(cfg, eval_model, eval_data, out_dir);
        return kConfigError;
    } catch (const qgan::TrainError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return kTrainError;
    } catch (const detect::DetectError& e) {
        std::cerr << "detection error: " << e.what() << '\n';
        return kDetectError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace qgad::cli
