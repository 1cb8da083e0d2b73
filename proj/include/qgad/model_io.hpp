#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgad/data/series.hpp"
#include "qgad/detect/score.hpp"
#include "qgad/model_fn.hpp"
#include "qgad/qgan/classical_gan.hpp"
#include "qgad/qgan/train.hpp"
#include "qgad/vqc/circuit.hpp"

namespace qgad {

// Everything a detection run needs, persisted as one versioned key-value
// text file. Doubles are written with 17 significant digits so the decimal
// form round-trips the binary value exactly.
struct ModelFile {
    int version = 1;
    std::string kind = "qgan"; // qgan | classical
    qsim::Mode backend = qsim::Mode::Pure;
    qsim::NoiseModel noise{};
    double scaler_min_a = 0.0, scaler_max_a = 1.0;
    double scaler_min_b = 0.0, scaler_max_b = 1.0;
    double last_loss_g = 0.0;
    double last_loss_d = 0.0;
    double weight_loss_g = 0.0; // losses the detection weights actually use
    double weight_loss_d = 0.0;
    double percentile = 99.99;
    int tau = 3;
    bool has_thresholds = false;
    detect::ModeThresholds thresholds;

    vqc::CircuitSpec gen, disc;
    vqc::ParamVector theta_g, theta_d;

    qgan::ClassicalGan cgan;

    std::string config_echo = "{}";

    data::Scaler scaler() const {
        return data::Scaler(scaler_min_a, scaler_max_a, scaler_min_b, scaler_max_b);
    }
};

namespace model_detail {

inline std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(v[i]);
    }
    return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

inline void write_params(std::ostream& out, const std::string& key,
                         const std::vector<double>& v) {
    out << key << ' ' << v.size();
    for (double x : v) out << ' ' << data::format_full(x);
    out << '\n';
}

inline std::vector<double> read_params(std::istringstream& ss) {
    std::size_t n = 0;
    ss >> n;
    std::vector<double> v(n);
    for (auto& x : v) ss >> x;
    return v;
}

inline void write_layers(std::ostream& out, const std::string& prefix,
                         const vqc::CircuitSpec& spec) {
    out << prefix << ".n_qubits " << spec.n_qubits << '\n';
    out << prefix << ".encoding";
    for (std::size_t f = 0; f < spec.encoding.feature_qubits.size(); ++f) {
        out << " feat" << f << '=' << join_ints(spec.encoding.feature_qubits[f]);
    }
    out << " cand=" << join_ints(spec.encoding.candidate_qubits) << '\n';
    out << prefix << ".n_layers " << spec.layers.size() << '\n';
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        out << prefix << ".layer." << i << ' ';
        if (const auto* in = std::get_if<vqc::InputLayer>(&spec.layers[i])) {
            out << "input idx=" << in->injection_index
                << " reup=" << (in->reupload_candidate ? 1 : 0);
        } else {
            const auto& var = std::get<vqc::VariationalLayer>(spec.layers[i]);
            out << "var ent=" << (var.entangle ? 1 : 0) << " rx=" << join_ints(var.rx_qubits)
                << " rz=" << join_ints(var.rz_qubits);
        }
        out << '\n';
    }
}

inline std::map<std::string, std::string> tokenize_kv(std::istringstream& ss) {
    std::map<std::string, std::string> kv;
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return kv;
}

inline void write_mlp(std::ostream& out, const std::string& prefix, const qgan::Mlp& mlp) {
    out << prefix << ' ' << mlp.n_in() << ' ' << mlp.n_hidden() << ' ' << mlp.n_out() << ' '
        << (mlp.sigmoid_out() ? 1 : 0) << ' ' << mlp.masked() << '\n';
    write_params(out, prefix + ".w1", mlp.w1());
    write_params(out, prefix + ".b1", mlp.b1());
    write_params(out, prefix + ".w2", mlp.w2());
    write_params(out, prefix + ".b2", mlp.b2());
}

} // namespace model_detail

inline void save_model(const std::string& path, const ModelFile& m) {
    std::ofstream out(path);
    if (!out) throw data::IoError("cannot write model file: " + path);
    out << "qgad-model " << m.version << '\n';
    out << "kind " << m.kind << '\n';
    out << "backend " << (m.backend == qsim::Mode::Pure ? "pure" : "noisy") << '\n';
    out << "noise " << (m.noise.enabled ? 1 : 0) << ' ' << data::format_full(m.noise.p1) << ' '
        << data::format_full(m.noise.p2) << ' ' << data::format_full(m.noise.readout_flip)
        << '\n';
    out << "scaler " << data::format_full(m.scaler_min_a) << ' '
        << data::format_full(m.scaler_max_a) << ' ' << data::format_full(m.scaler_min_b) << ' '
        << data::format_full(m.scaler_max_b) << '\n';
    out << "losses " << data::format_full(m.last_loss_g) << ' '
        << data::format_full(m.last_loss_d) << '\n';
    out << "weight_losses " << data::format_full(m.weight_loss_g) << ' '
        << data::format_full(m.weight_loss_d) << '\n';
    out << "percentile " << data::format_full(m.percentile) << '\n';
    out << "tau " << m.tau << '\n';
    if (m.has_thresholds) {
        auto write_threshold = [&](const char* name, const detect::Threshold& t) {
            out << "threshold." << name << ' ' << data::format_full(t.value) << ' '
                << data::format_full(t.percentile) << ' ' << t.source_size << '\n';
        };
        write_threshold("combined", m.thresholds.combined);
        write_threshold("gen_only", m.thresholds.gen_only);
        write_threshold("disc_only", m.thresholds.disc_only);
    }
    if (m.kind == "qgan") {
        model_detail::write_layers(out, "gen", m.gen);
        model_detail::write_params(out, "gen.params", m.theta_g);
        model_detail::write_layers(out, "disc", m.disc);
        model_detail::write_params(out, "disc.params", m.theta_d);
    } else {
        model_detail::write_mlp(out, "cgan.gen", m.cgan.gen);
        model_detail::write_mlp(out, "cgan.disc", m.cgan.disc);
    }
    out << "config " << m.config_echo << '\n';
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data::IoError("cannot open model file: " + path);

    ModelFile m;
    struct PartialSpec {
        int n_qubits = 0;
        vqc::EncodingPlan encoding;
        std::vector<vqc::Layer> layers;
    };
    std::map<std::string, PartialSpec> specs;
    std::map<std::string, std::map<std::string, std::string>> mlp_headers;
    std::map<std::string, std::vector<double>> mlp_params;
    std::map<std::string, std::array<int, 5>> mlp_shapes;

    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (first) {
            if (key != "qgad-model") throw data::IoError("not a model file: " + path);
            ss >> m.version;
            if (m.version != 1) {
                throw data::IoError("unsupported model version in " + path);
            }
            first = false;
            continue;
        }
        if (key == "kind") {
            ss >> m.kind;
        } else if (key == "backend") {
            std::string b;
            ss >> b;
            m.backend = b == "noisy" ? qsim::Mode::Noisy : qsim::Mode::Pure;
        } else if (key == "noise") {
            int enabled = 0;
            ss >> enabled >> m.noise.p1 >> m.noise.p2 >> m.noise.readout_flip;
            m.noise.enabled = enabled != 0;
        } else if (key == "scaler") {
            ss >> m.scaler_min_a >> m.scaler_max_a >> m.scaler_min_b >> m.scaler_max_b;
        } else if (key == "losses") {
            ss >> m.last_loss_g >> m.last_loss_d;
        } else if (key == "weight_losses") {
            ss >> m.weight_loss_g >> m.weight_loss_d;
        } else if (key == "percentile") {
            ss >> m.percentile;
        } else if (key == "tau") {
            ss >> m.tau;
        } else if (key.rfind("threshold.", 0) == 0) {
            detect::Threshold t;
            ss >> t.value >> t.percentile >> t.source_size;
            m.has_thresholds = true;
            const auto name = key.substr(10);
            if (name == "combined") m.thresholds.combined = t;
            if (name == "gen_only") m.thresholds.gen_only = t;
            if (name == "disc_only") m.thresholds.disc_only = t;
        } else if (key == "gen.n_qubits" || key == "disc.n_qubits") {
            ss >> specs[key.substr(0, key.find('.'))].n_qubits;
        } else if (key == "gen.encoding" || key == "disc.encoding") {
            auto& spec = specs[key.substr(0, key.find('.'))];
            const auto kv = model_detail::tokenize_kv(ss);
            spec.encoding.feature_qubits.clear();
            for (int f = 0;; ++f) {
                const auto it = kv.find("feat" + std::to_string(f));
                if (it == kv.end()) break;
                spec.encoding.feature_qubits.push_back(model_detail::parse_ints(it->second));
            }
            if (const auto it = kv.find("cand"); it != kv.end()) {
                spec.encoding.candidate_qubits = model_detail::parse_ints(it->second);
            }
        } else if (key.rfind("gen.layer.", 0) == 0 || key.rfind("disc.layer.", 0) == 0) {
            auto& spec = specs[key.substr(0, key.find('.'))];
            std::string type;
            ss >> type;
            const auto kv = model_detail::tokenize_kv(ss);
            if (type == "input") {
                vqc::InputLayer in_layer;
                in_layer.injection_index = std::stoi(kv.at("idx"));
                in_layer.reupload_candidate = kv.at("reup") == "1";
                spec.layers.emplace_back(in_layer);
            } else {
                vqc::VariationalLayer var;
                var.entangle = kv.at("ent") == "1";
                var.rx_qubits = model_detail::parse_ints(kv.at("rx"));
                var.rz_qubits = model_detail::parse_ints(kv.at("rz"));
                spec.layers.emplace_back(var);
            }
        } else if (key == "gen.params") {
            m.theta_g = model_detail::read_params(ss);
        } else if (key == "disc.params") {
            m.theta_d = model_detail::read_params(ss);
        } else if (key == "cgan.gen" || key == "cgan.disc") {
            std::array<int, 5> shape{};
            for (int& v : shape) ss >> v;
            mlp_shapes[key] = shape;
        } else if (key.rfind("cgan.", 0) == 0) {
            mlp_params[key] = model_detail::read_params(ss);
        } else if (key == "config") {
            std::string rest;
            std::getline(ss, rest);
            m.config_echo = rest.empty() ? "{}" : rest.substr(1);
        }
        // unknown keys are ignored for forward compatibility
    }

    if (m.kind == "qgan") {
        auto build = [&](const std::string& name) {
            auto& p = specs.at(name);
            return vqc::CircuitSpec::make(p.n_qubits, p.encoding, std::move(p.layers));
        };
        m.gen = build("gen");
        m.disc = build("disc");
        if (static_cast<int>(m.theta_g.size()) != m.gen.total_params ||
            static_cast<int>(m.theta_d.size()) != m.disc.total_params) {
            throw data::IoError("model parameter vectors do not match circuit plans: " + path);
        }
    } else if (m.kind == "classical") {
        auto build = [&](const std::string& name) {
            const auto& s = mlp_shapes.at(name);
            qgan::Mlp mlp(s[0], s[1], s[2], s[3] != 0, s[4]);
            mlp.w1() = mlp_params.at(name + ".w1");
            mlp.b1() = mlp_params.at(name + ".b1");
            mlp.w2() = mlp_params.at(name + ".w2");
            mlp.b2() = mlp_params.at(name + ".b2");
            mlp.apply_mask();
            return mlp;
        };
        m.cgan.gen = build("cgan.gen");
        m.cgan.disc = build("cgan.disc");
    } else {
        throw data::IoError("unknown model kind '" + m.kind + "' in " + path);
    }
    return m;
}

// Closures over the persisted model; mode/noise default to what the model
// was saved with but can be overridden for noisy evaluation.
inline GeneratorFn model_generator_fn(const ModelFile& m) {
    if (m.kind == "classical") return qgan::make_classical_generator_fn(m.cgan.gen);
    return qgan::make_generator_fn(m.gen, m.theta_g, m.backend, m.noise);
}

inline GeneratorFn model_generator_fn(const ModelFile& m, qsim::Mode mode,
                                      const qsim::NoiseModel& noise) {
    if (m.kind == "classical") return qgan::make_classical_generator_fn(m.cgan.gen);
    return qgan::make_generator_fn(m.gen, m.theta_g, mode, noise);
}

inline DiscriminatorFn model_discriminator_fn(const ModelFile& m) {
    if (m.kind == "classical") return qgan::make_classical_discriminator_fn(m.cgan.disc);
    return qgan::make_discriminator_fn(m.disc, m.theta_d, m.backend, m.noise);
}

inline DiscriminatorFn model_discriminator_fn(const ModelFile& m, qsim::Mode mode,
                                              const qsim::NoiseModel& noise) {
    if (m.kind == "classical") return qgan::make_classical_discriminator_fn(m.cgan.disc);
    return qgan::make_discriminator_fn(m.disc, m.theta_d, mode, noise);
}

} // namespace qgad
