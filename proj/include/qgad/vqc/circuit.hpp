#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qgad/data/series.hpp"
#include "qgad/prng.hpp"
#include "qgad/qsim/state.hpp"

namespace qgad::vqc {

using ParamVector = std::vector<double>;
using data::TimePoint;
using data::TimeWindow;

// Classical value in [-1, 1] -> RY rotation angle, so that a Z readout of a
// fresh qubit returns the value. Values within 1e-9 of the boundary clamp.
inline double encode_angle(double x) {
    if (std::abs(x) > 1.0 + 1e-9) {
        throw std::domain_error("encode_angle: value " + std::to_string(x) +
                                " outside [-1, 1]");
    }
    return std::acos(std::clamp(x, -1.0, 1.0));
}

// Which qubits carry each feature. Every feature value is injected
// redundantly on all of its qubits with the same angle.
struct EncodingPlan {
    std::vector<std::vector<int>> feature_qubits = {{0, 1}, {2, 3}};
    std::vector<int> candidate_qubits; // one per feature; discriminator only

    static EncodingPlan generator_default() { return {}; }
    static EncodingPlan discriminator_default() {
        EncodingPlan p;
        p.candidate_qubits = {4, 5};
        return p;
    }
};

// Injects the window point at injection_index (and, on circuits with
// candidate qubits, re-uploads the candidate point).
struct InputLayer {
    int injection_index = 0;
    bool reupload_candidate = true;
};

// RX rotations, then RZ rotations, then a CX ring where the last qubit is
// entangled with the first. Parameter slices are assigned in layer order.
struct VariationalLayer {
    std::vector<int> rx_qubits;
    std::vector<int> rz_qubits;
    bool entangle = true;
    int param_offset = 0; // assigned by CircuitSpec::make

    int param_count() const {
        return static_cast<int>(rx_qubits.size() + rz_qubits.size());
    }
};

using Layer = std::variant<InputLayer, VariationalLayer>;

struct CircuitSpec {
    int n_qubits = 0;
    EncodingPlan encoding;
    std::vector<Layer> layers;
    int total_params = 0;

    static CircuitSpec make(int n_qubits, EncodingPlan encoding, std::vector<Layer> layers) {
        CircuitSpec spec;
        spec.n_qubits = n_qubits;
        spec.encoding = std::move(encoding);
        spec.layers = std::move(layers);

        auto check_qubit = [&](int q) {
            if (q < 0 || q >= n_qubits) {
                throw std::invalid_argument("CircuitSpec: qubit index out of range");
            }
        };
        std::vector<int> used;
        for (const auto& fq : spec.encoding.feature_qubits) {
            for (int q : fq) {
                check_qubit(q);
                used.push_back(q);
            }
        }
        for (int q : spec.encoding.candidate_qubits) {
            check_qubit(q);
            used.push_back(q);
        }
        std::sort(used.begin(), used.end());
        if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
            throw std::invalid_argument("CircuitSpec: encoding qubit assignments overlap");
        }

        int offset = 0;
        for (auto& layer : spec.layers) {
            if (auto* var = std::get_if<VariationalLayer>(&layer)) {
                for (int q : var->rx_qubits) check_qubit(q);
                for (int q : var->rz_qubits) check_qubit(q);
                var->param_offset = offset;
                offset += var->param_count();
            }
        }
        spec.total_params = offset;
        return spec;
    }

    int n_input_layers() const {
        int n = 0;
        for (const auto& layer : layers) n += std::holds_alternative<InputLayer>(layer) ? 1 : 0;
        return n;
    }
};

inline std::vector<Layer> default_generator_layers() {
    const VariationalLayer full{{0, 1, 2, 3}, {0, 1, 2, 3}, true};
    const VariationalLayer partial{{0, 1, 2, 3}, {0, 1}, true};
    return {InputLayer{0}, full, InputLayer{1}, full, InputLayer{2}, full, partial};
}

inline std::vector<Layer> default_discriminator_layers() {
    const VariationalLayer full{{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5}, true};
    const VariationalLayer partial{{0, 1}, {}, true};
    return {InputLayer{0}, full, InputLayer{1}, full, InputLayer{2}, full, full, partial};
}

// 4-qubit generator; the default plan interleaves three input layers with
// three full variational layers and ends with a partial one for a 30
// parameter budget.
inline CircuitSpec build_generator(std::vector<Layer> layers = default_generator_layers(),
                                   int expected_params = 30, int n_qubits = 4) {
    auto spec = CircuitSpec::make(n_qubits, EncodingPlan::generator_default(), std::move(layers));
    if (expected_params >= 0 && spec.total_params != expected_params) {
        throw std::invalid_argument("build_generator: layer plan has " +
                                    std::to_string(spec.total_params) + " parameters, expected " +
                                    std::to_string(expected_params));
    }
    return spec;
}

// 6-qubit discriminator; qubits 4-5 carry the candidate point, re-uploaded
// at every input layer. The default plan lands on 50 parameters.
inline CircuitSpec build_discriminator(std::vector<Layer> layers = default_discriminator_layers(),
                                       int expected_params = 50, int n_qubits = 6) {
    auto spec =
        CircuitSpec::make(n_qubits, EncodingPlan::discriminator_default(), std::move(layers));
    if (expected_params >= 0 && spec.total_params != expected_params) {
        throw std::invalid_argument("build_discriminator: layer plan has " +
                                    std::to_string(spec.total_params) + " parameters, expected " +
                                    std::to_string(expected_params));
    }
    return spec;
}

// --- compiled form -----------------------------------------------------

struct BoundGate {
    enum class Binding { Fixed, Param, Injection };
    qsim::GateKind kind = qsim::GateKind::RX;
    int target = 0;
    int control = -1;
    Binding binding = Binding::Fixed;
    double angle = 0.0; // Fixed only
    int index = -1;     // param index or injection slot
};

// One classical value -> one RY gate occurrence; kept for schedule
// assertions and for shifting injected angles during input gradients.
struct InjectionSlot {
    int input_layer_ordinal = 0; // 0-based over the circuit's input layers
    int injection_index = 0;     // which window timestep (candidates: -1)
    bool is_candidate = false;
    int feature = 0;
    int qubit = 0;
    double value = 0.0;
    double base_angle = 0.0;
};

struct CompiledCircuit {
    int n_qubits = 0;
    int total_params = 0;
    EncodingPlan encoding;
    std::vector<BoundGate> gates;
    std::vector<InjectionSlot> slots;
};

inline double feature_of(const TimePoint& p, int feature) { return feature == 0 ? p.a : p.b; }

// Binds a window (and candidate, when the plan encodes one) to the circuit.
inline CompiledCircuit compile(const CircuitSpec& spec, const TimeWindow& window,
                               const TimePoint* candidate = nullptr) {
    const bool wants_candidate = !spec.encoding.candidate_qubits.empty();
    if (wants_candidate && candidate == nullptr) {
        throw std::invalid_argument("compile: circuit encodes a candidate but none was given");
    }

    CompiledCircuit cc;
    cc.n_qubits = spec.n_qubits;
    cc.total_params = spec.total_params;
    cc.encoding = spec.encoding;

    int input_ordinal = 0;
    for (const auto& layer : spec.layers) {
        if (const auto* in = std::get_if<InputLayer>(&layer)) {
            if (in->injection_index < 0 ||
                static_cast<std::size_t>(in->injection_index) >= window.points.size()) {
                throw std::invalid_argument("compile: injection index outside the window");
            }
            const TimePoint& point = window.points[in->injection_index];
            for (std::size_t f = 0; f < spec.encoding.feature_qubits.size(); ++f) {
                const double value = feature_of(point, static_cast<int>(f));
                const double angle = encode_angle(value);
                for (int q : spec.encoding.feature_qubits[f]) {
                    const int slot = static_cast<int>(cc.slots.size());
                    cc.slots.push_back({input_ordinal, in->injection_index, false,
                                        static_cast<int>(f), q, value, angle});
                    cc.gates.push_back({qsim::GateKind::RY, q, -1,
                                        BoundGate::Binding::Injection, 0.0, slot});
                }
            }
            if (in->reupload_candidate && wants_candidate) {
                for (std::size_t f = 0; f < spec.encoding.candidate_qubits.size(); ++f) {
                    const double value = feature_of(*candidate, static_cast<int>(f));
                    const double angle = encode_angle(value);
                    const int q = spec.encoding.candidate_qubits[f];
                    const int slot = static_cast<int>(cc.slots.size());
                    cc.slots.push_back(
                        {input_ordinal, -1, true, static_cast<int>(f), q, value, angle});
                    cc.gates.push_back({qsim::GateKind::RY, q, -1,
                                        BoundGate::Binding::Injection, 0.0, slot});
                }
            }
            ++input_ordinal;
        } else {
            const auto& var = std::get<VariationalLayer>(layer);
            int k = var.param_offset;
            for (int q : var.rx_qubits) {
                cc.gates.push_back(
                    {qsim::GateKind::RX, q, -1, BoundGate::Binding::Param, 0.0, k++});
            }
            for (int q : var.rz_qubits) {
                cc.gates.push_back(
                    {qsim::GateKind::RZ, q, -1, BoundGate::Binding::Param, 0.0, k++});
            }
            if (var.entangle && spec.n_qubits >= 2) {
                for (int q = 0; q < spec.n_qubits; ++q) {
                    cc.gates.push_back({qsim::GateKind::CX, (q + 1) % spec.n_qubits, q,
                                        BoundGate::Binding::Fixed, 0.0, -1});
                }
            }
        }
    }
    return cc;
}

// Materializes the gate list with parameter and injection angles bound.
// injection_angles overrides the per-slot encoded angles when non-empty.
inline std::vector<qsim::GateOp> resolve_gates(const CompiledCircuit& cc,
                                               const ParamVector& params,
                                               const std::vector<double>& injection_angles = {}) {
    if (static_cast<int>(params.size()) != cc.total_params) {
        throw std::invalid_argument("resolve_gates: parameter vector length mismatch");
    }
    if (!injection_angles.empty() && injection_angles.size() != cc.slots.size()) {
        throw std::invalid_argument("resolve_gates: injection angle override length mismatch");
    }
    std::vector<qsim::GateOp> ops;
    ops.reserve(cc.gates.size());
    for (const auto& g : cc.gates) {
        qsim::GateOp op;
        op.kind = g.kind;
        op.target = g.target;
        op.control = g.control;
        switch (g.binding) {
        case BoundGate::Binding::Fixed:
            op.angle = g.angle;
            break;
        case BoundGate::Binding::Param:
            op.angle = params[g.index];
            break;
        case BoundGate::Binding::Injection:
            op.angle = injection_angles.empty() ? cc.slots[g.index].base_angle
                                                : injection_angles[g.index];
            break;
        }
        ops.push_back(op);
    }
    return ops;
}

inline qsim::QuantumState run(const CompiledCircuit& cc, const ParamVector& params,
                              qsim::Mode mode, const qsim::NoiseModel& noise = {},
                              const std::vector<double>& injection_angles = {}) {
    qsim::QuantumState state(cc.n_qubits, mode, noise);
    state.apply(resolve_gates(cc, params, injection_angles));
    return state;
}

inline std::vector<double> base_injection_angles(const CompiledCircuit& cc) {
    std::vector<double> out(cc.slots.size());
    for (std::size_t i = 0; i < cc.slots.size(); ++i) out[i] = cc.slots[i].base_angle;
    return out;
}

// Prediction readout: per feature, the mean Z expectation over that
// feature's qubits.
inline TimePoint generator_readout(const qsim::QuantumState& state, const EncodingPlan& plan) {
    double vals[2] = {0.0, 0.0};
    for (std::size_t f = 0; f < plan.feature_qubits.size() && f < 2; ++f) {
        double sum = 0.0;
        for (int q : plan.feature_qubits[f]) sum += state.expect_z(q);
        vals[f] = sum / static_cast<double>(plan.feature_qubits[f].size());
    }
    return {vals[0], vals[1]};
}

// Single meter on the first wire, affinely mapped into [0, 1].
inline double discriminator_readout(const qsim::QuantumState& state) {
    return (1.0 + state.expect_z(0)) / 2.0;
}

inline TimePoint generator_forward(const CircuitSpec& spec, const ParamVector& params,
                                   const TimeWindow& window, qsim::Mode mode = qsim::Mode::Pure,
                                   const qsim::NoiseModel& noise = {}) {
    const auto cc = compile(spec, window);
    return generator_readout(run(cc, params, mode, noise), spec.encoding);
}

inline double discriminator_forward(const CircuitSpec& spec, const ParamVector& params,
                                    const TimeWindow& window, const TimePoint& candidate,
                                    qsim::Mode mode = qsim::Mode::Pure,
                                    const qsim::NoiseModel& noise = {}) {
    const auto cc = compile(spec, window, &candidate);
    return discriminator_readout(run(cc, params, mode, noise));
}

// Small random angles keep the initial circuits near identity.
inline ParamVector init_params(const CircuitSpec& spec, Prng& rng,
                               double scale = 3.14159265358979323846 / 100.0) {
    ParamVector out(static_cast<std::size_t>(spec.total_params));
    for (double& v : out) v = rng.uniform(-scale, scale);
    return out;
}

} // namespace qgad::vqc
