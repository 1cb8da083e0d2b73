#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qgad/vqc/circuit.hpp"

namespace qgad::vqc {

constexpr double kShift = 3.14159265358979323846 / 2.0;

using StateReadout = std::function<double(const qsim::QuantumState&)>;

namespace grad_detail {

inline void require_pauli_generated(const CompiledCircuit& cc) {
    for (const auto& g : cc.gates) {
        if (g.binding == BoundGate::Binding::Param && g.kind == qsim::GateKind::CX) {
            throw std::invalid_argument(
                "param_shift_grad: parameter bound to a non-Pauli-generated gate");
        }
    }
}

} // namespace grad_detail

// Exact gradient of a circuit readout with respect to every parameter:
// df/dtheta_k = [f(theta_k + pi/2) - f(theta_k - pi/2)] / 2. Each parameter
// binds a single RX/RZ gate, so the two-point rule is exact.
inline std::vector<double> param_shift_grad(const CompiledCircuit& cc, const ParamVector& params,
                                            const StateReadout& readout,
                                            qsim::Mode mode = qsim::Mode::Pure,
                                            const qsim::NoiseModel& noise = {}) {
    grad_detail::require_pauli_generated(cc);
    std::vector<double> grad(params.size(), 0.0);
    ParamVector shifted = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kShift;
        const double plus = readout(run(cc, shifted, mode, noise));
        shifted[k] = params[k] - kShift;
        const double minus = readout(run(cc, shifted, mode, noise));
        shifted[k] = params[k];
        grad[k] = (plus - minus) / 2.0;
    }
    return grad;
}

// Same rule applied to the injected RY angles, one slot at a time. Summing
// per-occurrence entries gives the derivative with respect to a value that
// is re-uploaded at several depths. `slot_subset` limits the work; the
// result is aligned with it.
inline std::vector<double> injection_shift_grad(const CompiledCircuit& cc,
                                                const ParamVector& params,
                                                const StateReadout& readout,
                                                const std::vector<std::size_t>& slot_subset,
                                                qsim::Mode mode = qsim::Mode::Pure,
                                                const qsim::NoiseModel& noise = {}) {
    std::vector<double> grad(slot_subset.size(), 0.0);
    std::vector<double> angles = base_injection_angles(cc);
    for (std::size_t i = 0; i < slot_subset.size(); ++i) {
        const std::size_t s = slot_subset[i];
        const double base = angles[s];
        angles[s] = base + kShift;
        const double plus = readout(run(cc, params, mode, noise, angles));
        angles[s] = base - kShift;
        const double minus = readout(run(cc, params, mode, noise, angles));
        angles[s] = base;
        grad[i] = (plus - minus) / 2.0;
    }
    return grad;
}

inline std::vector<double> injection_shift_grad(const CompiledCircuit& cc,
                                                const ParamVector& params,
                                                const StateReadout& readout,
                                                qsim::Mode mode = qsim::Mode::Pure,
                                                const qsim::NoiseModel& noise = {}) {
    std::vector<std::size_t> all(cc.slots.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return injection_shift_grad(cc, params, readout, all, mode, noise);
}

// Jacobian of several readouts at once; every shifted state is evaluated by
// each readout, so the circuit runs 2 * n_params times total.
inline std::vector<std::vector<double>> param_shift_jacobian(
    const CompiledCircuit& cc, const ParamVector& params,
    const std::vector<StateReadout>& readouts, qsim::Mode mode = qsim::Mode::Pure,
    const qsim::NoiseModel& noise = {}) {
    grad_detail::require_pauli_generated(cc);
    std::vector<std::vector<double>> jac(readouts.size(),
                                         std::vector<double>(params.size(), 0.0));
    ParamVector shifted = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kShift;
        const auto plus_state = run(cc, shifted, mode, noise);
        shifted[k] = params[k] - kShift;
        const auto minus_state = run(cc, shifted, mode, noise);
        shifted[k] = params[k];
        for (std::size_t r = 0; r < readouts.size(); ++r) {
            jac[r][k] = (readouts[r](plus_state) - readouts[r](minus_state)) / 2.0;
        }
    }
    return jac;
}

// Functional form for callers that own the evaluation, e.g. composed losses
// that are affine in the shifted output.
inline std::vector<double> param_shift_grad(int n_params,
                                            const std::function<double(const ParamVector&)>& f,
                                            const ParamVector& at) {
    if (static_cast<int>(at.size()) != n_params) {
        throw std::invalid_argument("param_shift_grad: parameter vector length mismatch");
    }
    std::vector<double> grad(at.size(), 0.0);
    ParamVector shifted = at;
    for (std::size_t k = 0; k < at.size(); ++k) {
        shifted[k] = at[k] + kShift;
        const double plus = f(shifted);
        shifted[k] = at[k] - kShift;
        const double minus = f(shifted);
        shifted[k] = at[k];
        grad[k] = (plus - minus) / 2.0;
    }
    return grad;
}

// d(arccos)/dx with the same boundary clamp as encode_angle, so chained
// input gradients stay finite when a prediction saturates.
inline double encode_angle_derivative(double x) {
    const double clamped = std::clamp(x, -1.0 + 1e-9, 1.0 - 1e-9);
    return -1.0 / std::sqrt(1.0 - clamped * clamped);
}

} // namespace qgad::vqc
