#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgad::qsim {

using Complex = std::complex<double>;

enum class Mode { Pure, Noisy };

enum class GateKind { RX, RY, RZ, CX };

struct GateOp {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1; // CX only
    double angle = 0.0;

    static GateOp rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
    static GateOp ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static GateOp rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static GateOp cx(int control, int target) { return {GateKind::CX, target, control, 0.0}; }
};

// Per-gate depolarizing strengths plus a symmetric readout flip applied to
// Z-expectations. Only consulted by noisy-mode states.
struct NoiseModel {
    double p1 = 0.001;
    double p2 = 0.01;
    double readout_flip = 0.02;
    bool enabled = false;

    void validate() const {
        auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in_unit(p1) || !in_unit(p2) || !in_unit(readout_flip)) {
            throw std::invalid_argument("NoiseModel: probabilities must lie in [0, 1]");
        }
    }
};

using Matrix2 = std::array<Complex, 4>; // row-major 2x2

inline Matrix2 rotation_matrix(GateKind kind, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (kind) {
    case GateKind::RX:
        return {Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0)};
    case GateKind::RY:
        return {Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0)};
    case GateKind::RZ:
        return {std::exp(Complex(0, -theta / 2.0)), Complex(0, 0), Complex(0, 0),
                std::exp(Complex(0, theta / 2.0))};
    default:
        throw std::invalid_argument("rotation_matrix: not a rotation gate");
    }
}

// n-qubit state, either a pure statevector or a density matrix.
// Convention used repo-wide: qubit 0 is the most significant bit of the
// basis index, so |q0 q1 ... q_{n-1}> has index sum_i q_i * 2^(n-1-i).
class QuantumState {
  public:
    QuantumState(int n_qubits, Mode mode, NoiseModel noise = {})
        : n_(n_qubits), mode_(mode), noise_(noise) {
        if (n_qubits < 1 || n_qubits > 8) {
            throw std::invalid_argument("QuantumState: n_qubits must be in 1..8");
        }
        noise_.validate();
        const std::size_t dim = std::size_t{1} << n_;
        if (mode_ == Mode::Pure) {
            amp_.assign(dim, Complex(0, 0));
            amp_[0] = Complex(1, 0);
        } else {
            rho_.assign(dim * dim, Complex(0, 0));
            rho_[0] = Complex(1, 0);
        }
    }

    int n_qubits() const { return n_; }
    Mode mode() const { return mode_; }
    std::size_t dim() const { return std::size_t{1} << n_; }
    const NoiseModel& noise() const { return noise_; }

    const std::vector<Complex>& amplitudes() const {
        if (mode_ != Mode::Pure) throw std::logic_error("amplitudes(): state is not pure");
        return amp_;
    }

    const std::vector<Complex>& rho() const {
        if (mode_ != Mode::Noisy) throw std::logic_error("rho(): state is not a density matrix");
        return rho_;
    }

    // Applies the unitary; in noisy mode a depolarizing channel of the
    // matching arity follows when noise is enabled.
    void apply(const GateOp& g) {
        if (g.kind == GateKind::CX) {
            check_qubit(g.control);
            check_qubit(g.target);
            if (g.control == g.target) {
                throw std::invalid_argument("apply: CX control equals target");
            }
            apply_cx(g.control, g.target);
            if (mode_ == Mode::Noisy && noise_.enabled && noise_.p2 > 0.0) {
                apply_depolarizing({g.control, g.target}, noise_.p2);
            }
        } else {
            check_qubit(g.target);
            apply_1q(rotation_matrix(g.kind, g.angle), g.target);
            if (mode_ == Mode::Noisy && noise_.enabled && noise_.p1 > 0.0) {
                apply_depolarizing({g.target}, noise_.p1);
            }
        }
    }

    void apply(const std::vector<GateOp>& circuit) {
        for (const auto& g : circuit) apply(g);
    }

    // rho <- (1-p) rho + p/(4^k - 1) * sum over non-identity Pauli strings
    // on the k listed qubits of P rho P^dag. k is 1 or 2.
    void apply_depolarizing(const std::vector<int>& qubits, double p) {
        if (mode_ != Mode::Noisy) {
            throw std::logic_error("apply_depolarizing: state is pure");
        }
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("apply_depolarizing: p outside [0, 1]");
        for (int q : qubits) check_qubit(q);
        if (qubits.empty() || qubits.size() > 2) {
            throw std::invalid_argument("apply_depolarizing: channel arity must be 1 or 2");
        }
        if (p == 0.0) return;

        const std::size_t k = qubits.size();
        const double n_paulis = std::pow(4.0, static_cast<double>(k)) - 1.0;
        std::vector<Complex> mix(rho_.size(), Complex(0, 0));
        std::vector<Complex> term;
        const int n_strings = k == 1 ? 4 : 16;
        for (int code = 1; code < n_strings; ++code) {
            term = rho_;
            int c = code;
            for (int q : qubits) {
                const int pauli = c & 3;
                c >>= 2;
                if (pauli != 0) conjugate_by_pauli(term, pauli, q);
            }
            for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += term[i];
        }
        const double w = p / n_paulis;
        for (std::size_t i = 0; i < rho_.size(); ++i) {
            rho_[i] = (1.0 - p) * rho_[i] + w * mix[i];
        }
    }

    // <Z_q>; in noisy mode a readout flip eps rescales by (1 - 2 eps).
    double expect_z(int qubit) const {
        check_qubit(qubit);
        const std::size_t mask = bit_mask(qubit);
        double z = 0.0;
        if (mode_ == Mode::Pure) {
            for (std::size_t i = 0; i < amp_.size(); ++i) {
                const double p = std::norm(amp_[i]);
                z += (i & mask) ? -p : p;
            }
        } else {
            const std::size_t dim = this->dim();
            for (std::size_t i = 0; i < dim; ++i) {
                const double p = rho_[i * dim + i].real();
                z += (i & mask) ? -p : p;
            }
            if (noise_.enabled) z *= 1.0 - 2.0 * noise_.readout_flip;
        }
        return z;
    }

    double norm_sq() const {
        double t = 0.0;
        for (const auto& a : amplitudes()) t += std::norm(a);
        return t;
    }

    double trace() const {
        const std::size_t dim = this->dim();
        double t = 0.0;
        for (std::size_t i = 0; i < dim; ++i) t += rho()[i * dim + i].real();
        return t;
    }

  private:
    int n_;
    Mode mode_;
    NoiseModel noise_;
    std::vector<Complex> amp_;
    std::vector<Complex> rho_;

    std::size_t bit_mask(int qubit) const { return std::size_t{1} << (n_ - 1 - qubit); }

    void check_qubit(int q) const {
        if (q < 0 || q >= n_) {
            throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                        std::to_string(n_) + " qubits");
        }
    }

    void apply_1q(const Matrix2& u, int qubit) {
        if (mode_ == Mode::Pure) {
            apply_1q_vector(amp_, u, qubit);
        } else {
            left_multiply_1q(rho_, u, qubit);
            right_multiply_1q_dagger(rho_, u, qubit);
        }
    }

    void apply_cx(int control, int target) {
        const std::size_t cmask = bit_mask(control);
        const std::size_t tmask = bit_mask(target);
        const std::size_t dim = this->dim();
        if (mode_ == Mode::Pure) {
            for (std::size_t i = 0; i < dim; ++i) {
                if ((i & cmask) && !(i & tmask)) std::swap(amp_[i], amp_[i | tmask]);
            }
        } else {
            // rows, then columns: rho <- P rho P^T with P the CX permutation
            for (std::size_t r = 0; r < dim; ++r) {
                if ((r & cmask) && !(r & tmask)) {
                    const std::size_t r2 = r | tmask;
                    for (std::size_t c = 0; c < dim; ++c) {
                        std::swap(rho_[r * dim + c], rho_[r2 * dim + c]);
                    }
                }
            }
            for (std::size_t c = 0; c < dim; ++c) {
                if ((c & cmask) && !(c & tmask)) {
                    const std::size_t c2 = c | tmask;
                    for (std::size_t r = 0; r < dim; ++r) {
                        std::swap(rho_[r * dim + c], rho_[r * dim + c2]);
                    }
                }
            }
        }
    }

    void apply_1q_vector(std::vector<Complex>& v, const Matrix2& u, int qubit) const {
        const std::size_t mask = bit_mask(qubit);
        const std::size_t dim = this->dim();
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & mask) continue;
            const Complex a0 = v[i];
            const Complex a1 = v[i | mask];
            v[i] = u[0] * a0 + u[1] * a1;
            v[i | mask] = u[2] * a0 + u[3] * a1;
        }
    }

    void left_multiply_1q(std::vector<Complex>& m, const Matrix2& u, int qubit) const {
        const std::size_t mask = bit_mask(qubit);
        const std::size_t dim = this->dim();
        for (std::size_t r = 0; r < dim; ++r) {
            if (r & mask) continue;
            const std::size_t r2 = r | mask;
            for (std::size_t c = 0; c < dim; ++c) {
                const Complex a0 = m[r * dim + c];
                const Complex a1 = m[r2 * dim + c];
                m[r * dim + c] = u[0] * a0 + u[1] * a1;
                m[r2 * dim + c] = u[2] * a0 + u[3] * a1;
            }
        }
    }

    void right_multiply_1q_dagger(std::vector<Complex>& m, const Matrix2& u, int qubit) const {
        const std::size_t mask = bit_mask(qubit);
        const std::size_t dim = this->dim();
        for (std::size_t c = 0; c < dim; ++c) {
            if (c & mask) continue;
            const std::size_t c2 = c | mask;
            for (std::size_t r = 0; r < dim; ++r) {
                const Complex a0 = m[r * dim + c];
                const Complex a1 = m[r * dim + c2];
                m[r * dim + c] = a0 * std::conj(u[0]) + a1 * std::conj(u[1]);
                m[r * dim + c2] = a0 * std::conj(u[2]) + a1 * std::conj(u[3]);
            }
        }
    }

    // pauli: 1 = X, 2 = Y, 3 = Z
    void conjugate_by_pauli(std::vector<Complex>& m, int pauli, int qubit) const {
        static const Matrix2 px = {Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)};
        static const Matrix2 py = {Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0)};
        static const Matrix2 pz = {Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0)};
        const Matrix2& u = pauli == 1 ? px : pauli == 2 ? py : pz;
        left_multiply_1q(m, u, qubit);
        right_multiply_1q_dagger(m, u, qubit);
    }
};

inline QuantumState new_state(int n_qubits, Mode mode, NoiseModel noise = {}) {
    return QuantumState(n_qubits, mode, noise);
}

} // namespace qgad::qsim
