#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgad/qsim/state.hpp"

namespace qgad::qsim {

// Dense complex matrix, row-major. Deliberately naive; this is the
// reference route the fast statevector path is checked against.
struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<Complex> m;

    static DenseMatrix identity(std::size_t dim) {
        DenseMatrix out;
        out.dim = dim;
        out.m.assign(dim * dim, Complex(0, 0));
        for (std::size_t i = 0; i < dim; ++i) out.m[i * dim + i] = Complex(1, 0);
        return out;
    }

    Complex& at(std::size_t r, std::size_t c) { return m[r * dim + c]; }
    Complex at(std::size_t r, std::size_t c) const { return m[r * dim + c]; }

    DenseMatrix operator*(const DenseMatrix& rhs) const {
        if (dim != rhs.dim) throw std::invalid_argument("DenseMatrix: dimension mismatch");
        DenseMatrix out;
        out.dim = dim;
        out.m.assign(dim * dim, Complex(0, 0));
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t k = 0; k < dim; ++k) {
                const Complex a = at(r, k);
                if (a == Complex(0, 0)) continue;
                for (std::size_t c = 0; c < dim; ++c) {
                    out.m[r * dim + c] += a * rhs.at(k, c);
                }
            }
        }
        return out;
    }

    std::vector<Complex> operator*(const std::vector<Complex>& v) const {
        if (v.size() != dim) throw std::invalid_argument("DenseMatrix: vector length mismatch");
        std::vector<Complex> out(dim, Complex(0, 0));
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) out[r] += at(r, c) * v[c];
        }
        return out;
    }
};

namespace oracle_detail {

inline DenseMatrix embed_1q(const Matrix2& u, int qubit, int n_qubits) {
    // Kronecker chain with qubit 0 as the leftmost (most significant) factor.
    DenseMatrix out = DenseMatrix::identity(1);
    for (int q = 0; q < n_qubits; ++q) {
        const std::size_t d = out.dim;
        DenseMatrix next;
        next.dim = d * 2;
        next.m.assign(next.dim * next.dim, Complex(0, 0));
        const Matrix2 factor = q == qubit
                                   ? u
                                   : Matrix2{Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)};
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                const Complex a = out.at(r, c);
                if (a == Complex(0, 0)) continue;
                for (std::size_t i = 0; i < 2; ++i) {
                    for (std::size_t j = 0; j < 2; ++j) {
                        next.at(r * 2 + i, c * 2 + j) = a * factor[i * 2 + j];
                    }
                }
            }
        }
        out = std::move(next);
    }
    return out;
}

inline DenseMatrix embed_cx(int control, int target, int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t cmask = std::size_t{1} << (n_qubits - 1 - control);
    const std::size_t tmask = std::size_t{1} << (n_qubits - 1 - target);
    DenseMatrix out;
    out.dim = dim;
    out.m.assign(dim * dim, Complex(0, 0));
    for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t i = (j & cmask) ? (j ^ tmask) : j;
        out.at(i, j) = Complex(1, 0);
    }
    return out;
}

} // namespace oracle_detail

// Full matrix of the circuit, as a product of per-gate embeddings in
// application order. Restricted to <= 4 qubits; this exists to check the
// in-place evolution, not to be fast.
inline DenseMatrix brute_force_unitary(const std::vector<GateOp>& circuit, int n_qubits) {
    if (n_qubits < 1 || n_qubits > 4) {
        throw std::invalid_argument("brute_force_unitary: oracle limited to 1..4 qubits");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    DenseMatrix total = DenseMatrix::identity(dim);
    for (const auto& g : circuit) {
        DenseMatrix gate_matrix =
            g.kind == GateKind::CX
                ? oracle_detail::embed_cx(g.control, g.target, n_qubits)
                : oracle_detail::embed_1q(rotation_matrix(g.kind, g.angle), g.target, n_qubits);
        total = gate_matrix * total;
    }
    return total;
}

} // namespace qgad::qsim
