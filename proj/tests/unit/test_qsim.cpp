#include <doctest.h>

#include <cmath>
#include <complex>

#include "qgad/prng.hpp"
#include "qgad/qsim/state.hpp"
#include "qgad/qsim/unitary_oracle.hpp"
#include "support/random_circuits.hpp"

using namespace qgad;
using qsim::Complex;
using qsim::GateOp;
using qsim::Mode;
using qsim::QuantumState;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("new_state prepares the ground state") {
    QuantumState one(1, Mode::Pure);
    CHECK(one.amplitudes()[0] == Complex(1, 0));
    CHECK(one.amplitudes()[1] == Complex(0, 0));

    QuantumState two(2, Mode::Pure);
    CHECK(two.amplitudes().size() == 4);
    CHECK(two.amplitudes()[0] == Complex(1, 0));
    for (std::size_t i = 1; i < 4; ++i) CHECK(two.amplitudes()[i] == Complex(0, 0));

    QuantumState noisy(2, Mode::Noisy);
    CHECK(noisy.rho()[0] == Complex(1, 0));
    for (std::size_t i = 1; i < noisy.rho().size(); ++i) CHECK(noisy.rho()[i] == Complex(0, 0));

    CHECK_THROWS_AS(QuantumState(0, Mode::Pure), std::invalid_argument);
    CHECK_THROWS_AS(QuantumState(9, Mode::Pure), std::invalid_argument);
}

TEST_CASE("single-qubit rotations act as their matrices") {
    SUBCASE("RY(0) is the identity") {
        QuantumState s(1, Mode::Pure);
        s.apply(GateOp::ry(0, 0.0));
        CHECK(std::abs(s.amplitudes()[0] - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(s.amplitudes()[1]) < 1e-15);
    }
    SUBCASE("RY(pi) flips |0> to |1>") {
        QuantumState s(1, Mode::Pure);
        s.apply(GateOp::ry(0, kPi));
        CHECK(std::abs(s.amplitudes()[0]) < 1e-12);
        CHECK(std::abs(s.amplitudes()[1] - Complex(1, 0)) < 1e-12);
    }
    SUBCASE("CX applied twice is the identity") {
        Prng rng(11);
        QuantumState s(2, Mode::Pure);
        for (const auto& g : testsupport::random_circuit(rng, 2, 8)) s.apply(g);
        const auto before = s.amplitudes();
        s.apply(GateOp::cx(0, 1));
        s.apply(GateOp::cx(0, 1));
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(std::abs(s.amplitudes()[i] - before[i]) < 1e-12);
        }
    }
    SUBCASE("invalid qubit index throws") {
        QuantumState s(2, Mode::Pure);
        CHECK_THROWS_AS(s.apply(GateOp::rx(2, 0.3)), std::invalid_argument);
        CHECK_THROWS_AS(s.apply(GateOp::cx(0, 0)), std::invalid_argument);
    }
}

TEST_CASE("random circuit matches the brute-force matrix chain") {
    Prng rng(42);
    const auto circuit = testsupport::random_circuit(rng, 3, 20);
    QuantumState s(3, Mode::Pure);
    s.apply(circuit);

    const auto u = qsim::brute_force_unitary(circuit, 3);
    std::vector<Complex> ground(8, Complex(0, 0));
    ground[0] = Complex(1, 0);
    const auto expected = u * ground;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(s.amplitudes()[i] - expected[i]) < 1e-12);
    }
}

TEST_CASE("oracle equivalence over 100 random circuits on <= 3 qubits") {
    Prng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(1, 3);
        const int gates = rng.uniform_int(1, 30);
        const auto circuit = testsupport::random_circuit(rng, n, gates);

        QuantumState s(n, Mode::Pure);
        s.apply(circuit);

        const auto u = qsim::brute_force_unitary(circuit, n);
        std::vector<Complex> ground(std::size_t{1} << n, Complex(0, 0));
        ground[0] = Complex(1, 0);
        const auto expected = u * ground;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            REQUIRE(std::abs(s.amplitudes()[i] - expected[i]) < 1e-12);
        }
    }
}

TEST_CASE("brute_force_unitary basics") {
    SUBCASE("empty circuit is the identity") {
        const auto u = qsim::brute_force_unitary({}, 1);
        CHECK(std::abs(u.at(0, 0) - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(u.at(0, 1)) < 1e-15);
        CHECK(std::abs(u.at(1, 0)) < 1e-15);
        CHECK(std::abs(u.at(1, 1) - Complex(1, 0)) < 1e-15);
    }
    SUBCASE("CX twice is the 4x4 identity") {
        const auto u = qsim::brute_force_unitary({GateOp::cx(0, 1), GateOp::cx(0, 1)}, 2);
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(std::abs(u.at(r, c) - (r == c ? Complex(1, 0) : Complex(0, 0))) < 1e-15);
            }
        }
    }
    SUBCASE("RZ(0.7) is diag(e^{-0.35i}, e^{0.35i})") {
        const auto u = qsim::brute_force_unitary({GateOp::rz(0, 0.7)}, 1);
        CHECK(std::abs(u.at(0, 0) - std::exp(Complex(0, -0.35))) < 1e-15);
        CHECK(std::abs(u.at(1, 1) - std::exp(Complex(0, 0.35))) < 1e-15);
        CHECK(std::abs(u.at(0, 1)) < 1e-15);
        CHECK(std::abs(u.at(1, 0)) < 1e-15);
    }
    SUBCASE("oracle scale is capped") {
        CHECK_THROWS_AS(qsim::brute_force_unitary({}, 5), std::invalid_argument);
    }
}

TEST_CASE("norm is preserved across a 1000-gate random circuit") {
    Prng rng(1234);
    QuantumState s(4, Mode::Pure);
    for (const auto& g : testsupport::random_circuit(rng, 4, 1000)) s.apply(g);
    CHECK(std::abs(s.norm_sq() - 1.0) < 1e-12);
}

TEST_CASE("expect_z") {
    SUBCASE("|0> gives +1") {
        QuantumState s(1, Mode::Pure);
        CHECK(s.expect_z(0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("RY(pi/2)|0> sits on the equator") {
        QuantumState s(1, Mode::Pure);
        s.apply(GateOp::ry(0, kPi / 2));
        CHECK(std::abs(s.expect_z(0)) < 1e-12);
    }
    SUBCASE("RY(arccos(0.3))|0> reads back 0.3") {
        QuantumState s(1, Mode::Pure);
        s.apply(GateOp::ry(0, std::acos(0.3)));
        CHECK(std::abs(s.expect_z(0) - 0.3) < 1e-12);
    }
    SUBCASE("qubit 0 is the most significant bit") {
        QuantumState s(2, Mode::Pure);
        s.apply(GateOp::ry(1, kPi)); // |01>
        CHECK(s.expect_z(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.expect_z(1) == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("depolarizing channel closed forms") {
    SUBCASE("p = 0 leaves rho unchanged") {
        Prng rng(3);
        QuantumState s(2, Mode::Noisy);
        for (const auto& g : testsupport::random_circuit(rng, 2, 10)) s.apply(g);
        const auto before = s.rho();
        s.apply_depolarizing({0}, 0.0);
        CHECK(s.rho() == before);
    }
    SUBCASE("p = 1 on |0> sends <Z> to -1/3") {
        QuantumState s(1, Mode::Noisy);
        s.apply_depolarizing({0}, 1.0);
        CHECK(s.expect_z(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("<Z> contracts by (1 - 4p/3)") {
        QuantumState s(1, Mode::Noisy);
        s.apply(GateOp::ry(0, std::acos(0.6))); // <Z> = 0.6
        s.apply_depolarizing({0}, 0.3);
        CHECK(s.expect_z(0) == doctest::Approx(0.36).epsilon(1e-12));
    }
    SUBCASE("pure mode rejects the channel") {
        QuantumState s(1, Mode::Pure);
        CHECK_THROWS_AS(s.apply_depolarizing({0}, 0.1), std::logic_error);
    }
}

TEST_CASE("depolarizing strictly contracts |<Z>| when <Z> != 0") {
    Prng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        QuantumState s(1, Mode::Noisy);
        s.apply(GateOp::ry(0, rng.uniform(0.2, 2.9)));
        const double before = s.expect_z(0);
        if (std::abs(before) < 1e-6) continue;
        const double p = rng.uniform(0.01, 0.8);
        s.apply_depolarizing({0}, p);
        const double after = s.expect_z(0);
        CHECK(std::abs(after) < std::abs(before));
        CHECK(after == doctest::Approx((1.0 - 4.0 * p / 3.0) * before).epsilon(1e-10));
    }
}

TEST_CASE("noiseless density matrix agrees with the statevector") {
    Prng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = rng.uniform_int(1, 3);
        const auto circuit = testsupport::random_circuit(rng, n, 25);

        qsim::NoiseModel off;
        off.p1 = off.p2 = off.readout_flip = 0.0;
        off.enabled = true;

        QuantumState pure(n, Mode::Pure);
        QuantumState noisy(n, Mode::Noisy, off);
        for (const auto& g : circuit) {
            pure.apply(g);
            noisy.apply(g);
        }
        for (int q = 0; q < n; ++q) {
            CHECK(std::abs(pure.expect_z(q) - noisy.expect_z(q)) < 1e-10);
        }
    }
}

TEST_CASE("readout flip rescales <Z> by (1 - 2 eps)") {
    qsim::NoiseModel nm;
    nm.p1 = nm.p2 = 0.0;
    nm.readout_flip = 0.02;
    nm.enabled = true;
    QuantumState s(1, Mode::Noisy, nm);
    CHECK(s.expect_z(0) == doctest::Approx(0.96).epsilon(1e-12));
}

TEST_CASE("density matrix stays Hermitian, trace one, and PSD under noise") {
    Prng rng(5150);
    qsim::NoiseModel nm;
    nm.enabled = true;
    QuantumState s(3, Mode::Noisy, nm);
    for (const auto& g : testsupport::random_circuit(rng, 3, 60)) s.apply(g);
    s.apply_depolarizing({0, 2}, 0.2);

    const auto& rho = s.rho();
    const std::size_t dim = s.dim();
    CHECK(std::abs(s.trace() - 1.0) < 1e-12);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            CHECK(std::abs(rho[r * dim + c] - std::conj(rho[c * dim + r])) < 1e-12);
        }
    }
    CHECK(testsupport::is_psd_within(rho, dim, 1e-10));
}

TEST_CASE("two-qubit depolarizing matches the partial-trace identity") {
    // For the 2-qubit channel, sum_{P != I} P rho P^dag = 16 * Tr_{q}(rho) (x) I/4 - rho,
    // so rho' = (1 - 16p/15) rho + (16p/15) * (mixed on the pair).
    Prng rng(808);
    QuantumState s(2, Mode::Noisy);
    for (const auto& g : testsupport::random_circuit(rng, 2, 12)) s.apply(g);
    auto rho_before = s.rho();
    const double p = 0.33;
    s.apply_depolarizing({0, 1}, p);

    const double lam = 1.0 - 16.0 * p / 15.0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const Complex mixed = r == c ? Complex(0.25, 0) : Complex(0, 0);
            const Complex expected = lam * rho_before[r * 4 + c] + (1.0 - lam) * mixed;
            CHECK(std::abs(s.rho()[r * 4 + c] - expected) < 1e-12);
        }
    }
}
