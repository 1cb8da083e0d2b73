#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qgad/model_fn.hpp"
#include "qgad/prng.hpp"
#include "qgad/qgan/classical_gan.hpp"
#include "qgad/vqc/circuit.hpp"
#include "qgad/vqc/gradient.hpp"

namespace qgad::qgan {

using data::TimePoint;
using data::TimeWindow;
using vqc::CircuitSpec;
using vqc::ParamVector;

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    double learning_rate = 0.001;
    int epochs = 1;
    std::uint64_t seed = 0;
    qsim::Mode backend = qsim::Mode::Pure;
    qsim::NoiseModel noise{};
    Optimizer optimizer = Optimizer::Sgd;
    double init_scale = 3.14159265358979323846 / 100.0;

    void validate() const {
        if (!(learning_rate > 0.0) && learning_rate != 0.0) {
            throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
        }
        if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    }
};

// Shared loss definitions; the quantum and classical trainers both go
// through these, so the comparison stays protocol-identical.
inline double disc_loss_value(double d_real, double d_fake) {
    return (d_real - 1.0) * (d_real - 1.0) + d_fake * d_fake;
}
inline double gen_loss_value(double d_fake) { return (d_fake - 1.0) * (d_fake - 1.0); }

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

namespace train_detail {

inline void apply_update(ParamVector& theta, const std::vector<double>& grad, double lr,
                         Optimizer opt, AdamState& adam) {
    if (opt == Optimizer::Sgd) {
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
        return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (adam.m.size() != theta.size()) {
        adam.m.assign(theta.size(), 0.0);
        adam.v.assign(theta.size(), 0.0);
        adam.t = 0;
    }
    ++adam.t;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        adam.m[i] = beta1 * adam.m[i] + (1.0 - beta1) * grad[i];
        adam.v[i] = beta2 * adam.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = adam.m[i] / (1.0 - std::pow(beta1, adam.t));
        const double v_hat = adam.v[i] / (1.0 - std::pow(beta2, adam.t));
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace train_detail

struct TrainState {
    ParamVector theta_g, theta_d;
    double last_loss_g = 0.0;
    double last_loss_d = 0.0;
    std::vector<std::pair<double, double>> loss_history; // (L_G, L_D) per step
    long step_count = 0;
    AdamState adam_g, adam_d;
};

inline TrainState init_train_state(const CircuitSpec& gen, const CircuitSpec& disc,
                                   const TrainConfig& cfg) {
    Prng rng(cfg.seed);
    TrainState st;
    st.theta_g = vqc::init_params(gen, rng, cfg.init_scale);
    st.theta_d = vqc::init_params(disc, rng, cfg.init_scale);
    return st;
}

inline vqc::StateReadout disc_readout_fn() {
    return [](const qsim::QuantumState& s) { return vqc::discriminator_readout(s); };
}

// L_D = (D(w, target) - 1)^2 + D(w, fake)^2 and its exact gradient in
// theta_D. The loss is quadratic in the two affine circuit readouts, so the
// shift-rule readout gradients chain classically.
inline std::vector<double> disc_loss_grad(const CircuitSpec& disc, const ParamVector& theta_d,
                                          const TimeWindow& window, const TimePoint& fake,
                                          qsim::Mode mode, const qsim::NoiseModel& noise,
                                          double* loss_out = nullptr) {
    const auto readout = disc_readout_fn();
    const auto cc_real = vqc::compile(disc, window, &window.target);
    const auto cc_fake = vqc::compile(disc, window, &fake);
    const double d_real = readout(vqc::run(cc_real, theta_d, mode, noise));
    const double d_fake = readout(vqc::run(cc_fake, theta_d, mode, noise));
    if (loss_out) *loss_out = disc_loss_value(d_real, d_fake);

    const auto grad_real = vqc::param_shift_grad(cc_real, theta_d, readout, mode, noise);
    const auto grad_fake = vqc::param_shift_grad(cc_fake, theta_d, readout, mode, noise);
    std::vector<double> grad(theta_d.size(), 0.0);
    for (std::size_t k = 0; k < grad.size(); ++k) {
        grad[k] = 2.0 * (d_real - 1.0) * grad_real[k] + 2.0 * d_fake * grad_fake[k];
    }
    return grad;
}

// L_G = (D(w, G(w)) - 1)^2 and its gradient in theta_G: shift-rule Jacobian
// of the generator outputs, shift-rule sensitivity of the score to each
// re-uploaded candidate occurrence, and the arccos encoding derivative in
// between.
inline std::vector<double> gen_loss_grad(const CircuitSpec& gen, const CircuitSpec& disc,
                                         const ParamVector& theta_g, const ParamVector& theta_d,
                                         const TimeWindow& window, qsim::Mode mode,
                                         const qsim::NoiseModel& noise,
                                         double* loss_out = nullptr) {
    const auto readout = disc_readout_fn();
    const TimePoint fake = vqc::generator_forward(gen, theta_g, window, mode, noise);
    const auto cc_fake = vqc::compile(disc, window, &fake);
    const double score = readout(vqc::run(cc_fake, theta_d, mode, noise));
    if (loss_out) *loss_out = gen_loss_value(score);

    const auto cc_gen = vqc::compile(gen, window);
    const std::vector<vqc::StateReadout> outputs = {
        [&gen](const qsim::QuantumState& s) { return vqc::generator_readout(s, gen.encoding).a; },
        [&gen](const qsim::QuantumState& s) { return vqc::generator_readout(s, gen.encoding).b; },
    };
    const auto jac = vqc::param_shift_jacobian(cc_gen, theta_g, outputs, mode, noise);

    std::vector<std::size_t> cand_slots;
    for (std::size_t s = 0; s < cc_fake.slots.size(); ++s) {
        if (cc_fake.slots[s].is_candidate) cand_slots.push_back(s);
    }
    const auto slot_grads =
        vqc::injection_shift_grad(cc_fake, theta_d, readout, cand_slots, mode, noise);
    double ds_dx[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < cand_slots.size(); ++i) {
        const auto& slot = cc_fake.slots[cand_slots[i]];
        ds_dx[slot.feature] += slot_grads[i];
    }
    ds_dx[0] *= vqc::encode_angle_derivative(fake.a);
    ds_dx[1] *= vqc::encode_angle_derivative(fake.b);

    std::vector<double> grad(theta_g.size(), 0.0);
    for (std::size_t k = 0; k < grad.size(); ++k) {
        grad[k] = 2.0 * (score - 1.0) * (ds_dx[0] * jac[0][k] + ds_dx[1] * jac[1][k]);
    }
    return grad;
}

// One adversarial step on one window: discriminator first (real toward 1,
// fake toward 0), then the generator against the refreshed discriminator.
inline void train_step(TrainState& st, const CircuitSpec& gen, const CircuitSpec& disc,
                       const TimeWindow& window, const TrainConfig& cfg) {
    const TimePoint fake =
        vqc::generator_forward(gen, st.theta_g, window, cfg.backend, cfg.noise);

    double loss_d = 0.0;
    if (cfg.learning_rate > 0.0) {
        const auto grad =
            disc_loss_grad(disc, st.theta_d, window, fake, cfg.backend, cfg.noise, &loss_d);
        train_detail::apply_update(st.theta_d, grad, cfg.learning_rate, cfg.optimizer,
                                   st.adam_d);
    } else {
        const double d_real = vqc::discriminator_forward(disc, st.theta_d, window,
                                                         window.target, cfg.backend, cfg.noise);
        const double d_fake =
            vqc::discriminator_forward(disc, st.theta_d, window, fake, cfg.backend, cfg.noise);
        loss_d = disc_loss_value(d_real, d_fake);
    }

    double loss_g = 0.0;
    if (cfg.learning_rate > 0.0) {
        const auto grad = gen_loss_grad(gen, disc, st.theta_g, st.theta_d, window, cfg.backend,
                                        cfg.noise, &loss_g);
        train_detail::apply_update(st.theta_g, grad, cfg.learning_rate, cfg.optimizer,
                                   st.adam_g);
    } else {
        const TimePoint fake2 =
            vqc::generator_forward(gen, st.theta_g, window, cfg.backend, cfg.noise);
        const double score = vqc::discriminator_forward(disc, st.theta_d, window, fake2,
                                                        cfg.backend, cfg.noise);
        loss_g = gen_loss_value(score);
    }

    if (!std::isfinite(loss_d) || !std::isfinite(loss_g)) {
        throw TrainError("train_step: non-finite loss at step " + std::to_string(st.step_count));
    }
    st.last_loss_d = loss_d;
    st.last_loss_g = loss_g;
    st.loss_history.emplace_back(loss_g, loss_d);
    ++st.step_count;
}

// Sequential passes over the windows in time order.
inline TrainState train(const CircuitSpec& gen, const CircuitSpec& disc,
                        const std::vector<TimeWindow>& windows, const TrainConfig& cfg) {
    cfg.validate();
    if (windows.empty()) throw TrainError("train: empty dataset");
    TrainState st = init_train_state(gen, disc, cfg);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const auto& w : windows) train_step(st, gen, disc, w, cfg);
    }
    return st;
}

// Mean over points of the per-point MSE across the two features.
inline double evaluate_mse(const GeneratorFn& generator,
                           const std::vector<TimeWindow>& windows) {
    if (windows.empty()) throw std::invalid_argument("evaluate_mse: empty dataset");
    double total = 0.0;
    for (const auto& w : windows) {
        const TimePoint p = generator(w);
        const double da = p.a - w.target.a;
        const double db = p.b - w.target.b;
        total += (da * da + db * db) / 2.0;
    }
    return total / static_cast<double>(windows.size());
}

inline GeneratorFn make_generator_fn(CircuitSpec gen, ParamVector theta,
                                     qsim::Mode mode = qsim::Mode::Pure,
                                     const qsim::NoiseModel& noise = {}) {
    return [gen = std::move(gen), theta = std::move(theta), mode, noise](const TimeWindow& w) {
        return vqc::generator_forward(gen, theta, w, mode, noise);
    };
}

inline DiscriminatorFn make_discriminator_fn(CircuitSpec disc, ParamVector theta,
                                             qsim::Mode mode = qsim::Mode::Pure,
                                             const qsim::NoiseModel& noise = {}) {
    return [disc = std::move(disc), theta = std::move(theta), mode,
            noise](const TimeWindow& w, const TimePoint& candidate) {
        return vqc::discriminator_forward(disc, theta, w, candidate, mode, noise);
    };
}

// --- classical baseline --------------------------------------------------

struct ClassicalTrainState {
    ClassicalGan gan;
    double last_loss_g = 0.0;
    double last_loss_d = 0.0;
    std::vector<std::pair<double, double>> loss_history;
    long step_count = 0;
};

inline void train_step_classical(ClassicalTrainState& st, const TimeWindow& window,
                                 const TrainConfig& cfg) {
    Mlp& gen = st.gan.gen;
    Mlp& disc = st.gan.disc;
    const auto window_flat = flatten_window(window);

    auto disc_input = [&](const TimePoint& cand) {
        auto in = window_flat;
        in.push_back(cand.a);
        in.push_back(cand.b);
        return in;
    };

    Mlp::Cache gen_cache;
    const auto fake_out = gen.forward(window_flat, &gen_cache);
    const TimePoint fake{fake_out[0], fake_out[1]};

    // discriminator update
    Mlp::Cache real_cache, fake_cache;
    const double d_real = disc.forward(disc_input(window.target), &real_cache)[0];
    const double d_fake = disc.forward(disc_input(fake), &fake_cache)[0];
    const double loss_d = disc_loss_value(d_real, d_fake);
    if (cfg.learning_rate > 0.0) {
        const auto g_real = disc.backward(real_cache, {2.0 * (d_real - 1.0)});
        const auto g_fake = disc.backward(fake_cache, {2.0 * d_fake});
        disc.step(g_real, cfg.learning_rate);
        disc.step(g_fake, cfg.learning_rate);
    }

    // generator update through the refreshed discriminator
    Mlp::Cache gen_cache2, score_cache;
    const auto fake_out2 = gen.forward(window_flat, &gen_cache2);
    const double score = disc.forward(disc_input({fake_out2[0], fake_out2[1]}), &score_cache)[0];
    const double loss_g = gen_loss_value(score);
    if (cfg.learning_rate > 0.0) {
        const auto d_grads = disc.backward(score_cache, {2.0 * (score - 1.0)});
        // last two discriminator inputs are the generator outputs
        const std::vector<double> dout = {d_grads.input[d_grads.input.size() - 2],
                                          d_grads.input[d_grads.input.size() - 1]};
        const auto g_grads = gen.backward(gen_cache2, dout);
        gen.step(g_grads, cfg.learning_rate);
    }

    if (!std::isfinite(loss_d) || !std::isfinite(loss_g)) {
        throw TrainError("train_step_classical: non-finite loss");
    }
    st.last_loss_d = loss_d;
    st.last_loss_g = loss_g;
    st.loss_history.emplace_back(loss_g, loss_d);
    ++st.step_count;
}

inline ClassicalTrainState train_classical(const ClassicalGanConfig& gan_cfg,
                                           const std::vector<TimeWindow>& windows,
                                           const TrainConfig& cfg) {
    cfg.validate();
    if (windows.empty()) throw TrainError("train_classical: empty dataset");
    Prng rng(cfg.seed);
    ClassicalTrainState st{build_classical_gan(gan_cfg, rng)};
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const auto& w : windows) train_step_classical(st, w, cfg);
    }
    return st;
}

} // namespace qgad::qgan
