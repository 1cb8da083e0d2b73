#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgad/data/series.hpp"
#include "qgad/model_fn.hpp"
#include "qgad/prng.hpp"

namespace qgad::qgan {

// Single-hidden-layer perceptron with tanh hidden units. The trailing
// `masked_w1` first-layer weights are pinned to zero and excluded from the
// trainable-parameter count, which lets a plan hit an exact budget.
class Mlp {
  public:
    Mlp() = default;
    Mlp(int n_in, int n_hidden, int n_out, bool sigmoid_out, int masked_w1 = 0)
        : n_in_(n_in), n_hidden_(n_hidden), n_out_(n_out), sigmoid_out_(sigmoid_out),
          masked_w1_(masked_w1), w1_(static_cast<std::size_t>(n_hidden * n_in), 0.0),
          b1_(static_cast<std::size_t>(n_hidden), 0.0),
          w2_(static_cast<std::size_t>(n_out * n_hidden), 0.0),
          b2_(static_cast<std::size_t>(n_out), 0.0) {
        if (masked_w1_ < 0 || masked_w1_ >= static_cast<int>(w1_.size())) {
            throw std::invalid_argument("Mlp: mask must leave some first-layer weights");
        }
    }

    int n_in() const { return n_in_; }
    int n_out() const { return n_out_; }
    int n_hidden() const { return n_hidden_; }
    int masked() const { return masked_w1_; }

    int trainable_params() const {
        return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size()) - masked_w1_;
    }

    void init(Prng& rng) {
        const double r1 = std::sqrt(6.0 / static_cast<double>(n_in_ + n_hidden_));
        const double r2 = std::sqrt(6.0 / static_cast<double>(n_hidden_ + n_out_));
        for (double& w : w1_) w = rng.uniform(-r1, r1);
        for (double& w : b1_) w = 0.0;
        for (double& w : w2_) w = rng.uniform(-r2, r2);
        for (double& w : b2_) w = 0.0;
        apply_mask();
    }

    struct Cache {
        std::vector<double> in, hidden, out;
    };

    std::vector<double> forward(const std::vector<double>& in, Cache* cache = nullptr) const {
        if (static_cast<int>(in.size()) != n_in_) {
            throw std::invalid_argument("Mlp::forward: input width mismatch");
        }
        std::vector<double> hidden(static_cast<std::size_t>(n_hidden_), 0.0);
        for (int h = 0; h < n_hidden_; ++h) {
            double z = b1_[h];
            for (int i = 0; i < n_in_; ++i) z += w1_[h * n_in_ + i] * in[i];
            hidden[h] = std::tanh(z);
        }
        std::vector<double> out(static_cast<std::size_t>(n_out_), 0.0);
        for (int o = 0; o < n_out_; ++o) {
            double z = b2_[o];
            for (int h = 0; h < n_hidden_; ++h) z += w2_[o * n_hidden_ + h] * hidden[h];
            out[o] = sigmoid_out_ ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
        }
        if (cache) {
            cache->in = in;
            cache->hidden = hidden;
            cache->out = out;
        }
        return out;
    }

    struct Grads {
        std::vector<double> w1, b1, w2, b2, input;
    };

    // dout is dL/d(output). Returns parameter gradients plus dL/d(input)
    // for chaining through a downstream network.
    Grads backward(const Cache& cache, const std::vector<double>& dout) const {
        Grads g;
        g.w1.assign(w1_.size(), 0.0);
        g.b1.assign(b1_.size(), 0.0);
        g.w2.assign(w2_.size(), 0.0);
        g.b2.assign(b2_.size(), 0.0);
        g.input.assign(static_cast<std::size_t>(n_in_), 0.0);

        std::vector<double> dz2(static_cast<std::size_t>(n_out_), 0.0);
        for (int o = 0; o < n_out_; ++o) {
            const double y = cache.out[o];
            const double dact = sigmoid_out_ ? y * (1.0 - y) : 1.0 - y * y;
            dz2[o] = dout[o] * dact;
        }
        std::vector<double> dh(static_cast<std::size_t>(n_hidden_), 0.0);
        for (int o = 0; o < n_out_; ++o) {
            g.b2[o] = dz2[o];
            for (int h = 0; h < n_hidden_; ++h) {
                g.w2[o * n_hidden_ + h] = dz2[o] * cache.hidden[h];
                dh[h] += w2_[o * n_hidden_ + h] * dz2[o];
            }
        }
        for (int h = 0; h < n_hidden_; ++h) {
            const double dz1 = dh[h] * (1.0 - cache.hidden[h] * cache.hidden[h]);
            g.b1[h] = dz1;
            for (int i = 0; i < n_in_; ++i) {
                g.w1[h * n_in_ + i] = dz1 * cache.in[i];
                g.input[i] += w1_[h * n_in_ + i] * dz1;
            }
        }
        mask_tail(g.w1);
        return g;
    }

    void step(const Grads& g, double lr) {
        for (std::size_t i = 0; i < w1_.size(); ++i) w1_[i] -= lr * g.w1[i];
        for (std::size_t i = 0; i < b1_.size(); ++i) b1_[i] -= lr * g.b1[i];
        for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] -= lr * g.w2[i];
        for (std::size_t i = 0; i < b2_.size(); ++i) b2_[i] -= lr * g.b2[i];
        apply_mask();
    }

    std::vector<double>& w1() { return w1_; }
    std::vector<double>& b1() { return b1_; }
    std::vector<double>& w2() { return w2_; }
    std::vector<double>& b2() { return b2_; }
    const std::vector<double>& w1() const { return w1_; }
    const std::vector<double>& b1() const { return b1_; }
    const std::vector<double>& w2() const { return w2_; }
    const std::vector<double>& b2() const { return b2_; }

    void apply_mask() { mask_tail(w1_); }

    bool sigmoid_out() const { return sigmoid_out_; }

  private:
    int n_in_ = 0, n_hidden_ = 0, n_out_ = 0;
    bool sigmoid_out_ = false;
    int masked_w1_ = 0;
    std::vector<double> w1_, b1_, w2_, b2_;

    void mask_tail(std::vector<double>& w1) const {
        for (int i = 0; i < masked_w1_; ++i) w1[w1.size() - 1 - i] = 0.0;
    }
};

struct ClassicalGanConfig {
    int gen_params = 51;
    int disc_params = 55;
    int window_inputs = 6; // tau * 2 features
    int features = 2;
};

struct ClassicalGan {
    Mlp gen;  // window -> predicted point, tanh outputs in [-1, 1]
    Mlp disc; // window + candidate -> score, sigmoid output in [0, 1]
};

namespace cgan_detail {

inline int mlp_param_count(int n_in, int h, int n_out) {
    return h * n_in + h + n_out * h + n_out;
}

// Smallest hidden width whose parameter count reaches the target; the
// surplus is masked away so the trainable total is exact.
inline Mlp sized_mlp(int n_in, int n_out, bool sigmoid_out, int target) {
    for (int h = 1; h <= 64; ++h) {
        const int total = mlp_param_count(n_in, h, n_out);
        if (total >= target) {
            const int mask = total - target;
            if (mask >= h * n_in) break; // would erase the whole first layer
            return Mlp(n_in, h, n_out, sigmoid_out, mask);
        }
    }
    throw std::invalid_argument("sized_mlp: no hidden width reaches the parameter target");
}

} // namespace cgan_detail

inline ClassicalGan build_classical_gan(const ClassicalGanConfig& cfg, Prng& rng) {
    ClassicalGan gan;
    gan.gen = cgan_detail::sized_mlp(cfg.window_inputs, cfg.features, false, cfg.gen_params);
    gan.disc =
        cgan_detail::sized_mlp(cfg.window_inputs + cfg.features, 1, true, cfg.disc_params);
    if (gan.gen.trainable_params() != cfg.gen_params ||
        gan.disc.trainable_params() != cfg.disc_params) {
        throw std::invalid_argument("build_classical_gan: parameter totals do not match plan");
    }
    gan.gen.init(rng);
    gan.disc.init(rng);
    return gan;
}

inline std::vector<double> flatten_window(const data::TimeWindow& w) {
    std::vector<double> flat;
    flat.reserve(w.points.size() * 2);
    for (const auto& p : w.points) {
        flat.push_back(p.a);
        flat.push_back(p.b);
    }
    return flat;
}

inline GeneratorFn make_classical_generator_fn(const Mlp& gen) {
    return [gen](const data::TimeWindow& w) {
        const auto out = gen.forward(flatten_window(w));
        return data::TimePoint{out[0], out[1]};
    };
}

inline DiscriminatorFn make_classical_discriminator_fn(const Mlp& disc) {
    return [disc](const data::TimeWindow& w, const data::TimePoint& candidate) {
        auto in = flatten_window(w);
        in.push_back(candidate.a);
        in.push_back(candidate.b);
        return disc.forward(in)[0];
    };
}

} // namespace qgad::qgan
