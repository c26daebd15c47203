#pragma once

// Fully connected networks with leaky-ReLU hidden layers, a selectable output
// head, exact reverse-mode gradients and Adam.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "respg/rng.hpp"

namespace respg::nn {

enum class Head {
  Linear,
  Sigmoid,
  Tanh,
  // Last layer of width 2k read as [mean_1..k, log_std_1..k]; log_std is
  // hard-clamped to [log_std_min, log_std_max].
  Gaussian,
};

std::string_view head_name(Head h) noexcept;
bool parse_head(std::string_view s, Head& out) noexcept;

struct MlpSpec {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  Head head = Head::Linear;
  double slope = 0.01;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

inline double lrelu(double x, double slope) noexcept { return x >= 0.0 ? x : slope * x; }

// Activations recorded by a forward pass, consumed by backward.
struct Tape {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;   // per layer, before activation/head
  std::vector<std::vector<double>> post;  // per layer, after activation/head

  std::span<const double> output() const noexcept { return post.back(); }
};

class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized parameters.
  explicit Mlp(MlpSpec spec);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static Mlp init(MlpSpec spec, Rng& rng);

  const MlpSpec& spec() const noexcept { return spec_; }
  std::size_t input_size() const noexcept { return spec_.layer_sizes.front(); }
  std::size_t output_size() const noexcept { return spec_.layer_sizes.back(); }
  std::size_t num_layers() const noexcept { return spec_.layer_sizes.size() - 1; }
  std::size_t num_params() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  // Layer l maps layer_sizes[l] -> layer_sizes[l+1]; weights are row-major
  // (out x in).
  std::span<const double> weights(std::size_t layer) const noexcept;
  std::span<const double> biases(std::size_t layer) const noexcept;
  std::span<double> weights(std::size_t layer) noexcept;
  std::span<double> biases(std::size_t layer) noexcept;

  std::vector<double> forward(std::span<const double> input) const;
  void forward(std::span<const double> input, Tape& tape) const;

  // Gradient of dot(output, upstream). Parameter gradients are ADDED into
  // param_grad; input_grad (may be empty) is overwritten.
  void backward(const Tape& tape, std::span<const double> upstream, std::span<double> param_grad,
                std::span<double> input_grad) const;

  friend bool operator==(const Mlp& a, const Mlp& b) noexcept { return a.params_ == b.params_; }

 private:
  void check_input(std::span<const double> input) const;

  MlpSpec spec_;
  std::vector<double> params_;
  std::vector<std::size_t> w_offset_;
  std::vector<std::size_t> b_offset_;
};

struct Gradients {
  std::vector<double> params;
  std::vector<double> input;
};

Gradients backward(const Mlp& net, std::span<const double> input, std::span<const double> upstream);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate) : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

// Bias-corrected Adam step; increments opt.t. Throws ShapeMismatch.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& opt);

enum class Squash { Sigmoid, Tanh };

// Reparameterized draw u = mean + exp(log_std) * noise, action = squash(u)
// in (0,1) for Sigmoid and (-1,1) for Tanh. log_prob is the density of the
// squashed action (Gaussian log-density of u minus the log-Jacobian).
// The d_* members are partial derivatives w.r.t. mean and log_std per
// dimension, with the noise held fixed.
struct SquashedSample {
  std::vector<double> action;
  std::vector<double> pre_squash;
  double log_prob = 0.0;
  std::vector<double> daction_dmean;
  std::vector<double> daction_dlogstd;
  std::vector<double> dlogp_dmean;
  std::vector<double> dlogp_dlogstd;
};

SquashedSample sample_squashed_gaussian(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise,
                                        Squash squash = Squash::Sigmoid);

double squash_value(double u, Squash squash) noexcept;

// Line-oriented text checkpoint; parameters written with 17 significant
// digits so a save/load cycle is exact.
void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);  // throws CheckpointUnreadable

}  // namespace respg::nn
