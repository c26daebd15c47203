#include "respg/neural.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "respg/error.hpp"
#include "respg/kernels.hpp"
#include "respg/text.hpp"

namespace respg::nn {

namespace {

constexpr std::string_view kMagic = "respg-mlp 1";
constexpr double kBelowOne = 1.0 - 0x1.0p-53;
constexpr double kTiny = std::numeric_limits<double>::min();

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

[[noreturn]] void shape_error(const std::string& what) { throw Error(Errc::ShapeMismatch, what); }
[[noreturn]] void unreadable(const std::string& what) {
  throw Error(Errc::CheckpointUnreadable, what);
}

}  // namespace

std::string_view head_name(Head h) noexcept {
  switch (h) {
    case Head::Linear: return "linear";
    case Head::Sigmoid: return "sigmoid";
    case Head::Tanh: return "tanh";
    case Head::Gaussian: return "gaussian";
  }
  return "linear";
}

bool parse_head(std::string_view s, Head& out) noexcept {
  for (Head h : {Head::Linear, Head::Sigmoid, Head::Tanh, Head::Gaussian}) {
    if (head_name(h) == s) {
      out = h;
      return true;
    }
  }
  return false;
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  if (spec_.layer_sizes.size() < 2) shape_error("need at least input and output sizes");
  for (auto n : spec_.layer_sizes)
    if (n == 0) shape_error("zero-width layer");
  if (spec_.head == Head::Gaussian && spec_.layer_sizes.back() % 2 != 0)
    shape_error("gaussian head needs an even output width");
  if (!(std::isfinite(spec_.log_std_min) && std::isfinite(spec_.log_std_max) &&
        spec_.log_std_min < spec_.log_std_max))
    shape_error("log-std clamp must be finite with low < high");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < spec_.layer_sizes.size(); ++l) {
    w_offset_.push_back(offset);
    offset += spec_.layer_sizes[l] * spec_.layer_sizes[l + 1];
    b_offset_.push_back(offset);
    offset += spec_.layer_sizes[l + 1];
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::init(MlpSpec spec, Rng& rng) {
  Mlp net(std::move(spec));
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.spec_.layer_sizes[l]));
    for (double& w : net.weights(l)) w = rng.uniform(-bound, bound);
    for (double& b : net.biases(l)) b = rng.uniform(-bound, bound);
  }
  return net;
}

std::span<const double> Mlp::weights(std::size_t l) const noexcept {
  return {params_.data() + w_offset_[l], spec_.layer_sizes[l] * spec_.layer_sizes[l + 1]};
}
std::span<const double> Mlp::biases(std::size_t l) const noexcept {
  return {params_.data() + b_offset_[l], spec_.layer_sizes[l + 1]};
}
std::span<double> Mlp::weights(std::size_t l) noexcept {
  return {params_.data() + w_offset_[l], spec_.layer_sizes[l] * spec_.layer_sizes[l + 1]};
}
std::span<double> Mlp::biases(std::size_t l) noexcept {
  return {params_.data() + b_offset_[l], spec_.layer_sizes[l + 1]};
}

void Mlp::check_input(std::span<const double> input) const {
  if (input.size() != input_size())
    shape_error("input has " + std::to_string(input.size()) + " values, expected " +
                std::to_string(input_size()));
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Tape tape;
  forward(input, tape);
  return std::move(tape.post.back());
}

void Mlp::forward(std::span<const double> input, Tape& tape) const {
  check_input(input);
  const auto& k = kernels::active();
  const std::size_t layers = num_layers();
  tape.input.assign(input.begin(), input.end());
  tape.pre.resize(layers);
  tape.post.resize(layers);
  const double* x = tape.input.data();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = spec_.layer_sizes[l + 1];
    const std::size_t cols = spec_.layer_sizes[l];
    auto& z = tape.pre[l];
    auto& a = tape.post[l];
    z.resize(rows);
    a.resize(rows);
    k.gemv(params_.data() + w_offset_[l], params_.data() + b_offset_[l], x, z.data(), rows, cols);
    if (l + 1 < layers) {
      for (std::size_t r = 0; r < rows; ++r) a[r] = lrelu(z[r], spec_.slope);
    } else {
      switch (spec_.head) {
        case Head::Linear: a = z; break;
        case Head::Sigmoid:
          for (std::size_t r = 0; r < rows; ++r) a[r] = sigmoid(z[r]);
          break;
        case Head::Tanh:
          for (std::size_t r = 0; r < rows; ++r) a[r] = std::tanh(z[r]);
          break;
        case Head::Gaussian: {
          const std::size_t half = rows / 2;
          for (std::size_t r = 0; r < half; ++r) a[r] = z[r];
          for (std::size_t r = half; r < rows; ++r)
            a[r] = std::clamp(z[r], spec_.log_std_min, spec_.log_std_max);
          break;
        }
      }
    }
    x = a.data();
  }
}

void Mlp::backward(const Tape& tape, std::span<const double> upstream, std::span<double> param_grad,
                   std::span<double> input_grad) const {
  const std::size_t layers = num_layers();
  if (tape.pre.size() != layers || tape.input.size() != input_size())
    shape_error("tape does not belong to this network");
  if (upstream.size() != output_size()) shape_error("upstream gradient has wrong length");
  if (param_grad.size() != params_.size()) shape_error("parameter gradient has wrong length");
  if (!input_grad.empty() && input_grad.size() != input_size())
    shape_error("input gradient has wrong length");

  const auto& k = kernels::active();
  const auto& zl = tape.pre.back();
  const auto& al = tape.post.back();
  std::vector<double> delta(upstream.begin(), upstream.end());
  switch (spec_.head) {
    case Head::Linear: break;
    case Head::Sigmoid:
      for (std::size_t r = 0; r < delta.size(); ++r) delta[r] *= al[r] * (1.0 - al[r]);
      break;
    case Head::Tanh:
      for (std::size_t r = 0; r < delta.size(); ++r) delta[r] *= 1.0 - al[r] * al[r];
      break;
    case Head::Gaussian:
      for (std::size_t r = delta.size() / 2; r < delta.size(); ++r)
        if (!(zl[r] > spec_.log_std_min && zl[r] < spec_.log_std_max)) delta[r] = 0.0;
      break;
  }

  std::vector<double> prev;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t rows = spec_.layer_sizes[l + 1];
    const std::size_t cols = spec_.layer_sizes[l];
    const double* a_in = l == 0 ? tape.input.data() : tape.post[l - 1].data();
    double* gw = param_grad.data() + w_offset_[l];
    double* gb = param_grad.data() + b_offset_[l];
    for (std::size_t r = 0; r < rows; ++r) {
      if (delta[r] == 0.0) continue;
      k.axpy(delta[r], a_in, gw + r * cols, cols);
      gb[r] += delta[r];
    }
    if (l == 0 && input_grad.empty()) break;
    prev.assign(cols, 0.0);
    k.gemv_t_acc(params_.data() + w_offset_[l], delta.data(), prev.data(), rows, cols);
    if (l == 0) {
      std::copy(prev.begin(), prev.end(), input_grad.begin());
      break;
    }
    const auto& z_below = tape.pre[l - 1];
    for (std::size_t c = 0; c < cols; ++c)
      if (z_below[c] < 0.0) prev[c] *= spec_.slope;
    delta.swap(prev);
  }
}

Gradients backward(const Mlp& net, std::span<const double> input, std::span<const double> upstream) {
  Tape tape;
  net.forward(input, tape);
  Gradients g;
  g.params.assign(net.num_params(), 0.0);
  g.input.assign(net.input_size(), 0.0);
  net.backward(tape, upstream, g.params, g.input);
  return g;
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& opt) {
  if (params.size() != grads.size() || opt.m.size() != params.size() || opt.v.size() != params.size())
    throw Error(Errc::ShapeMismatch, "adam: parameter, gradient and moment sizes differ");
  ++opt.t;
  const auto t = static_cast<double>(opt.t);
  const kernels::AdamCoeffs c{opt.lr, opt.beta1, opt.beta2, opt.eps,
                              1.0 - std::pow(opt.beta1, t), 1.0 - std::pow(opt.beta2, t)};
  kernels::active().adam_step(params.data(), grads.data(), opt.m.data(), opt.v.data(),
                              params.size(), c);
}

double squash_value(double u, Squash squash) noexcept {
  return squash == Squash::Sigmoid ? sigmoid(u) : std::tanh(u);
}

SquashedSample sample_squashed_gaussian(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise, Squash squash) {
  if (mean.size() != log_std.size() || mean.size() != noise.size())
    throw Error(Errc::ShapeMismatch, "mean, log_std and noise must have equal length");
  const std::size_t k = mean.size();
  constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)
  SquashedSample s;
  s.action.resize(k);
  s.pre_squash.resize(k);
  s.daction_dmean.resize(k);
  s.daction_dlogstd.resize(k);
  s.dlogp_dmean.resize(k);
  s.dlogp_dlogstd.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double sd = std::exp(log_std[i]);
    const double u = mean[i] + sd * noise[i];
    double log_jac = 0.0;
    double dlogjac_du = 0.0;
    double da_du = 0.0;
    if (squash == Squash::Sigmoid) {
      const double a = sigmoid(u);
      log_jac = -softplus(-u) - softplus(u);
      dlogjac_du = 1.0 - 2.0 * a;
      da_du = a * (1.0 - a);
      s.action[i] = a;
    } else {
      const double a = std::tanh(u);
      log_jac = 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
      dlogjac_du = -2.0 * a;
      da_du = 1.0 - a * a;
      s.action[i] = a;
    }
    // Keep saturated draws strictly inside the open interval.
    s.action[i] = squash == Squash::Sigmoid ? std::clamp(s.action[i], kTiny, kBelowOne)
                                            : std::clamp(s.action[i], -kBelowOne, kBelowOne);
    s.pre_squash[i] = u;
    s.log_prob += -0.5 * noise[i] * noise[i] - log_std[i] - kHalfLog2Pi - log_jac;
    s.daction_dmean[i] = da_du;
    s.daction_dlogstd[i] = da_du * sd * noise[i];
    s.dlogp_dmean[i] = -dlogjac_du;
    s.dlogp_dlogstd[i] = -1.0 - dlogjac_du * sd * noise[i];
  }
  return s;
}

void save_mlp(std::ostream& out, const Mlp& net) {
  const auto& spec = net.spec();
  out << kMagic << '\n' << "layers";
  for (auto n : spec.layer_sizes) out << ' ' << n;
  out << '\n'
      << "head " << head_name(spec.head) << '\n'
      << "slope " << text::general(spec.slope, 17) << '\n'
      << "clamp " << text::general(spec.log_std_min, 17) << ' '
      << text::general(spec.log_std_max, 17) << '\n';
  const auto line = [&](std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out << (i ? " " : "") << text::general(values[i], 17);
    out << '\n';
  };
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    line(net.weights(l));
    line(net.biases(l));
  }
}

Mlp load_mlp(std::istream& in) {
  std::string line;
  const auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) unreadable(std::string("truncated before ") + what);
    return std::string(text::trim(line));
  };
  if (next_line("magic") != kMagic) unreadable("bad magic line");

  MlpSpec spec;
  {
    std::istringstream ls(next_line("layers"));
    std::string tag;
    ls >> tag;
    if (tag != "layers") unreadable("expected layers line");
    std::size_t n = 0;
    while (ls >> n) spec.layer_sizes.push_back(n);
  }
  {
    std::istringstream ls(next_line("head"));
    std::string tag, name;
    ls >> tag >> name;
    if (tag != "head" || !parse_head(name, spec.head)) unreadable("bad head line");
  }
  {
    const auto t = next_line("slope");
    const auto v = t.rfind("slope ", 0) == 0 ? text::parse_double(t.substr(6)) : std::nullopt;
    if (!v) unreadable("bad slope line");
    spec.slope = *v;
  }
  {
    const auto t = next_line("clamp");
    const auto fields = text::split(t, ' ');
    if (fields.size() != 3 || fields[0] != "clamp") unreadable("bad clamp line");
    const auto lo = text::parse_double(fields[1]);
    const auto hi = text::parse_double(fields[2]);
    if (!lo || !hi) unreadable("bad clamp values");
    spec.log_std_min = *lo;
    spec.log_std_max = *hi;
  }

  Mlp net;
  try {
    net = Mlp(spec);
  } catch (const Error& e) {
    unreadable(e.what());
  }
  const auto read_tensor = [&](std::span<double> dst, const char* what) {
    const auto t = next_line(what);
    const auto fields = text::split(t, ' ');
    if (fields.size() != dst.size())
      unreadable(std::string(what) + " has " + std::to_string(fields.size()) + " values, expected " +
                 std::to_string(dst.size()));
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const auto v = text::parse_double(fields[i]);
      if (!v) unreadable(std::string("non-numeric value in ") + what);
      dst[i] = *v;
    }
  };
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    read_tensor(net.weights(l), "weights");
    read_tensor(net.biases(l), "biases");
  }
  return net;
}

}  // namespace respg::nn
