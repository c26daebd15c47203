#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "respg/neural.hpp"

using namespace respg;
using namespace respg::nn;

namespace {

MlpSpec make_spec(std::vector<std::size_t> sizes, Head head, double slope = 0.01) {
  MlpSpec s;
  s.layer_sizes = std::move(sizes);
  s.head = head;
  s.slope = slope;
  return s;
}

}  // namespace

TEST_SUITE("neural") {
  TEST_CASE("identity layer is the identity") {
    Mlp net(make_spec({2, 2}, Head::Linear));
    auto w = net.weights(0);
    w[0] = 1.0;
    w[3] = 1.0;
    const std::vector<double> x = {1.0, -1.0};
    CHECK(net.forward(x) == x);
  }

  TEST_CASE("leaky relu and sigmoid head") {
    CHECK(lrelu(-1.0, 0.01) == -0.01);
    CHECK(lrelu(2.0, 0.01) == 2.0);
    Mlp net(make_spec({3, 1}, Head::Sigmoid));
    CHECK(net.forward(std::vector<double>{1, 2, 3})[0] == 0.5);
  }

  TEST_CASE("hidden layer applies the slope") {
    Mlp net(make_spec({1, 1, 1}, Head::Linear, 0.1));
    net.weights(0)[0] = 1.0;
    net.weights(1)[0] = 1.0;
    CHECK(net.forward(std::vector<double>{-2.0})[0] == doctest::Approx(-0.2));
    CHECK(net.forward(std::vector<double>{3.0})[0] == doctest::Approx(3.0));
  }

  TEST_CASE("gaussian head clamps log-std only") {
    auto spec = make_spec({1, 4}, Head::Gaussian);
    spec.log_std_min = -3.0;
    spec.log_std_max = 1.0;
    Mlp net(spec);
    auto b = net.biases(0);
    b[0] = 50.0; b[1] = -50.0; b[2] = 50.0; b[3] = -50.0;
    const auto y = net.forward(std::vector<double>{0.0});
    CHECK(y[0] == 50.0);
    CHECK(y[1] == -50.0);
    CHECK(y[2] == 1.0);
    CHECK(y[3] == -3.0);
  }

  TEST_CASE("constructor and forward validate shapes") {
    CHECK(oracle::errc_of([] { Mlp(make_spec({3}, Head::Linear)); }) == Errc::ShapeMismatch);
    CHECK(oracle::errc_of([] { Mlp(make_spec({3, 0, 1}, Head::Linear)); }) == Errc::ShapeMismatch);
    CHECK(oracle::errc_of([] { Mlp(make_spec({3, 3}, Head::Gaussian)); }) == Errc::ShapeMismatch);
    auto bad_clamp = make_spec({3, 2}, Head::Gaussian);
    bad_clamp.log_std_min = 2.0;
    bad_clamp.log_std_max = 1.0;
    CHECK(oracle::errc_of([&] { Mlp{bad_clamp}; }) == Errc::ShapeMismatch);
    Mlp net(make_spec({3, 2}, Head::Linear));
    CHECK(oracle::errc_of([&] { net.forward(std::vector<double>{1.0}); }) == Errc::ShapeMismatch);
    const std::vector<double> x = {1, 2, 3};
    const std::vector<double> up = {1};
    CHECK(oracle::errc_of([&] { backward(net, x, up); }) == Errc::ShapeMismatch);
  }

  TEST_CASE("init draws within the fan-in bound and is seeded") {
    Rng a(5), b(5);
    const auto spec = make_spec({3, 50, 50, 1}, Head::Sigmoid);
    const auto n1 = Mlp::init(spec, a);
    const auto n2 = Mlp::init(spec, b);
    CHECK(n1 == n2);
    for (std::size_t l = 0; l < n1.num_layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.layer_sizes[l]));
      for (double w : n1.weights(l)) CHECK(std::abs(w) <= bound);
      for (double v : n1.biases(l)) CHECK(std::abs(v) <= bound);
    }
    CHECK(n1.num_params() == 3 * 50 + 50 + 50 * 50 + 50 + 50 + 1);
  }

  TEST_CASE("zero upstream gives zero gradients") {
    Rng rng(1);
    auto net = Mlp::init(make_spec({3, 4, 2}, Head::Tanh), rng);
    const auto g = backward(net, std::vector<double>{0.2, -0.4, 0.9}, std::vector<double>{0.0, 0.0});
    for (double v : g.params) CHECK(v == 0.0);
    for (double v : g.input) CHECK(v == 0.0);
  }

  TEST_CASE("linear layer input gradient is W^T upstream") {
    Mlp net(make_spec({2, 2}, Head::Linear));
    auto w = net.weights(0);
    w[0] = 1.0; w[1] = 2.0; w[2] = 3.0; w[3] = 4.0;
    const auto g = backward(net, std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, -1.0});
    CHECK(g.input[0] == doctest::Approx(1.0 - 3.0));
    CHECK(g.input[1] == doctest::Approx(2.0 - 4.0));
  }

  TEST_CASE("3-4-2 net matches central differences within 1e-6") {
    Rng rng(8);
    for (Head h : {Head::Linear, Head::Sigmoid, Head::Tanh}) {
      auto net = Mlp::init(make_spec({3, 4, 2}, h), rng);
      const auto r = oracle::check_net_gradients(net, rng);
      CHECK(r.max_rel_error < 1e-6);
      CHECK(r.checked > 0);
    }
  }

  TEST_CASE("random nets pass the gradient check on every head") {
    Rng rng(77);
    for (Head h : {Head::Linear, Head::Sigmoid, Head::Tanh, Head::Gaussian}) {
      CAPTURE(head_name(h));
      oracle::FdResult total;
      for (int i = 0; i < 20; ++i) {
        auto net = oracle::random_net(rng, h);
        const auto r = oracle::check_net_gradients(net, rng);
        total.max_rel_error = std::max(total.max_rel_error, r.max_rel_error);
        total.checked += r.checked;
        total.skipped += r.skipped;
      }
      CHECK(total.max_rel_error < 1e-4);
      CHECK(total.checked > 10 * total.skipped);
    }
  }

  TEST_CASE("forward is pure and backward leaves parameters alone") {
    Rng rng(3);
    auto net = Mlp::init(make_spec({3, 6, 2}, Head::Gaussian), rng);
    const auto before = net;
    const std::vector<double> x = {0.1, 0.2, 0.3};
    const auto y1 = net.forward(x);
    backward(net, x, std::vector<double>{1.0, 1.0});
    CHECK(net.forward(x) == y1);
    CHECK(net == before);
    const auto naive = oracle::naive_forward(net, x);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(naive[i] == doctest::Approx(y1[i]).epsilon(1e-12));
  }

  TEST_CASE("backward accumulates into param_grad") {
    Rng rng(4);
    auto net = Mlp::init(make_spec({2, 3, 1}, Head::Linear), rng);
    const std::vector<double> x = {0.3, -0.7};
    const std::vector<double> up = {1.0};
    Tape tape;
    net.forward(x, tape);
    std::vector<double> grad(net.num_params(), 0.0);
    net.backward(tape, up, grad, {});
    const auto once = grad;
    net.backward(tape, up, grad, {});
    for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == doctest::Approx(2.0 * once[i]));
  }

  TEST_CASE("adam hand cases") {
    std::vector<double> p = {1.0, -2.0};
    AdamState opt(2, 1e-3);
    adam_update(p, std::vector<double>{0.0, 0.0}, opt);
    CHECK(p == std::vector<double>{1.0, -2.0});
    CHECK(opt.t == 1);

    std::vector<double> q = {0.0};
    AdamState o2(1, 0.1);
    adam_update(q, std::vector<double>{1.0}, o2);
    CHECK(q[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-12));

    std::vector<double> r = {0.0};
    AdamState o3(1, 0.01);
    adam_update(r, std::vector<double>{0.5}, o3);
    const double first = r[0];
    adam_update(r, std::vector<double>{0.5}, o3);
    const double second = r[0] - first;
    CHECK(std::abs(second) <= std::abs(first) + 1e-12);

    CHECK(oracle::errc_of([&] { adam_update(r, std::vector<double>{1.0, 2.0}, o3); }) == Errc::ShapeMismatch);
  }

  TEST_CASE("adam with zero learning rate is the identity") {
    Rng rng(6);
    std::vector<double> p(40), g(40);
    for (auto& v : p) v = rng.normal();
    const auto before = p;
    AdamState opt(40, 0.0);
    for (int k = 0; k < 10; ++k) {
      for (auto& v : g) v = rng.normal();
      adam_update(p, g, opt);
    }
    CHECK(p == before);
    CHECK(opt.t == 10);
  }

  TEST_CASE("squashed sample basics") {
    for (Squash sq : {Squash::Sigmoid, Squash::Tanh}) {
      const auto s = sample_squashed_gaussian(std::vector<double>{0.4}, std::vector<double>{-1.0},
                                              std::vector<double>{0.0}, sq);
      CHECK(s.action[0] == doctest::Approx(squash_value(0.4, sq)).epsilon(1e-15));
      const auto big = sample_squashed_gaussian(std::vector<double>{800.0}, std::vector<double>{0.0},
                                                std::vector<double>{0.0}, sq);
      CHECK(big.action[0] < 1.0);
      CHECK(big.action[0] > 0.999999);
      const auto small = sample_squashed_gaussian(std::vector<double>{-800.0}, std::vector<double>{0.0},
                                                  std::vector<double>{0.0}, sq);
      CHECK(small.action[0] > (sq == Squash::Sigmoid ? 0.0 : -1.0));
      CHECK(std::isfinite(big.log_prob));
      CHECK(std::isfinite(small.log_prob));
    }
  }

  TEST_CASE("squashed sample stays strictly inside its bounds") {
    Rng rng(12);
    for (int i = 0; i < 20000; ++i) {
      const double m = rng.uniform(-60.0, 60.0);
      const double ls = rng.uniform(-20.0, 2.0);
      const double n = rng.normal() * 3.0;
      const auto a = sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                              std::vector<double>{n}, Squash::Sigmoid);
      CHECK(a.action[0] > 0.0);
      CHECK(a.action[0] < 1.0);
      const auto b = sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                              std::vector<double>{n}, Squash::Tanh);
      CHECK(b.action[0] > -1.0);
      CHECK(b.action[0] < 1.0);
    }
  }

  TEST_CASE("log-probability matches the closed-form sigmoid-Gaussian density") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
      const double m = rng.uniform(-2, 2), ls = rng.uniform(-2, 0.5), n = rng.normal();
      const auto s = sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                              std::vector<double>{n}, Squash::Sigmoid);
      CHECK(s.log_prob == doctest::Approx(oracle::sigmoid_gaussian_logpdf(s.action[0], m, ls)).epsilon(1e-8));
      // Tanh variant: density of tanh(u) is N(u) / (1 - a^2).
      const auto t = sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                              std::vector<double>{n}, Squash::Tanh);
      const double u = m + std::exp(ls) * n;
      const double expect = -0.5 * n * n - ls - 0.5 * std::log(2 * std::numbers::pi) -
                            std::log(1.0 - std::tanh(u) * std::tanh(u));
      CHECK(t.log_prob == doctest::Approx(expect).epsilon(1e-8));
    }
  }

  TEST_CASE("log-probability matches a Monte Carlo density estimate") {
    const double m = 0.3, ls = -0.4;
    const std::size_t n = 4000000;
    const double w = 0.04;
    std::vector<std::size_t> bins(25, 0);
    Rng rng(21);
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                              std::vector<double>{rng.normal()}, Squash::Sigmoid);
      const auto b = static_cast<std::size_t>(s.action[0] / w);
      if (b < bins.size()) ++bins[b];
    }
    const auto logp_at = [&](double a) {
      const double noise = (oracle::logit(a) - m) / std::exp(ls);
      return sample_squashed_gaussian(std::vector<double>{m}, std::vector<double>{ls},
                                      std::vector<double>{noise}, Squash::Sigmoid)
          .log_prob;
    };
    int compared = 0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const double frac = static_cast<double>(bins[b]) / static_cast<double>(n);
      if (frac < 0.05) continue;
      // Bin probability from the library density, Simpson's rule.
      const int k = 200;
      const double lo = b * w, h = w / k;
      double integral = 0.0;
      for (int j = 0; j <= k; ++j) {
        const double coef = (j == 0 || j == k) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        integral += coef * std::exp(logp_at(lo + j * h));
      }
      integral *= h / 3.0;
      CHECK(std::abs(std::log(frac / w) - std::log(integral / w)) < 0.01);
      ++compared;
    }
    CHECK(compared >= 6);
  }

  TEST_CASE("squashed sample partial derivatives match finite differences") {
    Rng rng(14);
    const double h = 1e-6;
    for (Squash sq : {Squash::Sigmoid, Squash::Tanh}) {
      for (int i = 0; i < 100; ++i) {
        const double m = rng.uniform(-2, 2), ls = rng.uniform(-2, 0.5), n = rng.normal();
        const auto at = [&](double mm, double ll) {
          return sample_squashed_gaussian(std::vector<double>{mm}, std::vector<double>{ll},
                                          std::vector<double>{n}, sq);
        };
        const auto s = at(m, ls);
        const auto mp = at(m + h, ls), mm = at(m - h, ls);
        const auto lp = at(m, ls + h), lm = at(m, ls - h);
        CHECK(oracle::rel_error(s.daction_dmean[0], (mp.action[0] - mm.action[0]) / (2 * h)) < 1e-6);
        CHECK(oracle::rel_error(s.daction_dlogstd[0], (lp.action[0] - lm.action[0]) / (2 * h)) < 1e-6);
        CHECK(oracle::rel_error(s.dlogp_dmean[0], (mp.log_prob - mm.log_prob) / (2 * h)) < 1e-6);
        CHECK(oracle::rel_error(s.dlogp_dlogstd[0], (lp.log_prob - lm.log_prob) / (2 * h)) < 1e-6);
      }
    }
  }

  TEST_CASE("checkpoint round-trip is exact") {
    Rng rng(15);
    for (Head h : {Head::Linear, Head::Sigmoid, Head::Tanh, Head::Gaussian}) {
      auto spec = make_spec({3, 7, 5, h == Head::Gaussian ? 2u : 1u}, h, 0.03);
      spec.log_std_min = -5.5;
      auto net = Mlp::init(spec, rng);
      for (double& p : net.params()) p *= 1.0 + 1e-3 * rng.normal();
      std::stringstream io;
      save_mlp(io, net);
      const auto back = load_mlp(io);
      CHECK(back == net);
      CHECK(back.spec().layer_sizes == spec.layer_sizes);
      CHECK(back.spec().head == h);
      CHECK(back.spec().slope == spec.slope);
      CHECK(back.spec().log_std_min == spec.log_std_min);
    }
  }

  TEST_CASE("corrupt checkpoints are rejected") {
    Rng rng(16);
    auto net = Mlp::init(make_spec({2, 3, 1}, Head::Linear), rng);
    std::stringstream io;
    save_mlp(io, net);
    const auto text = io.str();
    const auto code = [](const std::string& t) {
      return oracle::errc_of([&] {
        std::istringstream in(t);
        load_mlp(in);
      });
    };
    CHECK(code("") == Errc::CheckpointUnreadable);
    CHECK(code("not a checkpoint\n") == Errc::CheckpointUnreadable);
    CHECK(code(text.substr(0, text.size() / 2)) == Errc::CheckpointUnreadable);
    auto wrong = text;
    wrong.replace(wrong.rfind(' '), 1, " 1.0 ");
    CHECK(code(wrong) == Errc::CheckpointUnreadable);
  }
}
