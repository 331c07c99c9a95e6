#include <doctest.h>

#include <cmath>

#include "../common/finite_difference.hpp"
#include "lrgan/checkpoint.hpp"
#include "lrgan/tensor_nn.hpp"

using namespace lrgan;
using lrgan::testing::backward_fd_error;
using lrgan::testing::make_probe;
using lrgan::testing::penalty_mode_error;

namespace {

NetSpec spec(std::vector<int> widths, Activation hidden, SquashKind out, std::uint64_t seed) {
  return NetSpec{std::move(widths), hidden, Squashing{out}, seed};
}

Net linear_net(const Eigen::VectorXd& w, double b) {
  Net net = init_net<double>(spec({static_cast<int>(w.size()), 1}, Activation::SmoothLeaky,
                                  SquashKind::Identity, 1));
  net.params.weights[0] = w.transpose();
  net.params.biases[0][0] = b;
  return net;
}

}  // namespace

TEST_SUITE("tensor_nn") {

TEST_CASE("initialisation is seeded and shaped") {
  const NetSpec s = spec({2, 64, 64, 1}, Activation::SmoothLeaky, SquashKind::Identity, 17);
  const Net a = init_net<double>(s);
  const Net b = init_net<double>(s);
  for (std::size_t l = 0; l < 3; ++l) CHECK(a.params.weights[l] == b.params.weights[l]);
  CHECK(a.params.weights[0].rows() == 64);
  CHECK(a.params.weights[0].cols() == 2);
  CHECK(a.params.weights[1].rows() == 64);
  CHECK(a.params.weights[1].cols() == 64);
  CHECK(a.params.weights[2].rows() == 1);
  CHECK(a.params.weights[2].cols() == 64);
  CHECK(a.params.biases[2].size() == 1);

  const Eigen::MatrixXd& w = a.params.weights[1];
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  CHECK(var == doctest::Approx(1.0 / 64).epsilon(0.2));
  CHECK(init_net<double>(spec({2, 64, 64, 1}, Activation::SmoothLeaky, SquashKind::Identity, 18))
            .params.weights[0] != a.params.weights[0]);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(init_net<double>(spec({3}, Activation::Tanh, SquashKind::Identity, 1)), ShapeError);
  CHECK_THROWS_AS(init_net<double>(spec({3, 0, 1}, Activation::Tanh, SquashKind::Identity, 1)),
                  ShapeError);
  const Net net = init_net<double>(spec({3, 4, 1}, Activation::Tanh, SquashKind::Identity, 1));
  CHECK_THROWS_AS(forward(net, Eigen::MatrixXd::Zero(5, 2)), ShapeError);
}

TEST_CASE("zero network outputs zero") {
  Net net = init_net<double>(spec({3, 5, 2}, Activation::Tanh, SquashKind::Identity, 4));
  net.params *= 0.0;
  CHECK(evaluate(net, Eigen::MatrixXd::Random(6, 3)).isZero(0.0));
}

TEST_CASE("hand-computed two-layer network") {
  Net net = init_net<double>(spec({1, 1, 1}, Activation::Tanh, SquashKind::Identity, 1));
  net.params.weights[0](0, 0) = 0.7;
  net.params.biases[0][0] = -0.2;
  net.params.weights[1](0, 0) = 1.5;
  net.params.biases[1][0] = 0.0;
  Eigen::MatrixXd x(1, 1);
  x << 2.0;
  CHECK(evaluate(net, x)(0, 0) == doctest::Approx(1.5 * std::tanh(0.7 * 2.0 - 0.2)));

  Net leaky = init_net<double>(spec({1, 1, 1}, Activation::SmoothLeaky, SquashKind::Logistic, 1));
  leaky.params.weights[0](0, 0) = -1.0;
  leaky.params.biases[0][0] = 0.5;
  leaky.params.weights[1](0, 0) = 2.0;
  leaky.params.biases[1][0] = -0.25;
  const double a = -1.0 * 2.0 + 0.5;
  const double h = 0.2 * a + 0.8 * std::log1p(std::exp(a));
  CHECK(evaluate(leaky, x)(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-(2.0 * h - 0.25)))));
}

TEST_CASE("output squashing keeps outputs in range") {
  Net net = init_net<double>(spec({2, 16, 1}, Activation::SmoothLeaky, SquashKind::Logistic, 3));
  net.params *= 20.0;
  const Eigen::MatrixXd out = evaluate(net, 5.0 * Eigen::MatrixXd::Random(200, 2));
  CHECK(out.minCoeff() >= 0.0);
  CHECK(out.maxCoeff() <= 1.0);
}

TEST_CASE("backward matches finite differences for every activation and squashing") {
  std::uint64_t seed = 100;
  for (Activation act : {Activation::SmoothLeaky, Activation::Tanh, Activation::Rectifier}) {
    for (SquashKind sq : {SquashKind::Identity, SquashKind::Softplus, SquashKind::Logistic,
                          SquashKind::Tanh}) {
      CAPTURE(activation_name(act));
      CAPTURE(Squashing{sq}.name());
      const Net small = init_net<double>(spec({2, 8, 1}, act, sq, ++seed));
      CHECK(backward_fd_error(small, make_probe(small, 6, seed)) <= 1e-4);
      const Net deep = init_net<double>(spec({3, 6, 5, 2}, act, sq, ++seed));
      CHECK(backward_fd_error(deep, make_probe(deep, 5, seed)) <= 1e-4);
    }
  }
}

TEST_CASE("zero output gradients give zero gradients") {
  const Net net = init_net<double>(spec({2, 8, 1}, Activation::Tanh, SquashKind::Identity, 2));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  const BackwardResult<double> r = backward(net, forward(net, x), Eigen::MatrixXd::Zero(4, 1));
  for (std::size_t k = 0; k < r.param_grads.parameter_count(); ++k) CHECK(r.param_grads.flat(k) == 0.0);
  CHECK(r.input_grads.isZero(0.0));
}

TEST_CASE("adam step arithmetic") {
  Params p;
  p.weights.push_back(Eigen::MatrixXd::Constant(1, 1, 0.0));
  p.biases.push_back(Eigen::VectorXd::Zero(0));
  Params g = Params::zeros_like(p);
  Adam state = Adam::for_params(p, 0.1, 0.5, 0.9, 1e-8);

  adam_step(state, p, g);
  CHECK(state.step == 1);
  CHECK(p.weights[0](0, 0) == 0.0);

  state = Adam::for_params(p, 0.1, 0.5, 0.9, 1e-8);
  g.weights[0](0, 0) = 1.0;
  adam_step(state, p, g);
  CHECK(p.weights[0](0, 0) == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-12));

  double previous = p.weights[0](0, 0);
  bool monotone = true;
  for (int i = 0; i < 1000; ++i) {
    adam_step(state, p, g);
    monotone = monotone && p.weights[0](0, 0) < previous;
    previous = p.weights[0](0, 0);
  }
  CHECK(monotone);

  g.weights[0](0, 0) = std::nan("");
  CHECK_THROWS_AS(adam_step(state, p, g), NonFiniteGradient);
  Params wrong;
  wrong.weights.push_back(Eigen::MatrixXd::Zero(2, 1));
  wrong.biases.push_back(Eigen::VectorXd::Zero(0));
  CHECK_THROWS_AS(adam_step(state, p, wrong), ShapeError);
}

TEST_CASE("gradient norms of a linear discriminator") {
  Eigen::VectorXd w(3);
  w << 1.0, -2.0, 2.0;
  const Net net = linear_net(w, 0.3);
  const Eigen::VectorXd norms = input_grad_norms(net, Eigen::MatrixXd::Random(7, 3));
  for (Eigen::Index i = 0; i < norms.size(); ++i) CHECK(norms[i] == doctest::Approx(3.0));
}

TEST_CASE("zero weights give zero penalty and gradient") {
  Net net = init_net<double>(spec({2, 8, 1}, Activation::SmoothLeaky, SquashKind::Identity, 5));
  net.params *= 0.0;
  const auto res = input_grad_norm_and_hvp(net, Eigen::MatrixXd::Random(9, 2), PenaltyConfig{});
  CHECK(res.norms.isZero(0.0));
  CHECK(res.penalty == 0.0);
  for (std::size_t k = 0; k < res.param_grads.parameter_count(); ++k)
    CHECK(res.param_grads.flat(k) == 0.0);
}

TEST_CASE("exact penalty gradient agrees with the finite-difference fallback") {
  std::uint64_t seed = 300;
  for (Activation act : {Activation::SmoothLeaky, Activation::Tanh}) {
    for (SquashKind sq : {SquashKind::Identity, SquashKind::Softplus, SquashKind::Logistic,
                          SquashKind::Tanh}) {
      for (PenaltyVariant variant : {PenaltyVariant::Max, PenaltyVariant::Mean}) {
        CAPTURE(activation_name(act));
        CAPTURE(Squashing{sq}.name());
        CAPTURE(penalty_variant_name(variant));
        Net net = init_net<double>(spec({2, 8, 1}, act, sq, ++seed));
        net.params *= sq == SquashKind::Logistic || sq == SquashKind::Tanh ? 6.0 : 3.0;
        const Eigen::MatrixXd x = make_probe(net, 12, seed).x;
        CHECK(input_grad_norm_and_hvp(net, x, PenaltyConfig{variant, 10.0}).penalty > 0.0);
        CHECK(penalty_mode_error(net, x, PenaltyConfig{variant, 10.0}) <= 1e-3);

        Net deep = init_net<double>(spec({2, 8, 6, 1}, act, sq, seed + 1000));
        deep.params *= 3.0;
        CHECK(penalty_mode_error(deep, make_probe(deep, 12, seed).x, PenaltyConfig{variant, 10.0}) <= 1e-3);
      }
    }
  }
  const Net relu = init_net<double>(spec({2, 8, 1}, Activation::Rectifier, SquashKind::Identity, 1));
  CHECK_THROWS(input_grad_norm_and_hvp(relu, Eigen::MatrixXd::Random(3, 2), PenaltyConfig{}));
}

TEST_CASE("single precision instantiation") {
  const NetSpec s = spec({2, 8, 1}, Activation::SmoothLeaky, SquashKind::Logistic, 8);
  const DenseNet<float> f = init_net<float>(s);
  const Net d = init_net<double>(s);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  const Eigen::MatrixXf yf = evaluate(f, Eigen::MatrixXf(x.cast<float>()));
  CHECK((yf.cast<double>() - evaluate(d, x)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("checkpoints round-trip byte for byte") {
  Net net = init_net<double>(spec({2, 8, 1}, Activation::Tanh, SquashKind::Softplus, 12));
  Adam opt = Adam::for_params(net.params, 1e-4, 0.5, 0.9);
  const auto probe = make_probe(net, 4, 1);
  adam_step(opt, net.params, backward(net, forward(net, probe.x), probe.g).param_grads);

  const std::string text = checkpoint_to_string(net, &opt);
  const Checkpoint back = checkpoint_from_string(text);
  CHECK(back.net.spec == net.spec);
  for (std::size_t k = 0; k < net.params.parameter_count(); ++k)
    CHECK(back.net.params.flat(k) == net.params.flat(k));
  REQUIRE(back.optimizer.has_value());
  CHECK(back.optimizer->step == 1);
  CHECK(checkpoint_to_string(back.net, &*back.optimizer) == text);
  CHECK(!checkpoint_from_string(checkpoint_to_string(net)).optimizer.has_value());
  CHECK_THROWS(checkpoint_from_string("{\"spec\": 3}"));
}

}
