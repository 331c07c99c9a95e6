#include <doctest.h>

#include <cmath>

#include "lrgan/trainer.hpp"

using namespace lrgan;

namespace {

TrainConfig shift_config(const std::string& loss, long iters) {
  TrainConfig c;
  c.loss = loss;
  c.f_spec = DensitySpec::normal(4, 1);
  c.h_spec = DensitySpec::normal(0, 1);
  c.generator = default_generator_spec(1, 1, 11);
  c.discriminator = default_discriminator_spec(1, 12);
  c.total_generator_iters = iters;
  c.eval_every = iters;
  c.eval_batch = 256;
  c.mmd_samples = 256;
  c.seed = 7;
  return c;
}

Net linear_disc(double w0, double w1) {
  Net net = init_net<double>(NetSpec{{2, 1}, Activation::SmoothLeaky, Squashing{}, 1});
  net.params.weights[0] << w0, w1;
  net.params.biases[0][0] = 0.5;
  return net;
}

// Constant pre-activation `pre` at the squashed output.
Net constant_disc(SquashKind kind, double pre) {
  Net net = init_net<double>(NetSpec{{1, 4, 1}, Activation::SmoothLeaky, Squashing{kind}, 1});
  net.params *= 0.0;
  net.params.biases[1][0] = pre;
  return net;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("one generator iteration runs critic_iters discriminator steps") {
  TrainConfig c = shift_config("MSE", 1);
  const TrainResult r = train(c);
  CHECK(r.discriminator_steps == 5);
  CHECK(r.generator_steps == 1);
  CHECK(r.discriminator_opt.step == 5);
  CHECK(r.generator_opt.step == 1);
  REQUIRE(r.metrics.size() == 1);
  CHECK(r.metrics[0].iteration == 1);

  c.critic_iters = 2;
  c.total_generator_iters = 3;
  c.eval_every = 2;
  const TrainResult r2 = train(c);
  CHECK(r2.discriminator_steps == 6);
  CHECK(r2.generator_steps == 3);
  REQUIRE(r2.metrics.size() == 2);
  CHECK(r2.metrics[0].iteration == 2);
  CHECK(r2.metrics[1].iteration == 3);
}

TEST_CASE("configuration problems are all reported") {
  TrainConfig c = shift_config("MSE", 1);
  c.f_spec.reset();
  c.critic_iters = 0;
  const auto problems = c.problems();
  CHECK(problems.size() >= 2);
  try {
    train(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("f_spec") != std::string::npos);
    CHECK(msg.find("critic_iters") != std::string::npos);
  }
  CHECK_THROWS_AS(train(shift_config("nosuch", 1)), LossError);
}

TEST_CASE("runs are bit-reproducible") {
  const TrainConfig c = shift_config("CrossEntropy", 20);
  const TrainResult a = train(c);
  const TrainResult b = train(c);
  for (std::size_t k = 0; k < a.generator.params.parameter_count(); ++k)
    CHECK(a.generator.params.flat(k) == b.generator.params.flat(k));
  CHECK(a.metrics.back().disc_objective == b.metrics.back().disc_objective);
  CHECK(a.metrics.back().swd == b.metrics.back().swd);
}

TEST_CASE("gradient penalty on linear discriminators") {
  Rng rng(3);
  const Eigen::MatrixXd real = Eigen::MatrixXd::Random(16, 2);
  const Eigen::MatrixXd fake = Eigen::MatrixXd::Random(16, 2);

  const auto zero = gradient_penalty(linear_disc(3, 0), real, fake, PenaltyConfig{PenaltyVariant::Max, 0.0}, rng);
  CHECK(zero.penalty == 0.0);
  for (std::size_t k = 0; k < zero.param_grads.parameter_count(); ++k) CHECK(zero.param_grads.flat(k) == 0.0);

  const auto steep = gradient_penalty(linear_disc(3, 0), real, fake, PenaltyConfig{PenaltyVariant::Max, 10.0}, rng);
  CHECK(steep.penalty == doctest::Approx(40.0));
  const auto steep_mean = gradient_penalty(linear_disc(0, -3), real, fake, PenaltyConfig{PenaltyVariant::Mean, 10.0}, rng);
  CHECK(steep_mean.penalty == doctest::Approx(40.0));

  for (PenaltyVariant v : {PenaltyVariant::Max, PenaltyVariant::Mean}) {
    const auto flat = gradient_penalty(linear_disc(0.6, 0.8), real, fake, PenaltyConfig{v, 10.0}, rng);
    CHECK(flat.penalty == 0.0);
    const auto flatter = gradient_penalty(linear_disc(0.1, -0.2), real, fake, PenaltyConfig{v, 10.0}, rng);
    CHECK(flatter.penalty == 0.0);
  }
  CHECK_THROWS(gradient_penalty(linear_disc(1, 1), real, fake.topRows(4), PenaltyConfig{}, rng));
}

TEST_CASE("likelihood ratio metric") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(32, 1);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(32, 1);

  const RatioStats balanced =
      likelihood_ratio_metric(catalogue_lookup("B2").loss, constant_disc(SquashKind::Identity, 0.0), x, y);
  CHECK(balanced.real_mean == 1.0);
  CHECK(balanced.gen_mean == 1.0);
  CHECK(balanced.real_std == 0.0);
  CHECK(balanced.gen_std == 0.0);

  const RatioStats ce = likelihood_ratio_metric(catalogue_lookup("CrossEntropy").loss,
                                                constant_disc(SquashKind::Logistic, std::log(4.0)), x, y);
  CHECK(ce.real_mean == doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS_AS(likelihood_ratio_metric(catalogue_lookup("Wasserstein").loss,
                                          constant_disc(SquashKind::Identity, 0.0), x, y),
                  RatioNotRecoverable);
}

TEST_CASE("limit losses train without ratio metrics") {
  for (const char* name : {"Hinge", "Wasserstein"}) {
    const TrainResult r = train(shift_config(name, 10));
    REQUIRE(!r.metrics.empty());
    CHECK(!r.metrics.back().ratio_train.has_value());
    CHECK(!r.metrics.back().ratio_eval.has_value());
  }
  const TrainResult mse = train(shift_config("MSE", 10));
  CHECK(mse.metrics.back().ratio_train.has_value());
}

TEST_CASE("penalty switch removes the penalty") {
  TrainConfig c = shift_config("MSE", 5);
  c.penalty_path = false;
  const TrainResult r = train(c);
  CHECK(r.metrics.back().penalty == 0.0);
}

TEST_CASE("identical densities with an identity generator give unit ratios") {
  TrainConfig c = shift_config("MSE", 1000);
  c.f_spec = DensitySpec::normal(0, 1);
  c.generator_init = GeneratorInit::Identity;
  c.eval_every = 250;
  const TrainResult r = train(c);
  REQUIRE(r.metrics.back().ratio_train.has_value());
  const double lr = r.metrics.back().ratio_train->real_mean;
  CHECK(lr >= 0.8);
  CHECK(lr <= 1.2);
}

TEST_CASE("identity fit") {
  Net g = init_net<double>(default_generator_spec(1, 1, 4));
  fit_identity(g, DensitySpec::normal(0, 1), 500, 9);
  Eigen::MatrixXd z(3, 1);
  z << -1.0, 0.0, 1.5;
  CHECK((evaluate(g, z) - z).cwiseAbs().maxCoeff() < 0.1);
  CHECK(generate(g, DensitySpec::normal(0, 1), 10, 3) == generate(g, DensitySpec::normal(0, 1), 10, 3));
}

}
