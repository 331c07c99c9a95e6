#include "lrgan/trainer.hpp"

#include <cmath>

#include "lrgan/metrics.hpp"
#include "lrgan/random.hpp"

namespace lrgan {

namespace {

// Independent random streams derived from the run seed.
enum Stream : std::uint64_t { kRealStream = 1, kOriginStream = 2, kMixStream = 3, kEvalStream = 4 };

using Matrix = Eigen::MatrixXd;

class TargetSampler {
 public:
  explicit TargetSampler(const TrainConfig& cfg) {
    if (cfg.f_spec) {
      spec_ = cfg.f_spec;
    } else {
      data_ = load_samples(cfg.f_file);
    }
  }

  int dimension() const { return spec_ ? spec_->dimension() : static_cast<int>(data_.cols()); }

  Matrix draw(std::size_t n, Rng& rng) const {
    if (spec_) return sample(*spec_, n, rng.bits());
    Matrix out(static_cast<Eigen::Index>(n), data_.cols());
    for (std::size_t i = 0; i < n; ++i)
      out.row(static_cast<Eigen::Index>(i)) =
          data_.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(data_.rows()))));
    return out;
  }

 private:
  std::optional<DensitySpec> spec_;
  Matrix data_;
};

Matrix clamp_outputs(const LossPair& loss, const Matrix& d) {
  return d.unaryExpr([&loss](double v) { return clamp_interior(loss.range, v); });
}

Matrix map_values(const Matrix& d, const ScalarFn& fn) {
  return d.unaryExpr([&fn](double v) { return fn(v); });
}

double mean_value(const LossPair& loss, const Matrix& d, bool phi_side) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double z = d.data()[i];
    s += phi_side ? phi_value(loss, z) : psi_value(loss, z);
  }
  return s / static_cast<double>(d.size());
}

double vector_mean(const Eigen::VectorXd& v) { return v.mean(); }

double vector_std(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().mean());
}

}  // namespace

std::vector<std::string> TrainConfig::problems() const {
  std::vector<std::string> out;
  if (critic_iters < 1) out.push_back("critic_iters must be >= 1");
  if (batch_size < 2) out.push_back("batch_size must be >= 2");
  if (!(lambda >= 0.0)) out.push_back("lambda must be >= 0");
  if (total_generator_iters < 1) out.push_back("total_generator_iters must be >= 1");
  if (eval_every < 1) out.push_back("eval_every must be >= 1");
  if (eval_batch < 2) out.push_back("eval_batch must be >= 2");
  if (mmd_samples < 2) out.push_back("mmd_samples must be >= 2");
  if (swd_projections < 1) out.push_back("swd_projections must be >= 1");
  if (!(learning_rate > 0.0)) out.push_back("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) out.push_back("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) out.push_back("beta2 must lie in [0, 1)");
  if (!f_spec && f_file.empty()) out.push_back("missing f_spec (target density or sample file)");
  if (!h_spec) out.push_back("missing h_spec (origin density)");
  try {
    generator.validate();
  } catch (const std::exception& e) {
    out.push_back(std::string("generator: ") + e.what());
  }
  try {
    discriminator.validate();
    if (discriminator.output_dim() != 1) out.push_back("discriminator must have a scalar output");
  } catch (const std::exception& e) {
    out.push_back(std::string("discriminator: ") + e.what());
  }
  if (h_spec && !generator.widths.empty() && generator.input_dim() != h_spec->dimension())
    out.push_back("generator input width differs from h_spec dimension");
  if (f_spec && !generator.widths.empty() && generator.output_dim() != f_spec->dimension())
    out.push_back("generator output width differs from f_spec dimension");
  if (f_spec && !discriminator.widths.empty() && discriminator.input_dim() != f_spec->dimension())
    out.push_back("discriminator input width differs from f_spec dimension");
  if (generator_init == GeneratorInit::Identity && !generator.widths.empty() &&
      generator.input_dim() != generator.output_dim())
    out.push_back("identity generator init needs equal input and output widths");
  return out;
}

NetSpec default_generator_spec(int dz, int dx, std::uint64_t seed) {
  return NetSpec{{dz, 64, 64, dx}, Activation::Tanh, Squashing{SquashKind::Identity}, seed};
}

NetSpec default_discriminator_spec(int dx, std::uint64_t seed) {
  return NetSpec{{dx, 64, 64, 1}, Activation::SmoothLeaky, Squashing{SquashKind::Identity}, seed};
}

PenaltyResult<double> gradient_penalty(const Net& disc, const Matrix& real, const Matrix& fake,
                                       const PenaltyConfig& cfg, Rng& rng) {
  if (real.rows() != fake.rows() || real.cols() != fake.cols())
    throw std::invalid_argument("gradient_penalty: real and fake batches differ in shape");
  if (cfg.lambda == 0.0) {
    PenaltyResult<double> zero;
    zero.norms = Eigen::VectorXd::Zero(real.rows());
    zero.param_grads = Params::zeros_like(disc.params);
    return zero;
  }
  Matrix mix(real.rows(), real.cols());
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    const double u = rng.uniform();
    mix.row(i) = u * real.row(i) + (1.0 - u) * fake.row(i);
  }
  return input_grad_norm_and_hvp(disc, mix, cfg);
}

RatioStats likelihood_ratio_metric(const LossPair& loss, const Net& disc, const Matrix& real,
                                   const Matrix& fake) {
  if (!loss.ratio_invertible) throw RatioNotRecoverable(loss.name);
  auto ratios = [&](const Matrix& x) {
    const Matrix d = evaluate(disc, x);
    Eigen::VectorXd r(d.rows());
    for (Eigen::Index i = 0; i < d.rows(); ++i) r[i] = ratio_from_discriminator(loss, d(i, 0));
    return r;
  };
  const Eigen::VectorXd rr = ratios(real);
  const Eigen::VectorXd rg = ratios(fake);
  return RatioStats{vector_mean(rr), vector_std(rr), vector_mean(rg), vector_std(rg)};
}

Matrix generate(const Net& generator, const DensitySpec& origin, std::size_t n,
                std::uint64_t seed) {
  return evaluate(generator, sample(origin, n, seed));
}

void fit_identity(Net& generator, const DensitySpec& origin, int steps, std::uint64_t seed) {
  Rng rng(seed);
  Adam opt = Adam::for_params(generator.params, 1e-3, 0.9, 0.999);
  for (int s = 0; s < steps; ++s) {
    const Matrix z = sample(origin, 256, rng.bits());
    const auto cache = forward(generator, z);
    const Matrix grad = (output_of(cache) - z) * (2.0 / static_cast<double>(z.rows()));
    adam_step(opt, generator.params, backward(generator, cache, grad).param_grads);
  }
}

TrainResult train(const TrainConfig& config, const LossPair& loss, const EvalCallback& on_eval) {
  const auto issues = config.problems();
  if (!issues.empty()) {
    std::string msg = "invalid training configuration:";
    for (const auto& p : issues) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

  const TargetSampler target(config);
  const DensitySpec& origin = *config.h_spec;

  NetSpec disc_spec = config.discriminator;
  disc_spec.output = output_squashing_for(loss.range);

  TrainResult run;
  run.generator = init_net<double>(config.generator);
  run.discriminator = init_net<double>(disc_spec);
  if (config.generator_init == GeneratorInit::Identity)
    fit_identity(run.generator, origin, 500, derive_seed(config.seed, 99));
  run.generator_opt = Adam::for_params(run.generator.params, config.learning_rate, config.beta1,
                                       config.beta2);
  run.discriminator_opt = Adam::for_params(run.discriminator.params, config.learning_rate,
                                           config.beta1, config.beta2);

  Rng real_rng(derive_seed(config.seed, kRealStream));
  Rng origin_rng(derive_seed(config.seed, kOriginStream));
  Rng mix_rng(derive_seed(config.seed, kMixStream));
  Rng eval_rng(derive_seed(config.seed, kEvalStream));

  const PenaltyConfig penalty_cfg{config.penalty_variant, config.lambda};
  const auto n = static_cast<std::size_t>(config.batch_size);
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool closed = loss.has_closed_forms();

  Matrix last_real, last_fake;
  double last_penalty = 0.0;
  TrainResult last_good = run;

  auto diverge = [&](const std::string& why, long iter) {
    last_good.metrics = run.metrics;
    throw TrainingDiverged("training diverged at generator iteration " + std::to_string(iter) +
                               ": " + why,
                           last_good);
  };

  for (long iter = 1; iter <= config.total_generator_iters; ++iter) {
    try {
      for (int k = 0; k < config.critic_iters; ++k) {
        const Matrix x = target.draw(n, real_rng);
        const Matrix y = evaluate(run.generator, sample(origin, n, origin_rng.bits()));
        const auto cache_real = forward(run.discriminator, x);
        const auto cache_fake = forward(run.discriminator, y);
        const Matrix d_real = clamp_outputs(loss, output_of(cache_real));
        const Matrix d_fake = clamp_outputs(loss, output_of(cache_fake));
        if (closed) {
          const double obj = mean_value(loss, d_real, true) + mean_value(loss, d_fake, false);
          if (!std::isfinite(obj)) diverge("non-finite discriminator objective", iter);
        }
        // Ascent on the objective: descend on its negative.
        Params grad = backward(run.discriminator, cache_real,
                               map_values(d_real, loss.phi_prime) * inv_n)
                          .param_grads;
        grad += backward(run.discriminator, cache_fake, map_values(d_fake, loss.psi_prime) * inv_n)
                    .param_grads;
        grad *= -1.0;
        if (config.penalty_path) {
          const auto pen = gradient_penalty(run.discriminator, x, y, penalty_cfg, mix_rng);
          last_penalty = pen.penalty;
          grad += pen.param_grads;
        }
        adam_step(run.discriminator_opt, run.discriminator.params, grad);
        ++run.discriminator_steps;
        last_real = x;
        last_fake = y;
      }

      const Matrix z = sample(origin, n, origin_rng.bits());
      const auto cache_gen = forward(run.generator, z);
      const auto cache_disc = forward(run.discriminator, output_of(cache_gen));
      const Matrix d = clamp_outputs(loss, output_of(cache_disc));
      if (closed && !std::isfinite(mean_value(loss, d, false)))
        diverge("non-finite generator objective", iter);
      const Matrix dx =
          backward(run.discriminator, cache_disc, map_values(d, loss.psi_prime) * inv_n)
              .input_grads;
      adam_step(run.generator_opt, run.generator.params,
                backward(run.generator, cache_gen, dx).param_grads);
      ++run.generator_steps;
    } catch (const NonFiniteGradient& e) {
      diverge(e.what(), iter);
    }

    if (iter % config.eval_every == 0 || iter == config.total_generator_iters) {
      MetricRecord rec;
      rec.iteration = iter;
      const Matrix real_eval = target.draw(static_cast<std::size_t>(config.eval_batch), eval_rng);
      const Matrix fake_eval = evaluate(
          run.generator, sample(origin, static_cast<std::size_t>(config.eval_batch), eval_rng.bits()));
      const Matrix d_real = clamp_outputs(loss, evaluate(run.discriminator, real_eval));
      const Matrix d_fake = clamp_outputs(loss, evaluate(run.discriminator, fake_eval));
      rec.disc_objective = mean_value(loss, d_real, true) + mean_value(loss, d_fake, false);
      rec.gen_objective = mean_value(loss, d_fake, false);
      rec.penalty = last_penalty;
      if (loss.ratio_invertible) {
        rec.ratio_train = likelihood_ratio_metric(loss, run.discriminator, last_real, last_fake);
        rec.ratio_eval = likelihood_ratio_metric(loss, run.discriminator, real_eval, fake_eval);
      }
      const Eigen::Index m = std::min<Eigen::Index>(config.mmd_samples, real_eval.rows());
      rec.mmd = mmd_rbf(real_eval.topRows(m), fake_eval.topRows(m), std::nullopt);
      rec.swd = sliced_wasserstein(real_eval, fake_eval, config.swd_projections, eval_rng.bits());
      if (!std::isfinite(rec.disc_objective) || !std::isfinite(rec.gen_objective) ||
          !run.generator.params.all_finite() || !run.discriminator.params.all_finite())
        diverge("non-finite objective at evaluation", iter);
      run.metrics.push_back(rec);
      last_good = run;
      if (on_eval) on_eval(rec, run.generator, run.discriminator);
    }
  }
  return run;
}

TrainResult train(const TrainConfig& config, const EvalCallback& on_eval) {
  return train(config, catalogue_lookup(config.loss).loss, on_eval);
}

}  // namespace lrgan
