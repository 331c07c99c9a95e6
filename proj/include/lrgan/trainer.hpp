#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrgan/loss_family.hpp"
#include "lrgan/synth_data.hpp"
#include "lrgan/tensor_nn.hpp"

namespace lrgan {

enum class GeneratorInit { Random, Identity };

struct TrainConfig {
  std::string loss = "MSE";
  double lambda = 10.0;
  PenaltyVariant penalty_variant = PenaltyVariant::Max;
  int critic_iters = 5;
  int batch_size = 64;
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  long total_generator_iters = 20000;
  long eval_every = 200;
  int eval_batch = 2048;
  int mmd_samples = 1024;
  int swd_projections = 64;
  NetSpec generator;
  NetSpec discriminator;  // output squashing is always replaced by the loss's
  std::optional<DensitySpec> f_spec;
  std::string f_file;  // used when f_spec is absent
  std::optional<DensitySpec> h_spec;
  std::uint64_t seed = 1;
  GeneratorInit generator_init = GeneratorInit::Random;
  /// Diagnostic switch: false removes every call into the penalty code.
  bool penalty_path = true;

  /// Every violated constraint, one message each; empty when valid.
  std::vector<std::string> problems() const;
};

/// Generator [d_z, 64, 64, d_x] with tanh hidden units and identity output;
/// discriminator [d_x, 64, 64, 1] with smooth-leaky hidden units.
NetSpec default_generator_spec(int dz, int dx, std::uint64_t seed);
NetSpec default_discriminator_spec(int dx, std::uint64_t seed);

struct RatioStats {
  double real_mean = 0, real_std = 0, gen_mean = 0, gen_std = 0;
};

struct MetricRecord {
  long iteration = 0;
  double disc_objective = 0;
  double gen_objective = 0;
  double penalty = 0;
  std::optional<RatioStats> ratio_train;  // from the last critic step's batches
  std::optional<RatioStats> ratio_eval;   // from fresh evaluation batches
  double mmd = 0;
  double swd = 0;
};

struct TrainResult {
  Net generator;
  Net discriminator;
  Adam generator_opt;
  Adam discriminator_opt;
  std::vector<MetricRecord> metrics;
  long discriminator_steps = 0;
  long generator_steps = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, TrainResult last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const TrainResult& last_good() const { return last_good_; }

 private:
  TrainResult last_good_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Called after each evaluation with the record and the current networks.
using EvalCallback = std::function<void(const MetricRecord&, const Net& generator, const Net& disc)>;

TrainResult train(const TrainConfig& config, const EvalCallback& on_eval = {});
TrainResult train(const TrainConfig& config, const LossPair& loss, const EvalCallback& on_eval = {});

/// lambda * penalty on interpolates u x + (1 - u) y, u ~ U[0,1] per pair from `rng`.
PenaltyResult<double> gradient_penalty(const Net& disc, const Eigen::MatrixXd& real,
                                       const Eigen::MatrixXd& fake, const PenaltyConfig& cfg,
                                       Rng& rng);

/// Means and standard deviations of omega^{-1}(D) on both batches.
RatioStats likelihood_ratio_metric(const LossPair& loss, const Net& disc,
                                   const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake);

/// Fits a generator to the identity map on origin samples by least squares.
void fit_identity(Net& generator, const DensitySpec& origin, int steps, std::uint64_t seed);

/// Generator outputs for n fresh origin draws.
Eigen::MatrixXd generate(const Net& generator, const DensitySpec& origin, std::size_t n,
                         std::uint64_t seed);

}  // namespace lrgan
