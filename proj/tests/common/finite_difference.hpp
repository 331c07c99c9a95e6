#pragma once

// Central-difference oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>

#include "lrgan/tensor_nn.hpp"

namespace lrgan::testing {

inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Random batch and random output weights G; the scalar objective is sum(G .* net(x)).
struct Probe {
  Eigen::MatrixXd x;
  Eigen::MatrixXd g;
};

inline Probe make_probe(const Net& net, int n, std::uint64_t seed) {
  Rng rng(seed);
  Probe p{Eigen::MatrixXd(n, net.spec.input_dim()), Eigen::MatrixXd(n, net.spec.output_dim())};
  for (Eigen::Index k = 0; k < p.x.size(); ++k) p.x.data()[k] = rng.normal();
  for (Eigen::Index k = 0; k < p.g.size(); ++k) p.g.data()[k] = rng.normal();
  return p;
}

inline double probe_objective(const Net& net, const Probe& p) {
  return (evaluate(net, p.x).array() * p.g.array()).sum();
}

/// Worst relative error of backward() against central differences, over every
/// parameter and every input coordinate.
inline double backward_fd_error(const Net& net, const Probe& p, double h = 1e-6) {
  const BackwardResult<double> exact = backward(net, forward(net, p.x), p.g);
  double worst = 0.0;
  Net probe = net;
  for (std::size_t k = 0; k < net.params.parameter_count(); ++k) {
    const double saved = probe.params.flat(k);
    probe.params.flat(k) = saved + h;
    const double up = probe_objective(probe, p);
    probe.params.flat(k) = saved - h;
    const double down = probe_objective(probe, p);
    probe.params.flat(k) = saved;
    worst = std::max(worst, relative_error(exact.param_grads.flat(k), (up - down) / (2 * h)));
  }
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.x.cols(); ++j) {
      Probe q = p;
      q.x(i, j) += h;
      const double up = probe_objective(net, q);
      q.x(i, j) -= 2 * h;
      const double down = probe_objective(net, q);
      worst = std::max(worst, relative_error(exact.input_grads(i, j), (up - down) / (2 * h)));
    }
  }
  return worst;
}

/// Worst relative error between the exact and finite-difference penalty gradients.
inline double penalty_mode_error(const Net& net, const Eigen::MatrixXd& x, const PenaltyConfig& cfg) {
  const auto exact = input_grad_norm_and_hvp(net, x, cfg, PenaltyMode::Exact);
  const auto fd = input_grad_norm_and_hvp(net, x, cfg, PenaltyMode::FiniteDifference);
  double worst = 0.0;
  for (std::size_t k = 0; k < net.params.parameter_count(); ++k)
    worst = std::max(worst, relative_error(exact.param_grads.flat(k), fd.param_grads.flat(k), 1e-4));
  return worst;
}

}  // namespace lrgan::testing
