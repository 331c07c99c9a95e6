#pragma once

// Dense feed-forward networks with exact first- and second-order reverse mode.
//
// Batches are row-major in the sense of "one sample per row": an n x d matrix
// holds n samples of dimension d. Layer l maps width[l] -> width[l+1] with a
// weight matrix of shape width[l+1] x width[l].

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrgan/loss_family.hpp"
#include "lrgan/random.hpp"

namespace lrgan {

enum class Activation { SmoothLeaky, Tanh, Rectifier };

/// Negative-side slope of the smooth-leaky activation
/// f(a) = s a + (1 - s) softplus(a).
inline constexpr double kSmoothLeakySlope = 0.2;

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct NetSpec {
  std::vector<int> widths;
  Activation hidden = Activation::SmoothLeaky;
  Squashing output;
  std::uint64_t seed = 0;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  std::size_t layer_count() const { return widths.size() - 1; }
  void validate() const;

  friend bool operator==(const NetSpec& a, const NetSpec& b) {
    return a.widths == b.widths && a.hidden == b.hidden && a.output.kind == b.output.kind &&
           a.seed == b.seed;
  }
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Elementwise nonlinearities

namespace detail {

template <typename Scalar>
using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Value, first and second derivative of a nonlinearity on a block of
/// pre-activations. Each variant uses a single vectorised exp.
template <typename Scalar>
struct Nonlinearity {
  Array<Scalar> value, d1, d2;
};

template <typename Scalar>
Nonlinearity<Scalar> apply_hidden(Activation act, const Array<Scalar>& a) {
  Nonlinearity<Scalar> out;
  switch (act) {
    case Activation::SmoothLeaky: {
      const Scalar s(kSmoothLeakySlope);
      const Array<Scalar> e = (-a.abs()).exp();
      const Array<Scalar> inv = (Scalar(1) + e).inverse();
      const Array<Scalar> sig = (a >= Scalar(0)).select(inv, e * inv);
      out.value = s * a + (Scalar(1) - s) * (a.max(Scalar(0)) + (Scalar(1) + e).log());
      out.d1 = s + (Scalar(1) - s) * sig;
      out.d2 = (Scalar(1) - s) * sig * (Scalar(1) - sig);
      break;
    }
    case Activation::Tanh: {
      const Array<Scalar> e = (Scalar(-2) * a.abs()).exp();
      const Array<Scalar> t = a.sign() * (Scalar(1) - e) / (Scalar(1) + e);
      out.value = t;
      out.d1 = Scalar(1) - t.square();
      out.d2 = Scalar(-2) * t * out.d1;
      break;
    }
    case Activation::Rectifier:
      out.value = a.max(Scalar(0));
      out.d1 = (a > Scalar(0)).template cast<Scalar>();
      out.d2 = Array<Scalar>::Zero(a.rows(), a.cols());
      break;
  }
  return out;
}

template <typename Scalar>
Nonlinearity<Scalar> apply_squash(SquashKind kind, const Array<Scalar>& a) {
  Nonlinearity<Scalar> out;
  switch (kind) {
    case SquashKind::Identity:
      out.value = a;
      out.d1 = Array<Scalar>::Ones(a.rows(), a.cols());
      out.d2 = Array<Scalar>::Zero(a.rows(), a.cols());
      break;
    case SquashKind::Softplus:
    case SquashKind::Logistic: {
      const Array<Scalar> e = (-a.abs()).exp();
      const Array<Scalar> inv = (Scalar(1) + e).inverse();
      const Array<Scalar> sig = (a >= Scalar(0)).select(inv, e * inv);
      const Array<Scalar> slope = sig * (Scalar(1) - sig);
      if (kind == SquashKind::Softplus) {
        out.value = a.max(Scalar(0)) + (Scalar(1) + e).log();
        out.d1 = sig;
        out.d2 = slope;
      } else {
        out.value = sig;
        out.d1 = slope;
        out.d2 = slope * (Scalar(1) - Scalar(2) * sig);
      }
      break;
    }
    case SquashKind::Tanh: {
      const Array<Scalar> e = (Scalar(-2) * a.abs()).exp();
      const Array<Scalar> t = a.sign() * (Scalar(1) - e) / (Scalar(1) + e);
      out.value = t;
      out.d1 = Scalar(1) - t.square();
      out.d2 = Scalar(-2) * t * out.d1;
      break;
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parameters

template <typename Scalar>
struct LayerParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static LayerParams zeros_like(const LayerParams& other) {
    LayerParams z;
    for (const auto& w : other.weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : other.biases) z.biases.push_back(Vector::Zero(b.size()));
    return z;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
    for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
    return n;
  }

  /// Mutable access to the k-th scalar in layer-major order (weights then bias per layer,
  /// column-major within a matrix).
  Scalar& flat(std::size_t k) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const auto nw = static_cast<std::size_t>(weights[l].size());
      if (k < nw) return weights[l].data()[k];
      k -= nw;
      const auto nb = static_cast<std::size_t>(biases[l].size());
      if (k < nb) return biases[l].data()[k];
      k -= nb;
    }
    throw std::out_of_range("LayerParams::flat index out of range");
  }
  Scalar flat(std::size_t k) const { return const_cast<LayerParams&>(*this).flat(k); }

  LayerParams& operator+=(const LayerParams& o) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l] += o.weights[l];
      biases[l] += o.biases[l];
    }
    return *this;
  }
  LayerParams& operator-=(const LayerParams& o) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l] -= o.weights[l];
      biases[l] -= o.biases[l];
    }
    return *this;
  }
  LayerParams& operator*=(Scalar s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l] *= s;
      biases[l] *= s;
    }
    return *this;
  }

  bool all_finite() const {
    for (std::size_t l = 0; l < weights.size(); ++l)
      if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
    return true;
  }
};

template <typename Scalar>
struct DenseNet {
  using Matrix = typename LayerParams<Scalar>::Matrix;
  using Vector = typename LayerParams<Scalar>::Vector;

  NetSpec spec;
  LayerParams<Scalar> params;
};

/// Weights ~ N(0, 1/fan_in) drawn layer by layer in column-major order from
/// Rng(spec.seed); biases zero.
template <typename Scalar>
DenseNet<Scalar> init_net(const NetSpec& spec) {
  spec.validate();
  DenseNet<Scalar> net{spec, {}};
  Rng rng(spec.seed);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const int fan_in = spec.widths[l];
    const int fan_out = spec.widths[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    typename DenseNet<Scalar>::Matrix w(fan_out, fan_in);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = Scalar(scale * rng.normal());
    net.params.weights.push_back(std::move(w));
    net.params.biases.push_back(DenseNet<Scalar>::Vector::Zero(fan_out));
  }
  return net;
}

template <typename Scalar>
struct ForwardCache {
  using Matrix = typename LayerParams<Scalar>::Matrix;
  Matrix input;
  std::vector<Matrix> pre;    // pre-activations, one per layer
  std::vector<Matrix> post;   // activations, one per layer (last = output)
  std::vector<Matrix> slope;  // first derivative of each layer's nonlinearity at `pre`
  std::vector<Matrix> curve;  // second derivative of each layer's nonlinearity at `pre`
};

template <typename Scalar>
const typename LayerParams<Scalar>::Matrix& output_of(const ForwardCache<Scalar>& cache) {
  return cache.post.back();
}

template <typename Scalar>
ForwardCache<Scalar> forward(const DenseNet<Scalar>& net,
                             const typename DenseNet<Scalar>::Matrix& batch) {
  if (batch.cols() != net.spec.input_dim())
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " columns, network expects " + std::to_string(net.spec.input_dim()));
  ForwardCache<Scalar> cache;
  cache.input = batch;
  const std::size_t layers = net.spec.layer_count();
  cache.pre.reserve(layers);
  cache.post.reserve(layers);
  cache.slope.reserve(layers);
  cache.curve.reserve(layers);
  const typename DenseNet<Scalar>::Matrix* h = &cache.input;
  for (std::size_t l = 0; l < layers; ++l) {
    typename DenseNet<Scalar>::Matrix a = (*h) * net.params.weights[l].transpose();
    a.rowwise() += net.params.biases[l].transpose();
    auto nl = l + 1 == layers ? detail::apply_squash<Scalar>(net.spec.output.kind, a.array())
                              : detail::apply_hidden<Scalar>(net.spec.hidden, a.array());
    cache.pre.push_back(std::move(a));
    cache.post.push_back(std::move(nl.value).matrix());
    cache.slope.push_back(std::move(nl.d1).matrix());
    cache.curve.push_back(std::move(nl.d2).matrix());
    h = &cache.post.back();
  }
  return cache;
}

template <typename Scalar>
typename DenseNet<Scalar>::Matrix evaluate(const DenseNet<Scalar>& net,
                                           const typename DenseNet<Scalar>::Matrix& batch) {
  return forward(net, batch).post.back();
}

namespace detail {

template <typename Scalar>
void check_cache(const DenseNet<Scalar>& net, const ForwardCache<Scalar>& cache) {
  if (cache.pre.size() != net.spec.layer_count() || cache.slope.size() != cache.pre.size() ||
      cache.input.cols() != net.spec.input_dim())
    throw ShapeError("stale forward cache: layer count or input width differs from the network");
  for (std::size_t l = 0; l < cache.pre.size(); ++l) {
    if (cache.pre[l].cols() != net.params.weights[l].rows())
      throw ShapeError("stale forward cache: layer " + std::to_string(l) + " width mismatch");
  }
}

}  // namespace detail

template <typename Scalar>
struct BackwardResult {
  LayerParams<Scalar> param_grads;
  typename LayerParams<Scalar>::Matrix input_grads;
};

/// Reverse-mode gradients of a scalar loss whose derivative with respect to the
/// network outputs is `output_grads` (n x d_out).
template <typename Scalar>
BackwardResult<Scalar> backward(const DenseNet<Scalar>& net, const ForwardCache<Scalar>& cache,
                                const typename DenseNet<Scalar>::Matrix& output_grads) {
  detail::check_cache(net, cache);
  const std::size_t layers = net.spec.layer_count();
  if (output_grads.rows() != cache.input.rows() || output_grads.cols() != net.spec.output_dim())
    throw ShapeError("backward: output gradient shape does not match the cached forward pass");

  BackwardResult<Scalar> res;
  res.param_grads.weights.resize(layers);
  res.param_grads.biases.resize(layers);
  typename DenseNet<Scalar>::Matrix delta =
      output_grads.cwiseProduct(cache.slope[layers - 1]);
  for (std::size_t l = layers; l-- > 0;) {
    const auto& h_prev = l == 0 ? cache.input : cache.post[l - 1];
    res.param_grads.weights[l] = delta.transpose() * h_prev;
    res.param_grads.biases[l] = delta.colwise().sum().transpose();
    typename DenseNet<Scalar>::Matrix up = delta * net.params.weights[l];
    if (l == 0) {
      res.input_grads = std::move(up);
    } else {
      delta = up.cwiseProduct(cache.slope[l - 1]);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Gradient penalty

enum class PenaltyVariant { Max, Mean };
enum class PenaltyMode { Exact, FiniteDifference };

std::string penalty_variant_name(PenaltyVariant v);
PenaltyVariant penalty_variant_from_name(const std::string& name);

struct PenaltyConfig {
  PenaltyVariant variant = PenaltyVariant::Max;
  double lambda = 10.0;
};

template <typename Scalar>
struct PenaltyResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms;  // per-sample |grad_x D|
  Scalar penalty = Scalar(0);
  LayerParams<Scalar> param_grads;                 // d penalty / d params
};

namespace detail {

/// Ridders' extrapolated central difference: shrinks the step from h by 1.4 per
/// round and returns the tableau entry with the smallest error estimate.
template <typename Scalar, typename F>
Scalar ridders_derivative(F&& f, Scalar x0, Scalar h) {
  constexpr int kRounds = 12;
  const Scalar shrink(1.4), shrink2 = shrink * shrink;
  Scalar table[kRounds][kRounds];
  Scalar best(0), best_err = std::numeric_limits<Scalar>::max();
  table[0][0] = (f(x0 + h) - f(x0 - h)) / (Scalar(2) * h);
  best = table[0][0];
  using std::abs;
  using std::max;
  for (int i = 1; i < kRounds; ++i) {
    h /= shrink;
    table[0][i] = (f(x0 + h) - f(x0 - h)) / (Scalar(2) * h);
    Scalar factor = shrink2;
    for (int j = 1; j <= i; ++j) {
      table[j][i] = (table[j - 1][i] * factor - table[j - 1][i - 1]) / (factor - Scalar(1));
      factor *= shrink2;
      const Scalar err = max(abs(table[j][i] - table[j - 1][i]), abs(table[j][i] - table[j - 1][i - 1]));
      if (err <= best_err) {
        best_err = err;
        best = table[j][i];
      }
    }
    if (abs(table[i][i] - table[i - 1][i - 1]) >= Scalar(2) * best_err) break;
  }
  return best;
}

/// Penalty value and dP/d|g_i| for every sample.
template <typename Scalar>
Scalar penalty_value(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& norms,
                     const PenaltyConfig& cfg,
                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* dnorm) {
  const Eigen::Index n = norms.size();
  if (dnorm) dnorm->setZero(n);
  const Scalar lambda(cfg.lambda);
  if (cfg.variant == PenaltyVariant::Max) {
    Eigen::Index arg = 0;
    Scalar worst(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar excess = norms[i] - Scalar(1);
      if (excess > worst) {
        worst = excess;
        arg = i;
      }
    }
    if (dnorm && worst > Scalar(0)) (*dnorm)[arg] = Scalar(2) * lambda * worst;
    return lambda * worst * worst;
  }
  Scalar total(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar excess = norms[i] - Scalar(1);
    if (excess > Scalar(0)) {
      total += excess * excess;
      if (dnorm) (*dnorm)[i] = Scalar(2) * lambda * excess / Scalar(n);
    }
  }
  return lambda * total / Scalar(n);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> input_gradients(
    const DenseNet<Scalar>& net, const ForwardCache<Scalar>& cache) {
  using Matrix = typename DenseNet<Scalar>::Matrix;
  return backward(net, cache, Matrix::Ones(cache.input.rows(), 1)).input_grads;
}

}  // namespace detail

/// Per-sample input-gradient norms of a scalar-output network.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> input_grad_norms(
    const DenseNet<Scalar>& net, const typename DenseNet<Scalar>::Matrix& x) {
  if (net.spec.output_dim() != 1) throw ShapeError("input_grad_norms: scalar-output net required");
  return detail::input_gradients(net, forward(net, x)).rowwise().norm();
}

/// Gradient norms, penalty value and the parameter gradient of the penalty.
///
/// Exact mode differentiates v^T grad_x D (v = dP/dg held fixed) by pushing a
/// tangent along v through the layer chain and reversing through both the primal
/// and tangent computations. FiniteDifference mode differentiates each parameter
/// numerically with Ridders' extrapolation.
template <typename Scalar>
PenaltyResult<Scalar> input_grad_norm_and_hvp(const DenseNet<Scalar>& net,
                                              const typename DenseNet<Scalar>::Matrix& x,
                                              const PenaltyConfig& cfg,
                                              PenaltyMode mode = PenaltyMode::Exact) {
  using Matrix = typename DenseNet<Scalar>::Matrix;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (net.spec.output_dim() != 1)
    throw ShapeError("gradient penalty requires a scalar-output discriminator");
  if (mode == PenaltyMode::Exact && net.spec.hidden == Activation::Rectifier)
    throw std::invalid_argument(
        "exact penalty gradient needs a smooth hidden activation; use smooth-leaky or the "
        "finite-difference mode");

  PenaltyResult<Scalar> res;
  const auto cache = forward(net, x);
  const Matrix grads = detail::input_gradients(net, cache);
  res.norms = grads.rowwise().norm();
  Vector dnorm;
  res.penalty = detail::penalty_value(res.norms, cfg, &dnorm);
  res.param_grads = LayerParams<Scalar>::zeros_like(net.params);
  if (cfg.lambda == 0.0 || !(dnorm.array() != Scalar(0)).any()) return res;

  if (mode == PenaltyMode::FiniteDifference) {
    DenseNet<Scalar> probe = net;
    for (std::size_t k = 0; k < net.params.parameter_count(); ++k) {
      const Scalar base = net.params.flat(k);
      const auto at = [&](Scalar value) {
        probe.params.flat(k) = value;
        return detail::penalty_value(input_grad_norms(probe, x), cfg, (Vector*)nullptr);
      };
      using std::abs;
      res.param_grads.flat(k) =
          detail::ridders_derivative(at, base, Scalar(1e-3) * (abs(base) > Scalar(1) ? abs(base) : Scalar(1)));
      probe.params.flat(k) = base;
    }
    return res;
  }

  // v_i = dP/d|g_i| * g_i / |g_i|
  Matrix v = Matrix::Zero(grads.rows(), grads.cols());
  for (Eigen::Index i = 0; i < grads.rows(); ++i) {
    if (dnorm[i] != Scalar(0) && res.norms[i] > Scalar(0))
      v.row(i) = grads.row(i) * (dnorm[i] / res.norms[i]);
  }

  const std::size_t layers = net.spec.layer_count();
  const std::vector<Matrix>& d1 = cache.slope;
  std::vector<Matrix> tangent_pre(layers), tangent_post(layers);
  // Tangent pass.
  const Matrix* t_in = &v;
  for (std::size_t l = 0; l < layers; ++l) {
    tangent_pre[l] = (*t_in) * net.params.weights[l].transpose();
    tangent_post[l] = tangent_pre[l].cwiseProduct(d1[l]);
    t_in = &tangent_post[l];
  }
  // Reverse through primal and tangent chains.
  Matrix adj_tangent_pre = d1[layers - 1];
  Matrix adj_pre = cache.curve[layers - 1].cwiseProduct(tangent_pre[layers - 1]);
  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& h_prev = l == 0 ? cache.input : cache.post[l - 1];
    const Matrix& t_prev = l == 0 ? v : tangent_post[l - 1];
    res.param_grads.weights[l] = adj_tangent_pre.transpose() * t_prev + adj_pre.transpose() * h_prev;
    res.param_grads.biases[l] = adj_pre.colwise().sum().transpose();
    if (l == 0) break;
    const Matrix adj_tangent_post = adj_tangent_pre * net.params.weights[l];
    const Matrix adj_post = adj_pre * net.params.weights[l];
    const Matrix& d2 = cache.curve[l - 1];
    adj_tangent_pre = d1[l - 1].cwiseProduct(adj_tangent_post);
    adj_pre = d1[l - 1].cwiseProduct(adj_post) +
              d2.cwiseProduct(tangent_pre[l - 1]).cwiseProduct(adj_tangent_post);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Adam

template <typename Scalar>
struct AdamState {
  LayerParams<Scalar> first_moment;
  LayerParams<Scalar> second_moment;
  long step = 0;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
  double learning_rate = 1e-4;

  static AdamState for_params(const LayerParams<Scalar>& params, double lr, double beta1,
                              double beta2, double eps = 1e-8) {
    AdamState s;
    s.first_moment = LayerParams<Scalar>::zeros_like(params);
    s.second_moment = LayerParams<Scalar>::zeros_like(params);
    s.learning_rate = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
  }
};

/// Bias-corrected Adam descent step on `params`; mutates both arguments.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, LayerParams<Scalar>& params,
               const LayerParams<Scalar>& grads) {
  if (grads.weights.size() != params.weights.size() ||
      state.first_moment.weights.size() != params.weights.size())
    throw ShapeError("adam_step: layer count mismatch");
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() ||
        grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size())
      throw ShapeError("adam_step: gradient shape mismatch in layer " + std::to_string(l));
    if (!grads.weights[l].allFinite())
      throw NonFiniteGradient("non-finite gradient in layer " + std::to_string(l) + " weights");
    if (!grads.biases[l].allFinite())
      throw NonFiniteGradient("non-finite gradient in layer " + std::to_string(l) + " biases");
  }
  ++state.step;
  const Scalar b1(state.beta1), b2(state.beta2);
  const Scalar c1 = Scalar(1) - Scalar(std::pow(state.beta1, static_cast<double>(state.step)));
  const Scalar c2 = Scalar(1) - Scalar(std::pow(state.beta2, static_cast<double>(state.step)));
  const Scalar lr(state.learning_rate), eps(state.eps);
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    update(params.weights[l], state.first_moment.weights[l], state.second_moment.weights[l],
           grads.weights[l]);
    update(params.biases[l], state.first_moment.biases[l], state.second_moment.biases[l],
           grads.biases[l]);
  }
}

using Net = DenseNet<double>;
using Adam = AdamState<double>;
using Params = LayerParams<double>;

}  // namespace lrgan
