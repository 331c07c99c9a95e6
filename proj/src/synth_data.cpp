#include "lrgan/synth_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "lrgan/random.hpp"

namespace lrgan {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

struct PreparedGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower factor
  double log_norm;       // -0.5 (d log 2pi + log det)
};

PreparedGaussian prepare(const Gaussian& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success) throw SpecError("covariance is not positive definite");
  PreparedGaussian p;
  p.mean = g.mean;
  p.chol = llt.matrixL();
  const double log_det = 2.0 * p.chol.diagonal().array().log().sum();
  p.log_norm = -0.5 * (static_cast<double>(g.mean.size()) * kLog2Pi + log_det);
  return p;
}

double gaussian_log_pdf(const PreparedGaussian& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = p.chol.triangularView<Eigen::Lower>().solve(x - p.mean);
  return p.log_norm - 0.5 * y.squaredNorm();
}

void validate_gaussian(const Gaussian& g) {
  if (g.mean.size() < 1 || g.mean.size() > 2) throw SpecError("dimension must be 1 or 2");
  if (g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size())
    throw SpecError("covariance shape does not match the mean");
  if (!g.cov.isApprox(g.cov.transpose(), 1e-12)) throw SpecError("covariance is not symmetric");
  prepare(g);
}

}  // namespace

DensitySpec::DensitySpec(Variant v) : v_(std::move(v)) {
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          validate_gaussian(s);
          dim_ = static_cast<int>(s.mean.size());
        } else if constexpr (std::is_same_v<T, Mixture>) {
          if (s.components.empty()) throw SpecError("mixture needs at least one component");
          double total = 0.0;
          dim_ = static_cast<int>(s.components.front().component.mean.size());
          for (const auto& c : s.components) {
            if (!(c.weight > 0.0)) throw SpecError("mixture weights must be positive");
            validate_gaussian(c.component);
            if (c.component.mean.size() != dim_)
              throw SpecError("mixture components differ in dimension");
            total += c.weight;
          }
          if (std::abs(total - 1.0) > 1e-9) throw SpecError("mixture weights must sum to 1");
        } else if constexpr (std::is_same_v<T, Ring>) {
          if (s.modes < 1) throw SpecError("ring needs at least one mode");
          if (!(s.radius >= 0.0)) throw SpecError("ring radius must be nonnegative");
          if (!(s.sigma > 0.0)) throw SpecError("ring sigma must be positive");
          dim_ = 2;
        } else {
          if (s.lower.size() < 1 || s.lower.size() > 2 || s.upper.size() != s.lower.size())
            throw SpecError("uniform box bounds must have matching dimension 1 or 2");
          if (!(s.upper.array() > s.lower.array()).all())
            throw SpecError("uniform box needs lower < upper in every coordinate");
          dim_ = static_cast<int>(s.lower.size());
        }
      },
      v_);
}

DensitySpec DensitySpec::normal(double mean, double sigma) {
  Gaussian g{Eigen::VectorXd::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, sigma * sigma)};
  return DensitySpec(g);
}

DensitySpec DensitySpec::standard_normal(int dim) {
  return DensitySpec(Gaussian{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim)});
}

Mixture DensitySpec::as_mixture() const {
  if (const auto* m = std::get_if<Mixture>(&v_)) return *m;
  if (const auto* g = std::get_if<Gaussian>(&v_)) return Mixture{{{1.0, *g}}};
  if (const auto* r = std::get_if<Ring>(&v_)) {
    Mixture m;
    const Eigen::MatrixXd centres = ring_centres();
    for (int j = 0; j < r->modes; ++j) {
      m.components.push_back({1.0 / r->modes,
                              Gaussian{centres.row(j).transpose(),
                                       Eigen::MatrixXd::Identity(2, 2) * r->sigma * r->sigma}});
    }
    return m;
  }
  throw SpecError("uniform box has no mixture form");
}

Eigen::MatrixXd DensitySpec::ring_centres() const {
  const auto* r = std::get_if<Ring>(&v_);
  if (!r) throw SpecError("not a ring density");
  Eigen::MatrixXd c(r->modes, 2);
  for (int j = 0; j < r->modes; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / r->modes;
    c(j, 0) = r->radius * std::cos(angle);
    c(j, 1) = r->radius * std::sin(angle);
  }
  return c;
}

Eigen::MatrixXd sample(const DensitySpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const int d = spec.dimension();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  if (const auto* box = std::get_if<UniformBox>(&spec.variant())) {
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k)
        out(i, k) = box->lower[k] + (box->upper[k] - box->lower[k]) * rng.uniform();
    return out;
  }
  const Mixture mix = spec.as_mixture();
  std::vector<PreparedGaussian> comps;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : mix.components) {
    comps.push_back(prepare(c.component));
    acc += c.weight;
    cumulative.push_back(acc);
  }
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    if (comps.size() > 1) {
      const double u = rng.uniform() * acc;
      while (j + 1 < comps.size() && u >= cumulative[j]) ++j;
    }
    for (int k = 0; k < d; ++k) z[k] = rng.normal();
    out.row(static_cast<Eigen::Index>(i)) = (comps[j].mean + comps[j].chol * z).transpose();
  }
  return out;
}

double log_pdf(const DensitySpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dimension()) throw SpecError("point dimension does not match density");
  if (const auto* box = std::get_if<UniformBox>(&spec.variant())) {
    if ((x.array() < box->lower.array()).any() || (x.array() > box->upper.array()).any())
      return -std::numeric_limits<double>::infinity();
    return -(box->upper - box->lower).array().log().sum();
  }
  const Mixture mix = spec.as_mixture();
  // log-sum-exp over components
  std::vector<double> terms;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : mix.components) {
    const double t = std::log(c.weight) + gaussian_log_pdf(prepare(c.component), x);
    terms.push_back(t);
    top = std::max(top, t);
  }
  if (std::isinf(top)) return top;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

double pdf(const DensitySpec& spec, const Eigen::VectorXd& x) { return std::exp(log_pdf(spec, x)); }

double true_log_ratio(const DensitySpec& f, const DensitySpec& g, const Eigen::VectorXd& x) {
  const double lf = log_pdf(f, x);
  if (std::isinf(lf) && lf < 0)
    throw UndefinedRatio("likelihood ratio undefined: target density vanishes at this point");
  const double lg = log_pdf(g, x);
  if (std::isinf(lg) && lg < 0) return -std::numeric_limits<double>::infinity();
  return lg - lf;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd parse_samples(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string field = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                         : comma - start);
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
      double value = 0.0;
      const char* b = field.data();
      const char* e = field.data() + field.size();
      if (!field.empty() && *b == '+') ++b;
      const auto res = std::from_chars(b, e, value);
      if (field.empty() || res.ec != std::errc() || res.ptr != e)
        throw DataError(DataError::Kind::NonNumeric, "line " + std::to_string(line_no) +
                                                         ": non-numeric field '" + field + "'");
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      arity = row.size();
    } else if (row.size() != arity) {
      throw DataError(DataError::Kind::Ragged,
                      "line " + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                          " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(DataError::Kind::Empty, "empty dataset");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(arity));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < arity; ++k) out(i, k) = rows[i][k];
  return out;
}

Eigen::MatrixXd load_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::Io, "cannot open sample file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_samples(buf.str());
}

std::string format_samples(const Eigen::MatrixXd& samples) {
  std::string out;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index k = 0; k < samples.cols(); ++k) {
      if (k) out += ',';
      out += format_double(samples(i, k));
    }
    out += '\n';
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const Eigen::MatrixXd& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataError::Kind::Io, "cannot write sample file " + path.string());
  out << format_samples(samples);
}

}  // namespace lrgan
