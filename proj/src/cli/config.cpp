#include "lrgan/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lrgan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

template <typename Int>
bool parse_integer(const std::string& text, Int& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string join_numbers(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string join_matrix(const Eigen::MatrixXd& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (i || j ? "," : "") + format_double(m(i, j));
  return s;
}

// Recursive-descent reader for the density grammar.
class DensityReader {
 public:
  explicit DensityReader(const std::string& text) : s_(text) {}

  DensitySpec read_all() {
    DensitySpec spec = read_spec();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing text");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SpecError("density '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_space();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return lowercase(s_.substr(start, pos_ - start));
  }

  double number() {
    skip_space();
    double v = 0;
    const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  std::vector<double> numbers() {
    std::vector<double> v{number()};
    while (accept(',')) v.push_back(number());
    return v;
  }

  std::map<std::string, std::vector<double>> arguments() {
    std::map<std::string, std::vector<double>> args;
    do {
      const std::string key = ident();
      expect('=');
      if (!args.emplace(key, numbers()).second) fail("repeated argument '" + key + "'");
    } while (accept(';'));
    return args;
  }

  static const std::vector<double>& need(const std::map<std::string, std::vector<double>>& args,
                                         const std::string& key, const std::string& kind) {
    const auto it = args.find(key);
    if (it == args.end()) throw SpecError(kind + ": missing argument '" + key + "'");
    return it->second;
  }

  static void only(const std::map<std::string, std::vector<double>>& args,
                   const std::set<std::string>& allowed, const std::string& kind) {
    for (const auto& [k, v] : args)
      if (!allowed.count(k)) throw SpecError(kind + ": unknown argument '" + k + "'");
  }

  static Eigen::VectorXd vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Gaussian gaussian_body() {
    const auto args = arguments();
    only(args, {"mean", "cov"}, "gaussian");
    const auto& mean = need(args, "mean", "gaussian");
    const auto& cov = need(args, "cov", "gaussian");
    const auto d = static_cast<Eigen::Index>(mean.size());
    if (static_cast<Eigen::Index>(cov.size()) != d * d)
      throw SpecError("gaussian: cov needs " + std::to_string(d * d) + " entries");
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) c(i, j) = cov[static_cast<std::size_t>(i * d + j)];
    return Gaussian{vec(mean), c};
  }

  DensitySpec read_spec() {
    const std::string kind = ident();
    expect('(');
    std::optional<DensitySpec> out;
    if (kind == "gaussian") {
      out.emplace(gaussian_body());
    } else if (kind == "ring") {
      const auto args = arguments();
      only(args, {"k", "radius", "sigma"}, "ring");
      const auto& k = need(args, "k", "ring");
      const auto& radius = need(args, "radius", "ring");
      const auto& sigma = need(args, "sigma", "ring");
      if (k.size() != 1 || radius.size() != 1 || sigma.size() != 1 || k[0] != std::floor(k[0]))
        throw SpecError("ring: k, radius and sigma take one value each, k an integer");
      out.emplace(Ring{static_cast<int>(k[0]), radius[0], sigma[0]});
    } else if (kind == "uniform") {
      const auto args = arguments();
      only(args, {"lo", "hi"}, "uniform");
      out.emplace(UniformBox{vec(need(args, "lo", "uniform")), vec(need(args, "hi", "uniform"))});
    } else if (kind == "mixture") {
      Mixture m;
      do {
        const double w = number();
        expect('*');
        if (ident() != "gaussian") fail("mixture components must be gaussian");
        expect('(');
        m.components.push_back({w, gaussian_body()});
        expect(')');
      } while (accept('+'));
      out.emplace(std::move(m));
    } else {
      fail("unknown density '" + kind + "' (expected gaussian, ring, uniform or mixture)");
    }
    expect(')');
    return *out;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string format_gaussian(const Gaussian& g) {
  return "gaussian(mean=" + join_numbers(g.mean) + ";cov=" + join_matrix(g.cov) + ")";
}

// Accumulates problems so the user sees all of them at once.
class Reader {
 public:
  Reader(const ConfigFile& cfg, std::vector<std::string>& problems)
      : cfg_(cfg), problems_(problems) {}

  void allow(const std::string& section, std::set<std::string> keys) {
    allowed_[section] = std::move(keys);
  }

  void check_unknown() {
    for (const auto& [section, kv] : cfg_.sections) {
      const auto it = allowed_.find(section);
      if (it == allowed_.end()) {
        problems_.push_back("unknown section [" + section + "]");
        continue;
      }
      for (const auto& [k, v] : kv)
        if (!it->second.count(k)) problems_.push_back("unknown key '" + k + "' in [" + section + "]");
    }
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    return cfg_.get(section, key);
  }

  template <typename T>
  void integer(const std::string& section, const std::string& key, T& out) {
    if (auto v = raw(section, key); v && !parse_integer(*v, out))
      problems_.push_back(section + "." + key + ": expected an integer, got '" + *v + "'");
  }

  void real(const std::string& section, const std::string& key, double& out) {
    if (auto v = raw(section, key); v && !parse_number(*v, out))
      problems_.push_back(section + "." + key + ": expected a number, got '" + *v + "'");
  }

  void boolean(const std::string& section, const std::string& key, bool& out) {
    if (auto v = raw(section, key)) {
      const auto t = lowercase(*v);
      if (t == "true") out = true;
      else if (t == "false") out = false;
      else problems_.push_back(section + "." + key + ": expected true or false, got '" + *v + "'");
    }
  }

  template <typename F>
  void with(const std::string& section, const std::string& key, F&& f) {
    if (auto v = raw(section, key)) {
      try {
        f(*v);
      } catch (const std::exception& e) {
        problems_.push_back(section + "." + key + ": " + e.what());
      }
    }
  }

  void problem(std::string p) { problems_.push_back(std::move(p)); }

 private:
  const ConfigFile& cfg_;
  std::vector<std::string>& problems_;
  std::map<std::string, std::set<std::string>> allowed_;
};

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    if (!parse_integer(item, v)) throw std::invalid_argument("expected comma-separated integers");
    w.push_back(v);
  }
  return w;
}

std::string format_widths(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

void throw_if(const std::vector<std::string>& problems, const std::string& what) {
  if (problems.empty()) return;
  std::string msg = "invalid " + what + " configuration:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ConfigError(msg);
}

bool same_density(const std::optional<DensitySpec>& a, const std::optional<DensitySpec>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || format_density(*a) == format_density(*b);
}

}  // namespace

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  sections[section][key] = value;
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(number) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigSyntaxError(where + "unterminated section header");
      section = lowercase(trim(body.substr(1, body.size() - 2)));
      if (section.empty()) throw ConfigSyntaxError(where + "empty section name");
      cfg.sections[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigSyntaxError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigSyntaxError(where + "key outside any [section]");
    const std::string key = lowercase(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigSyntaxError(where + "empty key");
    if (cfg.get(section, key)) throw ConfigSyntaxError(where + "repeated key '" + key + "'");
    cfg.set(section, key, trim(body.substr(eq + 1)));
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigSyntaxError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ConfigFile& config) {
  std::string out;
  for (const auto& [section, kv] : config.sections) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

void apply_override(ConfigFile& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigSyntaxError("override '" + assignment + "' is not of the form section.key=value");
  const std::string section = lowercase(trim(assignment.substr(0, dot)));
  const std::string key = lowercase(trim(assignment.substr(dot + 1, eq - dot - 1)));
  if (section.empty() || key.empty())
    throw ConfigSyntaxError("override '" + assignment + "' has an empty section or key");
  config.set(section, key, trim(assignment.substr(eq + 1)));
}

DensitySpec parse_density(const std::string& text) { return DensityReader(text).read_all(); }

std::string format_density(const DensitySpec& spec) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return format_gaussian(v);
        } else if constexpr (std::is_same_v<T, Ring>) {
          return "ring(k=" + std::to_string(v.modes) + ";radius=" + format_double(v.radius) +
                 ";sigma=" + format_double(v.sigma) + ")";
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          return "uniform(lo=" + join_numbers(v.lower) + ";hi=" + join_numbers(v.upper) + ")";
        } else {
          std::string s = "mixture(";
          for (std::size_t i = 0; i < v.components.size(); ++i)
            s += (i ? "+" : "") + format_double(v.components[i].weight) + "*" +
                 format_gaussian(v.components[i].component);
          return s + ")";
        }
      },
      spec.variant());
}

TrainJob train_job_from_config(const ConfigFile& config) {
  std::vector<std::string> problems;
  Reader rd(config, problems);
  rd.allow("train", {"loss", "lambda", "penalty_variant", "critic_iters", "batch_size",
                     "learning_rate", "beta1", "beta2", "total_generator_iters", "eval_every",
                     "eval_batch", "mmd_samples", "swd_projections", "seed", "generator_init",
                     "f_spec", "f_file", "h_spec", "checkpoint_every", "sample_count",
                     "penalty_path"});
  rd.allow("generator", {"widths", "hidden", "output", "seed"});
  rd.allow("discriminator", {"widths", "hidden", "seed"});
  rd.check_unknown();

  TrainJob job;
  TrainConfig& c = job.config;
  if (auto v = rd.raw("train", "loss")) c.loss = *v;
  rd.with("train", "loss", [](const std::string& v) { catalogue_lookup(v); });
  rd.real("train", "lambda", c.lambda);
  rd.with("train", "penalty_variant",
          [&](const std::string& v) { c.penalty_variant = penalty_variant_from_name(v); });
  rd.integer("train", "critic_iters", c.critic_iters);
  rd.integer("train", "batch_size", c.batch_size);
  rd.real("train", "learning_rate", c.learning_rate);
  rd.real("train", "beta1", c.beta1);
  rd.real("train", "beta2", c.beta2);
  rd.integer("train", "total_generator_iters", c.total_generator_iters);
  rd.integer("train", "eval_every", c.eval_every);
  rd.integer("train", "eval_batch", c.eval_batch);
  rd.integer("train", "mmd_samples", c.mmd_samples);
  rd.integer("train", "swd_projections", c.swd_projections);
  rd.integer("train", "seed", c.seed);
  rd.with("train", "generator_init", [&](const std::string& v) {
    const auto t = lowercase(v);
    if (t == "random") c.generator_init = GeneratorInit::Random;
    else if (t == "identity") c.generator_init = GeneratorInit::Identity;
    else throw std::invalid_argument("expected random or identity");
  });
  rd.with("train", "f_spec", [&](const std::string& v) { c.f_spec = parse_density(v); });
  if (auto v = rd.raw("train", "f_file")) c.f_file = *v;
  rd.with("train", "h_spec", [&](const std::string& v) { c.h_spec = parse_density(v); });
  rd.integer("train", "checkpoint_every", job.checkpoint_every);
  rd.integer("train", "sample_count", job.sample_count);
  rd.boolean("train", "penalty_path", c.penalty_path);
  if (job.checkpoint_every < 0) rd.problem("train.checkpoint_every must be >= 0");
  if (job.sample_count < 1) rd.problem("train.sample_count must be >= 1");
  if (c.f_spec && !c.f_file.empty()) rd.problem("train: give either f_spec or f_file, not both");
  if (!config.get("train", "f_spec") && !config.get("train", "f_file"))
    rd.problem("missing train.f_spec (target density) or train.f_file (sample file)");
  if (!config.get("train", "h_spec")) rd.problem("missing train.h_spec (origin density)");

  const int dz = c.h_spec ? c.h_spec->dimension() : 1;
  const int dx = c.f_spec ? c.f_spec->dimension() : dz;
  std::uint64_t gseed = derive_seed(c.seed, 11), dseed = derive_seed(c.seed, 12);
  rd.integer("generator", "seed", gseed);
  rd.integer("discriminator", "seed", dseed);
  c.generator = default_generator_spec(dz, dx, gseed);
  c.discriminator = default_discriminator_spec(dx, dseed);
  if (!c.f_file.empty() && !config.get("generator", "widths"))
    rd.problem("generator.widths is required with f_file (the data dimension is not known in advance)");
  rd.with("generator", "widths", [&](const std::string& v) { c.generator.widths = parse_widths(v); });
  rd.with("generator", "hidden", [&](const std::string& v) { c.generator.hidden = activation_from_name(v); });
  rd.with("generator", "output", [&](const std::string& v) { c.generator.output = squashing_from_name(v); });
  rd.with("discriminator", "widths", [&](const std::string& v) { c.discriminator.widths = parse_widths(v); });
  rd.with("discriminator", "hidden",
          [&](const std::string& v) { c.discriminator.hidden = activation_from_name(v); });

  if (problems.empty())
    for (auto& p : c.problems()) problems.push_back(std::move(p));
  throw_if(problems, "training");
  return job;
}

ConfigFile config_from_train_job(const TrainJob& job) {
  const TrainConfig& c = job.config;
  ConfigFile f;
  f.set("train", "loss", c.loss);
  f.set("train", "lambda", format_double(c.lambda));
  f.set("train", "penalty_variant", penalty_variant_name(c.penalty_variant));
  f.set("train", "critic_iters", std::to_string(c.critic_iters));
  f.set("train", "batch_size", std::to_string(c.batch_size));
  f.set("train", "learning_rate", format_double(c.learning_rate));
  f.set("train", "beta1", format_double(c.beta1));
  f.set("train", "beta2", format_double(c.beta2));
  f.set("train", "total_generator_iters", std::to_string(c.total_generator_iters));
  f.set("train", "eval_every", std::to_string(c.eval_every));
  f.set("train", "eval_batch", std::to_string(c.eval_batch));
  f.set("train", "mmd_samples", std::to_string(c.mmd_samples));
  f.set("train", "swd_projections", std::to_string(c.swd_projections));
  f.set("train", "seed", std::to_string(c.seed));
  f.set("train", "generator_init", c.generator_init == GeneratorInit::Identity ? "identity" : "random");
  if (c.f_spec) f.set("train", "f_spec", format_density(*c.f_spec));
  if (!c.f_file.empty()) f.set("train", "f_file", c.f_file);
  if (c.h_spec) f.set("train", "h_spec", format_density(*c.h_spec));
  f.set("train", "checkpoint_every", std::to_string(job.checkpoint_every));
  f.set("train", "sample_count", std::to_string(job.sample_count));
  f.set("train", "penalty_path", format_bool(c.penalty_path));
  f.set("generator", "widths", format_widths(c.generator.widths));
  f.set("generator", "hidden", activation_name(c.generator.hidden));
  f.set("generator", "output", c.generator.output.name());
  f.set("generator", "seed", std::to_string(c.generator.seed));
  f.set("discriminator", "widths", format_widths(c.discriminator.widths));
  f.set("discriminator", "hidden", activation_name(c.discriminator.hidden));
  f.set("discriminator", "seed", std::to_string(c.discriminator.seed));
  return f;
}

SolveJob solve_job_from_config(const ConfigFile& config) {
  std::vector<std::string> problems;
  Reader rd(config, problems);
  rd.allow("solve", {"loss", "density", "n_points", "window", "init", "init_seed", "step",
                     "max_iters", "tol", "metric", "log_every"});
  rd.check_unknown();

  SolveJob job;
  if (auto v = rd.raw("solve", "loss")) job.loss = *v;
  rd.with("solve", "loss", [](const std::string& v) {
    if (!catalogue_lookup(v).loss.ratio_invertible)
      throw std::invalid_argument("ideal solver requires invertible ω");
  });
  if (auto v = rd.raw("solve", "density")) job.density = *v;
  std::optional<DensitySpec> spec;
  try {
    spec = parse_density(job.density);
  } catch (const std::exception& e) {
    rd.problem(std::string("solve.density: ") + e.what());
  }
  rd.integer("solve", "n_points", job.n_points);
  rd.with("solve", "window", [&](const std::string& v) {
    std::vector<double> w;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double x = 0;
      if (!parse_number(item, x)) throw std::invalid_argument("expected comma-separated numbers");
      w.push_back(x);
    }
    job.window = w;
  });
  if (auto v = rd.raw("solve", "init")) job.init = lowercase(*v);
  if (job.init != "ones" && job.init != "random" && job.init != "skew")
    rd.problem("solve.init: expected ones, random or skew");
  rd.integer("solve", "init_seed", job.init_seed);
  rd.real("solve", "step", job.options.step);
  rd.integer("solve", "max_iters", job.options.max_iters);
  rd.real("solve", "tol", job.options.tol);
  rd.with("solve", "metric", [&](const std::string& v) { job.options.metric = step_metric_from_name(v); });
  rd.integer("solve", "log_every", job.options.log_every);
  if (job.n_points < 2) rd.problem("solve.n_points must be >= 2");
  if (job.options.step < 0) rd.problem("solve.step must be >= 0 (0 selects the default)");
  if (!(job.options.tol > 0)) rd.problem("solve.tol must be > 0");
  if (job.options.max_iters < 0) rd.problem("solve.max_iters must be >= 0");
  if (job.options.log_every < 1) rd.problem("solve.log_every must be >= 1");
  if (spec) {
    const std::size_t want = spec->dimension() == 1 ? 2 : 4;
    if (spec->dimension() > 2) rd.problem("solve.density: only 1D and 2D densities are supported");
    else if (job.window.size() != want)
      rd.problem("solve.window: expected " + std::to_string(want) + " numbers for a " +
                 std::to_string(spec->dimension()) + "D density");
  }
  throw_if(problems, "solve");
  return job;
}

ConfigFile config_from_solve_job(const SolveJob& job) {
  ConfigFile f;
  f.set("solve", "loss", job.loss);
  f.set("solve", "density", job.density);
  f.set("solve", "n_points", std::to_string(job.n_points));
  std::string w;
  for (std::size_t i = 0; i < job.window.size(); ++i) w += (i ? "," : "") + format_double(job.window[i]);
  f.set("solve", "window", w);
  f.set("solve", "init", job.init);
  f.set("solve", "init_seed", std::to_string(job.init_seed));
  f.set("solve", "step", format_double(job.options.step));
  f.set("solve", "max_iters", std::to_string(job.options.max_iters));
  f.set("solve", "tol", format_double(job.options.tol));
  f.set("solve", "metric", step_metric_name(job.options.metric));
  f.set("solve", "log_every", std::to_string(job.options.log_every));
  return f;
}

bool operator==(const TrainJob& a, const TrainJob& b) {
  const TrainConfig &x = a.config, &y = b.config;
  return a.checkpoint_every == b.checkpoint_every && a.sample_count == b.sample_count &&
         x.loss == y.loss && x.lambda == y.lambda && x.penalty_variant == y.penalty_variant &&
         x.critic_iters == y.critic_iters && x.batch_size == y.batch_size &&
         x.learning_rate == y.learning_rate && x.beta1 == y.beta1 && x.beta2 == y.beta2 &&
         x.total_generator_iters == y.total_generator_iters && x.eval_every == y.eval_every &&
         x.eval_batch == y.eval_batch && x.mmd_samples == y.mmd_samples &&
         x.swd_projections == y.swd_projections && x.generator == y.generator &&
         x.discriminator.widths == y.discriminator.widths &&
         x.discriminator.hidden == y.discriminator.hidden &&
         x.discriminator.seed == y.discriminator.seed && same_density(x.f_spec, y.f_spec) &&
         x.f_file == y.f_file && same_density(x.h_spec, y.h_spec) && x.seed == y.seed &&
         x.generator_init == y.generator_init && x.penalty_path == y.penalty_path;
}

bool operator==(const SolveJob& a, const SolveJob& b) {
  return a.loss == b.loss && a.density == b.density && a.n_points == b.n_points &&
         a.window == b.window && a.init == b.init && a.init_seed == b.init_seed &&
         a.options.step == b.options.step && a.options.max_iters == b.options.max_iters &&
         a.options.tol == b.options.tol && a.options.metric == b.options.metric &&
         a.options.log_every == b.options.log_every;
}

}  // namespace lrgan
