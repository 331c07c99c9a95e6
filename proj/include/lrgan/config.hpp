#pragma once

// Plain-text configuration: "[section]" headers, "key = value" lines, '#'
// comments. Values never span lines. Densities use the grammar
//
//   gaussian(mean=4;cov=1)            gaussian(mean=0,0;cov=1,0,0,1)
//   ring(k=8;radius=2;sigma=0.02)     uniform(lo=0;hi=1)
//   mixture(0.5*gaussian(mean=-2;cov=1)+0.5*gaussian(mean=2;cov=1))
//
// with matrices written row-major, comma separated.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrgan/ideal_solver.hpp"
#include "lrgan/synth_data.hpp"
#include "lrgan/trainer.hpp"

namespace lrgan {

class ConfigSyntaxError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  friend bool operator==(const ConfigFile&, const ConfigFile&) = default;
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);
std::string format_config(const ConfigFile& config);

/// Applies "section.key=value".
void apply_override(ConfigFile& config, const std::string& assignment);

DensitySpec parse_density(const std::string& text);
std::string format_density(const DensitySpec& spec);

/// A training run plus the artifact options around it.
struct TrainJob {
  TrainConfig config;
  long checkpoint_every = 0;  // 0 writes only the final checkpoints
  int sample_count = 1000;    // generated rows dumped with each checkpoint
};

/// A grid solve.
struct SolveJob {
  std::string loss = "MSE";
  std::string density = "uniform(lo=0;hi=1)";
  int n_points = 64;
  std::vector<double> window = {0.0, 1.0};  // lo, hi or x0, x1, y0, y1
  std::string init = "random";              // ones | random | skew
  std::uint64_t init_seed = 1;
  SolverOptions options;
};

/// Every problem found (unknown keys, unparsable values, schema violations) is
/// reported in a single ConfigError.
TrainJob train_job_from_config(const ConfigFile& config);
ConfigFile config_from_train_job(const TrainJob& job);

SolveJob solve_job_from_config(const ConfigFile& config);
ConfigFile config_from_solve_job(const SolveJob& job);

bool operator==(const TrainJob& a, const TrainJob& b);
bool operator==(const SolveJob& a, const SolveJob& b);

}  // namespace lrgan
