#pragma once

// Subcommands of the lrgan tool and the artifact writers behind them.
//
// Exit status: 0 success, 1 a check or run failed, 2 usage or configuration error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrgan/config.hpp"
#include "lrgan/trainer.hpp"

namespace lrgan {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the output root; --out takes precedence.
inline constexpr const char* kOutputRootVar = "LRGAN_OUT";
/// Suffix carried by an output directory until everything in it has been written.
inline constexpr const char* kIncompleteSuffix = ".incomplete";

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct NamedTrainJob {
  std::string name;
  TrainJob job;
};

/// shift1d-<loss>, ring2d-<loss> and lambda-sweep; empty when unknown.
std::vector<NamedTrainJob> train_preset(const std::string& name);
/// grid64-<loss>.
std::optional<SolveJob> solve_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Fixed column order of metrics.tsv; absent values are written as NA.
std::vector<std::string> metrics_columns();
std::string format_metrics_row(const MetricRecord& m);
std::vector<MetricRecord> parse_metrics(const std::string& text);

/// ratio.svg (invertible losses only), objectives.svg and distances.svg.
void write_metric_plots(const std::vector<MetricRecord>& records, const std::filesystem::path& dir,
                        const std::string& title);

struct TrainOutcome {
  std::filesystem::path dir;  // final directory, or the .incomplete one on failure
  bool completed = false;
  std::string error;
  std::vector<MetricRecord> metrics;
  std::optional<TrainResult> result;  // present when completed
};

/// Runs one job into `dir`: config.ini, metrics.tsv, checkpoints/, samples/ and
/// plots/. Work happens in dir + ".incomplete", renamed on success.
TrainOutcome run_train_job(const TrainJob& job, const std::filesystem::path& dir, std::ostream& log);

}  // namespace lrgan
