#include "lrgan/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "lrgan/checkpoint.hpp"
#include "lrgan/ideal_solver.hpp"
#include "lrgan/svg.hpp"
#include "lrgan/verify.hpp"

namespace lrgan {

namespace fs = std::filesystem;

namespace {

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputRootVar); env && *env) return env;
  return "lrgan-out";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path incomplete(const fs::path& dir) {
  fs::path p = dir;
  p += kIncompleteSuffix;
  return p;
}

fs::path fresh_workdir(const fs::path& dir) {
  const fs::path work = incomplete(dir);
  fs::remove_all(work);
  fs::create_directories(work);
  return work;
}

void commit(const fs::path& work, const fs::path& dir) {
  fs::remove_all(dir);
  fs::rename(work, dir);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

// Shift task and ring task definitions shared by the presets.
TrainJob shift1d_job(const std::string& loss) {
  TrainJob job;
  TrainConfig& c = job.config;
  c.loss = catalogue_lookup(loss).loss.name;
  c.f_spec = DensitySpec::normal(4.0, 1.0);
  c.h_spec = DensitySpec::normal(0.0, 1.0);
  c.generator = default_generator_spec(1, 1, 11);
  c.discriminator = default_discriminator_spec(1, 12);
  c.seed = 7;
  job.checkpoint_every = 5000;
  return job;
}

TrainJob ring2d_job(const std::string& loss) {
  TrainJob job;
  TrainConfig& c = job.config;
  c.loss = catalogue_lookup(loss).loss.name;
  c.f_spec = DensitySpec(Ring{8, 2.0, 0.02});
  c.h_spec = DensitySpec::standard_normal(2);
  c.generator = default_generator_spec(2, 2, 21);
  c.discriminator = default_discriminator_spec(2, 22);
  c.seed = 8;
  job.checkpoint_every = 5000;
  return job;
}

std::optional<std::string> strip_prefix(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0) return std::nullopt;
  return name.substr(prefix.size());
}

// ---------------------------------------------------------------------------
// losses

int cmd_losses(const std::vector<std::string>& filters, bool tsv, std::ostream& out) {
  std::optional<char> subclass;
  std::optional<bool> invertible;
  for (const auto& f : filters) {
    const auto eq = f.find('=');
    const std::string key = lowercase(f.substr(0, eq));
    const std::string value = eq == std::string::npos ? "" : f.substr(eq + 1);
    if (key == "subclass" && value.size() == 1) {
      subclass = static_cast<char>(std::toupper(static_cast<unsigned char>(value[0])));
    } else if (key == "invertible" && (lowercase(value) == "true" || lowercase(value) == "false")) {
      invertible = lowercase(value) == "true";
    } else {
      throw UsageError("unknown filter '" + f + "' (expected subclass=A|B|C|D or invertible=true|false)");
    }
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"name", "subclass", "phi, psi, range", "omega", "rho", "invertible", "note"});
  for (const auto& e : catalogue()) {
    if (subclass && subclass_letter(e.subclass) != *subclass) continue;
    if (invertible && e.loss.ratio_invertible != *invertible) continue;
    rows.push_back({e.loss.name, std::string(1, subclass_letter(e.subclass)), e.table_row,
                    e.omega_text, e.rho_text, e.loss.ratio_invertible ? "yes" : "no",
                    e.derivation_note});
  }
  if (tsv) {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << r[i];
      out << "\n";
    }
    return kExitOk;
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i + 1 < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  bool all = false;
  std::vector<std::string> losses;
  VerifyTolerances tol;
  int points = 100;
};

int cmd_verify(const VerifyArgs& args, const fs::path& root, int jobs, std::ostream& out) {
  std::vector<const CatalogueEntry*> selected;
  if (args.all) {
    for (const auto& e : catalogue()) selected.push_back(&e);
  } else {
    if (args.losses.empty()) throw UsageError("verify: give --all or at least one --loss");
    for (const auto& n : args.losses) {
      try {
        selected.push_back(&catalogue_lookup(n));
      } catch (const LossError& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (args.points < 1) throw UsageError("verify: --points must be >= 1");
  std::vector<VerificationReport> reports(selected.size());
  parallel_for(selected.size(), jobs,
               [&](std::size_t i) { reports[i] = verify_loss(selected[i]->loss, args.tol, args.points); });

  const fs::path dir = root / "verify";
  const fs::path work = fresh_workdir(dir);
  const std::string table = format_report_table(reports);
  write_text(work / "report.txt", table);
  write_text(work / "report.jsonl", format_report_jsonl(reports));
  commit(work, dir);

  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.passed;
    std::size_t failed = 0;
    for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
    out << std::left << std::setw(14) << r.loss_name << (r.passed ? "PASS" : "FAIL") << "  "
        << r.checks.size() - failed << "/" << r.checks.size() << " checks";
    if (!r.skip_reason.empty()) out << "  (" << r.skip_reason << ")";
    out << "\n";
    for (const auto& c : r.checks)
      if (!c.pass)
        out << "    " << c.name << " at " << c.probe << ": expected " << c.expected << ", observed "
            << c.observed << ", error " << c.abs_error << " > " << c.tolerance << "\n";
  }
  out << "reports written to " << dir.string() << "\n";
  return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// solve-grid

RatioField initial_field(const SolveJob& job, const DiscreteDensity& f) {
  if (job.init == "ones") return {Eigen::VectorXd::Ones(f.size())};
  if (job.init == "skew") {
    Eigen::VectorXd v(f.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = i < v.size() / 2 ? 2.0 : 1.0;
    v /= v.dot(f.mass);
    return {v};
  }
  return random_feasible_field(f, job.init_seed);
}

Window job_window(const SolveJob& job) {
  if (job.window.size() == 2) return Window::interval(job.window[0], job.window[1]);
  return Window::box(job.window[0], job.window[1], job.window[2], job.window[3]);
}

int run_solve_job(const std::string& name, const SolveJob& job, const fs::path& root,
                  std::ostream& out, std::ostream& err) {
  const LossPair& loss = catalogue_lookup(job.loss).loss;
  const DiscreteDensity f = discretize(parse_density(job.density), job.n_points, job_window(job));
  for (const auto& w : f.warnings) err << "warning: " << w << "\n";
  const RatioField init = initial_field(job, f);

  const fs::path dir = root / name;
  const fs::path work = fresh_workdir(dir);
  write_text(work / "config.ini", format_config(config_from_solve_job(job)));
  SolveResult res;
  try {
    res = solve_minmax_grid(loss, f, init, job.options);
  } catch (const SolverDiverged& e) {
    write_text(work / "trace.tsv", format_trace(e.trace()));
    err << name << ": " << e.what() << "; trace kept in " << work.string() << "\n";
    return kExitFailure;
  }
  write_text(work / "trace.tsv", format_trace(res.trace));
  write_text(work / "field.tsv", format_field(f, res.field));
  commit(work, dir);

  const double linf = (res.field.values.array() - 1.0).abs().maxCoeff();
  const double w1 = loss.omega.at_one();
  out << name << ": " << (res.converged ? "converged" : "not converged") << " after "
      << res.iterations << " iterations\n"
      << "  linf_to_one      " << format_double(linf) << "\n"
      << "  minmax_value     " << format_double(minmax_value(loss, res.field, f)) << "\n"
      << "  phi(w1)+psi(w1)  " << format_double(phi_value(loss, w1) + psi_value(loss, w1)) << "\n"
      << "  outputs in       " << dir.string() << "\n";
  return res.converged ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// train

void print_record(std::ostream& log, const std::string& name, const MetricRecord& m) {
  log << name << " it=" << m.iteration << " disc=" << format_double(m.disc_objective)
      << " gen=" << format_double(m.gen_objective) << " penalty=" << format_double(m.penalty);
  if (m.ratio_train) log << " lr_real=" << format_double(m.ratio_train->real_mean);
  log << " mmd=" << format_double(m.mmd) << " swd=" << format_double(m.swd) << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// presets

std::vector<NamedTrainJob> train_preset(const std::string& raw) {
  const std::string name = lowercase(raw);
  try {
    if (auto loss = strip_prefix(name, "shift1d-")) return {{name, shift1d_job(*loss)}};
    if (auto loss = strip_prefix(name, "ring2d-")) return {{name, ring2d_job(*loss)}};
  } catch (const LossError&) {
    return {};
  }
  if (name == "lambda-sweep") {
    std::vector<NamedTrainJob> jobs;
    for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
      TrainJob job = shift1d_job("MSE");
      job.config.lambda = lambda;
      jobs.push_back({"lambda-sweep/lambda-" + format_double(lambda), job});
    }
    return jobs;
  }
  return {};
}

std::optional<SolveJob> solve_preset(const std::string& raw) {
  const auto loss = strip_prefix(lowercase(raw), "grid64-");
  if (!loss) return std::nullopt;
  try {
    SolveJob job;
    job.loss = catalogue_lookup(*loss).loss.name;
    return job;
  } catch (const LossError&) {
    return std::nullopt;
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out{"verify-all", "lambda-sweep"};
  for (const auto& e : catalogue()) {
    if (!e.loss.ratio_invertible) continue;
    const std::string n = lowercase(e.loss.name);
    out.push_back("grid64-" + n);
  }
  for (const auto& e : catalogue()) out.push_back("shift1d-" + lowercase(e.loss.name));
  for (const auto& e : catalogue()) out.push_back("ring2d-" + lowercase(e.loss.name));
  return out;
}

// ---------------------------------------------------------------------------
// metrics

std::vector<std::string> metrics_columns() {
  return {"iteration",         "disc_objective",   "gen_objective",     "penalty",
          "lr_real_mean",      "lr_real_std",      "lr_gen_mean",       "lr_gen_std",
          "lr_real_mean_eval", "lr_real_std_eval", "lr_gen_mean_eval",  "lr_gen_std_eval",
          "mmd",               "swd"};
}

std::string format_metrics_row(const MetricRecord& m) {
  const auto stats = [](const std::optional<RatioStats>& s) {
    if (!s) return std::string("NA\tNA\tNA\tNA");
    return format_double(s->real_mean) + "\t" + format_double(s->real_std) + "\t" +
           format_double(s->gen_mean) + "\t" + format_double(s->gen_std);
  };
  return std::to_string(m.iteration) + "\t" + format_double(m.disc_objective) + "\t" +
         format_double(m.gen_objective) + "\t" + format_double(m.penalty) + "\t" +
         stats(m.ratio_train) + "\t" + stats(m.ratio_eval) + "\t" + format_double(m.mmd) + "\t" +
         format_double(m.swd) + "\n";
}

std::vector<MetricRecord> parse_metrics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("metrics: empty file");
  std::string expected;
  for (const auto& c : metrics_columns()) expected += (expected.empty() ? "" : "\t") + c;
  if (line != expected) throw std::runtime_error("metrics: unexpected header");
  std::vector<MetricRecord> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cell;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, '\t')) cell.push_back(item);
    if (cell.size() != metrics_columns().size())
      throw std::runtime_error("metrics line " + std::to_string(number) + ": expected " +
                               std::to_string(metrics_columns().size()) + " fields");
    const auto value = [&](std::size_t i) -> std::optional<double> {
      if (cell[i] == "NA") return std::nullopt;
      try {
        return std::stod(cell[i]);
      } catch (const std::exception&) {
        throw std::runtime_error("metrics line " + std::to_string(number) + ": bad number '" +
                                 cell[i] + "'");
      }
    };
    const auto stats = [&](std::size_t i) -> std::optional<RatioStats> {
      if (!value(i)) return std::nullopt;
      return RatioStats{*value(i), *value(i + 1), *value(i + 2), *value(i + 3)};
    };
    MetricRecord m;
    m.iteration = static_cast<long>(*value(0));
    m.disc_objective = value(1).value_or(NAN);
    m.gen_objective = value(2).value_or(NAN);
    m.penalty = value(3).value_or(NAN);
    m.ratio_train = stats(4);
    m.ratio_eval = stats(8);
    m.mmd = value(12).value_or(NAN);
    m.swd = value(13).value_or(NAN);
    out.push_back(m);
  }
  return out;
}

void write_metric_plots(const std::vector<MetricRecord>& records, const fs::path& dir,
                        const std::string& title) {
  fs::create_directories(dir);
  const auto series = [&](const std::string& name, auto get) {
    Series s{name, {}};
    for (const auto& m : records)
      if (auto v = get(m)) s.points.emplace_back(static_cast<double>(m.iteration), *v);
    return s;
  };
  const auto field = [](double MetricRecord::*p) {
    return [p](const MetricRecord& m) -> std::optional<double> { return m.*p; };
  };
  const auto ratio = [](std::optional<RatioStats> MetricRecord::*which, double RatioStats::*p) {
    return [which, p](const MetricRecord& m) -> std::optional<double> {
      if (!(m.*which)) return std::nullopt;
      return (*(m.*which)).*p;
    };
  };

  const bool has_ratio = std::any_of(records.begin(), records.end(),
                                     [](const MetricRecord& m) { return m.ratio_train.has_value(); });
  if (has_ratio) {
    PlotOptions opt;
    opt.title = title + ": estimated likelihood ratio";
    opt.y_label = "mean of omega^-1(D)";
    opt.reference_y = 1.0;
    emit_svg_lineplot({series("real (train batch)", ratio(&MetricRecord::ratio_train, &RatioStats::real_mean)),
                       series("generated (train batch)", ratio(&MetricRecord::ratio_train, &RatioStats::gen_mean)),
                       series("real (eval batch)", ratio(&MetricRecord::ratio_eval, &RatioStats::real_mean)),
                       series("generated (eval batch)", ratio(&MetricRecord::ratio_eval, &RatioStats::gen_mean))},
                      dir / "ratio.svg", opt);
  }
  PlotOptions obj;
  obj.title = title + ": objectives";
  emit_svg_lineplot({series("disc objective", field(&MetricRecord::disc_objective)),
                     series("gen objective", field(&MetricRecord::gen_objective)),
                     series("penalty", field(&MetricRecord::penalty))},
                    dir / "objectives.svg", obj);
  PlotOptions dist;
  dist.title = title + ": distance to target";
  emit_svg_lineplot({series("mmd^2", field(&MetricRecord::mmd)), series("sliced W2", field(&MetricRecord::swd))},
                    dir / "distances.svg", dist);
}

// ---------------------------------------------------------------------------
// training runs

TrainOutcome run_train_job(const TrainJob& job, const fs::path& dir, std::ostream& log) {
  const TrainConfig& c = job.config;
  const std::string name = dir.filename().string();
  TrainOutcome outcome;
  const fs::path work = fresh_workdir(dir);
  outcome.dir = work;
  fs::create_directories(work / "checkpoints");
  fs::create_directories(work / "samples");
  write_text(work / "config.ini", format_config(config_from_train_job(job)));

  std::ofstream metrics(work / "metrics.tsv", std::ios::binary);
  for (const auto& col : metrics_columns()) metrics << (col == "iteration" ? "" : "\t") << col;
  metrics << "\n";
  const std::uint64_t sample_seed = derive_seed(c.seed, 5);
  const auto snapshot = [&](const std::string& tag, const Net& g, const Net& d, const Adam* gopt,
                            const Adam* dopt) {
    write_checkpoint(work / "checkpoints" / ("generator-" + tag + ".json"), g, gopt);
    write_checkpoint(work / "checkpoints" / ("discriminator-" + tag + ".json"), d, dopt);
    write_samples(work / "samples" / ("generated-" + tag + ".csv"),
                  generate(g, *c.h_spec, static_cast<std::size_t>(job.sample_count), sample_seed));
  };
  const auto on_eval = [&](const MetricRecord& m, const Net& g, const Net& d) {
    outcome.metrics.push_back(m);
    metrics << format_metrics_row(m) << std::flush;
    print_record(log, name, m);
    if (job.checkpoint_every > 0 && m.iteration % job.checkpoint_every == 0 &&
        m.iteration != c.total_generator_iters) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "%08ld", m.iteration);
      snapshot(tag, g, d, nullptr, nullptr);
    }
  };

  try {
    TrainResult result = train(c, on_eval);
    snapshot("final", result.generator, result.discriminator, &result.generator_opt,
             &result.discriminator_opt);
    metrics.close();
    write_metric_plots(outcome.metrics, work / "plots", name);
    commit(work, dir);
    outcome.dir = dir;
    outcome.completed = true;
    outcome.result = std::move(result);
  } catch (const TrainingDiverged& e) {
    const TrainResult& last = e.last_good();
    snapshot("last-good", last.generator, last.discriminator, &last.generator_opt,
             &last.discriminator_opt);
    outcome.error = e.what();
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

namespace {

std::vector<NamedTrainJob> resolve_train_jobs(const std::string& preset, const std::string& config_path,
                                              const std::vector<std::string>& overrides,
                                              const std::string& name) {
  std::vector<std::pair<std::string, ConfigFile>> raw;
  if (!preset.empty() && !config_path.empty())
    throw UsageError("train: give either --preset or --config, not both");
  if (!preset.empty()) {
    const auto jobs = train_preset(preset);
    if (jobs.empty()) throw UsageError("unknown training preset '" + preset + "'");
    for (const auto& j : jobs) raw.emplace_back(j.name, config_from_train_job(j.job));
  } else if (!config_path.empty()) {
    raw.emplace_back(fs::path(config_path).stem().string(), load_config(config_path));
  } else {
    raw.emplace_back("train", ConfigFile{});
  }
  std::vector<NamedTrainJob> out;
  for (auto& [job_name, cfg] : raw) {
    for (const auto& o : overrides) apply_override(cfg, o);
    std::string final_name = job_name;
    if (!name.empty()) final_name = raw.size() == 1 ? name : name + "/" + fs::path(job_name).filename().string();
    out.push_back({final_name, train_job_from_config(cfg)});
  }
  return out;
}

int cmd_train(const std::string& preset, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& name, bool echo,
              const fs::path& root, int jobs, std::ostream& out, std::ostream& err) {
  const auto resolved = resolve_train_jobs(preset, config_path, overrides, name);
  if (echo) {
    for (const auto& j : resolved) {
      if (resolved.size() > 1) out << "# " << j.name << "\n";
      out << format_config(config_from_train_job(j.job));
    }
    return kExitOk;
  }
  std::vector<TrainOutcome> outcomes(resolved.size());
  std::vector<std::ostringstream> logs(resolved.size());
  std::mutex out_mutex;
  parallel_for(resolved.size(), jobs, [&](std::size_t i) {
    std::ostream& log = resolved.size() == 1 ? out : logs[i];
    outcomes[i] = run_train_job(resolved[i].job, root / resolved[i].name, log);
    if (resolved.size() > 1) {
      std::lock_guard<std::mutex> lock(out_mutex);
      out << logs[i].str();
    }
  });
  bool ok = true;
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.completed) {
      out << resolved[i].name << ": completed, outputs in " << o.dir.string() << "\n";
    } else {
      ok = false;
      err << resolved[i].name << ": failed: " << o.error << "\n  partial outputs in "
          << o.dir.string() << "\n";
    }
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_solve(const std::string& preset, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& name, bool echo,
              const fs::path& root, std::ostream& out, std::ostream& err) {
  ConfigFile cfg;
  std::string job_name = "solve";
  if (!preset.empty() && !config_path.empty())
    throw UsageError("solve-grid: give either --preset or --config, not both");
  if (!preset.empty()) {
    const auto job = solve_preset(preset);
    if (!job) throw UsageError("unknown solve preset '" + preset + "'");
    cfg = config_from_solve_job(*job);
    job_name = lowercase(preset);
  } else if (!config_path.empty()) {
    cfg = load_config(config_path);
    job_name = fs::path(config_path).stem().string();
  }
  for (const auto& o : overrides) apply_override(cfg, o);
  const SolveJob job = solve_job_from_config(cfg);
  if (echo) {
    out << format_config(config_from_solve_job(job));
    return kExitOk;
  }
  return run_solve_job(name.empty() ? job_name : name, job, root, out, err);
}

int cmd_report(const std::string& metrics_path, const std::string& out_dir, std::ostream& out) {
  const fs::path path(metrics_path);
  const auto records = parse_metrics(read_text(path));
  const fs::path run_dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  const fs::path dir = out_dir.empty() ? run_dir / "plots" : fs::path(out_dir);
  const std::string title = fs::absolute(run_dir).lexically_normal().filename().string();
  write_metric_plots(records, dir, title.empty() ? "run" : title);
  out << "plots written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-ratio GAN loss toolkit"};
  app.name("lrgan");
  app.require_subcommand(1);
  std::string out_flag;
  int jobs = 1;
  app.add_option("--out", out_flag, std::string("Output root (default $") + kOutputRootVar + " or ./lrgan-out)");
  app.add_option("--jobs", jobs, "Independent sweep elements to run concurrently")->check(CLI::PositiveNumber);

  auto* losses = app.add_subcommand("losses", "List the loss catalogue");
  std::vector<std::string> filters;
  bool tsv = false;
  losses->add_option("filters", filters, "Filters: subclass=A|B|C|D, invertible=true|false");
  losses->add_flag("--tsv", tsv, "Tab-separated output");

  auto* verify = app.add_subcommand("verify", "Numerically certify the theorem for catalogue losses");
  VerifyArgs vargs;
  std::string verify_preset;
  verify->add_flag("--all", vargs.all, "Every catalogue entry");
  verify->add_option("--loss", vargs.losses, "Loss name (repeatable)");
  verify->add_option("--preset", verify_preset, "verify-all");
  verify->add_option("--tol-argmax", vargs.tol.argmax, "Inner maximiser tolerance");
  verify->add_option("--tol-minimizer", vargs.tol.minimizer, "Outer minimiser tolerance");
  verify->add_option("--tol-value", vargs.tol.value, "Value tolerance");
  verify->add_option("--tol-derivative", vargs.tol.derivative, "Relative derivative tolerance");
  verify->add_option("--tol-envelope", vargs.tol.envelope, "Relative envelope tolerance");
  verify->add_option("--points", vargs.points, "Derivative probe points per loss");

  std::string preset, config_path, name;
  std::vector<std::string> overrides;
  bool echo = false;
  const auto job_options = [&](CLI::App* sub) {
    sub->add_option("--preset", preset, "Named preset (see 'lrgan losses' for loss names)");
    sub->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override section.key=value (repeatable)");
    sub->add_option("--name", name, "Run directory name under the output root");
    sub->add_flag("--echo", echo, "Print the resolved configuration and exit");
  };
  auto* solve = app.add_subcommand("solve-grid", "Solve the ideal problem on a discretised support");
  job_options(solve);
  auto* trainc = app.add_subcommand("train", "Train a generator and discriminator");
  job_options(trainc);

  auto* report = app.add_subcommand("report", "Re-render plots from a metrics file");
  std::string metrics_path, plot_dir;
  report->add_option("metrics", metrics_path, "metrics.tsv")->required()->check(CLI::ExistingFile);
  report->add_option("--plots", plot_dir, "Plot directory (default: next to the metrics file)");

  auto* presets = app.add_subcommand("presets", "List preset names");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n" << "run 'lrgan --help' for usage\n";
    return kExitUsage;
  }

  const fs::path root = output_root(out_flag);
  try {
    if (losses->parsed()) return cmd_losses(filters, tsv, out);
    if (presets->parsed()) {
      for (const auto& p : preset_names()) out << p << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      if (!verify_preset.empty()) {
        if (lowercase(verify_preset) != "verify-all") throw UsageError("unknown verify preset '" + verify_preset + "'");
        vargs.all = true;
      }
      return cmd_verify(vargs, root, jobs, out);
    }
    if (solve->parsed()) return cmd_solve(preset, config_path, overrides, name, echo, root, out, err);
    if (trainc->parsed())
      return cmd_train(preset, config_path, overrides, name, echo, root, jobs, out, err);
    if (report->parsed()) return cmd_report(metrics_path, plot_dir, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigSyntaxError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SpecError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lrgan
