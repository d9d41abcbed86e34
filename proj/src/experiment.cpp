#include "nessdmrg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace nessdmrg {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, start = 0;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      start = i + 1;
    }
  }
  const std::size_t end = text.find('\n', start);
  return "line " + std::to_string(line) + ": " +
         text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + where + "." + key + "': " + e.what());
  }
}

std::vector<double> broadcast(const json& obj, const std::string& key, std::size_t count,
                              double fallback) {
  if (!obj.contains(key)) return std::vector<double>(count, fallback);
  const json& v = obj.at(key);
  if (v.is_number()) return std::vector<double>(count, v.get<double>());
  if (!v.is_array()) throw ConfigError("'model." + key + "' must be a number or an array");
  auto out = get_as<std::vector<double>>(obj, key, "model");
  if (out.size() != count) {
    throw ConfigError("'model." + key + "' needs " + std::to_string(count) + " entries, got " +
                      std::to_string(out.size()));
  }
  return out;
}

ModelParams parse_model(const json& m, std::optional<std::size_t> forced_n = std::nullopt) {
  reject_unknown(m, "model", {"N", "J", "Delta", "h", "gamma", "gamma1", "gammaN", "f1", "fN"});
  ModelParams p;
  p.n_sites = forced_n ? *forced_n : (m.contains("N") ? get_as<std::size_t>(m, "N", "model") : 0);
  if (p.n_sites < 1) throw ConfigError("'model.N' must be a positive integer");
  p.j = broadcast(m, "J", p.n_sites - 1, 1.0);
  p.delta = broadcast(m, "Delta", p.n_sites - 1, 1.0);
  p.h = broadcast(m, "h", p.n_sites, 0.0);
  const double gamma = m.contains("gamma") ? get_as<double>(m, "gamma", "model") : 1.0;
  p.gamma1 = m.contains("gamma1") ? get_as<double>(m, "gamma1", "model") : gamma;
  p.gammaN = m.contains("gammaN") ? get_as<double>(m, "gammaN", "model") : gamma;
  p.f1 = m.contains("f1") ? get_as<double>(m, "f1", "model") : 1.0;
  p.fN = m.contains("fN") ? get_as<double>(m, "fN", "model") : 0.0;
  return p;
}

SweepSchedule parse_schedule(const json& s) {
  reject_unknown(s, "schedule",
                 {"warmup_bond", "warmup_max_sweeps", "warmup_threshold", "bond_increment",
                  "ramp_threshold", "max_bond", "max_sweeps", "svd_cutoff", "local_solver_iters",
                  "energy_floor", "stop_threshold", "polish_sweeps", "polish_tolerance",
                  "converged_energy",
                  "measure_every_sweep"});
  SweepSchedule out;
  auto set = [&](const char* key, auto& field) {
    if (s.contains(key)) field = get_as<std::decay_t<decltype(field)>>(s, key, "schedule");
  };
  set("warmup_bond", out.warmup_bond);
  set("warmup_max_sweeps", out.warmup_max_sweeps);
  set("warmup_threshold", out.warmup_threshold);
  set("bond_increment", out.bond_increment);
  set("ramp_threshold", out.ramp_threshold);
  set("max_bond", out.max_bond);
  set("max_sweeps", out.max_sweeps);
  set("svd_cutoff", out.svd_cutoff);
  set("local_solver_iters", out.local_solver_iters);
  set("energy_floor", out.energy_floor);
  set("stop_threshold", out.stop_threshold);
  set("polish_sweeps", out.polish_sweeps);
  set("polish_tolerance", out.polish_tolerance);
  set("converged_energy", out.converged_energy);
  set("measure_every_sweep", out.measure_every_sweep);
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string scan_label(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

json params_json(const ModelParams& p) {
  return {{"N", p.n_sites}, {"J", p.j},           {"Delta", p.delta}, {"h", p.h},
          {"gamma1", p.gamma1}, {"gammaN", p.gammaN}, {"f1", p.f1},       {"fN", p.fN}};
}

json schedule_json(const SweepSchedule& s) {
  return {{"warmup_bond", s.warmup_bond},
          {"warmup_max_sweeps", s.warmup_max_sweeps},
          {"warmup_threshold", s.warmup_threshold},
          {"bond_increment", s.bond_increment},
          {"ramp_threshold", s.ramp_threshold},
          {"max_bond", s.max_bond},
          {"max_sweeps", s.max_sweeps},
          {"svd_cutoff", s.svd_cutoff},
          {"local_solver_iters", s.local_solver_iters},
          {"energy_floor", s.energy_floor},
          {"stop_threshold", s.stop_threshold},
          {"converged_energy", s.converged_energy},
          {"measure_every_sweep", s.measure_every_sweep}};
}

json run_json(const RunRecord& run) {
  const RunResult& r = run.result;
  return {{"name", run.name},
          {"scheme", to_string(run.scheme)},
          {"params", params_json(run.params)},
          {"converged", r.converged},
          {"reason", r.reason},
          {"sweeps", r.history.size()},
          {"warmup_sweeps", r.warmup_sweeps},
          {"final_energy", r.final_energy},
          {"final_max_bond", r.final_state.max_bond()},
          {"mean_current", run.mean_current()},
          {"current", r.current_profile},
          {"magnetization", r.magnetization_profile},
          {"imag_residual", r.imag_residual}};
}

std::string dump(const json& j) {
  // 17 significant digits so that values round-trip exactly
  std::ostringstream os;
  os << std::setprecision(17) << j.dump(2) << '\n';
  return os.str();
}

RunRecord solve_one(std::string name, const ModelParams& params, Ordering scheme,
                    const SweepSchedule& schedule) {
  RunRecord rec;
  rec.name = std::move(name);
  rec.params = params;
  rec.scheme = scheme;
  rec.result = solve_ness(params, scheme, schedule);
  return rec;
}

// Runs jobs on up to `workers` threads; results keep the job order.
template <typename Job>
std::vector<RunRecord> run_parallel(const std::vector<Job>& jobs, std::size_t workers) {
  std::vector<RunRecord> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Single:
      return "single";
    case ExperimentKind::GammaScan:
      return "gamma_scan";
    case ExperimentKind::SizeScan:
      return "size_scan";
    case ExperimentKind::OrderingCompare:
      return "ordering_compare";
  }
  return "single";
}

ExperimentKind parse_experiment(const std::string& s) {
  const std::string v = lower(s);
  if (v == "single") return ExperimentKind::Single;
  if (v == "gamma_scan") return ExperimentKind::GammaScan;
  if (v == "size_scan") return ExperimentKind::SizeScan;
  if (v == "ordering_compare") return ExperimentKind::OrderingCompare;
  throw ConfigError("unknown experiment '" + s +
                    "' (expected single, gamma_scan, size_scan or ordering_compare)");
}

void ExperimentConfig::validate() const {
  try {
    schedule.validate();
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (experiment == ExperimentKind::GammaScan && gamma_values.empty()) {
    throw ConfigError("gamma_scan needs a nonempty 'scan.gamma' list");
  }
  if (experiment == ExperimentKind::SizeScan && sizes.empty()) {
    throw ConfigError("size_scan needs a nonempty 'scan.N' list");
  }
  for (double g : gamma_values) {
    if (!(g > 0.0)) throw ConfigError("scan.gamma values must be positive");
  }
  for (std::size_t n : sizes) {
    if (n < 2) throw ConfigError("scan.N values must be at least 2");
  }
  if (workers < 1) throw ConfigError("'workers' must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error at ") + line_context(text, e.byte) + " (" +
                      e.what() + ")");
  }
  reject_unknown(doc, "config",
                 {"experiment", "scheme", "seed", "output", "workers", "allow_unconverged",
                  "model", "schedule", "scan"});
  ExperimentConfig cfg;
  if (doc.contains("experiment")) {
    cfg.experiment = parse_experiment(get_as<std::string>(doc, "experiment", "config"));
  }
  if (doc.contains("scheme")) {
    try {
      cfg.scheme = parse_ordering(get_as<std::string>(doc, "scheme", "config"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("seed")) cfg.seed = get_as<std::uint64_t>(doc, "seed", "config");
  if (doc.contains("output")) cfg.output = get_as<std::string>(doc, "output", "config");
  if (doc.contains("workers")) cfg.workers = get_as<std::size_t>(doc, "workers", "config");
  if (doc.contains("allow_unconverged")) {
    cfg.allow_unconverged = get_as<bool>(doc, "allow_unconverged", "config");
  }
  if (doc.contains("scan")) {
    const json& scan = doc.at("scan");
    reject_unknown(scan, "scan", {"gamma", "N"});
    if (scan.contains("gamma")) cfg.gamma_values = get_as<std::vector<double>>(scan, "gamma", "scan");
    if (scan.contains("N")) cfg.sizes = get_as<std::vector<std::size_t>>(scan, "N", "scan");
  }
  const json model = doc.value("model", json::object());
  if (cfg.experiment == ExperimentKind::SizeScan) {
    for (const char* key : {"J", "Delta", "h"}) {
      if (model.contains(key) && model.at(key).is_array()) {
        throw ConfigError(std::string("size_scan needs scalar 'model.") + key + "'");
      }
    }
    // scalars only; each size rebuilds its own chain from this template
    const std::size_t n0 = cfg.sizes.empty() ? 2 : cfg.sizes.front();
    cfg.model = parse_model(model, n0);
  } else {
    cfg.model = parse_model(model);
  }
  if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc.at("schedule"));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

TransportFit fit_transport_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("transport fit needs at least 3 points");
  TransportFit fit;
  fit.points = points;
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [size, current] : points) {
    if (!(size > 0.0)) throw DomainError("transport fit needs positive chain lengths");
    if (!(current > 0.0)) {
      throw DomainError("transport fit needs positive currents, got " + fmt(current));
    }
    const double x = std::log(size), y = std::log(current);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw DomainError("transport fit needs distinct chain lengths");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& [size, current] : points) {
    const double r = std::log(current) - (intercept + slope * std::log(size));
    ss += r * r;
  }
  fit.alpha = -slope;
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

double RunRecord::mean_current() const {
  const auto& c = result.current_profile;
  if (c.empty()) return 0.0;
  double acc = 0.0;
  for (double x : c) acc += x;
  return acc / static_cast<double>(c.size());
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write '" + tmp.string() + "'");
    os << content;
    os.flush();
    if (!os) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_run(const std::filesystem::path& dir, const RunRecord& run, std::uint64_t seed) {
  const RunResult& r = run.result;
  std::ostringstream hist;
  hist << "sweep,max_bond,energy,walltime_s,mean_current,max_imag\n";
  for (const auto& rec : r.history) {
    hist << rec.sweep << ',' << rec.max_bond << ',' << fmt(rec.energy) << ','
         << fmt(rec.walltime_s) << ',' << (rec.measured ? fmt(rec.mean_current) : "") << ','
         << (rec.measured ? fmt(rec.max_imag) : "") << '\n';
  }
  write_atomic(dir / "history.csv", hist.str());

  const std::size_t last_sweep = r.history.empty() ? 0 : r.history.back().sweep;
  const std::size_t bond = r.final_state.length() ? r.final_state.max_bond() : 0;
  auto profile = [&](const char* column, const std::vector<double>& values) {
    std::ostringstream os;
    os << "index," << column << ",sweep,max_bond,energy,max_imag\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      os << i + 1 << ',' << fmt(values[i]) << ',' << last_sweep << ',' << bond << ','
         << fmt(r.final_energy) << ',' << fmt(r.imag_residual) << '\n';
    }
    return os.str();
  };
  write_atomic(dir / "current.csv", profile("current", r.current_profile));
  write_atomic(dir / "magnetization.csv", profile("magnetization", r.magnetization_profile));

  json summary = run_json(run);
  summary["seed"] = seed;
  write_atomic(dir / "summary.json", dump(summary));
}

OrderingReport compare_orderings(const ExperimentConfig& config) {
  config.validate();
  using Job = std::function<RunRecord()>;
  std::vector<Job> jobs{
      [&] { return solve_one("rln", config.model, Ordering::RLN, config.schedule); },
      [&] { return solve_one("rnln", config.model, Ordering::RNLN, config.schedule); }};
  auto runs = run_parallel(jobs, config.workers);
  return {std::move(runs[0]), std::move(runs[1])};
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentOutcome outcome;
  const auto& out = config.output;
  std::filesystem::create_directories(out);
  json summary = {{"experiment", to_string(config.experiment)},
                  {"scheme", to_string(config.scheme)},
                  {"seed", config.seed},
                  {"schedule", schedule_json(config.schedule)}};
  using Job = std::function<RunRecord()>;

  switch (config.experiment) {
    case ExperimentKind::Single: {
      outcome.runs.push_back(solve_one("single", config.model, config.scheme, config.schedule));
      write_run(out, outcome.runs.back(), config.seed);
      break;
    }
    case ExperimentKind::GammaScan: {
      std::vector<Job> jobs;
      for (double g : config.gamma_values) {
        ModelParams p = config.model;
        p.gamma1 = p.gammaN = g;
        jobs.push_back([=, &config] {
          return solve_one("gamma_" + scan_label(g), p, config.scheme, config.schedule);
        });
      }
      outcome.runs = run_parallel(jobs, config.workers);
      std::ostringstream table;
      table << "gamma,mean_current,final_energy,max_bond,converged\n";
      for (std::size_t i = 0; i < outcome.runs.size(); ++i) {
        const auto& run = outcome.runs[i];
        write_run(out / run.name, run, config.seed);
        table << fmt(config.gamma_values[i]) << ',' << fmt(run.mean_current()) << ','
              << fmt(run.result.final_energy) << ',' << run.result.final_state.max_bond() << ','
              << (run.result.converged ? 1 : 0) << '\n';
      }
      write_atomic(out / "scan.csv", table.str());
      break;
    }
    case ExperimentKind::SizeScan: {
      std::vector<Job> jobs;
      for (std::size_t n : config.sizes) {
        ModelParams p = ModelParams::uniform(n, config.model.delta.empty() ? 1.0
                                                                            : config.model.delta[0],
                                             config.model.gamma1, config.model.f1,
                                             config.model.fN,
                                             config.model.h.empty() ? 0.0 : config.model.h[0]);
        p.gammaN = config.model.gammaN;
        p.j.assign(n - 1, config.model.j.empty() ? 1.0 : config.model.j[0]);
        jobs.push_back([=, &config] {
          return solve_one("N_" + std::to_string(n), p, config.scheme, config.schedule);
        });
      }
      outcome.runs = run_parallel(jobs, config.workers);
      std::ostringstream table;
      table << "N,mean_current,final_energy,max_bond,converged\n";
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < outcome.runs.size(); ++i) {
        const auto& run = outcome.runs[i];
        write_run(out / run.name, run, config.seed);
        table << config.sizes[i] << ',' << fmt(run.mean_current()) << ','
              << fmt(run.result.final_energy) << ',' << run.result.final_state.max_bond() << ','
              << (run.result.converged ? 1 : 0) << '\n';
        points.emplace_back(static_cast<double>(config.sizes[i]), std::abs(run.mean_current()));
      }
      write_atomic(out / "scan.csv", table.str());
      if (points.size() >= 3) {
        try {
          outcome.fit = fit_transport_exponent(points);
          summary["alpha"] = outcome.fit->alpha;
          summary["fit_residual"] = outcome.fit->fit_residual;
        } catch (const DomainError& e) {
          summary["fit_error"] = e.what();
        }
      }
      break;
    }
    case ExperimentKind::OrderingCompare: {
      OrderingReport report = compare_orderings(config);
      write_run(out / "rln", report.rln, config.seed);
      write_run(out / "rnln", report.rnln, config.seed);
      const auto& a = report.rln.result.history;
      const auto& b = report.rnln.result.history;
      std::ostringstream table;
      table << "sweep,energy_rln,energy_rnln\n";
      for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        table << i + 1 << ',' << (i < a.size() ? fmt(a[i].energy) : "") << ','
              << (i < b.size() ? fmt(b[i].energy) : "") << '\n';
      }
      write_atomic(out / "ordering_energy.csv", table.str());
      outcome.runs.push_back(std::move(report.rln));
      outcome.runs.push_back(std::move(report.rnln));
      break;
    }
  }

  summary["runs"] = json::array();
  for (const auto& run : outcome.runs) {
    summary["runs"].push_back(run_json(run));
    outcome.all_converged = outcome.all_converged && run.result.converged;
  }
  summary["converged"] = outcome.all_converged;
  if (config.experiment != ExperimentKind::Single) write_atomic(out / "experiment.json", dump(summary));
  outcome.exit_code = outcome.all_converged || config.allow_unconverged ? 0 : 2;
  return outcome;
}

}  // namespace nessdmrg
