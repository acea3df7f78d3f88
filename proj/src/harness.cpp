// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/harness.hpp"

#include "chaoscs/analysis.hpp"
#include "chaoscs/dynamics.hpp"
#include "chaoscs/ensembles.hpp"
#include "chaoscs/experiment.hpp"
#include "chaoscs/sensing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace chaoscs::harness {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::vector<std::string> kCompareDefault = {
    "chua_x1", "lorenz_x1", "iid_gaussian", "ar1_gaussian",
    "bernoulli_pm1", "uniform_01", "uniform_pm_half"};

struct CommandInfo {
  std::string name;
  std::string help;
  std::vector<std::string> keys;
};

const std::vector<std::string> kSourceKeys = {"ensemble", "system", "tau", "step", "burn_in", "rho"};
const std::vector<std::string> kTrialKeys = {"N", "M", "trials", "epsilon", "center",
                                             "gap_tol", "max_iters", "jobs"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out = {"config", "out", "seed"};
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> table = {
      {"generate", "Write a sequence (or, with --N/--M, a measurement matrix) to CSV",
       join({kSourceKeys, {"length", "N", "M", "center"}})},
      {"autocorr", "Normalized autocorrelation of a sequence",
       join({kSourceKeys, {"samples", "max_lag", "centered"}})},
      {"pdf", "Empirical probability density of a sequence",
       join({kSourceKeys, {"samples", "bins"}})},
      {"coherence", "Coherence between measurement rows and the identity basis",
       join({kSourceKeys, {"N", "M", "center"}})},
      {"rip", "Brute-force restricted isometry constants",
       join({kSourceKeys, {"N", "M", "k", "center"}})},
      {"recovery-curve", "Error rate of basis pursuit recovery versus sparsity",
       join({kSourceKeys, kTrialKeys, {"k"}})},
      {"kmax", "Largest sparsity with error rate below a threshold",
       join({kSourceKeys, kTrialKeys, {"threshold"}})},
      {"histogram", "Histogram of log10 relative recovery error",
       join({kSourceKeys, kTrialKeys, {"k", "bins"}})},
      {"compare", "Recovery curves for several ensembles",
       join({kSourceKeys, kTrialKeys, {"k", "ensembles"}})},
  };
  return table;
}

std::string flag_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key == "h" ? "step" : key;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ',';
      out += json_scalar_text(item);
    }
    return out;
  }
  throw UsageError("config file: unsupported value " + v.dump());
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw UsageError("invalid value for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text.empty()) return true;
  if (text == "false" || text == "0") return false;
  throw UsageError("invalid value for " + key + ": '" + text + "' (expected true/false)");
}

class Resolver {
 public:
  Resolver(std::map<std::string, std::string> flags, std::map<std::string, std::string> file,
           std::vector<std::string> allowed)
      : flags_(std::move(flags)), file_(std::move(file)), allowed_(std::move(allowed)) {}

  std::optional<std::string> get(const std::string& key) {
    std::optional<std::string> value;
    if (auto it = flags_.find(key); it != flags_.end()) {
      value = it->second;
    } else if (auto jt = file_.find(key); jt != file_.end()) {
      value = jt->second;
    }
    if (value) resolved_[key] = *value;
    return value;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw UsageError("missing required field " + key);
    return *v;
  }

  template <typename T>
  T number(const std::string& key, T fallback) {
    auto v = get(key);
    if (!v) {
      resolved_[key] = to_text(fallback);
      return fallback;
    }
    return parse_number<T>(key, *v);
  }

  template <typename T>
  std::optional<T> maybe_number(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_number<T>(key, *v);
  }

  bool flag(const std::string& key) {
    auto v = get(key);
    const bool out = v ? parse_bool(key, *v) : false;
    resolved_[key] = out ? "true" : "false";
    return out;
  }

  void note(const std::string& key, const std::string& value) { resolved_[key] = value; }

  std::vector<Override> overrides() const {
    std::vector<Override> out;
    for (const auto& [key, value] : flags_) {
      if (auto it = file_.find(key); it != file_.end() && it->second != value) {
        out.push_back({key, value, it->second});
      }
    }
    return out;
  }

  void check_file_keys() const {
    for (const auto& [key, value] : file_) {
      if (std::find(allowed_.begin(), allowed_.end(), key) == allowed_.end()) {
        throw UsageError("config file: unknown field " + key);
      }
    }
  }

  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  template <typename T>
  static std::string to_text(T v) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(v);
    } else {
      return std::to_string(v);
    }
  }

  std::map<std::string, std::string> flags_;
  std::map<std::string, std::string> file_;
  std::vector<std::string> allowed_;
  std::map<std::string, std::string> resolved_;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw UsageError("config: " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config: " + path + " must hold a flat JSON object");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) throw UsageError("config: field " + key + " must not be nested");
    out[normalize_key(key)] = json_scalar_text(value);
  }
  return out;
}

SequenceSpec parse_ensemble(const std::string& key, const std::string& name) {
  const auto kind = parse_sequence_kind(name);
  if (!kind) throw UsageError("unknown " + key + " '" + name + "'");
  SequenceSpec spec;
  spec.kind = *kind;
  return spec;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<int> parse_k_list(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw UsageError("invalid value for k: empty");
  auto num = [&](const std::string& part) { return parse_number<int>("k", part); };
  std::vector<int> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 2 && parts.size() != 3) {
      throw UsageError("invalid value for k: '" + s + "' (expected start:step:stop)");
    }
    const int start = num(parts[0]);
    const int step = parts.size() == 3 ? num(parts[1]) : 1;
    const int stop = num(parts.back());
    if (step <= 0) throw UsageError("invalid value for k: step must be positive");
    for (int k = start; k <= stop; k += step) out.push_back(k);
  } else {
    for (const auto& part : split_list(s)) out.push_back(num(part));
  }
  if (out.empty()) throw UsageError("invalid value for k: '" + s + "' is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0) throw UsageError("invalid value for k: negative sparsity");
    if (i > 0 && out[i] <= out[i - 1]) {
      throw UsageError("invalid value for k: values must be strictly increasing");
    }
  }
  return out;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Compressive sampling with chaotic and random measurement matrices", "chaoscs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& info : commands()) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    subs[info.name] = sub;
    for (const auto& key : info.keys) {
      auto* storage = &raw[info.name][key];
      if (key == "center" || key == "centered") {
        sub->add_flag_callback(flag_name(key), [storage] { *storage = "true"; });
      } else {
        sub->add_option(flag_name(key), *storage);
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested(std::string(kVersion) + "\n");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ExperimentConfig cfg;
  const CommandInfo* info = nullptr;
  for (const auto& c : commands()) {
    if (subs[c.name]->parsed()) info = &c;
  }
  if (!info) throw UsageError("no subcommand given");
  cfg.command = info->name;

  std::map<std::string, std::string> flags;
  for (const auto& key : info->keys) {
    CLI::App* sub = subs[info->name];
    if (sub->count(flag_name(key)) > 0) flags[key] = raw[info->name][key];
  }

  std::map<std::string, std::string> file;
  if (auto it = flags.find("config"); it != flags.end()) {
    cfg.config_file = it->second;
    file = read_config_file(it->second);
    flags.erase("config");
  }
  Resolver r(flags, file, info->keys);
  r.check_file_keys();
  cfg.overrides = r.overrides();

  // Seed precedence: flag, config file, CHAOS_CS_SEED, default 0.
  if (auto seed = r.maybe_number<std::uint64_t>("seed")) {
    cfg.seed = *seed;
    cfg.seed_source = flags.count("seed") ? "flag" : "config_file";
  } else if (const char* env = std::getenv("CHAOS_CS_SEED"); env && *env) {
    cfg.seed = parse_number<std::uint64_t>("CHAOS_CS_SEED", env);
    cfg.seed_source = "env";
    r.note("seed", env);
  } else {
    r.note("seed", "0");
  }

  const auto& keys = info->keys;
  auto has = [&](const std::string& key) {
    return std::find(keys.begin(), keys.end(), key) != keys.end();
  };

  // Ensemble(s).
  SequenceSpec base;
  bool have_source = false;
  if (has("ensemble")) {
    auto ensemble = r.get("ensemble");
    auto system = r.get("system");
    if (ensemble && system) throw UsageError("give either ensemble or system, not both");
    if (ensemble) {
      base = parse_ensemble("ensemble", *ensemble);
      have_source = true;
    } else if (system) {
      base = parse_ensemble("system", *system);
      if (!is_chaotic(base.kind)) throw UsageError("system must be chua, lorenz or rossler");
      have_source = true;
    }
    base.tau = r.maybe_number<double>("tau");
    base.step = r.maybe_number<double>("step");
    base.burn_in = r.maybe_number<double>("burn_in");
    base.rho = r.number<double>("rho", 0.99);
    if (!(base.rho > -1.0 && base.rho < 1.0)) throw UsageError("rho must lie in (-1, 1)");
    if (base.tau && !(*base.tau > 0)) throw UsageError("tau must be positive");
    if (base.step && !(*base.step > 0)) throw UsageError("step must be positive");
    if (base.burn_in && !(*base.burn_in >= 0)) throw UsageError("burn_in must be non-negative");
  }
  if (cfg.command == "compare") {
    const auto list = r.get("ensembles");
    if (list && have_source) throw UsageError("give either ensemble or ensembles, not both");
    std::vector<std::string> names;
    if (list) {
      names = split_list(*list);
    } else if (have_source) {
      names = {std::string(to_string(base.kind))};
    } else {
      names = kCompareDefault;
      r.note("ensembles", "chua_x1,lorenz_x1,iid_gaussian,ar1_gaussian,bernoulli_pm1,uniform_01,uniform_pm_half");
    }
    if (names.empty()) throw UsageError("invalid value for ensembles: empty list");
    for (const auto& name : names) {
      SequenceSpec spec = base;
      spec.kind = parse_ensemble("ensembles", name).kind;
      cfg.ensembles.push_back(spec);
    }
  } else if (has("ensemble")) {
    if (!have_source) throw UsageError("missing required field ensemble");
    cfg.ensembles.push_back(base);
  }

  // Dimensions and sweep parameters.
  const bool needs_dims = cfg.command == "coherence" || cfg.command == "rip" ||
                          cfg.command == "recovery-curve" || cfg.command == "kmax" ||
                          cfg.command == "histogram" || cfg.command == "compare";
  if (has("N")) {
    cfg.n = r.maybe_number<Eigen::Index>("N");
    cfg.m = r.maybe_number<Eigen::Index>("M");
    if (needs_dims && !cfg.n) throw UsageError("missing required field N");
    if (needs_dims && !cfg.m) throw UsageError("missing required field M");
    if (cfg.n && *cfg.n < 1) throw UsageError("N must be positive");
    if (cfg.m && *cfg.m < 1) throw UsageError("M must be positive");
    if (cfg.n && cfg.m && *cfg.m > *cfg.n) throw UsageError("M must not exceed N");
    if (cfg.command == "generate" && (cfg.n.has_value() != cfg.m.has_value())) {
      throw UsageError("generate needs both N and M for a matrix");
    }
  }
  if (has("k")) {
    if (cfg.command == "rip") {
      auto k = r.get("k");
      cfg.ks = k ? parse_k_list(*k) : std::vector<int>{1, 2, 3};
      if (!k) r.note("k", "1,2,3");
    } else {
      cfg.ks = parse_k_list(r.require("k"));
    }
    if (cfg.command == "histogram" && cfg.ks.size() != 1) {
      throw UsageError("histogram takes a single k");
    }
    for (int k : cfg.ks) {
      if (cfg.m && k > *cfg.m) throw UsageError("k must not exceed M");
      if (cfg.command == "rip" && k < 1) throw UsageError("k must be >= 1 for rip");
    }
  }
  if (has("trials")) {
    cfg.trials = r.number<int>("trials", cfg.command == "histogram" ? 1000 : 500);
    if (cfg.trials < 1) throw UsageError("trials must be positive");
    if (cfg.command == "histogram" && cfg.trials < 100) {
      throw UsageError("trials must be at least 100 for histogram");
    }
    cfg.epsilon = r.number<double>("epsilon", 0.01);
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
    cfg.jobs = r.number<int>("jobs", 1);
    if (cfg.jobs < 1) throw UsageError("jobs must be positive");
    cfg.gap_tol = r.number<double>("gap_tol", 1e-3);
    if (!(cfg.gap_tol > 0)) throw UsageError("gap_tol must be positive");
    cfg.max_iters = r.number<int>("max_iters", 50);
    if (cfg.max_iters < 1) throw UsageError("max_iters must be positive");
  }
  if (has("center")) cfg.center = r.flag("center");
  if (has("centered")) cfg.centered = r.flag("centered");
  if (has("samples")) {
    cfg.samples = r.number<std::size_t>("samples", 100000);
    if (cfg.samples < 1) throw UsageError("samples must be positive");
  }
  if (has("length")) {
    cfg.length = r.number<std::size_t>("length", 0);
    if (cfg.length == 0 && !cfg.n) throw UsageError("missing required field length");
  }
  if (has("max_lag")) {
    cfg.max_lag = r.number<int>("max_lag", 20);
    if (cfg.max_lag < 0) throw UsageError("max_lag must be non-negative");
    if (cfg.samples <= 4 * static_cast<std::size_t>(cfg.max_lag)) {
      throw UsageError("samples must exceed 4 * max_lag");
    }
  }
  if (has("bins")) {
    cfg.bins = r.number<int>("bins", cfg.command == "histogram" ? 52 : 50);
    if (cfg.bins < 2) throw UsageError("bins must be at least 2");
  }
  if (has("threshold")) {
    cfg.threshold = r.number<double>("threshold", 0.1);
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
      throw UsageError("threshold must lie in (0, 1)");
    }
  }
  if (auto out = r.get("out")) {
    cfg.out = *out;
  } else {
    cfg.out = cfg.command + ".csv";
    r.note("out", cfg.out);
  }
  if (cfg.out.empty()) throw UsageError("out must not be empty");
  if (fs::is_directory(cfg.out)) throw UsageError("out names a directory: " + cfg.out);
  const fs::path parent = fs::path(cfg.out).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw UsageError("out directory does not exist: " + parent.string());
  }

  cfg.resolved = r.resolved();
  if (cfg.config_file) cfg.resolved["config"] = *cfg.config_file;
  return cfg;
}

namespace {

struct SigmaSummary {
  std::string ensemble;
  std::vector<double> sigmas;
};

struct RunResult {
  std::string csv;
  std::int64_t total_trials = 0;
  std::vector<SigmaSummary> sigma;
};

SequenceSpec seeded(SequenceSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

ExperimentOptions experiment_options(const ExperimentConfig& cfg) {
  ExperimentOptions opt;
  opt.trials = cfg.trials;
  opt.epsilon = cfg.epsilon;
  opt.master_seed = cfg.seed;
  opt.jobs = cfg.jobs;
  opt.center = cfg.center;
  opt.solver.gap_tol = cfg.gap_tol;
  opt.solver.max_iters = cfg.max_iters;
  return opt;
}

MeasurementMatrix single_matrix(const ExperimentConfig& cfg) {
  const SequenceSpec spec = seeded(cfg.ensembles.front(), cfg.seed);
  const Sequence seq = generate(spec, static_cast<std::size_t>(*cfg.n * *cfg.m));
  MatrixBuildOptions build;
  build.center = cfg.center;
  return build_matrix(seq, *cfg.m, *cfg.n, build);
}

RunResult run_generate(const ExperimentConfig& cfg) {
  RunResult res;
  std::ostringstream csv;
  if (cfg.n) {
    const MeasurementMatrix phi = single_matrix(cfg);
    write_matrix_csv(csv, phi);
    res.sigma.push_back({describe(phi.source), {phi.sigma_used}});
  } else {
    const Sequence seq = generate(seeded(cfg.ensembles.front(), cfg.seed), cfg.length);
    csv << "index,value\n";
    for (Eigen::Index i = 0; i < seq.size(); ++i) {
      csv << i << ',' << format_double(seq.values(i)) << '\n';
    }
  }
  res.csv = csv.str();
  return res;
}

RunResult run_autocorr(const ExperimentConfig& cfg) {
  const Sequence seq = generate(seeded(cfg.ensembles.front(), cfg.seed), cfg.samples);
  const AutocorrResult acf = autocorrelation(seq, cfg.max_lag, cfg.centered);
  std::ostringstream csv;
  csv << "lag,value\n";
  for (std::size_t i = 0; i < acf.values.size(); ++i) {
    csv << format_double(acf.lags[i]) << ',' << format_double(acf.values[i]) << '\n';
  }
  return {csv.str(), 0, {}};
}

RunResult run_pdf(const ExperimentConfig& cfg) {
  const Sequence seq = generate(seeded(cfg.ensembles.front(), cfg.seed), cfg.samples);
  const Histogram h = empirical_pdf(seq, cfg.bins);
  std::ostringstream csv;
  csv << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    csv << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
        << format_double(h.density[i]) << '\n';
  }
  return {csv.str(), 0, {}};
}

RunResult run_coherence(const ExperimentConfig& cfg) {
  const MeasurementMatrix phi = single_matrix(cfg);
  const Matrixd identity = Matrixd::Identity(*cfg.n, *cfg.n);
  const double mu = coherence(phi.entries.transpose(), identity);
  std::ostringstream csv;
  csv << "ensemble,M,N,coherence\n";
  csv << to_string(phi.source.kind) << ',' << *cfg.m << ',' << *cfg.n << ',' << format_double(mu)
      << '\n';
  return {csv.str(), 0, {{describe(phi.source), {phi.sigma_used}}}};
}

RunResult run_rip(const ExperimentConfig& cfg) {
  const MeasurementMatrix phi = single_matrix(cfg);
  std::ostringstream csv;
  csv << "k,delta_k\n";
  for (int k : cfg.ks) {
    const RipEstimate est = rip_constant_bruteforce(phi.entries, k);
    csv << k << ',' << format_double(est.delta) << '\n';
  }
  return {csv.str(), 0, {{describe(phi.source), {phi.sigma_used}}}};
}

RunResult run_recovery_curve(const ExperimentConfig& cfg) {
  RecoveryExperiment experiment(*cfg.n, *cfg.m, cfg.ensembles.front(), experiment_options(cfg));
  const RecoveryCurve curve = recovery_curve(experiment, cfg.ks);
  std::ostringstream csv;
  csv << "k,trials,failures,error_rate,solver_failures\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    csv << curve.ks[i] << ',' << curve.trials << ',' << curve.failures[i] << ','
        << format_double(curve.error_rates[i]) << ',' << curve.solver_failures[i] << '\n';
  }
  return {csv.str(), static_cast<std::int64_t>(curve.trials) * static_cast<std::int64_t>(curve.ks.size()),
          {{std::string(to_string(curve.ensemble.kind)), experiment.sigmas()}}};
}

RunResult run_kmax(const ExperimentConfig& cfg) {
  RecoveryExperiment experiment(*cfg.n, *cfg.m, cfg.ensembles.front(), experiment_options(cfg));
  const KmaxResult res = kmax_estimate(experiment, cfg.threshold);
  std::ostringstream csv;
  csv << "N,M,ratio,k_max\n";
  csv << res.n << ',' << res.m << ',' << format_double(res.ratio) << ','
      << format_double(res.k_max) << '\n';
  return {csv.str(), static_cast<std::int64_t>(cfg.trials) * static_cast<std::int64_t>(res.ks.size()),
          {{std::string(to_string(cfg.ensembles.front().kind)), experiment.sigmas()}}};
}

RunResult run_histogram(const ExperimentConfig& cfg) {
  RecoveryExperiment experiment(*cfg.n, *cfg.m, cfg.ensembles.front(), experiment_options(cfg));
  const Histogram h = error_histogram(experiment, cfg.ks.front(), cfg.bins);
  std::ostringstream csv;
  csv << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    csv << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
        << h.counts[i] << '\n';
  }
  return {csv.str(), cfg.trials, {{std::string(to_string(cfg.ensembles.front().kind)), experiment.sigmas()}}};
}

RunResult run_compare(const ExperimentConfig& cfg) {
  RunResult res;
  std::ostringstream csv;
  csv << "ensemble,k,error_rate,trials\n";
  for (const auto& spec : cfg.ensembles) {
    RecoveryExperiment experiment(*cfg.n, *cfg.m, spec, experiment_options(cfg));
    const RecoveryCurve curve = recovery_curve(experiment, cfg.ks);
    for (std::size_t i = 0; i < curve.ks.size(); ++i) {
      csv << to_string(spec.kind) << ',' << curve.ks[i] << ','
          << format_double(curve.error_rates[i]) << ',' << curve.trials << '\n';
    }
    res.total_trials += static_cast<std::int64_t>(curve.trials) * static_cast<std::int64_t>(curve.ks.size());
    res.sigma.push_back({std::string(to_string(spec.kind)), experiment.sigmas()});
  }
  res.csv = csv.str();
  return res;
}

RunResult dispatch(const ExperimentConfig& cfg) {
  if (cfg.command == "generate") return run_generate(cfg);
  if (cfg.command == "autocorr") return run_autocorr(cfg);
  if (cfg.command == "pdf") return run_pdf(cfg);
  if (cfg.command == "coherence") return run_coherence(cfg);
  if (cfg.command == "rip") return run_rip(cfg);
  if (cfg.command == "recovery-curve") return run_recovery_curve(cfg);
  if (cfg.command == "kmax") return run_kmax(cfg);
  if (cfg.command == "histogram") return run_histogram(cfg);
  if (cfg.command == "compare") return run_compare(cfg);
  throw UsageError("unknown command " + cfg.command);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json sigma_json(const std::vector<SigmaSummary>& summaries) {
  json out = json::array();
  for (const auto& s : summaries) {
    std::vector<double> ok;
    for (double v : s.sigmas) {
      if (std::isfinite(v)) ok.push_back(v);
    }
    json entry = {{"ensemble", s.ensemble},
                  {"matrices", s.sigmas.size()},
                  {"failed_matrices", s.sigmas.size() - ok.size()}};
    if (!ok.empty()) {
      double sum = 0.0;
      for (double v : ok) sum += v;
      entry["min"] = *std::min_element(ok.begin(), ok.end());
      entry["mean"] = sum / static_cast<double>(ok.size());
      entry["max"] = *std::max_element(ok.begin(), ok.end());
    }
    out.push_back(entry);
  }
  return out;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "chaoscs: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const RunResult res = dispatch(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest;
    manifest["tool"] = "chaoscs";
    manifest["version"] = kVersion;
    manifest["command"] = cfg.command;
    manifest["timestamp"] = utc_timestamp();
    manifest["config"] = cfg.resolved;
    manifest["seed_source"] = cfg.seed_source;
    json overrides = json::array();
    for (const auto& o : cfg.overrides) {
      overrides.push_back({{"key", o.key}, {"flag", o.flag_value}, {"config_file", o.file_value}});
    }
    manifest["overrides"] = overrides;
    json ensembles = json::array();
    for (const auto& spec : cfg.ensembles) ensembles.push_back(describe(seeded(spec, cfg.seed)));
    manifest["ensembles"] = ensembles;
    manifest["sigma_used"] = sigma_json(res.sigma);
    manifest["total_trials"] = res.total_trials;
    manifest["wall_time_seconds"] = wall;
    manifest["result"] = cfg.out;

    const fs::path csv_path(cfg.out);
    fs::path manifest_path = csv_path;
    manifest_path += ".manifest.json";
    write_atomically(csv_path, res.csv);
    try {
      write_atomically(manifest_path, manifest.dump(2) + "\n");
    } catch (...) {
      std::error_code ec;
      fs::remove(csv_path, ec);
      throw;
    }
    out << "wrote " << cfg.out << " (" << res.total_trials << " trials, " << std::fixed
        << std::setprecision(2) << wall << " s)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "chaoscs: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace chaoscs::harness
