#include "qlwe/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qlwe/oracle.hpp"
#include "qlwe/parallel.hpp"
#include "qlwe/qsim.hpp"

namespace qlwe {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::ConfigError, "field '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw Error(ErrorCode::ConfigError, "field '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

template <typename Fn>
auto rethrow_as_config(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, "field '" + key + "': " + e.what());
  }
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void set_field(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "n") c.n = parse_number<std::size_t>(key, value);
  else if (key == "q") c.q = parse_number<std::uint64_t>(key, value);
  else if (key == "xi") c.xi = parse_number<std::int64_t>(key, value);
  else if (key == "kappa") c.kappa = parse_number<std::int64_t>(key, value);
  else if (key == "sigma") c.sigma = parse_number<double>(key, value);
  else if (key == "chi" || key == "chi_kind") c.chi_kind = rethrow_as_config(key, [&] { return parse_error_kind(trim(value)); });
  else if (key == "gamma") c.gamma = parse_number<double>(key, value);
  else if (key == "delta") c.delta = parse_number<double>(key, value);
  else if (key == "mode") c.mode = rethrow_as_config(key, [&] { return parse_mode(trim(value)); });
  else if (key == "trials") c.trials = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "batch_size") c.batch_size = parse_number<std::size_t>(key, value);
  else if (key == "L") c.L = parse_number<std::size_t>(key, value);
  else if (key == "M") c.M = parse_number<std::size_t>(key, value);
  else if (key == "dedup") c.dedup = parse_bool(key, value);
  else if (key == "timing") c.timing = parse_bool(key, value);
  else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
  else if (key == "backend") {
    const std::string v = trim(value);
    if (v == "dense") c.backend = KernelBackend::Dense;
    else if (v == "sampled") c.backend = KernelBackend::Sampled;
    else throw Error(ErrorCode::ConfigError, "field 'backend': expected dense|sampled, got '" + value + "'");
  } else {
    throw Error(ErrorCode::ConfigError, "unknown field '" + key + "'");
  }
}

void add_sweep_axis(ExperimentConfig& config, const std::string& axis) {
  const auto eq = axis.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "sweep axis '" + axis + "' must be field=v1,v2,...");
  const std::string key = trim(axis.substr(0, eq));
  auto values = split(axis.substr(eq + 1), ',');
  if (values.empty()) throw Error(ErrorCode::ConfigError, "sweep axis '" + key + "' has no values");
  // Reject bad values and unknown fields up front.
  ExperimentConfig probe = config;
  for (const auto& v : values) set_field(probe, key, v);
  config.sweep.emplace_back(key, std::move(values));
}

void load_config(ExperimentConfig& config, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("sweep.", 0) == 0) {
      add_sweep_axis(config, key.substr(6) + "=" + value);
    } else {
      set_field(config, key, value);
    }
  }
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  std::vector<ExperimentConfig> points{config};
  for (const auto& [key, values] : config.sweep) {
    std::vector<ExperimentConfig> next;
    next.reserve(points.size() * values.size());
    for (const auto& p : points) {
      for (const auto& v : values) {
        ExperimentConfig c = p;
        set_field(c, key, v);
        next.push_back(std::move(c));
      }
    }
    points = std::move(next);
  }
  for (auto& p : points) p.sweep.clear();
  return points;
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::ConfigError, "field '" + field + "': " + why);
  };
  if (c.n == 0) fail("n", "must be at least 1");
  if (c.q < 3 || c.q > kMaxModulus || !is_prime(c.q)) fail("q", std::to_string(c.q) + " is not an odd prime in range");
  if (c.xi < 0) fail("xi", "must be non-negative");
  if (c.kappa < 1) fail("kappa", "must be at least 1");
  if (2 * static_cast<std::uint64_t>(c.xi_prime()) >= c.q) {
    fail("kappa", "kappa*xi=" + std::to_string(c.xi_prime()) + " must be below q/2");
  }
  if (2 * static_cast<std::uint64_t>(c.xi) >= c.q) fail("xi", "must be below q/2");
  if (c.sigma < 0.0) fail("sigma", "must be non-negative");
  if (!(c.gamma > 0.0 && c.gamma < 0.25)) fail("gamma", "must lie in (0, 1/4)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta", "must lie in (0, 1)");
  if (c.trials == 0) fail("trials", "must be at least 1");
  if (c.batch_size > c.q) fail("batch_size", "must not exceed q");
  if (c.L > c.q) fail("L", "must not exceed q");
  if (c.M > 64) fail("M", "must not exceed 64");
}

std::vector<std::string> feasibility_warnings(const ExperimentConfig& c) {
  std::vector<std::string> notes;
  const double two_kappa_alpha = 2.0 * static_cast<double>(c.xi_prime()) / static_cast<double>(c.q);
  if (two_kappa_alpha >= 0.5) {
    notes.push_back("2*kappa*alpha = " + format_number(two_kappa_alpha) + " >= 1/2; the small-error regime does not hold");
  }
  if (c.mode == Mode::Elimination && c.xi > 0) {
    notes.push_back("elimination mode: combined errors are not bounded by kappa*xi in general");
  }
  return notes;
}

SolveParameters resolve_parameters(const ExperimentConfig& c) {
  if (c.L == 0) {
    SolveParameters p = choose_parameters(c.n, c.q, c.xi, c.kappa, c.delta, c.gamma);
    if (c.M != 0) p.M = c.M;
    return p;
  }
  SolveParameters p;
  p.gamma = c.gamma;
  p.xi_prime = c.xi_prime();
  p.C = c_factor(c.gamma);
  p.L = c.L;
  p.M = c.M != 0 ? c.M : required_test_trials(c.n, c.q, p.xi_prime, p.L, c.delta);
  if (p.M == 0) throw Error(ErrorCode::InfeasibleParameters, "no M <= 64 meets the false-accept target");
  return p;
}

ExperimentRecord run_trial(const ExperimentConfig& c, const SolveParameters& params, std::size_t point_index,
                           std::size_t trial, std::uint64_t trial_seed) {
  const auto start = std::chrono::steady_clock::now();
  ErrorDistribution chi{c.chi_kind, c.xi, c.sigma};
  Rng instance_rng(derive_seed(trial_seed, 0, 2));
  const LweInstance instance = make_instance(c.n, c.q, chi, instance_rng);

  SolverOptions options;
  options.backend = c.backend;
  options.dedup_candidates = c.dedup;
  options.batch_size = c.batch_size;
  const SolveOutcome outcome = solve(instance, c.mode, params, trial_seed, options);

  ExperimentRecord r;
  r.point = point_index;
  r.trial = trial;
  r.seed = trial_seed;
  r.n = c.n;
  r.q = c.q;
  r.xi = c.xi;
  r.kappa = c.kappa;
  r.xi_prime = params.xi_prime;
  r.sigma = c.sigma;
  r.chi_kind = c.chi_kind;
  r.gamma = c.gamma;
  r.delta = c.delta;
  r.mode = c.mode;
  r.batch_size = c.batch_size == 0 ? c.q : c.batch_size;
  r.L = params.L;
  r.M = params.M;
  r.outcome = outcome.cls;
  r.candidates = outcome.candidates_tested();
  r.nulls = outcome.nulls();
  r.rejections = outcome.rejections();
  for (std::size_t j = 0; j < outcome.per_coordinate.size(); ++j) {
    for (auto v : outcome.per_coordinate[j].rejected_candidates) {
      if (v == instance.secret()[j]) ++r.true_rejections;
    }
  }
  r.quantum_samples = outcome.quantum_samples();
  r.test_samples = outcome.test_samples();
  if (r.quantum_samples > c.n * params.L) {
    throw Error(ErrorCode::InvariantViolation, "quantum-sample count exceeds n*L");
  }
  if (c.timing) {
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  const auto points = expand_sweep(config);
  std::vector<SolveParameters> params;
  params.reserve(points.size());
  for (const auto& p : points) {
    validate(p);
    params.push_back(resolve_parameters(p));
  }
  const std::size_t trials = config.trials;
  std::vector<ExperimentRecord> records(points.size() * trials);
  parallel_for(records.size(), config.threads, [&](std::size_t task) {
    const std::size_t point = task / trials;
    const std::size_t trial = task % trials;
    records[task] = run_trial(points[point], params[point], point, trial, config.seed ^ task);
  });
  return records;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw Error(ErrorCode::ConfigError, "field 'format': expected csv|json, got '" + text + "'");
}

namespace {

constexpr const char* kRecordColumns[] = {
    "point", "trial", "seed", "n", "q", "xi", "kappa", "xi_prime", "sigma", "chi_kind", "gamma", "delta", "mode",
    "batch_size", "L", "M", "outcome", "candidates", "nulls", "rejections", "true_rejections", "quantum_samples",
    "test_samples", "wall_time_ms"};

std::vector<std::string> record_fields(const ExperimentRecord& r) {
  return {std::to_string(r.point),      std::to_string(r.trial),    std::to_string(r.seed),
          std::to_string(r.n),          std::to_string(r.q),        std::to_string(r.xi),
          std::to_string(r.kappa),      std::to_string(r.xi_prime), format_number(r.sigma),
          to_string(r.chi_kind),        format_number(r.gamma),     format_number(r.delta),
          to_string(r.mode),            std::to_string(r.batch_size), std::to_string(r.L),
          std::to_string(r.M),          to_string(r.outcome),       std::to_string(r.candidates),
          std::to_string(r.nulls),      std::to_string(r.rejections), std::to_string(r.true_rejections),
          std::to_string(r.quantum_samples), std::to_string(r.test_samples), format_number(r.wall_time_ms)};
}

void require_records(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyResult, "no records to emit");
}

}  // namespace

void emit_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  require_records(records);
  bool first = true;
  for (const char* col : kRecordColumns) {
    out << (first ? "" : ",") << col;
    first = false;
  }
  out << '\n';
  for (const auto& r : records) {
    const auto fields = record_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
}

void emit_json(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  require_records(records);
  // Serialized by hand so floats keep the same 12-digit form as the CSV.
  out << "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto fields = record_fields(records[i]);
    out << "  {";
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::string col = kRecordColumns[k];
      const bool textual = col == "chi_kind" || col == "mode" || col == "outcome";
      const bool non_finite = fields[k] == "nan" || fields[k] == "inf" || fields[k] == "-inf";
      out << (k ? ", " : "") << nlohmann::json(col).dump() << ": ";
      if (textual) out << nlohmann::json(fields[k]).dump();
      else if (non_finite) out << "null";
      else out << fields[k];
    }
    out << (i + 1 < records.size() ? "},\n" : "}\n");
  }
  out << "]\n";
}

void emit(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path) {
  require_records(records);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (path != "-") {
    file.open(path);
    if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out = &file;
  }
  if (format == OutputFormat::Csv) emit_csv(*out, records);
  else emit_json(*out, records);
  out->flush();
  if (!*out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::vector<ExperimentRecord> parse_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "missing CSV header");
  const auto header = split(line, ',');
  constexpr std::size_t width = std::size(kRecordColumns);
  if (header.size() != width) throw Error(ErrorCode::ParseError, "unexpected CSV header");
  for (std::size_t i = 0; i < width; ++i) {
    if (header[i] != kRecordColumns[i]) throw Error(ErrorCode::ParseError, "unexpected column '" + header[i] + "'");
  }
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != width) throw Error(ErrorCode::ParseError, "row has " + std::to_string(f.size()) + " fields");
    try {
      ExperimentRecord r;
      r.point = parse_number<std::size_t>("point", f[0]);
      r.trial = parse_number<std::size_t>("trial", f[1]);
      r.seed = parse_number<std::uint64_t>("seed", f[2]);
      r.n = parse_number<std::size_t>("n", f[3]);
      r.q = parse_number<std::uint64_t>("q", f[4]);
      r.xi = parse_number<std::int64_t>("xi", f[5]);
      r.kappa = parse_number<std::int64_t>("kappa", f[6]);
      r.xi_prime = parse_number<std::int64_t>("xi_prime", f[7]);
      r.sigma = parse_number<double>("sigma", f[8]);
      r.chi_kind = parse_error_kind(f[9]);
      r.gamma = parse_number<double>("gamma", f[10]);
      r.delta = parse_number<double>("delta", f[11]);
      r.mode = parse_mode(f[12]);
      r.batch_size = parse_number<std::size_t>("batch_size", f[13]);
      r.L = parse_number<std::size_t>("L", f[14]);
      r.M = parse_number<std::size_t>("M", f[15]);
      r.outcome = parse_outcome(f[16]);
      r.candidates = parse_number<std::size_t>("candidates", f[17]);
      r.nulls = parse_number<std::size_t>("nulls", f[18]);
      r.rejections = parse_number<std::size_t>("rejections", f[19]);
      r.true_rejections = parse_number<std::size_t>("true_rejections", f[20]);
      r.quantum_samples = parse_number<std::size_t>("quantum_samples", f[21]);
      r.test_samples = parse_number<std::size_t>("test_samples", f[22]);
      r.wall_time_ms = parse_number<double>("wall_time_ms", f[23]);
      records.push_back(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
  }
  return records;
}

std::vector<BoundRow> report_bounds(const ExperimentConfig& config) {
  const auto points = expand_sweep(config);
  std::vector<BoundRow> rows(points.size());
  for (const auto& p : points) {
    validate(p);
    if (p.xi_prime() == 0) throw Error(ErrorCode::ConfigError, "field 'xi': the bound needs kappa*xi >= 1");
  }
  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    const ExperimentConfig& c = points[i];
    const Modulus q(c.q);
    const std::uint64_t seed = derive_seed(c.seed, i, 3);
    Rng rng(derive_seed(seed, 0, 0));
    const std::uint64_t s_j = uniform_below(rng, c.q);
    const ErrorDistribution chi_prime{c.chi_kind, c.xi_prime(), c.sigma};
    ControlledSource source(q, FieldVector{s_j}, chi_prime, c.xi, SourceLimits{c.batch_size}, derive_seed(seed, 0, 1));
    const ReducedBatch batch = source.next_batch(0);
    const BoundReport report = bound_report(batch, c.gamma);

    BoundRow row;
    row.q = c.q;
    row.xi_prime = c.xi_prime();
    row.gamma = c.gamma;
    row.batch_size = batch.pairs.size();
    row.exact_p = report.exact_p;
    row.lower_bound = report.lower_bound;
    row.violated = report.violated;
    row.restricted_sum = report.restricted_sum;

    const RootTable roots(c.q);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < c.trials; ++t) {
      const auto o = sample_kernel_outcome(batch, roots, rng);
      if (o.k_d == q.neg(q.mul(s_j, o.k_star))) ++hits;
    }
    const double shots = static_cast<double>(c.trials);
    row.empirical_p = static_cast<double>(hits) / shots;
    row.empirical_3sigma = 3.0 * std::sqrt(report.exact_p * (1.0 - report.exact_p) / shots);

    try {
      const SolveParameters sp = resolve_parameters(c);
      row.L = sp.L;
      row.M = sp.M;
      const double alpha = static_cast<double>(c.xi) / static_cast<double>(c.q);
      const ProbIIIBound b = prob_iii_bound(sp.L, static_cast<double>(c.kappa), alpha, sp.M, c.q);
      row.prob_iii_asymptotic = b.asymptotic;
      row.prob_iii_exact = b.exact;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleParameters) throw;
      row.prob_iii_asymptotic = row.prob_iii_exact = std::nan("");
    }
    rows[i] = row;
  });
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyResult, "no bound rows to emit");
  out << "q,xi_prime,gamma,batch_size,exact_p,lower_bound,violated,restricted_sum,empirical_p,empirical_3sigma,"
         "L,M,prob_iii_asymptotic,prob_iii_exact\n";
  for (const auto& r : rows) {
    out << r.q << ',' << r.xi_prime << ',' << format_number(r.gamma) << ',' << r.batch_size << ','
        << format_number(r.exact_p) << ',' << format_number(r.lower_bound) << ',' << (r.violated ? "true" : "false")
        << ',' << format_number(r.restricted_sum) << ',' << format_number(r.empirical_p) << ','
        << format_number(r.empirical_3sigma) << ',' << r.L << ',' << r.M << ',' << format_number(r.prob_iii_asymptotic)
        << ',' << format_number(r.prob_iii_exact) << '\n';
  }
}

}  // namespace qlwe
