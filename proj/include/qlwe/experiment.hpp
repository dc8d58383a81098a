#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qlwe/instance.hpp"
#include "qlwe/solver.hpp"

// Experiment runner: configuration, seeded trials, sweeps and result files.
namespace qlwe {

struct ExperimentConfig {
  std::size_t n = 4;
  std::uint64_t q = 101;
  std::int64_t xi = 1;
  std::int64_t kappa = 1;
  double sigma = 0.0;  // gaussian width; 0 means xi/3
  ErrorKind chi_kind = ErrorKind::UniformBounded;
  double gamma = 0.125;
  double delta = 0.2;
  Mode mode = Mode::Controlled;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t batch_size = 0;  // 0 means |v_j| = q
  std::size_t L = 0;           // 0 means derived by choose_parameters
  std::size_t M = 0;           // 0 means derived
  bool dedup = false;
  KernelBackend backend = KernelBackend::Sampled;
  bool timing = false;  // wall time is recorded only when set, so default output is reproducible
  unsigned threads = 0;  // worker count; never affects results

  // Ordered sweep axes: field name -> values (as text).
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;

  std::int64_t xi_prime() const noexcept { return kappa * xi; }
};

// Sets one scalar field from text. Throws ConfigError naming the field.
void set_field(ExperimentConfig& config, const std::string& key, const std::string& value);

// Flat `key = value` lines; blank lines and `#` comments are skipped.
// A `sweep.<field> = v1,v2,...` line adds a sweep axis.
void load_config(ExperimentConfig& config, std::istream& in);

// Parses `field=v1,v2,...` and appends an axis. Throws ConfigError.
void add_sweep_axis(ExperimentConfig& config, const std::string& axis);

// Cartesian product of the axes, first axis slowest. No axes -> {config}.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

// Throws ConfigError (with the field name) for invalid settings, including
// the gate 2 kappa xi < q.
void validate(const ExperimentConfig& config);

// Non-fatal notes, e.g. 2 kappa alpha >= 1/2.
std::vector<std::string> feasibility_warnings(const ExperimentConfig& config);

// choose_parameters with the L / M overrides applied. An override replaces
// the derived value; M is re-derived for an overridden L unless also given.
SolveParameters resolve_parameters(const ExperimentConfig& config);

struct ExperimentRecord {
  std::size_t point = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::uint64_t q = 0;
  std::int64_t xi = 0;
  std::int64_t kappa = 0;
  std::int64_t xi_prime = 0;
  double sigma = 0.0;
  ErrorKind chi_kind = ErrorKind::UniformBounded;
  double gamma = 0.0;
  double delta = 0.0;
  Mode mode = Mode::Controlled;
  std::size_t batch_size = 0;
  std::size_t L = 0;
  std::size_t M = 0;
  OutcomeClass outcome = OutcomeClass::Failure;
  std::size_t candidates = 0;
  std::size_t nulls = 0;
  std::size_t rejections = 0;
  std::size_t true_rejections = 0;  // rejected candidates equal to the secret; must stay 0
  std::size_t quantum_samples = 0;
  std::size_t test_samples = 0;
  double wall_time_ms = 0.0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

// One record per (sweep point, trial). Trial t of point p uses seed
// config.seed ^ (p * trials + t); output order is by that task index.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

// Runs a single solve for the given trial seed and fills a record.
ExperimentRecord run_trial(const ExperimentConfig& point, const SolveParameters& params, std::size_t point_index,
                           std::size_t trial, std::uint64_t trial_seed);

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& text);

// Floats use 12 significant digits. Throw EmptyResult for no records.
void emit_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void emit_json(std::ostream& out, const std::vector<ExperimentRecord>& records);
// Writes to path, or stdout for "-". I/O failures raise IoError.
void emit(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path);

std::vector<ExperimentRecord> parse_records_csv(std::istream& in);

struct BoundRow {
  std::uint64_t q = 0;
  std::int64_t xi_prime = 0;
  double gamma = 0.0;
  std::size_t batch_size = 0;
  double exact_p = 0.0;
  double lower_bound = 0.0;
  bool violated = false;
  double restricted_sum = 0.0;
  double empirical_p = 0.0;
  double empirical_3sigma = 0.0;
  std::size_t L = 0;
  std::size_t M = 0;
  double prob_iii_asymptotic = 0.0;
  double prob_iii_exact = 0.0;
};

// One row per sweep point: a controlled batch is drawn, its exact success
// probability compared to the lower bound, and `trials` kernel shots give an
// empirical rate with a 3-sigma band.
std::vector<BoundRow> report_bounds(const ExperimentConfig& config);

// Header: q,xi_prime,gamma,batch_size,exact_p,lower_bound,violated,
// restricted_sum,empirical_p,empirical_3sigma,L,M,prob_iii_asymptotic,prob_iii_exact
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

std::string format_number(double value);

}  // namespace qlwe
