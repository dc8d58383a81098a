// Command-line experiment runner.
//
//   qlwe solve     [--config FILE] [--n 8 --q 401 ...] [--format csv|json] [--out PATH]
//   qlwe sweep     ... --sweep gamma=0.05,0.1,0.125
//   qlwe bounds    ... [--sweep ...]
//   qlwe qram-cost --q 401 --n 8 --d 2
//   qlwe selftest  [--seed S]
//   qlwe instance  --n 4 --q 101 --xi 1 --samples 16 --out inst.txt --secret inst.secret
//
// Exit codes: 0 success, 2 configuration error, 3 invariant violation, 1 other.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlwe/experiment.hpp"
#include "qlwe/oracle.hpp"
#include "qlwe/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"n", "problem length"},
    {"q", "prime modulus"},
    {"xi", "raw error bound"},
    {"kappa", "error amplification; xi' = kappa * xi"},
    {"sigma", "gaussian width (default xi/3)"},
    {"chi", "error distribution: uniform|gaussian"},
    {"gamma", "bound parameter in (0, 1/4)"},
    {"delta", "target failure probability"},
    {"mode", "controlled|elimination"},
    {"trials", "independent trials per sweep point"},
    {"seed", "master seed"},
    {"batch_size", "|v_j| (0 means q)"},
    {"L", "retry budget override"},
    {"M", "test trials override"},
    {"dedup", "skip re-testing rejected candidates"},
    {"backend", "sampled|dense kernel"},
    {"timing", "record wall time per trial"},
    {"threads", "worker threads (0 = all cores)"},
};

// CLI flags, recorded as text so that file values are only overridden by
// flags the user actually passed.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::string> sweeps;

  void attach(CLI::App* app, bool allow_sweep) {
    app->add_option("--config", config_path, "key=value configuration file");
    for (const auto& [key, help] : kConfigFlags) {
      std::string flag = "--" + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      app->add_option(flag, values[key], help);
    }
    if (allow_sweep) app->add_option("--sweep", sweeps, "sweep axis field=v1,v2,...");
  }

  qlwe::ExperimentConfig build(const CLI::App* app) const {
    qlwe::ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw qlwe::Error(qlwe::ErrorCode::ConfigError, "cannot open config file '" + config_path + "'");
      qlwe::load_config(config, in);
    }
    for (const auto& [key, help] : kConfigFlags) {
      std::string flag = "--" + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      if (app->count(flag) > 0) qlwe::set_field(config, key, values.at(key));
    }
    for (const auto& s : sweeps) qlwe::add_sweep_axis(config, s);
    return config;
  }
};

int exit_code_for(const qlwe::Error& e) {
  switch (e.code()) {
    case qlwe::ErrorCode::InvariantViolation: return kExitInvariant;
    case qlwe::ErrorCode::IoError:
    case qlwe::ErrorCode::EmptyResult: return kExitOther;
    default: return kExitConfig;
  }
}

void print_summary(const std::vector<qlwe::ExperimentRecord>& records) {
  std::size_t success = 0, failure = 0, wrong = 0, true_rejections = 0;
  for (const auto& r : records) {
    success += r.outcome == qlwe::OutcomeClass::Success;
    failure += r.outcome == qlwe::OutcomeClass::Failure;
    wrong += r.outcome == qlwe::OutcomeClass::WrongAccept;
    true_rejections += r.true_rejections;
  }
  std::cerr << "trials=" << records.size() << " success=" << success << " failure=" << failure
            << " wrong_accept=" << wrong << '\n';
  if (true_rejections != 0) {
    throw qlwe::Error(qlwe::ErrorCode::InvariantViolation, "a true coordinate value was rejected by the test");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for the divide-and-conquer quantum LWE algorithm"};
  app.require_subcommand(1);

  ConfigFlags solve_flags, sweep_flags, bounds_flags;
  std::string format = "csv", out_path = "-";

  auto* solve_cmd = app.add_subcommand("solve", "run trials at a single parameter point");
  solve_flags.attach(solve_cmd, false);
  solve_cmd->add_option("--format", format, "csv|json");
  solve_cmd->add_option("--out", out_path, "output path ('-' for stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "run trials over a parameter grid");
  sweep_flags.attach(sweep_cmd, true);
  sweep_cmd->add_option("--format", format, "csv|json");
  sweep_cmd->add_option("--out", out_path, "output path ('-' for stdout)");

  auto* bounds_cmd = app.add_subcommand("bounds", "exact success probability vs. lower bound tables");
  bounds_flags.attach(bounds_cmd, true);
  bounds_cmd->add_option("--out", out_path, "output path ('-' for stdout)");

  std::uint64_t qram_q = 401;
  std::size_t qram_n = 8, qram_d = 1;
  auto* qram_cmd = app.add_subcommand("qram-cost", "QRAM call cost for full vs. divided samples");
  qram_cmd->add_option("--q", qram_q, "field order")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 62));
  qram_cmd->add_option("--n", qram_n, "problem length");
  qram_cmd->add_option("--d", qram_d, "memory array dimension")->check(CLI::PositiveNumber);

  std::uint64_t selftest_seed = 20240601;
  auto* selftest_cmd = app.add_subcommand("selftest", "structural invariant suite");
  selftest_cmd->add_option("--seed", selftest_seed, "seed");

  std::size_t inst_n = 4, inst_samples = 0;
  std::uint64_t inst_q = 101, inst_seed = 1;
  std::int64_t inst_xi = 1;
  std::string inst_kind = "uniform", inst_out, inst_secret;
  auto* inst_cmd = app.add_subcommand("instance", "write an LWE instance file and its secret sidecar");
  inst_cmd->add_option("--n", inst_n, "problem length");
  inst_cmd->add_option("--q", inst_q, "prime modulus");
  inst_cmd->add_option("--xi", inst_xi, "error bound");
  inst_cmd->add_option("--chi", inst_kind, "uniform|gaussian");
  inst_cmd->add_option("--seed", inst_seed, "seed");
  inst_cmd->add_option("--samples", inst_samples, "number of samples (default n)");
  inst_cmd->add_option("--out", inst_out, "instance file")->required();
  inst_cmd->add_option("--secret", inst_secret, "secret sidecar file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve_cmd->parsed() || sweep_cmd->parsed()) {
      const bool sweeping = sweep_cmd->parsed();
      const auto config = sweeping ? sweep_flags.build(sweep_cmd) : solve_flags.build(solve_cmd);
      const auto fmt = qlwe::parse_format(format);
      for (const auto& point : qlwe::expand_sweep(config)) {
        for (const auto& note : qlwe::feasibility_warnings(point)) std::cerr << "note: " << note << '\n';
      }
      const auto records = qlwe::run_experiment(config);
      qlwe::emit(records, fmt, out_path);
      print_summary(records);
    } else if (bounds_cmd->parsed()) {
      const auto rows = qlwe::report_bounds(bounds_flags.build(bounds_cmd));
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (out_path != "-") {
        file.open(out_path);
        if (!file) throw qlwe::Error(qlwe::ErrorCode::IoError, "cannot open '" + out_path + "'");
        out = &file;
      }
      qlwe::write_bounds_csv(*out, rows);
      for (const auto& r : rows) {
        if (r.violated) {
          throw qlwe::Error(qlwe::ErrorCode::InvariantViolation,
                            "lower bound violated at q=" + std::to_string(r.q) +
                                " xi'=" + std::to_string(r.xi_prime) + " gamma=" + qlwe::format_number(r.gamma) +
                                " |v|=" + std::to_string(r.batch_size));
        }
      }
    } else if (qram_cmd->parsed()) {
      using qlwe::QramScheme, qlwe::SampleForm;
      std::cout << "form,scheme,cost\n";
      for (auto form : {SampleForm::Full, SampleForm::Divided}) {
        for (auto scheme : {QramScheme::Primitive, QramScheme::BucketBrigade}) {
          std::cout << (form == SampleForm::Full ? "full" : "divided") << ','
                    << (scheme == QramScheme::Primitive ? "primitive" : "bucket_brigade") << ','
                    << qlwe::format_number(qlwe::qram_cost(qram_q, qram_n, qram_d, scheme, form)) << '\n';
        }
      }
    } else if (selftest_cmd->parsed()) {
      const bool ok = qlwe::print_selftest(std::cout, qlwe::run_selftest(selftest_seed));
      return ok ? kExitOk : kExitInvariant;
    } else if (inst_cmd->parsed()) {
      qlwe::Rng rng(inst_seed);
      const qlwe::ErrorDistribution chi{qlwe::parse_error_kind(inst_kind), inst_xi, 0.0};
      const auto instance = qlwe::make_instance(inst_n, inst_q, chi, rng);
      std::vector<qlwe::Sample> samples;
      const std::size_t count = inst_samples == 0 ? inst_n : inst_samples;
      for (std::size_t i = 0; i < count; ++i) samples.push_back(qlwe::gen_sample(instance, rng));
      std::ofstream out(inst_out), secret(inst_secret);
      if (!out || !secret) throw qlwe::Error(qlwe::ErrorCode::IoError, "cannot open output files");
      qlwe::write_instance(out, instance, samples, inst_seed);
      qlwe::write_secret(secret, instance);
    }
  } catch (const qlwe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOk;
}
