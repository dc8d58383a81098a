#include "qlwe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qlwe/qsim.hpp"
#include "qlwe/verify.hpp"

namespace qlwe {

double c_factor(double gamma) {
  const double c = std::cos(2.0 * std::numbers::pi * gamma);
  return gamma * c * c;
}

SolveParameters choose_parameters(std::size_t n, std::uint64_t q, std::int64_t xi, std::int64_t kappa, double delta,
                                  double gamma) {
  if (n == 0) throw Error(ErrorCode::InvalidLength, "n must be at least 1");
  if (!(gamma > 0.0 && gamma < 0.25)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1/4)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  if (xi < 0 || kappa < 1) throw Error(ErrorCode::InvalidArgument, "need xi >= 0 and kappa >= 1");
  const Modulus modulus(q);
  const std::int64_t xi_prime = kappa * xi;
  if (2 * static_cast<std::uint64_t>(xi_prime) >= q) {
    throw Error(ErrorCode::BoundTooLarge, "kappa*xi=" + std::to_string(xi_prime) + " must be below q/2");
  }

  SolveParameters p;
  p.gamma = gamma;
  p.xi_prime = xi_prime;
  p.C = c_factor(gamma);
  const std::size_t required = required_retry_budget(n, q, xi_prime, delta, gamma);
  if (required > q) {
    throw Error(ErrorCode::InfeasibleParameters,
                "retry budget L=" + std::to_string(required) + " exceeds q=" + std::to_string(q));
  }
  p.L = std::max<std::size_t>(1, required);
  p.M = required_test_trials(n, q, xi_prime, p.L, delta);
  if (p.M == 0) throw Error(ErrorCode::InfeasibleParameters, "no M <= 64 drives L ((2xi'+1)/q)^M below delta/n");
  return p;
}

std::size_t required_retry_budget(std::size_t n, std::uint64_t q, std::int64_t xi_prime, double delta, double gamma) {
  const double log_term = std::log(static_cast<double>(n) / delta);
  double required = 0.0;
  if (xi_prime > 0) {
    required = std::ceil(static_cast<double>(xi_prime) / c_factor(gamma) * log_term);
  } else {
    required = std::ceil(log_term / std::log(static_cast<double>(q)));
  }
  return static_cast<std::size_t>(std::clamp(required, 0.0, 1e18));
}

std::size_t required_test_trials(std::size_t n, std::uint64_t q, std::int64_t xi_prime, std::size_t L, double delta) {
  const double per_trial = (2.0 * static_cast<double>(xi_prime) + 1.0) / static_cast<double>(q);
  const double target = delta / static_cast<double>(n);
  for (std::size_t m = 1; m <= 64; ++m) {
    if (static_cast<double>(L) * std::pow(per_trial, static_cast<double>(m)) <= target) return m;
  }
  return 0;
}

std::string to_string(Mode mode) { return mode == Mode::Controlled ? "controlled" : "elimination"; }

Mode parse_mode(const std::string& text) {
  if (text == "controlled") return Mode::Controlled;
  if (text == "elimination") return Mode::Elimination;
  throw Error(ErrorCode::ParseError, "unknown mode '" + text + "' (expected controlled|elimination)");
}

std::string to_string(OutcomeClass cls) {
  switch (cls) {
    case OutcomeClass::Success: return "success";
    case OutcomeClass::Failure: return "failure";
    case OutcomeClass::WrongAccept: return "wrong_accept";
  }
  return "failure";
}

OutcomeClass parse_outcome(const std::string& text) {
  if (text == "success") return OutcomeClass::Success;
  if (text == "failure") return OutcomeClass::Failure;
  if (text == "wrong_accept") return OutcomeClass::WrongAccept;
  throw Error(ErrorCode::ParseError, "unknown outcome '" + text + "'");
}

CoordinateReport solve_coordinate(std::size_t j, BatchSource& batches, TestSource& tests,
                                  const SolveParameters& params, Rng& rng, const SolverOptions& options) {
  CoordinateReport report;
  std::optional<RootTable> roots;
  for (std::size_t attempt = 0; attempt < params.L; ++attempt) {
    const ReducedBatch batch = batches.next_batch(j);
    const Modulus& q = batch.modulus;
    ++report.shots;

    MeasurementOutcome outcome;
    if (options.backend == KernelBackend::Dense) {
      outcome = measure(bv_kernel(prepare_sample_state(batch)), rng);
    } else {
      if (!roots || roots->size() != q.value()) roots.emplace(q.value());
      outcome = sample_kernel_outcome(batch, *roots, rng);
    }

    const auto candidate = extract_candidate(outcome, q);
    if (!candidate) {
      ++report.nulls;
      continue;
    }
    if (options.dedup_candidates &&
        std::find(report.rejected_candidates.begin(), report.rejected_candidates.end(), *candidate) !=
            report.rejected_candidates.end()) {
      continue;
    }
    ++report.candidates_tested;
    const TestVerdict verdict = m_trial_test(*candidate, params.M, params.xi_prime, tests, j, q);
    report.test_pairs_used += verdict.trials_used;
    if (verdict.accepted) {
      report.accepted = *candidate;
      return report;
    }
    ++report.rejections;
    report.rejected_candidates.push_back(*candidate);
  }
  return report;
}

std::size_t SolveOutcome::quantum_samples() const noexcept {
  std::size_t total = 0;
  for (const auto& c : per_coordinate) total += c.shots;
  return total;
}

std::size_t SolveOutcome::test_samples() const noexcept {
  std::size_t total = 0;
  for (const auto& c : per_coordinate) total += c.test_pairs_used;
  return total;
}

std::size_t SolveOutcome::candidates_tested() const noexcept {
  std::size_t total = 0;
  for (const auto& c : per_coordinate) total += c.candidates_tested;
  return total;
}

std::size_t SolveOutcome::nulls() const noexcept {
  std::size_t total = 0;
  for (const auto& c : per_coordinate) total += c.nulls;
  return total;
}

std::size_t SolveOutcome::rejections() const noexcept {
  std::size_t total = 0;
  for (const auto& c : per_coordinate) total += c.rejections;
  return total;
}

OutcomeClass classify(const std::optional<FieldVector>& returned, const FieldVector& truth) {
  if (!returned) return OutcomeClass::Failure;
  return *returned == truth ? OutcomeClass::Success : OutcomeClass::WrongAccept;
}

std::unique_ptr<PairSource> make_source(const LweInstance& instance, Mode mode, std::int64_t xi_prime,
                                        std::size_t batch_size, std::uint64_t seed) {
  const SourceLimits limits{batch_size};
  if (mode == Mode::Elimination) {
    return std::make_unique<EliminationSource>(instance, xi_prime, limits, seed);
  }
  ErrorDistribution chi_prime = instance.chi();
  const std::int64_t xi = chi_prime.bound;
  if (chi_prime.sigma > 0.0 && xi > 0) chi_prime.sigma *= static_cast<double>(xi_prime) / static_cast<double>(xi);
  chi_prime.bound = xi_prime;
  return std::make_unique<ControlledSource>(instance.modulus(), instance.secret(), chi_prime, xi, limits, seed);
}

SolveOutcome solve(const LweInstance& instance, Mode mode, const SolveParameters& params, std::uint64_t seed,
                   const SolverOptions& options) {
  SolveOutcome outcome;
  FieldVector found;
  found.reserve(instance.n());
  for (std::size_t j = 0; j < instance.n(); ++j) {
    Rng rng(derive_seed(seed, j, 0));
    auto source = make_source(instance, mode, params.xi_prime, options.batch_size, derive_seed(seed, j, 1));
    CoordinateReport report = solve_coordinate(j, *source, *source, params, rng, options);
    const bool accepted = report.accepted.has_value();
    if (accepted) found.push_back(*report.accepted);
    outcome.per_coordinate.push_back(std::move(report));
    if (!accepted) break;
  }
  if (found.size() == instance.n()) outcome.returned_s = std::move(found);
  outcome.cls = classify(outcome.returned_s, instance.secret());
  return outcome;
}

}  // namespace qlwe
