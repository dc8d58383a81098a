#include "qlwe/oracle.hpp"

#include <cmath>
#include <numbers>

#include "qlwe/qsim.hpp"
#include "qlwe/verify.hpp"

namespace qlwe {

namespace {

// Histogram of eta' residues: (residue, count) for every residue that occurs.
std::vector<std::pair<std::uint64_t, double>> error_histogram(const ReducedBatch& batch) {
  const Modulus& q = batch.modulus;
  std::vector<double> counts(q.value(), 0.0);
  for (const auto& p : batch.pairs) counts[q.reduce(p.eta_prime)] += 1.0;
  std::vector<std::pair<std::uint64_t, double>> hist;
  for (std::uint64_t r = 0; r < q.value(); ++r) {
    if (counts[r] > 0.0) hist.emplace_back(r, counts[r]);
  }
  return hist;
}

}  // namespace

double exact_success_probability(const ReducedBatch& batch) {
  const Modulus& q = batch.modulus;
  const std::uint64_t dim = q.value();
  if (batch.pairs.empty()) throw Error(ErrorCode::InvalidLength, "empty batch");
  const RootTable roots(dim);
  const auto hist = error_histogram(batch);
  double total = 0.0;
  for (std::uint64_t k = 0; k < dim; ++k) {
    Amplitude inner = 0.0;
    for (const auto& [residue, count] : hist) inner += count * roots[q.mul(residue, k)];
    total += std::norm(inner);
  }
  const double qd = static_cast<double>(dim);
  return total / (qd * qd * static_cast<double>(batch.pairs.size()));
}

double exact_candidate_probability(const ReducedBatch& batch) {
  const double qd = static_cast<double>(batch.modulus.value());
  return exact_success_probability(batch) - static_cast<double>(batch.pairs.size()) / (qd * qd);
}

double lower_bound_p(double gamma, std::size_t batch_size, std::int64_t xi_prime, std::uint64_t q) {
  if (!(gamma >= 0.0 && gamma < 0.25)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1/4)");
  if (xi_prime <= 0) throw Error(ErrorCode::InvalidArgument, "the bound needs xi' >= 1");
  if (q == 0) throw Error(ErrorCode::InvalidArgument, "q must be positive");
  const double c = std::cos(2.0 * std::numbers::pi * gamma);
  return gamma * static_cast<double>(batch_size) * c * c / (static_cast<double>(xi_prime) * static_cast<double>(q));
}

BoundReport bound_report(const ReducedBatch& batch, double gamma) {
  const Modulus& q = batch.modulus;
  const std::uint64_t dim = q.value();
  const double qd = static_cast<double>(dim);
  const double size = static_cast<double>(batch.pairs.size());

  BoundReport r;
  r.gamma_used = gamma;
  r.q = dim;
  r.xi_prime = batch.xi_prime;
  r.batch_size = batch.pairs.size();
  r.exact_p = exact_success_probability(batch);
  r.lower_bound = lower_bound_p(gamma, batch.pairs.size(), batch.xi_prime, dim);

  const RootTable roots(dim);
  const auto hist = error_histogram(batch);
  const auto cutoff = static_cast<std::uint64_t>(std::floor(gamma * qd / static_cast<double>(batch.xi_prime)));
  const double norm = 1.0 / (qd * qd * size);
  for (std::uint64_t k = 0; k < dim; ++k) {
    double re = 0.0;
    for (const auto& [residue, count] : hist) re += count * roots[q.mul(residue, k)].real();
    const double term = re * re * norm;
    r.re_part_sum += term;
    if (k <= cutoff) r.restricted_sum += term;
  }
  constexpr double tol = 1e-10;
  r.violated = r.exact_p < r.lower_bound - tol;
  r.chain_violated = r.exact_p < r.re_part_sum - tol || r.re_part_sum < r.restricted_sum - tol ||
                     r.restricted_sum < r.lower_bound - tol;
  return r;
}

ProbIIIBound prob_iii_bound(std::size_t L, double kappa, double alpha, std::size_t trials, std::uint64_t q) {
  if (q == 0 || kappa < 0.0 || alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "parameters must be positive");
  const double m = static_cast<double>(trials);
  const double qd = static_cast<double>(q);
  const double per_trial = (2.0 * kappa * alpha * qd + 1.0) / qd;
  return {static_cast<double>(L) * std::pow(2.0 * kappa * alpha, m), static_cast<double>(L) * std::pow(per_trial, m)};
}

double prob_i_bound(double delta, std::size_t n) {
  if (n == 0 || !(delta >= 0.0 && delta < static_cast<double>(n))) {
    throw Error(ErrorCode::InvalidArgument, "need 0 <= delta < n");
  }
  return std::pow(1.0 - delta / static_cast<double>(n), static_cast<double>(n));
}

std::vector<double> error_pmf(const ErrorDistribution& chi) {
  const std::size_t width = static_cast<std::size_t>(2 * chi.bound + 1);
  std::vector<double> pmf(width, 0.0);
  if (chi.kind == ErrorKind::UniformBounded || chi.bound == 0) {
    for (auto& p : pmf) p = 1.0 / static_cast<double>(width);
    return pmf;
  }
  const double s = chi.effective_sigma();
  double total = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    const double x = static_cast<double>(static_cast<std::int64_t>(i) - chi.bound);
    pmf[i] = std::exp(-x * x / (2.0 * s * s));
    total += pmf[i];
  }
  for (auto& p : pmf) p /= total;
  return pmf;
}

SolveOutcome classical_baseline_solve(const LweInstance& instance, Mode mode, const SolveParameters& params,
                                      std::size_t trial_budget, std::uint64_t seed) {
  const Modulus& q = instance.modulus();
  SolveOutcome outcome;
  FieldVector found;
  for (std::size_t j = 0; j < instance.n(); ++j) {
    auto source = make_source(instance, mode, params.xi_prime, 0, derive_seed(seed, j, 1));
    CoordinateReport report;
    for (std::size_t attempt = 0; attempt < trial_budget; ++attempt) {
      const ReducedPair pair = source->next_direct_pair(j);
      ++report.shots;
      const std::uint64_t candidate = q.mul(pair.b_prime, q.inv(pair.a_prime));
      ++report.candidates_tested;
      const TestVerdict verdict = m_trial_test(candidate, params.M, params.xi_prime, *source, j, q);
      report.test_pairs_used += verdict.trials_used;
      if (verdict.accepted) {
        report.accepted = candidate;
        break;
      }
      ++report.rejections;
      report.rejected_candidates.push_back(candidate);
    }
    const bool accepted = report.accepted.has_value();
    if (accepted) found.push_back(*report.accepted);
    outcome.per_coordinate.push_back(std::move(report));
    if (!accepted) break;
  }
  if (found.size() == instance.n()) outcome.returned_s = std::move(found);
  outcome.cls = classify(outcome.returned_s, instance.secret());
  return outcome;
}

double baseline_success_probability(const ErrorDistribution& chi_prime, std::size_t n) {
  const auto pmf = error_pmf(chi_prime);
  return std::pow(pmf[static_cast<std::size_t>(chi_prime.bound)], static_cast<double>(n));
}

double qram_cost(std::uint64_t q, std::size_t n, std::size_t d, QramScheme scheme, SampleForm form) {
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "memory array dimension d must be at least 1");
  if (q < 2) throw Error(ErrorCode::InvalidArgument, "q must be at least 2");
  const double qd = static_cast<double>(q);
  const double log_q = std::log2(qd);
  if (form == SampleForm::Full) {
    return scheme == QramScheme::Primitive ? std::pow(qd, static_cast<double>(n) / static_cast<double>(d))
                                           : static_cast<double>(n) * log_q;
  }
  return scheme == QramScheme::Primitive ? std::pow(qd, 1.0 / static_cast<double>(d)) : log_q;
}

}  // namespace qlwe
