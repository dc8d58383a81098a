#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qlwe/instance.hpp"
#include "qlwe/reduce.hpp"
#include "qlwe/solver.hpp"

// Exact analytic quantities and brute-force baselines used to check the
// simulator and the probability bounds.
namespace qlwe {

// P(s~ = s_j) = (1/(q^2 |v|)) sum_{k*} |sum_{a'} omega^{eta'(a') k*}|^2, from
// the batch's ground-truth errors. Includes the k* = 0 term, which the
// candidate extraction reports as a null outcome. Independent of s_j.
double exact_success_probability(const ReducedBatch& batch);

// exact_success_probability minus the k* = 0 term |v|/q^2: the chance a single
// shot yields the true s_j as a candidate.
double exact_candidate_probability(const ReducedBatch& batch);

// gamma |v| cos^2(2 pi gamma) / (xi' q). Throws InvalidArgument for
// xi' == 0 or gamma outside [0, 1/4).
double lower_bound_p(double gamma, std::size_t batch_size, std::int64_t xi_prime, std::uint64_t q);

// Every link of the bound chain for one batch:
// exact_p >= re_part_sum >= restricted_sum >= lower_bound, where re_part_sum
// replaces |z|^2 by Re(z)^2 and restricted_sum keeps only k* <= floor(gamma q / xi').
struct BoundReport {
  double exact_p = 0.0;
  double re_part_sum = 0.0;
  double restricted_sum = 0.0;
  double lower_bound = 0.0;
  double gamma_used = 0.0;
  std::uint64_t q = 0;
  std::int64_t xi_prime = 0;
  std::size_t batch_size = 0;
  bool violated = false;  // exact_p < lower_bound - 1e-10
  bool chain_violated = false;  // any link of the chain broken by more than 1e-10
};

BoundReport bound_report(const ReducedBatch& batch, double gamma);

struct ProbIIIBound {
  double asymptotic = 0.0;  // L (2 kappa alpha)^M
  double exact = 0.0;  // L ((2 xi' + 1)/q)^M with xi' = kappa alpha q
};

ProbIIIBound prob_iii_bound(std::size_t L, double kappa, double alpha, std::size_t trials, std::uint64_t q);

// (1 - delta/n)^n. Throws InvalidArgument unless 0 <= delta < n.
double prob_i_bound(double delta, std::size_t n);

// Probability mass of each error value -bound..bound under chi.
std::vector<double> error_pmf(const ErrorDistribution& chi);

// Classical direct-candidate baseline: per coordinate, s~ = b' / a' from a
// single reduced pair, then the M-trial test; up to trial_budget pairs per
// coordinate. quantum_samples() counts the pairs used (no kernel runs).
SolveOutcome classical_baseline_solve(const LweInstance& instance, Mode mode, const SolveParameters& params,
                                      std::size_t trial_budget, std::uint64_t seed);

// Success probability of the baseline with one pair per coordinate:
// P(eta' = 0)^n, since the true value is never rejected and any other
// candidate cannot be the secret.
double baseline_success_probability(const ErrorDistribution& chi_prime, std::size_t n);

enum class QramScheme { Primitive, BucketBrigade };
enum class SampleForm { Full, Divided };

// Call cost with unit big-O constants:
//   full:    q^(n/d) primitive, n log2 q bucket brigade
//   divided: q^(1/d) primitive, log2 q bucket brigade
// Throws InvalidArgument for d == 0.
double qram_cost(std::uint64_t q, std::size_t n, std::size_t d, QramScheme scheme, SampleForm form);

}  // namespace qlwe
