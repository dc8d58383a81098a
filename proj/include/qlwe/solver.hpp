#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlwe/instance.hpp"
#include "qlwe/reduce.hpp"
#include "qlwe/rng.hpp"

// The full algorithm: per-coordinate kernel shots with an M-trial test and a
// retry budget L, parameter selection and outcome classification.
namespace qlwe {

struct SolveParameters {
  double gamma = 0.125;
  std::size_t L = 1;  // retry budget per coordinate
  std::size_t M = 1;  // test trials per candidate
  std::int64_t xi_prime = 0;
  double C = 0.0;  // gamma cos^2(2 pi gamma)
};

double c_factor(double gamma);

// Retry budget L = ceil((xi'/C) ln(n/delta)), from (1 - C/xi')^L ~ delta/n.
// For xi' = 0 the per-shot success is 1 - 1/q and L = ceil(ln(n/delta) / ln q).
// M is the smallest value with L ((2 xi' + 1)/q)^M <= delta/n.
// Throws InvalidArgument on out-of-range inputs, BoundTooLarge unless
// 2 kappa xi < q, InfeasibleParameters when L would exceed q or no M <= 64 works.
SolveParameters choose_parameters(std::size_t n, std::uint64_t q, std::int64_t xi, std::int64_t kappa, double delta,
                                  double gamma);

// The two halves of choose_parameters, without its feasibility checks.
std::size_t required_retry_budget(std::size_t n, std::uint64_t q, std::int64_t xi_prime, double delta, double gamma);
// Smallest M in [1, 64] with L ((2 xi' + 1)/q)^M <= delta/n, or 0 if none.
std::size_t required_test_trials(std::size_t n, std::uint64_t q, std::int64_t xi_prime, std::size_t L, double delta);

enum class KernelBackend {
  Sampled,  // draw outcomes from the exact distribution, O(q |v|) per shot
  Dense,    // build the q^2 statevector and apply both DFTs, O(q^3) per shot
};

enum class Mode { Elimination, Controlled };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct SolverOptions {
  KernelBackend backend = KernelBackend::Sampled;
  // Skip re-testing a candidate already rejected at this coordinate. The
  // analysed process re-tests, so this stays off by default.
  bool dedup_candidates = false;
  std::size_t batch_size = 0;  // |v_j|; 0 means q
};

struct CoordinateReport {
  std::size_t shots = 0;  // quantum samples consumed
  std::size_t nulls = 0;  // k_star == 0 outcomes
  std::size_t candidates_tested = 0;
  std::size_t rejections = 0;
  std::size_t test_pairs_used = 0;
  std::optional<std::uint64_t> accepted;
  std::vector<std::uint64_t> rejected_candidates;
};

// Runs up to L shots at coordinate j; returns the first accepted candidate.
CoordinateReport solve_coordinate(std::size_t j, BatchSource& batches, TestSource& tests,
                                  const SolveParameters& params, Rng& rng, const SolverOptions& options = {});

enum class OutcomeClass { Success, Failure, WrongAccept };

std::string to_string(OutcomeClass cls);
OutcomeClass parse_outcome(const std::string& text);

struct SolveOutcome {
  OutcomeClass cls = OutcomeClass::Failure;
  std::optional<FieldVector> returned_s;
  std::vector<CoordinateReport> per_coordinate;

  std::size_t quantum_samples() const noexcept;
  std::size_t test_samples() const noexcept;
  std::size_t candidates_tested() const noexcept;
  std::size_t nulls() const noexcept;
  std::size_t rejections() const noexcept;
};

// Success when returned == truth, WrongAccept when it differs, Failure when absent.
OutcomeClass classify(const std::optional<FieldVector>& returned, const FieldVector& truth);

// The pair source a solve uses for one coordinate. In controlled mode the
// pairs' errors follow chi's kind with bound xi' (a user sigma is scaled by
// xi'/xi); in elimination mode they come from the instance directly.
std::unique_ptr<PairSource> make_source(const LweInstance& instance, Mode mode, std::int64_t xi_prime,
                                        std::size_t batch_size, std::uint64_t seed);

// Coordinates run in order with RNG streams derived from (seed, j), so the
// result does not depend on scheduling. Stops at the first null coordinate.
// The instance secret is read only to classify the outcome and to let the
// source synthesize pairs.
SolveOutcome solve(const LweInstance& instance, Mode mode, const SolveParameters& params, std::uint64_t seed,
                   const SolverOptions& options = {});

}  // namespace qlwe
