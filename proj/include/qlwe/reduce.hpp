#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qlwe/fq.hpp"
#include "qlwe/instance.hpp"
#include "qlwe/rng.hpp"

// Divide-and-conquer preprocessing: collapse n-dimensional samples onto one
// secret coordinate, plus the sources that feed the solver.
namespace qlwe {

// (a', b' = a' s_j + eta') for one coordinate. eta_prime is ground truth kept
// for the harness; coeff_l1 is the L1 norm of the centered combination
// coefficients that produced the pair (0 for synthesized pairs).
struct ReducedPair {
  std::uint64_t a_prime = 0;
  std::uint64_t b_prime = 0;
  CenteredInt eta_prime = 0;
  std::uint64_t coeff_l1 = 0;

  // a' == 0 carries no information about s_j.
  bool degenerate() const noexcept { return a_prime == 0; }
};

struct ReducedBatch {
  std::size_t j = 0;
  Modulus modulus;
  std::vector<ReducedPair> pairs;
  std::int64_t xi_prime = 0;
  double kappa = 1.0;
};

// Combines the n samples with c = a_target * (row j of A^-1), so that
// c.A = a_target e_j. b' = c.b and eta' = centered(b' - a_target s_j).
// Throws SingularMatrix when the sample vectors are dependent.
ReducedPair reduce_to_coordinate(std::span<const Sample> samples, const Modulus& q, std::size_t j,
                                 std::uint64_t a_target, std::uint64_t s_j);

// Deterministic test pair (t, t s_j + eta') through the same elimination path.
// t_target == 0 yields a pair flagged degenerate().
ReducedPair make_test_sample(std::span<const Sample> samples, const Modulus& q, std::size_t j,
                             std::uint64_t t_target, std::uint64_t s_j);

// Controlled mode: one pair per a' in v_j, each with its own error drawn from
// chi_prime. kappa is recorded as xi_prime / raw_xi (1 when raw_xi == 0).
// Throws BoundTooLarge if 2 xi_prime >= q, DuplicateInput on repeated a',
// InvalidLength on empty v_j.
ReducedBatch synth_reduced_batch(std::size_t j, std::uint64_t s_j, const Modulus& q,
                                 std::span<const std::uint64_t> v_j, std::int64_t xi_prime,
                                 const ErrorDistribution& chi_prime, std::int64_t raw_xi, Rng& rng);

// Largest coeff_l1 in the batch.
std::uint64_t kappa_observed(const ReducedBatch& batch);

// Debug dump, one line per pair: `a_prime b_prime eta_prime coeff_l1`.
void dump_batch(std::ostream& out, const ReducedBatch& batch);

// A uniformly random subset of F_q of the given size, in increasing order.
// size == q returns all of F_q.
std::vector<std::uint64_t> random_support(const Modulus& q, std::size_t size, Rng& rng);

class BatchSource {
 public:
  virtual ~BatchSource() = default;
  // A fresh batch for one kernel shot.
  virtual ReducedBatch next_batch(std::size_t j) = 0;
  // A single pair with a' != 0, for the classical direct-candidate baseline.
  virtual ReducedPair next_direct_pair(std::size_t j) = 0;
};

class TestSource {
 public:
  virtual ~TestSource() = default;
  // Fresh test pair with t != 0, or nullopt once the source is exhausted.
  virtual std::optional<ReducedPair> next_test_pair(std::size_t j) = 0;
};

// Both roles from one underlying sample stream.
class PairSource : public BatchSource, public TestSource {};

// Serves a fixed list of test pairs in order.
class FixedTestSource : public TestSource {
 public:
  explicit FixedTestSource(std::vector<ReducedPair> pairs) : pairs_(std::move(pairs)) {}
  std::optional<ReducedPair> next_test_pair(std::size_t) override;

 private:
  std::vector<ReducedPair> pairs_;
  std::size_t next_ = 0;
};

struct SourceLimits {
  std::size_t batch_size = 0;  // 0 means |v_j| = q
  std::size_t max_test_pairs = static_cast<std::size_t>(-1);
};

// Synthesizes batches and test pairs whose errors honour |eta'| <= xi'.
class ControlledSource : public PairSource {
 public:
  ControlledSource(Modulus q, FieldVector secret, ErrorDistribution chi_prime, std::int64_t raw_xi,
                   SourceLimits limits, std::uint64_t seed);

  ReducedBatch next_batch(std::size_t j) override;
  ReducedPair next_direct_pair(std::size_t j) override;
  std::optional<ReducedPair> next_test_pair(std::size_t j) override;

 private:
  Modulus q_;
  FieldVector secret_;
  ErrorDistribution chi_prime_;
  std::int64_t raw_xi_;
  SourceLimits limits_;
  std::size_t tests_served_ = 0;
  Rng rng_;
};

// Builds every pair from n fresh LWE samples by elimination; errors and
// kappa fall out of the actual combination. The declared xi' is what the
// test uses; nothing guarantees |eta'| stays below it.
class EliminationSource : public PairSource {
 public:
  EliminationSource(const LweInstance& instance, std::int64_t declared_xi_prime, SourceLimits limits,
                    std::uint64_t seed);

  ReducedBatch next_batch(std::size_t j) override;
  ReducedPair next_direct_pair(std::size_t j) override;
  std::optional<ReducedPair> next_test_pair(std::size_t j) override;

  // Raw LWE samples consumed so far, including redraws after singular sets.
  std::size_t samples_consumed() const noexcept { return samples_consumed_; }

 private:
  ReducedPair pair_for(std::size_t j, std::uint64_t a_target);

  const LweInstance* instance_;
  std::int64_t declared_xi_prime_;
  SourceLimits limits_;
  std::size_t tests_served_ = 0;
  std::size_t samples_consumed_ = 0;
  Rng rng_;
};

}  // namespace qlwe
