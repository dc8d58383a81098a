#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qlwe/fq.hpp"
#include "qlwe/reduce.hpp"

// The M-trial acceptance test on deterministic test pairs.
namespace qlwe {

struct TestVerdict {
  bool accepted = false;
  std::size_t trials_used = 0;
  std::vector<std::uint64_t> deltas;
};

// |centered(b' - t s~)|. Throws DegenerateTest when t == 0.
std::uint64_t delta(const ReducedPair& test_pair, std::uint64_t s_tilde, const Modulus& q);

// Accepts iff delta <= xi' on M consecutive fresh pairs; stops at the first
// violation. Throws InvalidArgument for M == 0 and TestSourceExhausted when
// the source runs dry before a verdict.
TestVerdict m_trial_test(std::uint64_t s_tilde, std::size_t trials, std::int64_t xi_prime, TestSource& source,
                         std::size_t j, const Modulus& q);

struct FalseAcceptProbability {
  double exact = 0.0;   // ((2 xi' + 1) / q)^M with xi' = kappa alpha q
  double approx = 0.0;  // (2 kappa alpha)^M
};

// Throws InvalidArgument unless 2 kappa alpha + 1/q <= 1.
FalseAcceptProbability false_accept_probability(double kappa, double alpha, std::uint64_t q, std::size_t trials);

}  // namespace qlwe
