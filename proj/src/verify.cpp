#include "qlwe/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace qlwe {

std::uint64_t delta(const ReducedPair& test_pair, std::uint64_t s_tilde, const Modulus& q) {
  if (test_pair.a_prime % q.value() == 0) throw Error(ErrorCode::DegenerateTest, "test pair has t = 0");
  const std::uint64_t diff = q.sub(test_pair.b_prime % q.value(), q.mul(test_pair.a_prime % q.value(), s_tilde % q.value()));
  return static_cast<std::uint64_t>(std::abs(q.centered(diff)));
}

TestVerdict m_trial_test(std::uint64_t s_tilde, std::size_t trials, std::int64_t xi_prime, TestSource& source,
                         std::size_t j, const Modulus& q) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "M must be at least 1");
  TestVerdict verdict;
  verdict.deltas.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto pair = source.next_test_pair(j);
    if (!pair) {
      throw Error(ErrorCode::TestSourceExhausted,
                  "needed " + std::to_string(trials) + " test pairs, got " + std::to_string(i));
    }
    const std::uint64_t d = delta(*pair, s_tilde, q);
    verdict.deltas.push_back(d);
    ++verdict.trials_used;
    if (d > static_cast<std::uint64_t>(xi_prime)) return verdict;
  }
  verdict.accepted = true;
  return verdict;
}

FalseAcceptProbability false_accept_probability(double kappa, double alpha, std::uint64_t q, std::size_t trials) {
  const double qd = static_cast<double>(q);
  if (q == 0 || 2.0 * kappa * alpha + 1.0 / qd > 1.0 + 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "need 2 kappa alpha + 1/q <= 1");
  }
  const double xi_prime = kappa * alpha * qd;
  return {std::pow((2.0 * xi_prime + 1.0) / qd, static_cast<double>(trials)),
          std::pow(2.0 * kappa * alpha, static_cast<double>(trials))};
}

}  // namespace qlwe
