#include <cmath>

#include "doctest.h"
#include "qlwe/verify.hpp"

using namespace qlwe;

TEST_CASE("delta examples") {
  const Modulus q(17);
  const ReducedPair pair{4, 14, 2, 0};
  CHECK(delta(pair, 3, q) == 2);
  CHECK(delta(pair, 5, q) == 6);
  CHECK(delta({4, 12, 0, 0}, 3, q) == 0);
}

TEST_CASE("delta rejects t = 0") {
  try {
    (void)delta({0, 5, 0, 0}, 1, Modulus(7));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateTest);
  }
}

TEST_CASE("delta is unchanged by adding q to any operand") {
  const Modulus q(31);
  Rng rng(50);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t t = 1 + uniform_below(rng, 30);
    const std::uint64_t b = uniform_below(rng, 31);
    const std::uint64_t s = uniform_below(rng, 31);
    const std::uint64_t base = delta({t, b, 0, 0}, s, q);
    CHECK(delta({t + 31, b, 0, 0}, s, q) == base);
    CHECK(delta({t, b + 31, 0, 0}, s, q) == base);
    CHECK(delta({t, b, 0, 0}, s + 31, q) == base);
    CHECK(base <= 15);
  }
}

TEST_CASE("m_trial_test argument and exhaustion errors") {
  const Modulus q(7);
  FixedTestSource empty({});
  try {
    (void)m_trial_test(1, 0, 1, empty, 0, q);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  FixedTestSource short_source({{1, 1, 0, 0}});
  try {
    (void)m_trial_test(1, 2, 1, short_source, 0, q);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TestSourceExhausted);
  }
}

TEST_CASE("m_trial_test stops at the first violation") {
  const Modulus q(17);
  // s_j = 3: pairs (4, 14) has eta' 2, (1, 3) has eta' 0, (2, 6) has eta' 0.
  FixedTestSource source({{4, 14, 2, 0}, {1, 3, 0, 0}, {2, 6, 0, 0}});
  const TestVerdict v = m_trial_test(5, 3, 2, source, 0, q);
  CHECK_FALSE(v.accepted);
  CHECK(v.trials_used == 1);
  REQUIRE(v.deltas.size() == 1);
  CHECK(v.deltas[0] == 6);
  // The remaining pairs are still available.
  CHECK(m_trial_test(3, 2, 0, source, 0, q).accepted);
}

TEST_CASE("the true value is always accepted") {
  const Modulus q(101);
  const FieldVector secret{17, 0, 88};
  for (auto chi : {ErrorDistribution::uniform(4), ErrorDistribution::gaussian(4)}) {
    ControlledSource source(q, secret, chi, 1, {}, 51);
    for (int run = 0; run < 2000; ++run) {
      const std::size_t j = run % 3;
      const TestVerdict v = m_trial_test(secret[j], 5, 4, source, j, q);
      REQUIRE(v.accepted);
      CHECK(v.trials_used == 5);
      for (auto d : v.deltas) CHECK(d <= 4);
    }
  }
}

TEST_CASE("single-trial pass rate for a wrong candidate matches the exhaustive count") {
  for (std::uint64_t qv : {31u, 101u}) {
    const Modulus q(qv);
    const std::int64_t xi_prime = 3;
    const std::uint64_t s = 7, wrong = 12;
    // Exhaustive over uniform nonzero t and uniform eta' in [-xi', xi'].
    double pass = 0.0, total = 0.0;
    for (std::uint64_t t = 1; t < qv; ++t) {
      for (std::int64_t eta = -xi_prime; eta <= xi_prime; ++eta) {
        const std::int64_t c = q.centered(q.add(q.mul(t, q.sub(s, wrong)), q.reduce(eta)));
        pass += std::abs(c) <= xi_prime;
        total += 1.0;
      }
    }
    const double exact = pass / total;
    CHECK(exact <= (2.0 * xi_prime + 1.0) / (qv - 1.0));
    CHECK(exact <= (2.0 * xi_prime + 1.0) / qv);

    ControlledSource source(q, {s}, ErrorDistribution::uniform(xi_prime), 1, {}, 52);
    constexpr int kRuns = 100000;
    int accepted = 0;
    for (int i = 0; i < kRuns; ++i) accepted += m_trial_test(wrong, 1, xi_prime, source, 0, q).accepted;
    const double rate = double(accepted) / kRuns;
    CHECK(std::abs(rate - exact) < 3.0 * std::sqrt(exact * (1 - exact) / kRuns));
  }
}

TEST_CASE("M fresh trials multiply the pass rate") {
  const Modulus q(31);
  const std::int64_t xi_prime = 2;
  ControlledSource source(q, {9}, ErrorDistribution::uniform(xi_prime), 1, {}, 53);
  // A wrong candidate passes a fresh trial with probability 2 xi' / (q - 1).
  const double single = 2.0 * xi_prime / 30.0;
  const double expected = single * single;
  constexpr int kRuns = 100000;
  int accepted = 0;
  for (int i = 0; i < kRuns; ++i) accepted += m_trial_test(20, 2, xi_prime, source, 0, q).accepted;
  CHECK(std::abs(double(accepted) / kRuns - expected) < 3.0 * std::sqrt(expected * (1 - expected) / kRuns));
}

TEST_CASE("false_accept_probability examples") {
  // xi' = kappa alpha q = 1 with q = 7.
  const auto p = false_accept_probability(1.0, 1.0 / 7.0, 7, 1);
  CHECK(p.exact == doctest::Approx(3.0 / 7.0));
  CHECK(p.approx == doctest::Approx(2.0 / 7.0));

  for (std::size_t m : {1u, 2u, 5u}) {
    CHECK(false_accept_probability(0.0, 0.01, 101, m).exact == doctest::Approx(std::pow(1.0 / 101, double(m))));
  }
  // 2 kappa alpha = 0.1.
  CHECK(false_accept_probability(5.0, 0.01, 1000, 3).approx == doctest::Approx(1e-3));

  CHECK_THROWS_AS(false_accept_probability(1.0, 0.5, 7, 1), Error);
}
