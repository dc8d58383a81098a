#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlwe/oracle.hpp"
#include "qlwe/qsim.hpp"

using namespace qlwe;

namespace {

ReducedBatch with_errors(std::uint64_t q, std::uint64_t s, const std::vector<std::uint64_t>& support,
                         const std::vector<CenteredInt>& eta, std::int64_t xi_prime) {
  const Modulus m(q);
  ReducedBatch batch{0, m, {}, xi_prime, 1.0};
  for (std::size_t i = 0; i < support.size(); ++i) {
    batch.pairs.push_back({support[i], m.add(m.mul(support[i], s), m.reduce(eta[i])), eta[i], 0});
  }
  return batch;
}

std::vector<std::uint64_t> all_of(std::uint64_t q) {
  std::vector<std::uint64_t> v(q);
  for (std::uint64_t a = 0; a < q; ++a) v[a] = a;
  return v;
}

// Probability that a shot lands on the secret line, summed over the full
// q x q grid of closed-form amplitudes in long double.
long double line_mass_oracle(const ReducedBatch& batch, std::uint64_t s) {
  const std::uint64_t q = batch.modulus.value();
  long double total = 0.0L;
  for (std::uint64_t ks = 0; ks < q; ++ks) {
    const std::uint64_t kd = (q - (s * ks) % q) % q;
    std::complex<long double> sum = 0;
    for (const auto& p : batch.pairs) {
      const std::uint64_t phase = (p.a_prime * kd + p.b_prime * ks) % q;
      sum += std::polar(1.0L, 2.0L * std::numbers::pi_v<long double> * phase / q);
    }
    total += std::norm(sum);
  }
  return total / (static_cast<long double>(q) * q * batch.pairs.size());
}

}  // namespace

TEST_CASE("exact success probability examples") {
  const ReducedBatch zero = with_errors(11, 4, all_of(11), std::vector<CenteredInt>(11, 0), 0);
  CHECK(exact_success_probability(zero) == doctest::Approx(1.0).epsilon(1e-12));

  const ReducedBatch constant = with_errors(7, 2, all_of(7), std::vector<CenteredInt>(7, 1), 1);
  CHECK(exact_success_probability(constant) == doctest::Approx(1.0).epsilon(1e-12));

  for (CenteredInt eta : {-3, 0, 2}) {
    const ReducedBatch single = with_errors(13, 5, {9}, {eta}, 3);
    CHECK(exact_success_probability(single) == doctest::Approx(1.0 / 13).epsilon(1e-12));
    CHECK(exact_candidate_probability(single) == doctest::Approx(1.0 / 13 - 1.0 / 169).epsilon(1e-12));
  }
}

TEST_CASE("exact success probability matches the simulator on the secret line") {
  Rng rng(60);
  for (std::uint64_t q : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 61u, 101u}) {
    const Modulus m(q);
    const int reps = q <= 31 ? 10 : 3;
    for (int rep = 0; rep < reps; ++rep) {
      const std::int64_t xi_prime = std::min<std::int64_t>(1 + rep % 3, (q - 1) / 2);
      const std::uint64_t s = uniform_below(rng, q);
      const ReducedBatch batch = synth_reduced_batch(0, s, m, random_support(m, 1 + uniform_below(rng, q), rng),
                                                     xi_prime, ErrorDistribution::uniform(xi_prime), 1, rng);
      const double exact = exact_success_probability(batch);
      CHECK(std::abs(exact - static_cast<double>(line_mass_oracle(batch, s))) < 1e-10);
      if (q <= 31) {
        const double simulated = secret_line_probability(bv_kernel(prepare_sample_state(batch)), s);
        CHECK(std::abs(exact - simulated) < 1e-10);
      }
      CHECK(exact >= 0.0);
      CHECK(exact <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("lower bound examples") {
  CHECK(lower_bound_p(0.0, 101, 2, 101) == 0.0);
  for (std::int64_t xi : {1, 2, 8}) CHECK(lower_bound_p(0.125, 401, xi, 401) == doctest::Approx(1.0 / (16.0 * xi)));
  CHECK(lower_bound_p(0.125, 50, 1, 100) == doctest::Approx(0.5 / 16));
  CHECK_THROWS_AS(lower_bound_p(0.125, 10, 0, 11), Error);
  CHECK_THROWS_AS(lower_bound_p(0.25, 10, 1, 11), Error);
  CHECK_THROWS_AS(lower_bound_p(-0.01, 10, 1, 11), Error);
}

TEST_CASE("the lower bound never exceeds the exact probability") {
  Rng rng(61);
  for (std::uint64_t q : {7u, 11u, 31u, 53u, 101u}) {
    const Modulus m(q);
    for (std::int64_t xi_prime : {1, 2, 4}) {
      if (2 * xi_prime >= std::int64_t(q)) continue;
      for (double gamma : {0.05, 0.1, 0.125, 0.2}) {
        for (int rep = 0; rep < 10; ++rep) {
          const auto chi = rep % 2 ? ErrorDistribution::uniform(xi_prime) : ErrorDistribution::gaussian(xi_prime);
          const ReducedBatch batch = synth_reduced_batch(0, uniform_below(rng, q), m,
                                                         random_support(m, 1 + uniform_below(rng, q), rng),
                                                         xi_prime, chi, 1, rng);
          const BoundReport r = bound_report(batch, gamma);
          INFO("q=" << q << " xi'=" << xi_prime << " gamma=" << gamma << " |v|=" << r.batch_size);
          CHECK_FALSE(r.violated);
          CHECK_FALSE(r.chain_violated);
          CHECK(r.exact_p >= r.re_part_sum - 1e-10);
          CHECK(r.re_part_sum >= r.restricted_sum - 1e-10);
          CHECK(r.restricted_sum >= r.lower_bound - 1e-10);
          CHECK(r.lower_bound == doctest::Approx(lower_bound_p(gamma, batch.pairs.size(), xi_prime, q)));
        }
      }
    }
  }
}

TEST_CASE("bound report flags a violation") {
  // Errors spread over the whole field break the premise |eta'| <= xi'.
  const std::uint64_t q = 11;
  std::vector<CenteredInt> eta;
  for (CenteredInt e = -5; e <= 5; ++e) eta.push_back(e);
  const ReducedBatch batch = with_errors(q, 3, all_of(q), eta, 1);
  const BoundReport r = bound_report(batch, 0.2);
  CHECK(r.exact_p == doctest::Approx(1.0 / 11));
  CHECK(r.lower_bound == doctest::Approx(lower_bound_p(0.2, 11, 1, 11)));
  CHECK(r.violated == (r.exact_p < r.lower_bound - 1e-10));
}

TEST_CASE("prob_iii bound examples and monotonicity") {
  // 2 kappa alpha = 0.1.
  const ProbIIIBound p = prob_iii_bound(100, 5.0, 0.01, 3, 1000);
  CHECK(p.asymptotic == doctest::Approx(0.1));
  // xi' = kappa alpha q = 50.
  CHECK(p.exact == doctest::Approx(100 * std::pow(101.0 / 1000, 3)));
  CHECK(prob_iii_bound(100, 5.0, 0.01, 60, 1000).asymptotic < 1e-50);

  for (std::size_t L : {1u, 10u, 100u}) {
    for (std::size_t m = 1; m < 10; ++m) {
      const auto a = prob_iii_bound(L, 2.0, 0.01, m, 401);
      const auto more_m = prob_iii_bound(L, 2.0, 0.01, m + 1, 401);
      const auto more_l = prob_iii_bound(L + 5, 2.0, 0.01, m, 401);
      CHECK(more_m.asymptotic < a.asymptotic);
      CHECK(more_m.exact < a.exact);
      CHECK(more_l.asymptotic > a.asymptotic);
      CHECK(more_l.exact > a.exact);
    }
  }
}

TEST_CASE("prob_i bound examples") {
  CHECK(prob_i_bound(0.0, 5) == 1.0);
  CHECK(prob_i_bound(0.1, 10) == doctest::Approx(0.904382).epsilon(1e-6));
  for (double delta : {0.01, 0.1, 0.2, 0.5, 0.9}) {
    for (std::size_t n : {1u, 2u, 4u, 16u, 128u}) CHECK(prob_i_bound(delta, n) >= 1.0 - delta - 1e-15);
  }
  CHECK_THROWS_AS(prob_i_bound(-0.1, 4), Error);
  CHECK_THROWS_AS(prob_i_bound(4.0, 4), Error);
}

TEST_CASE("error pmf") {
  const auto uniform = error_pmf(ErrorDistribution::uniform(2));
  REQUIRE(uniform.size() == 5);
  for (double p : uniform) CHECK(p == doctest::Approx(0.2));

  const auto gauss = error_pmf(ErrorDistribution::gaussian(3, 1.0));
  REQUIRE(gauss.size() == 7);
  double total = 0.0;
  for (double p : gauss) total += p;
  CHECK(total == doctest::Approx(1.0));
  CHECK(gauss[3] / gauss[4] == doctest::Approx(std::exp(0.5)));
  CHECK(gauss[2] == doctest::Approx(gauss[4]));

  CHECK(error_pmf(ErrorDistribution::uniform(0)) == std::vector<double>{1.0});
}

TEST_CASE("classical baseline on a noiseless instance always succeeds") {
  Rng rng(62);
  const LweInstance inst = make_instance(6, 101, ErrorDistribution::uniform(0), rng);
  SolveParameters p;
  p.L = 1;
  p.M = 1;
  for (Mode mode : {Mode::Controlled, Mode::Elimination}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const SolveOutcome out = classical_baseline_solve(inst, mode, p, 1, seed);
      CHECK(out.cls == OutcomeClass::Success);
    }
  }
}

TEST_CASE("baseline success rates") {
  CHECK(baseline_success_probability(ErrorDistribution::uniform(1), 3) == doctest::Approx(1.0 / 27));
  CHECK(baseline_success_probability(ErrorDistribution::uniform(2), 2) == doctest::Approx(1.0 / 25));
  CHECK(baseline_success_probability(ErrorDistribution::uniform(0), 9) == 1.0);

  // Single-coordinate rate: a candidate b'/a' equals s_j exactly when eta' = 0.
  const Modulus q(31);
  const std::uint64_t s = 8;
  int right = 0, total = 0;
  for (std::uint64_t a = 1; a < 31; ++a) {
    for (CenteredInt eta = -2; eta <= 2; ++eta) {
      const std::uint64_t b = q.add(q.mul(a, s), q.reduce(eta));
      right += q.mul(b, q.inv(a)) == s;
      ++total;
    }
  }
  CHECK(double(right) / total == doctest::Approx(0.2));

  Rng rng(63);
  const LweInstance inst = make_instance(3, 101, ErrorDistribution::uniform(1), rng);
  SolveParameters p;
  p.xi_prime = 1;
  p.M = 3;
  constexpr int kTrials = 20000;
  int success = 0;
  for (int t = 0; t < kTrials; ++t)
    success += classical_baseline_solve(inst, Mode::Controlled, p, 1, t).cls == OutcomeClass::Success;
  const double expected = 1.0 / 27;
  CHECK(std::abs(double(success) / kTrials - expected) < 3.0 * std::sqrt(expected * (1 - expected) / kTrials));
}

TEST_CASE("qram cost examples") {
  CHECK(qram_cost(2, 4, 2, QramScheme::Primitive, SampleForm::Full) == doctest::Approx(4.0));
  CHECK(qram_cost(1024, 7, 3, QramScheme::BucketBrigade, SampleForm::Divided) == doctest::Approx(10.0));
  CHECK(qram_cost(1024, 7, 3, QramScheme::BucketBrigade, SampleForm::Full) == doctest::Approx(70.0));
  for (std::uint64_t q : {2u, 101u, 401u}) {
    for (std::size_t n : {1u, 4u, 8u}) {
      for (std::size_t d : {1u, 2u, 4u}) {
        const double ratio = qram_cost(q, n, d, QramScheme::Primitive, SampleForm::Divided) /
                             qram_cost(q, n, d, QramScheme::Primitive, SampleForm::Full);
        CHECK(ratio == doctest::Approx(std::pow(double(q), (1.0 - double(n)) / double(d))));
      }
    }
  }
  CHECK_THROWS_AS(qram_cost(101, 4, 0, QramScheme::Primitive, SampleForm::Full), Error);
}
