#include <cmath>
#include <algorithm>
#include <numbers>

#include "doctest.h"
#include "qlwe/solver.hpp"

using namespace qlwe;

namespace {

ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvariantViolation;
}

SolveParameters fixed(std::size_t L, std::size_t M, std::int64_t xi_prime, double gamma = 0.125) {
  SolveParameters p;
  p.gamma = gamma;
  p.L = L;
  p.M = M;
  p.xi_prime = xi_prime;
  p.C = c_factor(gamma);
  return p;
}

}  // namespace

TEST_CASE("C factor") {
  CHECK(c_factor(0.125) == doctest::Approx(1.0 / 16));
  CHECK(c_factor(0.0) == 0.0);
  // Maximized near gamma ~ 0.096.
  double best_gamma = 0.0, best = 0.0;
  for (double g = 0.001; g < 0.25; g += 0.001) {
    if (c_factor(g) > best) {
      best = c_factor(g);
      best_gamma = g;
    }
  }
  CHECK(best_gamma == doctest::Approx(0.096).epsilon(0.02));
}

TEST_CASE("choose_parameters for xi'=8, n=4, delta=0.2") {
  const SolveParameters p = choose_parameters(4, 401, 8, 1, 0.2, 0.125);
  CHECK(p.L == 384);
  CHECK(p.C == doctest::Approx(1.0 / 16));
  CHECK(p.xi_prime == 8);
  // Independent search for the smallest M.
  std::size_t m = 1;
  while (384.0 * std::pow(17.0 / 401.0, double(m)) > 0.05) ++m;
  CHECK(p.M == m);
  CHECK(p.M == 3);
}

TEST_CASE("choose_parameters uses kappa * xi") {
  const SolveParameters a = choose_parameters(8, 401, 1, 2, 0.2, 0.125);
  const SolveParameters b = choose_parameters(8, 401, 2, 1, 0.2, 0.125);
  CHECK(a.xi_prime == 2);
  CHECK(a.L == b.L);
  CHECK(a.L == static_cast<std::size_t>(std::ceil(32.0 * std::log(40.0))));
  CHECK(a.M == 2);
}

TEST_CASE("retry budget stays at least one") {
  CHECK(choose_parameters(1, 101, 1, 1, 0.999, 0.125).L == 1);
  CHECK(choose_parameters(1, 101, 0, 1, 0.999, 0.125).L == 1);
  CHECK(required_retry_budget(1, 101, 1, 0.999, 0.125) == 1);
}

TEST_CASE("noiseless retry budget follows the 1 - 1/q shot success") {
  // 1/q^L <= delta/n.
  for (std::uint64_t q : {7u, 31u, 101u}) {
    for (std::size_t n : {1u, 4u, 16u}) {
      const SolveParameters p = choose_parameters(n, q, 0, 1, 0.2, 0.125);
      CHECK(std::pow(1.0 / q, double(p.L)) <= 0.2 / n);
      if (p.L > 1) CHECK(std::pow(1.0 / q, double(p.L - 1)) > 0.2 / n);
      CHECK(p.M == required_test_trials(n, q, 0, p.L, 0.2));
    }
  }
}

TEST_CASE("choose_parameters errors") {
  CHECK(code_of([] { choose_parameters(4, 101, 1, 1, 0.2, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { choose_parameters(4, 101, 1, 1, 0.2, 0.25); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { choose_parameters(4, 101, 1, 1, 0.0, 0.125); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { choose_parameters(4, 101, 1, 1, 1.0, 0.125); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { choose_parameters(4, 101, 10, 6, 0.2, 0.125); }) == ErrorCode::BoundTooLarge);
  CHECK(code_of([] { choose_parameters(4, 101, 10, 1, 0.2, 0.125); }) == ErrorCode::InfeasibleParameters);
  CHECK(code_of([] { choose_parameters(4, 100, 1, 1, 0.2, 0.125); }) == ErrorCode::InvalidModulus);
}

TEST_CASE("zero budget gives an immediate null") {
  const Modulus q(31);
  ControlledSource source(q, {4}, ErrorDistribution::uniform(0), 0, {}, 1);
  Rng rng(1);
  const CoordinateReport r = solve_coordinate(0, source, source, fixed(0, 1, 0), rng);
  CHECK(r.shots == 0);
  CHECK_FALSE(r.accepted.has_value());
}

TEST_CASE("noiseless coordinate: first non-null shot is accepted, q/(q-1) shots on average") {
  const Modulus q(7);
  ControlledSource source(q, {5}, ErrorDistribution::uniform(0), 0, {}, 2);
  Rng rng(2);
  constexpr int kRuns = 20000;
  double shots = 0.0;
  for (int i = 0; i < kRuns; ++i) {
    const CoordinateReport r = solve_coordinate(0, source, source, fixed(1000, 1, 0), rng);
    REQUIRE(r.accepted == std::optional<std::uint64_t>(5));
    CHECK(r.rejections == 0);
    CHECK(r.candidates_tested == 1);
    CHECK(r.shots == r.nulls + 1);
    shots += double(r.shots);
  }
  const double p = 6.0 / 7.0;
  const double mean = 1.0 / p;
  const double sd = std::sqrt((1.0 - p) / (p * p) / kRuns);
  CHECK(std::abs(shots / kRuns - mean) < 3.0 * sd);
}

TEST_CASE("noiseless solve succeeds on both backends and modes") {
  for (std::uint64_t qv : {7u, 31u, 101u}) {
    Rng rng(qv);
    const LweInstance inst = make_instance(5, qv, ErrorDistribution::uniform(0), rng);
    for (Mode mode : {Mode::Controlled, Mode::Elimination}) {
      for (KernelBackend backend : {KernelBackend::Sampled, KernelBackend::Dense}) {
        if (backend == KernelBackend::Dense && qv > 31) continue;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          SolverOptions options;
          options.backend = backend;
          const SolveOutcome out = solve(inst, mode, fixed(200, 1, 0), seed, options);
          REQUIRE(out.cls == OutcomeClass::Success);
          CHECK(out.returned_s == std::optional<FieldVector>(inst.secret()));
          CHECK(out.rejections() == 0);
          CHECK(out.per_coordinate.size() == 5);
        }
      }
    }
  }
}

TEST_CASE("same seed reproduces the same solve") {
  Rng rng(3);
  const LweInstance inst = make_instance(4, 101, ErrorDistribution::uniform(1), rng);
  const SolveParameters p = choose_parameters(4, 101, 2, 1, 0.2, 0.125);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SolveOutcome a = solve(inst, Mode::Controlled, p, seed);
    const SolveOutcome b = solve(inst, Mode::Controlled, p, seed);
    CHECK(a.cls == b.cls);
    CHECK(a.returned_s == b.returned_s);
    CHECK(a.quantum_samples() == b.quantum_samples());
    CHECK(a.test_samples() == b.test_samples());
  }
}

TEST_CASE("controlled per-coordinate success meets the retry-budget bound") {
  // q=101, xi'=2, gamma=1/8: success >= 1 - (1 - C/xi')^L.
  const Modulus q(101);
  const SolveParameters p = choose_parameters(4, 101, 2, 1, 0.2, 0.125);
  const double bound = 1.0 - std::pow(1.0 - p.C / 2.0, double(p.L));
  Rng rng(4);
  constexpr int kRuns = 1000;
  int hits = 0;
  for (int i = 0; i < kRuns; ++i) {
    const std::uint64_t s = uniform_below(rng, 101);
    ControlledSource source(q, {s}, ErrorDistribution::uniform(2), 2, {}, derive_seed(4, i, 1));
    const CoordinateReport r = solve_coordinate(0, source, source, p, rng);
    CHECK(r.shots <= p.L);
    hits += r.accepted == std::optional<std::uint64_t>(s);
  }
  const double rate = double(hits) / kRuns;
  CHECK(rate >= bound - 3.0 * std::sqrt(bound * (1 - bound) / kRuns));
}

TEST_CASE("outcome classes partition the trials and match their definitions") {
  Rng rng(5);
  const LweInstance inst = make_instance(2, 101, ErrorDistribution::uniform(4), rng);
  int counts[3] = {0, 0, 0};
  constexpr int kTrials = 400;
  for (std::uint64_t seed = 0; seed < kTrials; ++seed) {
    const SolveOutcome out = solve(inst, Mode::Controlled, fixed(4, 1, 4), seed);
    ++counts[static_cast<int>(out.cls)];
    CHECK(out.quantum_samples() <= 2 * 4);
    switch (out.cls) {
      case OutcomeClass::Success:
        CHECK(out.returned_s == std::optional<FieldVector>(inst.secret()));
        break;
      case OutcomeClass::WrongAccept:
        REQUIRE(out.returned_s.has_value());
        CHECK(*out.returned_s != inst.secret());
        break;
      case OutcomeClass::Failure:
        CHECK_FALSE(out.returned_s.has_value());
        CHECK_FALSE(out.per_coordinate.back().accepted.has_value());
        break;
    }
    // The true value is never rejected.
    for (std::size_t j = 0; j < out.per_coordinate.size(); ++j)
      for (auto r : out.per_coordinate[j].rejected_candidates) CHECK(r != inst.secret()[j]);
  }
  CHECK(counts[0] + counts[1] + counts[2] == kTrials);
  // M = 1 with a loose bound must let some wrong candidates through.
  CHECK(counts[static_cast<int>(OutcomeClass::WrongAccept)] > 0);
}

TEST_CASE("dedup skips re-testing rejected candidates") {
  const Modulus q(31);
  ControlledSource source(q, {3}, ErrorDistribution::uniform(7), 7, {5}, 6);
  Rng rng(6);
  SolverOptions options;
  options.dedup_candidates = true;
  for (int i = 0; i < 200; ++i) {
    const CoordinateReport r = solve_coordinate(0, source, source, fixed(30, 2, 7), rng, options);
    std::vector<std::uint64_t> sorted = r.rejected_candidates;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(r.candidates_tested + r.nulls <= r.shots);
  }
}

TEST_CASE("classify and string forms") {
  const FieldVector truth{1, 2};
  CHECK(classify(std::nullopt, truth) == OutcomeClass::Failure);
  CHECK(classify(FieldVector{1, 2}, truth) == OutcomeClass::Success);
  CHECK(classify(FieldVector{1, 3}, truth) == OutcomeClass::WrongAccept);
  for (auto cls : {OutcomeClass::Success, OutcomeClass::Failure, OutcomeClass::WrongAccept})
    CHECK(parse_outcome(to_string(cls)) == cls);
  for (auto mode : {Mode::Controlled, Mode::Elimination}) CHECK(parse_mode(to_string(mode)) == mode);
  CHECK(to_string(OutcomeClass::WrongAccept) == "wrong_accept");
  CHECK_THROWS_AS(parse_mode("fast"), Error);
  CHECK_THROWS_AS(parse_outcome("maybe"), Error);
}

TEST_CASE("controlled source follows the instance error kind at the amplified bound") {
  Rng rng(7);
  const LweInstance inst = make_instance(3, 101, ErrorDistribution::gaussian(2, 1.0), rng);
  auto source = make_source(inst, Mode::Controlled, 6, 20, 8);
  const ReducedBatch batch = source->next_batch(1);
  CHECK(batch.pairs.size() == 20);
  CHECK(batch.xi_prime == 6);
  CHECK(batch.kappa == doctest::Approx(3.0));
  for (const auto& pair : batch.pairs) CHECK(std::abs(pair.eta_prime) <= 6);
}
