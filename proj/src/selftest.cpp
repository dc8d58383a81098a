#include "qlwe/selftest.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>

#include "qlwe/fq.hpp"
#include "qlwe/instance.hpp"
#include "qlwe/qsim.hpp"
#include "qlwe/reduce.hpp"
#include "qlwe/rng.hpp"
#include "qlwe/verify.hpp"

namespace qlwe {

namespace {

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 3; p <= limit; ++p) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

SelftestCheck check_unitarity(Rng& rng) {
  const auto primes = primes_up_to(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  constexpr int kStates = 1000;
  for (int i = 0; i < kStates; ++i) {
    const Modulus q(primes[uniform_below(rng, primes.size())]);
    const std::uint64_t dim = q.value();
    std::vector<Amplitude> amps(dim * dim);
    double total = 0.0;
    for (auto& a : amps) {
      a = {gauss(rng), gauss(rng)};
      total += std::norm(a);
    }
    for (auto& a : amps) a /= std::sqrt(total);
    const auto out = bv_kernel(TwoQuditState::from_amplitudes(q, std::move(amps)));
    worst = std::max(worst, std::abs(out.norm() - 1.0));
  }
  std::ostringstream detail;
  detail << kStates << " random states, max norm drift " << worst;
  return {"kernel unitarity", worst < 1e-10, detail.str()};
}

SelftestCheck check_inverses() {
  std::size_t checked = 0;
  for (std::uint64_t p : primes_up_to(101)) {
    const Modulus q(p);
    for (std::uint64_t x = 1; x < p; ++x) {
      if (q.mul(x, q.inv(x)) != 1) {
        return {"modular inverse", false, "inv(" + std::to_string(x) + ") mod " + std::to_string(p) + " wrong"};
      }
      ++checked;
    }
  }
  return {"modular inverse", true, std::to_string(checked) + " residues over all primes <= 101"};
}

SelftestCheck check_elimination(Rng& rng) {
  std::size_t pairs = 0;
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + uniform_below(rng, 5);
    const std::uint64_t qs[] = {7, 31, 101, 401};
    const std::uint64_t qv = qs[uniform_below(rng, 4)];
    const auto chi = ErrorDistribution::uniform(static_cast<std::int64_t>(uniform_below(rng, 3)));
    const LweInstance inst = make_instance(n, qv, chi, rng);
    const Modulus& q = inst.modulus();
    EliminationSource source(inst, 0, SourceLimits{}, rng());
    for (int k = 0; k < 5; ++k) {
      const std::size_t j = uniform_below(rng, n);
      const ReducedPair p = source.next_direct_pair(j);
      const std::uint64_t rhs = q.add(q.mul(p.a_prime, inst.secret()[j]), q.reduce(p.eta_prime));
      if (p.b_prime != rhs) return {"elimination identity", false, "b' != a' s_j + eta'"};
      if (static_cast<std::uint64_t>(std::abs(p.eta_prime)) > p.coeff_l1 * static_cast<std::uint64_t>(chi.bound)) {
        return {"elimination identity", false, "|eta'| exceeds coeff_l1 * xi"};
      }
      ++pairs;
    }
  }
  return {"elimination identity", true, std::to_string(pairs) + " pairs, identity and triangle bound hold"};
}

SelftestCheck check_completeness(Rng& rng) {
  std::size_t runs = 0;
  for (int round = 0; round < 2000; ++round) {
    const std::uint64_t qs[] = {7, 31, 101, 401};
    const Modulus q(qs[uniform_below(rng, 4)]);
    const std::int64_t max_xi = static_cast<std::int64_t>((q.value() - 1) / 2 - 1);
    const auto xi_prime = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(std::min<std::int64_t>(max_xi, 8)) + 1));
    const std::uint64_t s = uniform_below(rng, q.value());
    const auto chi = round % 2 ? ErrorDistribution::uniform(xi_prime) : ErrorDistribution::gaussian(xi_prime);
    ControlledSource source(q, FieldVector{s}, chi, xi_prime, SourceLimits{}, rng());
    const std::size_t trials = 1 + uniform_below(rng, 8);
    if (!m_trial_test(s, trials, xi_prime, source, 0, q).accepted) {
      return {"test completeness", false, "true value rejected at q=" + std::to_string(q.value())};
    }
    ++runs;
  }
  return {"test completeness", true, std::to_string(runs) + " M-trial tests of the true value, none rejected"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SelftestCheck> checks;
  const auto guarded = [&](auto&& fn, const char* name) {
    try {
      checks.push_back(fn());
    } catch (const std::exception& e) {
      checks.push_back({name, false, e.what()});
    }
  };
  guarded([&] { return check_unitarity(rng); }, "kernel unitarity");
  guarded([&] { return check_inverses(); }, "modular inverse");
  guarded([&] { return check_elimination(rng); }, "elimination identity");
  guarded([&] { return check_completeness(rng); }, "test completeness");
  return checks;
}

bool print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok;
}

}  // namespace qlwe
