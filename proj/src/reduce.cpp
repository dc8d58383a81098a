#include "qlwe/reduce.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_set>

namespace qlwe {

namespace {

FieldMatrix sample_matrix(std::span<const Sample> samples, const Modulus& q) {
  const std::size_t n = samples.size();
  FieldMatrix a(n, n, q);
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].a().size() != n) throw Error(ErrorCode::InvalidLength, "need n samples of length n");
    for (std::size_t c = 0; c < n; ++c) a(i, c) = samples[i].a()[c];
  }
  return a;
}

}  // namespace

ReducedPair reduce_to_coordinate(std::span<const Sample> samples, const Modulus& q, std::size_t j,
                                 std::uint64_t a_target, std::uint64_t s_j) {
  if (j >= samples.size()) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
  const FieldMatrix inverse = mat_inverse(sample_matrix(samples, q));
  // Row j of A^-1 satisfies (row j) . A = e_j.
  const auto row = inverse.row(j);
  a_target %= q.value();

  ReducedPair pair;
  pair.a_prime = a_target;
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::uint64_t c = q.mul(a_target, row[i]);
    b = q.add(b, q.mul(c, samples[i].b()));
    pair.coeff_l1 += static_cast<std::uint64_t>(std::abs(q.centered(c)));
  }
  pair.b_prime = b;
  pair.eta_prime = q.centered(q.sub(b, q.mul(a_target, s_j % q.value())));
  return pair;
}

ReducedPair make_test_sample(std::span<const Sample> samples, const Modulus& q, std::size_t j,
                             std::uint64_t t_target, std::uint64_t s_j) {
  return reduce_to_coordinate(samples, q, j, t_target, s_j);
}

ReducedBatch synth_reduced_batch(std::size_t j, std::uint64_t s_j, const Modulus& q,
                                 std::span<const std::uint64_t> v_j, std::int64_t xi_prime,
                                 const ErrorDistribution& chi_prime, std::int64_t raw_xi, Rng& rng) {
  if (xi_prime < 0 || 2 * static_cast<std::uint64_t>(xi_prime) >= q.value()) {
    throw Error(ErrorCode::BoundTooLarge, "xi'=" + std::to_string(xi_prime) + " must be below q/2");
  }
  if (chi_prime.bound > xi_prime) throw Error(ErrorCode::InvalidArgument, "chi' bound exceeds xi'");
  if (v_j.empty()) throw Error(ErrorCode::InvalidLength, "v_j must be nonempty");
  if (v_j.size() > q.value()) throw Error(ErrorCode::InvalidLength, "|v_j| exceeds q");

  ReducedBatch batch{j, q, {}, xi_prime, raw_xi > 0 ? static_cast<double>(xi_prime) / raw_xi : 1.0};
  batch.pairs.reserve(v_j.size());
  std::vector<bool> seen(q.value(), false);
  for (std::uint64_t a : v_j) {
    a %= q.value();
    if (seen[a]) throw Error(ErrorCode::DuplicateInput, "a'=" + std::to_string(a) + " appears twice in v_j");
    seen[a] = true;
    const CenteredInt eta = sample_error(chi_prime, rng);
    batch.pairs.push_back({a, q.add(q.mul(a, s_j % q.value()), q.reduce(eta)), eta, 0});
  }
  return batch;
}

std::uint64_t kappa_observed(const ReducedBatch& batch) {
  std::uint64_t k = 0;
  for (const auto& p : batch.pairs) k = std::max(k, p.coeff_l1);
  return k;
}

void dump_batch(std::ostream& out, const ReducedBatch& batch) {
  for (const auto& p : batch.pairs) {
    out << p.a_prime << ' ' << p.b_prime << ' ' << p.eta_prime << ' ' << p.coeff_l1 << '\n';
  }
}

std::vector<std::uint64_t> random_support(const Modulus& q, std::size_t size, Rng& rng) {
  const std::uint64_t qv = q.value();
  if (size == 0 || size > qv) throw Error(ErrorCode::InvalidLength, "support size must be in [1, q]");
  std::vector<std::uint64_t> all(qv);
  std::iota(all.begin(), all.end(), std::uint64_t{0});
  if (size == qv) return all;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t k = i + uniform_below(rng, qv - i);
    std::swap(all[i], all[k]);
  }
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

std::optional<ReducedPair> FixedTestSource::next_test_pair(std::size_t) {
  if (next_ >= pairs_.size()) return std::nullopt;
  return pairs_[next_++];
}

ControlledSource::ControlledSource(Modulus q, FieldVector secret, ErrorDistribution chi_prime, std::int64_t raw_xi,
                                   SourceLimits limits, std::uint64_t seed)
    : q_(q), secret_(std::move(secret)), chi_prime_(chi_prime), raw_xi_(raw_xi), limits_(limits), rng_(seed) {
  chi_prime_.validate(q_);
  if (limits_.batch_size > q_.value()) throw Error(ErrorCode::InvalidLength, "batch size exceeds q");
}

ReducedBatch ControlledSource::next_batch(std::size_t j) {
  const std::size_t size = limits_.batch_size == 0 ? q_.value() : limits_.batch_size;
  const auto support = random_support(q_, size, rng_);
  return synth_reduced_batch(j, secret_.at(j), q_, support, chi_prime_.bound, chi_prime_, raw_xi_, rng_);
}

ReducedPair ControlledSource::next_direct_pair(std::size_t j) {
  const std::uint64_t a = 1 + uniform_below(rng_, q_.value() - 1);
  const CenteredInt eta = sample_error(chi_prime_, rng_);
  return {a, q_.add(q_.mul(a, secret_.at(j)), q_.reduce(eta)), eta, 0};
}

std::optional<ReducedPair> ControlledSource::next_test_pair(std::size_t j) {
  if (tests_served_ >= limits_.max_test_pairs) return std::nullopt;
  ++tests_served_;
  return next_direct_pair(j);
}

EliminationSource::EliminationSource(const LweInstance& instance, std::int64_t declared_xi_prime,
                                     SourceLimits limits, std::uint64_t seed)
    : instance_(&instance), declared_xi_prime_(declared_xi_prime), limits_(limits), rng_(seed) {
  if (limits_.batch_size > instance.modulus().value()) throw Error(ErrorCode::InvalidLength, "batch size exceeds q");
}

ReducedPair EliminationSource::pair_for(std::size_t j, std::uint64_t a_target) {
  const std::size_t n = instance_->n();
  std::vector<Sample> samples;
  for (;;) {
    samples.clear();
    for (std::size_t i = 0; i < n; ++i) samples.push_back(gen_sample(*instance_, rng_));
    samples_consumed_ += n;
    try {
      return reduce_to_coordinate(samples, instance_->modulus(), j, a_target, instance_->secret().at(j));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularMatrix) throw;
    }
  }
}

ReducedBatch EliminationSource::next_batch(std::size_t j) {
  const Modulus& q = instance_->modulus();
  const std::size_t size = limits_.batch_size == 0 ? q.value() : limits_.batch_size;
  const auto support = random_support(q, size, rng_);
  const std::int64_t xi = instance_->chi().bound;
  ReducedBatch batch{j, q, {}, declared_xi_prime_, xi > 0 ? static_cast<double>(declared_xi_prime_) / xi : 1.0};
  batch.pairs.reserve(support.size());
  for (auto a : support) batch.pairs.push_back(pair_for(j, a));
  return batch;
}

ReducedPair EliminationSource::next_direct_pair(std::size_t j) {
  const std::uint64_t a = 1 + uniform_below(rng_, instance_->modulus().value() - 1);
  return pair_for(j, a);
}

std::optional<ReducedPair> EliminationSource::next_test_pair(std::size_t j) {
  if (tests_served_ >= limits_.max_test_pairs) return std::nullopt;
  ++tests_served_;
  return next_direct_pair(j);
}

}  // namespace qlwe
