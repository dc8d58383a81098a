#include "qlwe/qsim.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace qlwe {

namespace {

void check_norm(double norm, const char* where) {
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::InvariantViolation,
                std::string(where) + ": norm drifted to " + std::to_string(norm));
  }
}

}  // namespace

RootTable::RootTable(std::uint64_t q) : roots_(q) {
  const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
  for (std::uint64_t k = 0; k < q; ++k) {
    const double angle = step * static_cast<double>(k);
    roots_[k] = {std::cos(angle), std::sin(angle)};
  }
}

TwoQuditState TwoQuditState::basis(Modulus q, std::uint64_t d, std::uint64_t a) {
  const std::uint64_t dim = q.value();
  if (d >= dim || a >= dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  std::vector<Amplitude> amps(dim * dim);
  amps[d * dim + a] = 1.0;
  return {q, std::move(amps)};
}

TwoQuditState TwoQuditState::from_amplitudes(Modulus q, std::vector<Amplitude> amplitudes) {
  if (amplitudes.size() != q.value() * q.value()) throw Error(ErrorCode::InvalidLength, "need q^2 amplitudes");
  TwoQuditState s(q, std::move(amplitudes));
  check_norm(s.norm(), "from_amplitudes");
  return s;
}

double TwoQuditState::norm() const noexcept {
  double total = 0.0;
  for (const auto& x : amps_) total += std::norm(x);
  return std::sqrt(total);
}

TwoQuditState prepare_sample_state(const ReducedBatch& batch) {
  const Modulus& q = batch.modulus;
  const std::uint64_t dim = q.value();
  if (batch.pairs.empty()) throw Error(ErrorCode::InvalidLength, "cannot prepare a state from an empty batch");
  std::vector<Amplitude> amps(dim * dim);
  std::vector<bool> seen(dim, false);
  const double weight = 1.0 / std::sqrt(static_cast<double>(batch.pairs.size()));
  for (const auto& p : batch.pairs) {
    const std::uint64_t a = p.a_prime % dim;
    if (seen[a]) throw Error(ErrorCode::DuplicateInput, "a'=" + std::to_string(a) + " repeated in batch");
    seen[a] = true;
    amps[a * dim + p.b_prime % dim] = weight;
  }
  return {q, std::move(amps)};
}

TwoQuditState qft_register(const TwoQuditState& state, Register reg, bool inverse) {
  const std::uint64_t dim = state.dim();
  const RootTable roots(dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<Amplitude> out(dim * dim);
  const auto& in = state.amps_;
  // Index of the (fixed, transformed) pair in the row-major grid.
  const auto at = [&](std::uint64_t fixed, std::uint64_t moving) {
    return reg == Register::Data ? moving * dim + fixed : fixed * dim + moving;
  };
  for (std::uint64_t fixed = 0; fixed < dim; ++fixed) {
    for (std::uint64_t k = 0; k < dim; ++k) {
      Amplitude acc = 0.0;
      std::uint64_t phase = 0;  // j * k mod q, advanced incrementally
      for (std::uint64_t j = 0; j < dim; ++j) {
        const Amplitude& x = in[at(fixed, j)];
        if (x != 0.0) acc += x * (inverse ? std::conj(roots[phase]) : roots[phase]);
        phase += k;
        if (phase >= dim) phase -= dim;
      }
      out[at(fixed, k)] = acc * scale;
    }
  }
  return {state.q_, std::move(out)};
}

TwoQuditState bv_kernel(const TwoQuditState& state) {
  TwoQuditState out = qft_register(qft_register(state, Register::Data), Register::Answer);
  check_norm(out.norm(), "bv_kernel");
  return out;
}

MeasurementOutcome measure(const TwoQuditState& state, Rng& rng) {
  const auto amps = state.amplitudes();
  const double u = uniform_unit(rng) * state.norm() * state.norm();
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p == 0.0) continue;
    last_nonzero = i;
    acc += p;
    if (u < acc) return {i / state.dim(), i % state.dim()};
  }
  // Rounding left u beyond the running total; fall back to the last outcome with mass.
  return {last_nonzero / state.dim(), last_nonzero % state.dim()};
}

std::optional<std::uint64_t> extract_candidate(const MeasurementOutcome& outcome, const Modulus& q) {
  if (outcome.k_star % q.value() == 0) return std::nullopt;
  return q.mul(q.neg(outcome.k_d % q.value()), q.inv(outcome.k_star));
}

Amplitude kernel_amplitude(const ReducedBatch& batch, std::uint64_t k_d, std::uint64_t k_star,
                           const RootTable& roots) {
  const Modulus& q = batch.modulus;
  Amplitude acc = 0.0;
  for (const auto& p : batch.pairs) {
    acc += roots[q.add(q.mul(p.a_prime, k_d), q.mul(p.b_prime, k_star))];
  }
  const double scale = 1.0 / (static_cast<double>(q.value()) * std::sqrt(static_cast<double>(batch.pairs.size())));
  return acc * scale;
}

MeasurementOutcome sample_kernel_outcome(const ReducedBatch& batch, const RootTable& roots, Rng& rng) {
  const Modulus& q = batch.modulus;
  const std::uint64_t dim = q.value();
  if (batch.pairs.empty()) throw Error(ErrorCode::InvalidLength, "cannot sample from an empty batch");
  std::vector<bool> seen(dim, false);
  for (const auto& p : batch.pairs) {
    if (seen[p.a_prime % dim]) throw Error(ErrorCode::DuplicateInput, "a' repeated in batch");
    seen[p.a_prime % dim] = true;
  }
  const std::uint64_t k_star = uniform_below(rng, dim);

  // Unnormalized conditional weights |sum_a omega^{a k_d + b(a) k_star}|^2.
  std::vector<Amplitude> sums(dim);
  for (const auto& p : batch.pairs) {
    std::uint64_t phase = q.mul(p.b_prime, k_star);
    const std::uint64_t step = p.a_prime % dim;
    for (std::uint64_t k_d = 0; k_d < dim; ++k_d) {
      sums[k_d] += roots[phase];
      phase += step;
      if (phase >= dim) phase -= dim;
    }
  }
  double total = 0.0;
  std::vector<double> weights(dim);
  for (std::uint64_t k_d = 0; k_d < dim; ++k_d) {
    weights[k_d] = std::norm(sums[k_d]);
    total += weights[k_d];
  }
  // Parseval: total equals q |v| exactly.
  const double expected = static_cast<double>(dim) * static_cast<double>(batch.pairs.size());
  if (std::abs(total - expected) > kNormTolerance * expected) {
    throw Error(ErrorCode::InvariantViolation, "conditional kernel weights lost normalization");
  }
  const double u = uniform_unit(rng) * total;
  double acc = 0.0;
  std::uint64_t last_nonzero = 0;
  for (std::uint64_t k_d = 0; k_d < dim; ++k_d) {
    if (weights[k_d] == 0.0) continue;
    last_nonzero = k_d;
    acc += weights[k_d];
    if (u < acc) return {k_d, k_star};
  }
  return {last_nonzero, k_star};
}

double secret_line_probability(const TwoQuditState& state, std::uint64_t s_j) {
  const Modulus& q = state.modulus();
  double mass = 0.0;
  for (std::uint64_t k_star = 0; k_star < q.value(); ++k_star) {
    mass += std::norm(state.amplitude(q.neg(q.mul(s_j % q.value(), k_star)), k_star));
  }
  return mass;
}

void dump_state(std::ostream& out, const TwoQuditState& state) {
  const std::uint64_t dim = state.dim();
  for (std::uint64_t d = 0; d < dim; ++d) {
    for (std::uint64_t a = 0; a < dim; ++a) {
      const Amplitude& x = state.amplitude(d, a);
      const double p = std::norm(x);
      if (p > 1e-20) out << d << ' ' << a << ' ' << x.real() << ' ' << x.imag() << ' ' << p << '\n';
    }
  }
}

}  // namespace qlwe
