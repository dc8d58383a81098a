#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qlwe/fq.hpp"
#include "qlwe/reduce.hpp"
#include "qlwe/rng.hpp"

// Exact statevector simulation of the two-register sample state and the
// Bernstein-Vazirani kernel QFT_q (x) QFT_q.
namespace qlwe {

using Amplitude = std::complex<double>;

// Normalization drift beyond this is an invariant violation, never renormalized.
inline constexpr double kNormTolerance = 1e-8;

// omega^k = exp(2 pi i k / q) for k in [0, q), each entry evaluated directly.
class RootTable {
 public:
  explicit RootTable(std::uint64_t q);
  const Amplitude& operator[](std::uint64_t k) const noexcept { return roots_[k]; }
  std::uint64_t size() const noexcept { return roots_.size(); }

 private:
  std::vector<Amplitude> roots_;
};

enum class Register { Data, Answer };

// q x q amplitudes over D (x) A, stored row-major by (d, a).
class TwoQuditState {
 public:
  static TwoQuditState basis(Modulus q, std::uint64_t d, std::uint64_t a);
  // Throws InvariantViolation if the amplitudes are not unit norm within kNormTolerance.
  static TwoQuditState from_amplitudes(Modulus q, std::vector<Amplitude> amplitudes);

  const Modulus& modulus() const noexcept { return q_; }
  std::uint64_t dim() const noexcept { return q_.value(); }
  const Amplitude& amplitude(std::uint64_t d, std::uint64_t a) const noexcept { return amps_[d * dim() + a]; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  double norm() const noexcept;

 private:
  TwoQuditState(Modulus q, std::vector<Amplitude> amps) : q_(q), amps_(std::move(amps)) {}

  friend TwoQuditState prepare_sample_state(const ReducedBatch& batch);
  friend TwoQuditState qft_register(const TwoQuditState& state, Register reg, bool inverse);

  Modulus q_;
  std::vector<Amplitude> amps_;
};

// (1/sqrt|v_j|) sum_{a'} |a'>_D |b'(a')>_A. Throws DuplicateInput if two
// pairs share a', InvalidLength for an empty batch.
TwoQuditState prepare_sample_state(const ReducedBatch& batch);

// Dense q-point DFT on one register: |j> -> (1/sqrt q) sum_k omega^{jk} |k>,
// or its inverse. O(q^3) on the two-register grid.
TwoQuditState qft_register(const TwoQuditState& state, Register reg, bool inverse = false);

// QFT_q on D then on A. Throws InvariantViolation on norm drift.
TwoQuditState bv_kernel(const TwoQuditState& state);

struct MeasurementOutcome {
  std::uint64_t k_d = 0;
  std::uint64_t k_star = 0;
  friend bool operator==(const MeasurementOutcome&, const MeasurementOutcome&) = default;
};

MeasurementOutcome measure(const TwoQuditState& state, Rng& rng);

// s~ = -k_d / k_star mod q, or nullopt for the null outcome k_star == 0.
std::optional<std::uint64_t> extract_candidate(const MeasurementOutcome& outcome, const Modulus& q);

// Kernel output amplitude at (k_d, k_star) by the closed-form sum
// (1/(q sqrt|v|)) sum_{a'} omega^{a' k_d + b'(a') k_star}. O(|v|).
Amplitude kernel_amplitude(const ReducedBatch& batch, std::uint64_t k_d, std::uint64_t k_star,
                           const RootTable& roots);

// Draws one outcome from the exact kernel output distribution without
// building the q^2 state. The A-register marginal is uniform (Parseval over
// distinct a'), so k_star is drawn first and k_d from the exact conditional,
// which costs O(q |v|) per shot.
MeasurementOutcome sample_kernel_outcome(const ReducedBatch& batch, const RootTable& roots, Rng& rng);

// Probability mass on the line k_d = -s_j k_star (k_star = 0 included).
double secret_line_probability(const TwoQuditState& state, std::uint64_t s_j);

// Debug dump: rows `k_d k_star re im prob` for amplitudes with prob > 1e-20.
void dump_state(std::ostream& out, const TwoQuditState& state);

}  // namespace qlwe
