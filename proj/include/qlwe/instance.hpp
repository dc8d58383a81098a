#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlwe/fq.hpp"
#include "qlwe/rng.hpp"

// LWE instance generation: secrets, bounded error draws and sample streams.
namespace qlwe {

enum class ErrorKind { UniformBounded, TruncatedGaussian };

std::string to_string(ErrorKind kind);
ErrorKind parse_error_kind(const std::string& text);

// Error law on [-bound, bound]. A Gaussian with sigma == 0 uses bound / 3.
struct ErrorDistribution {
  ErrorKind kind = ErrorKind::UniformBounded;
  std::int64_t bound = 0;
  double sigma = 0.0;

  static ErrorDistribution uniform(std::int64_t bound) { return {ErrorKind::UniformBounded, bound, 0.0}; }
  static ErrorDistribution gaussian(std::int64_t bound, double sigma = 0.0) {
    return {ErrorKind::TruncatedGaussian, bound, sigma};
  }

  double effective_sigma() const noexcept;
  // Throws BoundTooLarge unless 2 * bound < q, InvalidArgument on negative bound.
  void validate(const Modulus& q) const;
};

// Rejection sampling for the truncated Gaussian: propose uniformly on the
// support and accept with weight exp(-x^2 / 2 sigma^2). Exact, no tail table.
CenteredInt sample_error(const ErrorDistribution& chi, Rng& rng);

// Throws InvalidModulus for non-prime q and InvalidLength for n == 0.
FieldVector gen_secret(std::size_t n, std::uint64_t q, Rng& rng);

// What a solver is allowed to see of a sample.
struct PublicSample {
  FieldVector a;
  std::uint64_t b = 0;
};

// A sample together with its ground-truth error. The error is only reachable
// through ground_truth_error(); solver code works on public_view().
class Sample {
 public:
  Sample(FieldVector a, std::uint64_t b, CenteredInt eta) : a_(std::move(a)), b_(b), eta_(eta) {}

  const FieldVector& a() const noexcept { return a_; }
  std::uint64_t b() const noexcept { return b_; }
  CenteredInt ground_truth_error() const noexcept { return eta_; }
  PublicSample public_view() const { return {a_, b_}; }

 private:
  FieldVector a_;
  std::uint64_t b_;
  CenteredInt eta_;
};

class LweInstance {
 public:
  LweInstance(Modulus q, FieldVector secret, ErrorDistribution chi);

  std::size_t n() const noexcept { return secret_.size(); }
  const Modulus& modulus() const noexcept { return q_; }
  const FieldVector& secret() const noexcept { return secret_; }
  const ErrorDistribution& chi() const noexcept { return chi_; }
  // xi / q.
  double alpha() const noexcept {
    return static_cast<double>(chi_.bound) / static_cast<double>(q_.value());
  }

 private:
  Modulus q_;
  FieldVector secret_;
  ErrorDistribution chi_;
};

LweInstance make_instance(std::size_t n, std::uint64_t q, const ErrorDistribution& chi, Rng& rng);

// a uniform over F_q^n, b = a.s + eta mod q.
Sample gen_sample(const LweInstance& instance, Rng& rng);

// Recovers s from n linearly independent noiseless samples. SingularMatrix
// when the sample vectors are dependent.
FieldVector solve_noiseless(std::span<const PublicSample> samples, const Modulus& q);

// Text format: header line `n q xi kind seed`, then `a_0 ... a_{n-1} b` per
// sample. The secret goes to a separate sidecar file, one line `s_0 ... s_{n-1}`.
struct InstanceHeader {
  std::size_t n = 0;
  std::uint64_t q = 0;
  std::int64_t xi = 0;
  ErrorKind kind = ErrorKind::UniformBounded;
  std::uint64_t seed = 0;
};

struct InstanceFile {
  InstanceHeader header;
  std::vector<PublicSample> samples;
};

void write_instance(std::ostream& out, const LweInstance& instance, std::span<const Sample> samples,
                    std::uint64_t seed);
void write_secret(std::ostream& out, const LweInstance& instance);
InstanceFile read_instance(std::istream& in);
FieldVector read_secret(std::istream& in, std::size_t n);

}  // namespace qlwe
