#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qlwe/error.hpp"

// Arithmetic and dense linear algebra over the prime field F_q.
namespace qlwe {

// Residues are held in std::uint64_t. The ceiling keeps (q-1)^2 well inside
// 64 bits and every centered representative inside std::int64_t.
inline constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 31) - 1;

// Deterministic Miller-Rabin; exact for all 64-bit inputs below 3.4e14.
bool is_prime(std::uint64_t n) noexcept;

// Signed representative of a residue, in (-q/2, q/2].
using CenteredInt = std::int64_t;

// An odd prime modulus, validated once at construction.
class Modulus {
 public:
  explicit Modulus(std::uint64_t q);

  std::uint64_t value() const noexcept { return q_; }

  std::uint64_t reduce(std::int64_t x) const noexcept {
    const auto q = static_cast<std::int64_t>(q_);
    std::int64_t r = x % q;
    return static_cast<std::uint64_t>(r < 0 ? r + q : r);
  }
  std::uint64_t add(std::uint64_t x, std::uint64_t y) const noexcept {
    const std::uint64_t s = x + y;
    return s >= q_ ? s - q_ : s;
  }
  std::uint64_t sub(std::uint64_t x, std::uint64_t y) const noexcept {
    return x >= y ? x - y : x + q_ - y;
  }
  std::uint64_t neg(std::uint64_t x) const noexcept { return x == 0 ? 0 : q_ - x; }
  std::uint64_t mul(std::uint64_t x, std::uint64_t y) const noexcept { return (x * y) % q_; }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const noexcept;

  // Throws ZeroInverse for x == 0.
  std::uint64_t inv(std::uint64_t x) const;

  CenteredInt centered(std::uint64_t x) const noexcept {
    const auto v = static_cast<std::int64_t>(x % q_);
    return 2 * v > static_cast<std::int64_t>(q_) ? v - static_cast<std::int64_t>(q_) : v;
  }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  std::uint64_t q_;
};

class FieldElement {
 public:
  FieldElement(std::uint64_t value, Modulus modulus) : modulus_(modulus), value_(value % modulus.value()) {}

  std::uint64_t value() const noexcept { return value_; }
  const Modulus& modulus() const noexcept { return modulus_; }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return {x.modulus_.add(x.value_, y.value_), x.modulus_};
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return {x.modulus_.sub(x.value_, y.value_), x.modulus_};
  }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return {x.modulus_.mul(x.value_, y.value_), x.modulus_};
  }
  FieldElement operator-() const { return {modulus_.neg(value_), modulus_}; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  static void check_same(const FieldElement& x, const FieldElement& y) {
    if (!(x.modulus_ == y.modulus_)) throw Error(ErrorCode::InvalidModulus, "operands from different fields");
  }

  Modulus modulus_;
  std::uint64_t value_;
};

FieldElement inv(const FieldElement& x);
CenteredInt centered(const FieldElement& x) noexcept;

// Residues relative to a modulus held elsewhere.
using FieldVector = std::vector<std::uint64_t>;

std::uint64_t dot(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y, const Modulus& q);

// Dense row-major matrix over F_q.
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, Modulus modulus);
  FieldMatrix(std::size_t rows, std::size_t cols, Modulus modulus, std::vector<std::uint64_t> entries);

  static FieldMatrix identity(std::size_t n, Modulus modulus);
  // Builds a matrix whose i-th row is rows[i]; every row must have the same length.
  static FieldMatrix from_rows(std::span<const FieldVector> rows, Modulus modulus);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const Modulus& modulus() const noexcept { return modulus_; }

  std::uint64_t operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::uint64_t& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const std::uint64_t> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Modulus modulus_;
  std::vector<std::uint64_t> data_;
};

FieldMatrix operator*(const FieldMatrix& x, const FieldMatrix& y);
FieldVector operator*(const FieldMatrix& x, std::span<const std::uint64_t> v);

// Gauss-Jordan elimination. The pivot is the first nonzero entry at or below
// the diagonal; exact arithmetic needs no partial pivoting. Throws
// SingularMatrix when a column has no pivot.
FieldMatrix mat_inverse(const FieldMatrix& a);

// Solves a x = b for square invertible a.
FieldVector solve_noiseless(const FieldMatrix& a, std::span<const std::uint64_t> b);

}  // namespace qlwe
