#include "qlwe/fq.hpp"

#include <array>
#include <string>
#include <utility>

namespace qlwe {

namespace {

__extension__ typedef unsigned __int128 uint128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<uint128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 7> small{2, 3, 5, 7, 11, 13, 17};
  for (std::uint64_t p : small) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : small) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Modulus::Modulus(std::uint64_t q) : q_(q) {
  if (q < 3 || q > kMaxModulus || !is_prime(q)) {
    throw Error(ErrorCode::InvalidModulus,
                "q=" + std::to_string(q) + " must be an odd prime no larger than " + std::to_string(kMaxModulus));
  }
}

std::uint64_t Modulus::pow(std::uint64_t base, std::uint64_t exp) const noexcept {
  return powmod(base, exp, q_);
}

std::uint64_t Modulus::inv(std::uint64_t x) const {
  x %= q_;
  if (x == 0) throw Error(ErrorCode::ZeroInverse, "0 has no inverse mod " + std::to_string(q_));
  // Extended Euclid on (x, q); q prime so gcd is 1.
  std::int64_t old_r = static_cast<std::int64_t>(x), r = static_cast<std::int64_t>(q_);
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t quot = old_r / r;
    old_r = std::exchange(r, old_r - quot * r);
    old_s = std::exchange(s, old_s - quot * s);
  }
  return reduce(old_s);
}

FieldElement inv(const FieldElement& x) { return {x.modulus().inv(x.value()), x.modulus()}; }

CenteredInt centered(const FieldElement& x) noexcept { return x.modulus().centered(x.value()); }

std::uint64_t dot(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y, const Modulus& q) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidLength, "dot product of vectors with different lengths");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc = q.add(acc, q.mul(x[i], y[i]));
  return acc;
}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, Modulus modulus)
    : rows_(rows), cols_(cols), modulus_(modulus), data_(rows * cols, 0) {}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, Modulus modulus, std::vector<std::uint64_t> entries)
    : rows_(rows), cols_(cols), modulus_(modulus), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw Error(ErrorCode::InvalidLength, "entry count does not match dimensions");
  for (auto& e : data_) e %= modulus_.value();
}

FieldMatrix FieldMatrix::identity(std::size_t n, Modulus modulus) {
  FieldMatrix m(n, n, modulus);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

FieldMatrix FieldMatrix::from_rows(std::span<const FieldVector> rows, Modulus modulus) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<std::uint64_t> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorCode::InvalidLength, "ragged rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return {rows.size(), cols, modulus, std::move(entries)};
}

FieldMatrix operator*(const FieldMatrix& x, const FieldMatrix& y) {
  if (x.cols() != y.rows() || !(x.modulus() == y.modulus())) {
    throw Error(ErrorCode::InvalidLength, "incompatible matrix product");
  }
  const Modulus& q = x.modulus();
  FieldMatrix out(x.rows(), y.cols(), q);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const std::uint64_t xik = x(i, k);
      if (xik == 0) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) = q.add(out(i, j), q.mul(xik, y(k, j)));
    }
  }
  return out;
}

FieldVector operator*(const FieldMatrix& x, std::span<const std::uint64_t> v) {
  if (x.cols() != v.size()) throw Error(ErrorCode::InvalidLength, "incompatible matrix-vector product");
  FieldVector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = dot(x.row(i), v, x.modulus());
  return out;
}

FieldMatrix mat_inverse(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidLength, "cannot invert a non-square matrix");
  const std::size_t n = a.rows();
  const Modulus& q = a.modulus();
  FieldMatrix work = a;
  FieldMatrix out = FieldMatrix::identity(n, q);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && work(pivot, col) == 0) ++pivot;
    if (pivot == n) throw Error(ErrorCode::SingularMatrix, "no pivot in column " + std::to_string(col));
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(pivot, c), work(col, c));
        std::swap(out(pivot, c), out(col, c));
      }
    }
    const std::uint64_t scale = q.inv(work(col, col));
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) = q.mul(work(col, c), scale);
      out(col, c) = q.mul(out(col, c), scale);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const std::uint64_t factor = work(r, col);
      if (factor == 0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) = q.sub(work(r, c), q.mul(factor, work(col, c)));
        out(r, c) = q.sub(out(r, c), q.mul(factor, out(col, c)));
      }
    }
  }
  return out;
}

FieldVector solve_noiseless(const FieldMatrix& a, std::span<const std::uint64_t> b) {
  return mat_inverse(a) * b;
}

}  // namespace qlwe
