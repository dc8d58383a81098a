#include "qlwe/instance.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace qlwe {

std::string to_string(ErrorKind kind) {
  return kind == ErrorKind::UniformBounded ? "uniform" : "gaussian";
}

ErrorKind parse_error_kind(const std::string& text) {
  if (text == "uniform") return ErrorKind::UniformBounded;
  if (text == "gaussian") return ErrorKind::TruncatedGaussian;
  throw Error(ErrorCode::ParseError, "unknown error distribution '" + text + "' (expected uniform|gaussian)");
}

double ErrorDistribution::effective_sigma() const noexcept {
  if (sigma > 0.0) return sigma;
  return static_cast<double>(bound) / 3.0;
}

void ErrorDistribution::validate(const Modulus& q) const {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "error bound must be non-negative");
  if (2 * static_cast<std::uint64_t>(bound) >= q.value()) {
    throw Error(ErrorCode::BoundTooLarge,
                "error bound " + std::to_string(bound) + " must be below q/2 for q=" + std::to_string(q.value()));
  }
  if (kind == ErrorKind::TruncatedGaussian && sigma < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "gaussian width must be positive");
  }
}

CenteredInt sample_error(const ErrorDistribution& chi, Rng& rng) {
  if (chi.bound <= 0) return 0;
  const auto width = static_cast<std::uint64_t>(2 * chi.bound + 1);
  if (chi.kind == ErrorKind::UniformBounded) {
    return static_cast<CenteredInt>(uniform_below(rng, width)) - chi.bound;
  }
  const double s = chi.effective_sigma();
  const double inv_two_var = 1.0 / (2.0 * s * s);
  for (;;) {
    const CenteredInt x = static_cast<CenteredInt>(uniform_below(rng, width)) - chi.bound;
    const double weight = std::exp(-static_cast<double>(x * x) * inv_two_var);
    if (uniform_unit(rng) < weight) return x;
  }
}

FieldVector gen_secret(std::size_t n, std::uint64_t q, Rng& rng) {
  const Modulus m(q);
  if (n == 0) throw Error(ErrorCode::InvalidLength, "secret length must be at least 1");
  FieldVector s(n);
  for (auto& x : s) x = uniform_below(rng, m.value());
  return s;
}

LweInstance::LweInstance(Modulus q, FieldVector secret, ErrorDistribution chi)
    : q_(q), secret_(std::move(secret)), chi_(chi) {
  if (secret_.empty()) throw Error(ErrorCode::InvalidLength, "secret length must be at least 1");
  for (auto x : secret_) {
    if (x >= q_.value()) throw Error(ErrorCode::InvalidArgument, "secret entry out of range");
  }
  chi_.validate(q_);
}

LweInstance make_instance(std::size_t n, std::uint64_t q, const ErrorDistribution& chi, Rng& rng) {
  FieldVector s = gen_secret(n, q, rng);
  return {Modulus(q), std::move(s), chi};
}

Sample gen_sample(const LweInstance& instance, Rng& rng) {
  const Modulus& q = instance.modulus();
  FieldVector a(instance.n());
  for (auto& x : a) x = uniform_below(rng, q.value());
  const CenteredInt eta = sample_error(instance.chi(), rng);
  const std::uint64_t b = q.add(dot(a, instance.secret(), q), q.reduce(eta));
  return {std::move(a), b, eta};
}

FieldVector solve_noiseless(std::span<const PublicSample> samples, const Modulus& q) {
  std::vector<FieldVector> rows;
  FieldVector b;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    rows.push_back(s.a);
    b.push_back(s.b % q.value());
  }
  const auto a = FieldMatrix::from_rows(rows, q);
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::InvalidLength, "need exactly n samples of length n");
  }
  return solve_noiseless(a, b);
}

void write_instance(std::ostream& out, const LweInstance& instance, std::span<const Sample> samples,
                    std::uint64_t seed) {
  out << instance.n() << ' ' << instance.modulus().value() << ' ' << instance.chi().bound << ' '
      << to_string(instance.chi().kind) << ' ' << seed << '\n';
  for (const auto& s : samples) {
    for (auto x : s.a()) out << x << ' ';
    out << s.b() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing instance");
}

void write_secret(std::ostream& out, const LweInstance& instance) {
  const auto& s = instance.secret();
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
  out << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing secret");
}

InstanceFile read_instance(std::istream& in) {
  InstanceFile file;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "missing instance header");
  {
    std::istringstream header(line);
    std::string kind;
    if (!(header >> file.header.n >> file.header.q >> file.header.xi >> kind >> file.header.seed)) {
      throw Error(ErrorCode::ParseError, "malformed header '" + line + "'");
    }
    file.header.kind = parse_error_kind(kind);
  }
  const Modulus q(file.header.q);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<std::uint64_t> values;
    std::uint64_t v = 0;
    while (row >> v) values.push_back(v);
    if (!row.eof() || values.size() != file.header.n + 1) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(file.header.n + 1) + " integers");
    }
    for (auto x : values) {
      if (x >= q.value()) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": value >= q");
    }
    PublicSample s;
    s.b = values.back();
    values.pop_back();
    s.a = std::move(values);
    file.samples.push_back(std::move(s));
  }
  return file;
}

FieldVector read_secret(std::istream& in, std::size_t n) {
  FieldVector s;
  std::uint64_t v = 0;
  while (in >> v) s.push_back(v);
  if (s.size() != n) throw Error(ErrorCode::ParseError, "secret sidecar has " + std::to_string(s.size()) +
                                                          " entries, expected " + std::to_string(n));
  return s;
}

}  // namespace qlwe
