#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qlwe {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Structural invariants: kernel unitarity on random states, exhaustive
// modular inverses for every prime q <= 101, the elimination identity
// b' = a' s_j + eta' with its triangle bound, and completeness of the M-trial
// test for the true coordinate value.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed);

// Prints one PASS/FAIL line per check; returns true if all passed.
bool print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks);

}  // namespace qlwe
