#pragma once

// Counting near-resonant lattice vectors
//   Lambda_{a,K}(Omega) = { nu in Z^n : |nu| = K, |Omega.nu| < a }
// by exhaustive enumeration (any n) and by the closed form available for n = 3.
//
// Frequencies and a are plain doubles taken as exact values; every comparison
// is decided exactly, with interval arithmetic first and exact rationals when
// the interval test straddles.

#include <cstdint>
#include <vector>

namespace bnf {

struct LatticeSpec {
  std::vector<double> omega;
  double a = 0.0;
  int K = 1;
  int M = 0;
};

struct LatticeCount {
  long long count = 0;
  // Lexicographically ascending; filled only on request.
  std::vector<std::vector<int>> witnesses;
};

LatticeCount bruteForceCount(const LatticeSpec& spec, bool withWitnesses = false);

// Exact test |Omega.nu| < a.
bool nearResonant(const std::vector<double>& omega, const std::vector<int>& nu, double a);

struct NormalizedOmega {
  std::vector<double> omega;
  // omega[i] = sign * input[perm[i]].
  std::vector<int> perm;
  int sign = 1;
};
// Reorders to |O1| >= |O2| >= |O3| and flips the global sign so that O1 > 0.
NormalizedOmega normalizeOmega(const std::vector<double>& omega);
bool isNormalized(const std::vector<double>& omega);

// Closed-form cardinality for n = 3; requires normalized frequencies.
long long closedFormCount3(const LatticeSpec& spec);

// Building blocks of the closed form, exposed for tests. sector 0 is (+,+),
// sector 1 is (+,-).
long long closedFormSector(const std::vector<double>& omega, double a, int J, int K, int sector);
long long closedFormM(const std::vector<double>& omega, double a, int J, int K);

struct SectorCounts {
  int J = 0;
  long long minus = 0;  // nu_3 < 0
  long long zero = 0;   // nu_3 = 0 (only J = K)
  long long plus = 0;   // nu_3 > 0
  // Sectors (+,+), (+,-), (-,+), (-,-) of the nu_3 > 0 part, or of the
  // nu_3 = 0 part when J = K.
  long long pp = 0, pm = 0, mp = 0, mm = 0;
};

struct SymmetryReport {
  std::vector<SectorCounts> byJ;  // J = 0..K
  std::vector<SectorCounts> byJReversed;
  // #minus = #plus per J, #(-,-)(O) = #(+,+)(O^rev), #(-,+)(O) = #(+,-)(O^rev),
  // and the parts add up to the total.
  bool consistent = false;
  long long total = 0;
};
SymmetryReport symmetryDecomposition(const LatticeSpec& spec);

// #{nu in Z^n : |nu| = K}.
std::uint64_t shellCount(int n, int K);

}  // namespace bnf
