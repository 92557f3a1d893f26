#pragma once

// Birkhoff normalization by Lie transforms with interval coefficients.
//
// Convention: L_chi f = {f, chi}; the transformed Hamiltonian is
// exp(L_chi) H. At order r the generator solves {Z2, chi_r} = -f_r^nd with
// Z2 = sum_j Omega_j i w_j z_j, i.e. chi_hk = f_hk / (i Omega.(h-k)).

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bnf/cpoly.hpp"
#include "bnf/rint.hpp"

namespace bnf {

class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(const MultiIndex& index, const Interval& divisor);
  const MultiIndex& index() const { return index_; }
  const Interval& divisor() const { return divisor_; }

 private:
  MultiIndex index_;
  Interval divisor_;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct NormalForm {
  int n = 0;
  int N = 0;
  int M = 0;
  std::vector<Interval> omega;
  ActionPoly Z;
  // Every term of degree N+1..M, diagonal ones included.
  SeriesWZ remainder;
  // chi_3..chi_N (index r-3).
  std::vector<SeriesWZ> generators;
  std::optional<Interval> bN;
  bool certifiedTail = false;
};

// Omega.nu as an interval.
Interval divisor(const std::vector<Interval>& omega, const std::vector<int>& nu);
Interval divisor(const std::vector<Interval>& omega, Packed e, int n);

// Z2 = sum_j Omega_j i w_j z_j.
SeriesWZ quadraticPart(const std::vector<Interval>& omega, int maxDegree);

// Throws ResonanceError when a divisor at degree <= N contains zero and
// std::invalid_argument when H does not start with the quadratic part Z2.
NormalForm normalize(const SeriesWZ& H, const std::vector<Interval>& omega, int N, int M);

// Independent path used to cross-check Z: the full Lie series including the
// Z2 bracket, truncated at degree N. The eliminated terms are checked to
// enclose zero instead of being zeroed by construction.
ActionPoly normalizeZExplicit(const SeriesWZ& H, const std::vector<Interval>& omega, int N);

// exp(L_chi) f truncated at degree cap.
SeriesWZ lieTransform(const SeriesWZ& f, const SeriesWZ& chi, int cap);

// (bN rho)^{M+1} / (1 - bN rho); DomainError when bN rho >= 1 is possible.
Interval tailNorm(const Interval& bN, int M, const Interval& rho);
Interval tailNorm(const NormalForm& nf, const Interval& rho);

// max_{N < j <= M} ||f^{(j)}||_1^{1/j} times safety. Not a certified bound.
Interval estimateBN(const NormalForm& nf, double safety = 1.0);

void saveNormalForm(std::ostream& os, const NormalForm& nf);
NormalForm loadNormalForm(std::istream& is);

}  // namespace bnf
