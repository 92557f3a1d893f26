#pragma once

// Stability-time and action-variation estimates for a Hamiltonian in
// Birkhoff normal form: index classification, the constants L and a, the
// classical time Tc and the improved times T0 and T1.
//
// Every reported time is a certified lower bound: numerators are bounded
// from below and denominators from above.

#include <map>
#include <string>
#include <vector>

#include "bnf/cpoly.hpp"
#include "bnf/nform.hpp"
#include "bnf/rint.hpp"

namespace bnf {

struct EstimateParams {
  int n = 0;
  int N = 0;
  int M = 0;
  Interval alpha = Interval(0.2);
  Interval a = Interval(0.0);
  Interval R = Interval(0.0);
  Interval R0 = Interval(0.0);
  std::vector<Interval> omega;
  Interval L = Interval(0.0);

  // Throws std::invalid_argument unless 0 < alpha <= 1/2 and 0 < R <= R0/2.
  void validate() const;
};

enum class CondStatus { Holds, Fails, Undecidable };
const char* toString(CondStatus s);

// Certified lower bound on a time; +inf when the remainder vanishes.
struct TimeBound {
  bool defined = false;
  Interval value = Interval(0.0);
  std::string reason;

  static TimeBound infinite();
  static TimeBound undefined(std::string why);
  double lower() const { return value.lo(); }
  double log10Lower() const;
};

struct MinDivisor {
  Interval value;
  std::vector<int> nu;
};

struct AChoice {
  enum class Branch { First, MinDivisor, Undecided };
  Interval a;
  Interval firstBranch;
  Interval minDivisor;
  Branch branch = Branch::MinDivisor;
};
const char* toString(AChoice::Branch b);

// Per-degree sums of coefficient moduli, as certified lower and upper bounds.
struct DegreeSums {
  std::vector<double> lo;
  std::vector<double> hi;

  explicit DegreeSums(int maxDegree = 0) : lo(maxDegree + 1, 0.0), hi(maxDegree + 1, 0.0) {}
  bool isZero() const;
  // Enclosure of sum_d s_d rho^d.
  Interval norm(const Interval& rho) const;
};

// Non-diagonal remainder terms pre-digested for repeated classification:
// degree, |h - k|, |Omega.(h-k)| and the coefficient modulus.
class RemainderBook {
 public:
  struct Entry {
    int degree;
    int shell;
    Interval absDivisor;
    double modLo;
    double modHi;
  };

  explicit RemainderBook(const NormalForm& nf);

  const NormalForm& normalForm() const { return *nf_; }
  const std::vector<Entry>& entries() const { return entries_; }
  // f_{N,M}: every non-diagonal explicit term.
  const DegreeSums& explicitSums() const { return explicit_; }
  // Sums restricted to one class (NonResonant or Resonant) for the given a.
  DegreeSums classSums(IndexClass cls, const Interval& a) const;
  // Resonant sums split by shell K = |h - k| (index K).
  std::vector<DegreeSums> resonantShellSums(const Interval& a) const;

 private:
  const NormalForm* nf_;
  std::vector<Entry> entries_;
  DegreeSums explicit_;
};

// max_i max_{D(R0)} sum_j |d^2 Z / dI_i dI_j|, bounded over |I_l| <= R0^2.
Interval computeL(const ActionPoly& Z, const Interval& R0);
// Z plus the diagonal remainder terms, as the action function whose Hessian
// controls the frequency drift.
ActionPoly effectiveZ(const NormalForm& nf);

IndexClass classifyIndex(const MultiIndex& m, const EstimateParams& p);
IndexClass classifyIndex(int degree, bool diagonal, const Interval& absDivisor, int N, int M, const Interval& a);

// Sign flips (w_j, z_j) -> -(w_j, z_j), j in mask, that leave every term of f
// invariant. Such symmetries survive normalization, so a lattice vector nu can
// only occur as h - k when sum_{j in mask} nu_j is even for every mask.
std::vector<unsigned> paritySymmetries(const SeriesWZ& f);

// Minimum of |Omega.nu| over lattice vectors realizable as h - k with
// N < |h|+|k| <= M and compatible with the given parity masks. The witness is
// the graded-lex smallest minimizer.
MinDivisor minDivisor(int N, int M, const std::vector<Interval>& omega, const std::vector<unsigned>& parityMasks = {});

AChoice chooseA(const Interval& R, const Interval& L, int M, const Interval& alpha, const MinDivisor& md);
AChoice chooseA(const Interval& R, const Interval& L, int M, const Interval& alpha, const std::vector<Interval>& omega,
                int N, const std::vector<unsigned>& parityMasks = {});

// Norms entering the time bounds at one radius. fuv is the tail bound; f is
// ||f_{N,M}|| plus the tail.
struct NormBook {
  Interval rho;
  Interval f0;
  Interval fstar;
  Interval fexplicit;
  Interval fuv;
  Interval f;
  bool tailFinite = true;
};
NormBook normBook(const RemainderBook& book, const EstimateParams& p, const Interval& rho);

// Pure formulas on given norm upper bounds.
TimeBound classicalTimeFromNorm(const Interval& R, const Interval& alpha, const Interval& f);
// Zero norms drop the corresponding argument of the minimum.
TimeBound t0FromNorms(int n, int N, int M, const Interval& alpha, const Interval& a, const Interval& R,
                      const Interval& R0, const Interval& fR0, const Interval& fuvR0, const Interval& fstar);
TimeBound t1FromNorms(int n, const Interval& alpha, const Interval& a, const Interval& R, const Interval& f0,
                      const Interval& f, const Interval& fuv, const Interval& fstar);

TimeBound classicalTime(const RemainderBook& book, const EstimateParams& p);

// cond1: smallness condition, cond2: smallness of ||f0||_{R0} for T0,
// cond3: second smallness on ||f0||_{(1+2 alpha) R}. cond2 is evaluated
// with R0 replaced by 2R (see timeT0).
std::map<std::string, CondStatus> checkConditions(const RemainderBook& book, const EstimateParams& p);

// T0 with the smallest admissible analyticity radius R0' = 2R, where
// the tail estimate for ||f^*||_{R0'} converges.
TimeBound timeT0(const RemainderBook& book, const EstimateParams& p);
TimeBound timeT1(const RemainderBook& book, const EstimateParams& p);

struct ActionVariation {
  // Upper bounds.
  double psiBound = 0.0;  // sup |psi_0|
  double rate = 0.0;
  double classicalRate = 0.0;
  double improved = 0.0;   // 2 psiBound + rate T
  double classical = 0.0;  // classicalRate T
  // T beyond which improved <= classical; +inf when the rates never allow it.
  double crossover = 0.0;
};
ActionVariation actionVariationBound(const RemainderBook& book, const EstimateParams& p, double T);

// #Lambda_{a,K} (2R/R0)^{max(K, N+1)} ||f_{N,M}||_{R0}.
Interval resonantTermBound(const RemainderBook& book, const EstimateParams& p, int K, long long lambdaCount);

struct StabilityReport {
  Interval R;
  AChoice a;
  MinDivisor minDivisor;
  NormBook norms;
  std::map<std::string, CondStatus> conditions;
  TimeBound Tc, T0, T1;
  bool tailDiverges = false;
};

struct ScanSetup {
  Interval alpha = Interval(0.2);
  Interval R0;
  Interval L;
  MinDivisor minDivisor;
};
// R0 = 1/bN; throws std::invalid_argument when nf has no bN. Parity masks
// are read off the remainder.
ScanSetup prepareScan(const NormalForm& nf, const Interval& alpha);
StabilityReport evaluateRadius(const RemainderBook& book, const ScanSetup& setup, const Interval& R);

}  // namespace bnf
