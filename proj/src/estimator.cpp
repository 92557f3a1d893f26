#include "bnf/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnf {

namespace {

using rounding::addDown;
using rounding::addUp;
using rounding::mulDown;
using rounding::mulUp;

constexpr double kInf = std::numeric_limits<double>::infinity();

CondStatus leq(const Interval& x, double bound) {
  if (x.hi() <= bound) return CondStatus::Holds;
  if (x.lo() > bound) return CondStatus::Fails;
  return CondStatus::Undecidable;
}

CondStatus less(const Interval& x, double bound) {
  if (x.hi() < bound) return CondStatus::Holds;
  if (x.lo() >= bound) return CondStatus::Fails;
  return CondStatus::Undecidable;
}

bool tailConverges(const NormalForm& nf, const Interval& rho) {
  return !nf.bN || (*nf.bN * rho).hi() < 1.0;
}

Interval tailOrZero(const NormalForm& nf, const Interval& rho) {
  if (!nf.bN) return Interval(0.0);
  return tailNorm(*nf.bN, nf.M, rho);
}

// Graded-lexicographic order on integer vectors.
bool gradedLexLess(const std::vector<int>& a, const std::vector<int>& b) {
  int na = 0, nb = 0;
  for (int x : a) na += std::abs(x);
  for (int x : b) nb += std::abs(x);
  if (na != nb) return na < nb;
  return a < b;
}

Interval rhoOf(const Interval& alpha, const Interval& R) { return (Interval(1.0) + Interval(2.0) * alpha) * R; }

}  // namespace

void EstimateParams::validate() const {
  if (!(alpha.lo() > 0.0 && alpha.hi() <= 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2]");
  if (!(R.lo() > 0.0)) throw std::invalid_argument("R must be positive");
  if (!(R.hi() <= (R0 / Interval(2.0)).lo())) throw std::invalid_argument("R must not exceed R0/2");
  if (M < N + 1) throw std::invalid_argument("M must be at least N+1");
}

const char* toString(CondStatus s) {
  switch (s) {
    case CondStatus::Holds:
      return "holds";
    case CondStatus::Fails:
      return "fails";
    default:
      return "undecidable";
  }
}

const char* toString(AChoice::Branch b) {
  switch (b) {
    case AChoice::Branch::First:
      return "first";
    case AChoice::Branch::MinDivisor:
      return "mindiv";
    default:
      return "undecided";
  }
}

TimeBound TimeBound::infinite() {
  TimeBound t;
  t.defined = true;
  t.value = Interval(kInf, kInf);
  return t;
}

TimeBound TimeBound::undefined(std::string why) {
  TimeBound t;
  t.reason = std::move(why);
  return t;
}

double TimeBound::log10Lower() const {
  if (!defined) return std::numeric_limits<double>::quiet_NaN();
  if (value.lo() == kInf) return kInf;
  if (!(value.lo() > 0.0)) return -kInf;
  return log10Down(value.lo());
}

// ---------------------------------------------------------------------------
// Remainder bookkeeping.

bool DegreeSums::isZero() const {
  return std::all_of(hi.begin(), hi.end(), [](double x) { return x == 0.0; });
}

Interval DegreeSums::norm(const Interval& rho) const {
  double up = 0.0, down = 0.0;
  for (int d = static_cast<int>(hi.size()) - 1; d >= 0; --d) {
    up = addUp(mulUp(up, rho.hi()), hi[d]);
    down = addDown(mulDown(down, rho.lo()), lo[d]);
  }
  return Interval(down, up);
}

RemainderBook::RemainderBook(const NormalForm& nf) : nf_(&nf), explicit_(nf.remainder.maxDegree()) {
  const int n = nf.n;
  nf.remainder.forEachTerm([&](Packed e, const ComplexInterval& c) {
    const MultiIndex m = MultiIndex::unpack(e, n);
    if (m.isDiagonal()) return;
    int shell = 0;
    for (int v : m.difference()) shell += std::abs(v);
    const int d = m.degree();
    Entry entry{d, shell, abs(divisor(nf.omega, m.difference())), modulusLower(c), modulusUpper(c)};
    explicit_.lo[d] = addDown(explicit_.lo[d], entry.modLo);
    explicit_.hi[d] = addUp(explicit_.hi[d], entry.modHi);
    entries_.push_back(entry);
  });
}

DegreeSums RemainderBook::classSums(IndexClass cls, const Interval& a) const {
  DegreeSums s(nf_->remainder.maxDegree());
  for (const auto& e : entries_) {
    if (classifyIndex(e.degree, false, e.absDivisor, nf_->N, nf_->M, a) != cls) continue;
    s.lo[e.degree] = addDown(s.lo[e.degree], e.modLo);
    s.hi[e.degree] = addUp(s.hi[e.degree], e.modHi);
  }
  return s;
}

std::vector<DegreeSums> RemainderBook::resonantShellSums(const Interval& a) const {
  const int maxDeg = nf_->remainder.maxDegree();
  std::vector<DegreeSums> out(maxDeg + 1, DegreeSums(maxDeg));
  for (const auto& e : entries_) {
    if (classifyIndex(e.degree, false, e.absDivisor, nf_->N, nf_->M, a) != IndexClass::Resonant) continue;
    auto& s = out[e.shell];
    s.lo[e.degree] = addDown(s.lo[e.degree], e.modLo);
    s.hi[e.degree] = addUp(s.hi[e.degree], e.modHi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constants.

Interval computeL(const ActionPoly& Z, const Interval& R0) {
  const int n = Z.dim();
  const Interval rho = sqr(R0);
  Interval L(0.0);
  for (int i = 0; i < n; ++i) {
    Interval row(0.0);
    for (int j = 0; j < n; ++j) {
      Interval bound(0.0);
      for (const auto& [e, c] : Z.terms()) {
        int factor = e[i];
        std::vector<int> rest = e;
        if (factor == 0) continue;
        --rest[i];
        factor *= rest[j];
        if (factor == 0) continue;
        --rest[j];
        int deg = 0;
        for (int x : rest) deg += x;
        bound += abs(c) * Interval(static_cast<double>(factor)) * pow(rho, deg);
      }
      row += bound;
    }
    L = max(L, row);
  }
  return L;
}

ActionPoly effectiveZ(const NormalForm& nf) {
  ActionPoly Z = nf.Z;
  const ActionPoly extra = toActionPoly(nf.remainder.diagonalPart());
  for (const auto& [e, c] : extra.terms()) Z.addCoeff(e, c);
  return Z;
}

IndexClass classifyIndex(int degree, bool diagonal, const Interval& absDivisor, int N, int M, const Interval& a) {
  if (degree > M) return IndexClass::Ultraviolet;
  if (degree <= N || diagonal) return IndexClass::DiagonalOrLow;
  // Straddling comparisons fall on the resonant side.
  if (absDivisor.lo() >= a.hi()) return IndexClass::NonResonant;
  return IndexClass::Resonant;
}

IndexClass classifyIndex(const MultiIndex& m, const EstimateParams& p) {
  const bool diagonal = m.isDiagonal();
  const Interval d = diagonal ? Interval(0.0) : abs(divisor(p.omega, m.difference()));
  return classifyIndex(m.degree(), diagonal, d, p.N, p.M, p.a);
}

std::vector<unsigned> paritySymmetries(const SeriesWZ& f) {
  const int n = f.dim();
  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    bool invariant = true;
    f.forEachTerm([&](Packed e, const ComplexInterval&) {
      int s = 0;
      for (int j = 0; j < n; ++j) {
        if (mask & (1u << j)) s += exponentOf(e, j) + exponentOf(e, n + j);
      }
      invariant = invariant && s % 2 == 0;
    });
    if (invariant) masks.push_back(mask);
  }
  return masks;
}

MinDivisor minDivisor(int N, int M, const std::vector<Interval>& omega, const std::vector<unsigned>& parityMasks) {
  if (M < N + 1 || N < 1) throw std::invalid_argument("minDivisor requires M >= N+1 >= 2");
  const int n = static_cast<int>(omega.size());
  if (n == 0) throw std::invalid_argument("minDivisor requires at least one frequency");
  bool found = false;
  MinDivisor best;
  double minLo = kInf;
  std::vector<int> nu(n, 0);
  // Depth-first enumeration of nu with |nu| <= M.
  auto visit = [&](auto&& self, int v, int used) -> void {
    if (v == n) {
      if (used == 0) return;
      int d0 = std::max(N + 1, used);
      if ((d0 - used) % 2 != 0) ++d0;
      if (d0 > M) return;
      for (unsigned mask : parityMasks) {
        int s = 0;
        for (int j = 0; j < n; ++j) {
          if (mask & (1u << j)) s += nu[j];
        }
        if (s % 2 != 0) return;
      }
      const Interval val = abs(divisor(omega, nu));
      minLo = std::min(minLo, val.lo());
      if (!found || val.hi() < best.value.hi() || (val.hi() == best.value.hi() && gradedLexLess(nu, best.nu))) {
        best.value = val;
        best.nu = nu;
        found = true;
      }
      return;
    }
    for (int x = -(M - used); x <= M - used; ++x) {
      nu[v] = x;
      self(self, v + 1, used + std::abs(x));
    }
    nu[v] = 0;
  };
  visit(visit, 0, 0);
  if (!found) throw std::logic_error("no admissible lattice vector");
  best.value = Interval(minLo, best.value.hi());
  return best;
}

AChoice chooseA(const Interval& R, const Interval& L, int M, const Interval& alpha, const MinDivisor& md) {
  AChoice c;
  c.minDivisor = md.value;
  c.firstBranch = Interval(2.0) * L * Interval(static_cast<double>(M)) * sqr(Interval(1.0) + Interval(2.0) * alpha) *
                  sqr(R);
  // A point value: large enough for the smallness condition and no larger
  // than any admissible divisor when the divisor branch is active.
  c.a = Interval(std::max(c.firstBranch.hi(), md.value.lo()));
  if (c.firstBranch.lo() > md.value.hi()) {
    c.branch = AChoice::Branch::First;
  } else if (c.firstBranch.hi() < md.value.lo()) {
    c.branch = AChoice::Branch::MinDivisor;
  } else {
    c.branch = AChoice::Branch::Undecided;
  }
  return c;
}

AChoice chooseA(const Interval& R, const Interval& L, int M, const Interval& alpha, const std::vector<Interval>& omega,
                int N, const std::vector<unsigned>& parityMasks) {
  return chooseA(R, L, M, alpha, minDivisor(N, M, omega, parityMasks));
}

// ---------------------------------------------------------------------------
// Norms and times.

NormBook normBook(const RemainderBook& book, const EstimateParams& p, const Interval& rho) {
  const NormalForm& nf = book.normalForm();
  NormBook nb;
  nb.rho = rho;
  nb.f0 = book.classSums(IndexClass::NonResonant, p.a).norm(rho);
  nb.fstar = book.classSums(IndexClass::Resonant, p.a).norm(rho);
  nb.fexplicit = book.explicitSums().norm(rho);
  nb.tailFinite = tailConverges(nf, rho);
  nb.fuv = nb.tailFinite ? tailOrZero(nf, rho) : Interval(kInf, kInf);
  nb.f = nb.fexplicit + nb.fuv;
  return nb;
}

TimeBound classicalTimeFromNorm(const Interval& R, const Interval& alpha, const Interval& f) {
  if (f.hi() == 0.0) return TimeBound::infinite();
  TimeBound t;
  t.defined = true;
  t.value = sqr(R) * sqr(alpha) * (Interval(2.0) + alpha) / (Interval(2.0) * (Interval(1.0) + alpha) * f);
  return t;
}

TimeBound t0FromNorms(int n, int N, int M, const Interval& alpha, const Interval& a, const Interval& R,
                      const Interval& R0, const Interval& fR0, const Interval& fuvR0, const Interval& fstar) {
  const Interval one(1.0), two(2.0);
  const Interval ratio = R0 / (two * R);
  Interval m(kInf, kInf);
  bool any = false;
  auto take = [&](const Interval& x) {
    m = any ? min(m, x) : x;
    any = true;
  };
  if (fR0.hi() > 0.0) {
    take(a * pow(R0, 4) * pow(alpha, 3) /
         (Interval(1024.0) * Interval(static_cast<double>(n)) * (one + two * alpha) * sqr(fR0)) *
         pow(ratio, 2 * N - 2));
  }
  if (fuvR0.hi() > 0.0) take(alpha * sqr(R0) / (Interval(8.0) * fuvR0) * pow(ratio, M - 1));
  if (fstar.hi() > 0.0) take(alpha * sqr(R) / (two * fstar));
  if (!any) return TimeBound::infinite();
  TimeBound t;
  t.defined = true;
  t.value = (sqr(alpha) + two * alpha) / Interval(4.0) * m;
  return t;
}

TimeBound t1FromNorms(int n, const Interval& alpha, const Interval& a, const Interval& R, const Interval& f0,
                      const Interval& f, const Interval& fuv, const Interval& fstar) {
  const Interval one(1.0), two(2.0);
  const Interval k = one + two * alpha;
  const Interval num = (sqr(alpha) + two * alpha) * sqr(R) - Interval(16.0) * k / (alpha * a) * f0;
  const Interval den = Interval(64.0 * n) * k / (a * sqr(R) * pow(alpha, 3)) * f0 * f + two / alpha * fuv +
                       two / alpha * fstar;
  if (den.hi() == 0.0) return TimeBound::infinite();
  if (!(num.lo() > 0.0)) return TimeBound::undefined("T1 numerator not certified positive");
  TimeBound t;
  t.defined = true;
  t.value = num / den;
  return t;
}

TimeBound classicalTime(const RemainderBook& book, const EstimateParams& p) {
  const Interval rho = rhoOf(p.alpha, p.R);
  if (!tailConverges(book.normalForm(), rho)) return TimeBound::undefined("tail estimate diverges");
  return classicalTimeFromNorm(p.R, p.alpha, book.explicitSums().norm(rho) + tailOrZero(book.normalForm(), rho));
}

std::map<std::string, CondStatus> checkConditions(const RemainderBook& book, const EstimateParams& p) {
  const Interval one(1.0), two(2.0);
  const Interval k = one + two * p.alpha;
  const Interval aa = sqr(p.alpha) + two * p.alpha;
  std::map<std::string, CondStatus> out;
  out["cond1"] = leq(two * p.L * Interval(static_cast<double>(p.M)) * sqr(k) * sqr(p.R) / p.a, 1.0);

  const DegreeSums f0 = book.classSums(IndexClass::NonResonant, p.a);
  const Interval R0p = two * p.R;
  out["cond2"] = leq(Interval(256.0) * k / (p.alpha * aa * sqr(R0p) * p.a) * pow(two * p.R / R0p, p.N - 1) *
                         f0.norm(R0p),
                     1.0);
  out["cond3"] = less(Interval(16.0) * k / (p.alpha * aa * p.a) * f0.norm(rhoOf(p.alpha, p.R)) / sqr(p.R), 1.0);
  return out;
}

TimeBound timeT0(const RemainderBook& book, const EstimateParams& p) {
  const auto cond = checkConditions(book, p);
  if (cond.at("cond1") != CondStatus::Holds) return TimeBound::undefined("smallness condition not certified");
  if (cond.at("cond2") != CondStatus::Holds) return TimeBound::undefined("smallness for T0 not certified");
  const NormalForm& nf = book.normalForm();
  const Interval R0p = Interval(2.0) * p.R;
  if (!tailConverges(nf, R0p)) return TimeBound::undefined("tail estimate diverges at 2R");
  const Interval fuv = tailOrZero(nf, R0p);
  const Interval f = book.explicitSums().norm(R0p) + fuv;
  const Interval fstar = book.classSums(IndexClass::Resonant, p.a).norm(rhoOf(p.alpha, p.R));
  return t0FromNorms(p.n, p.N, p.M, p.alpha, p.a, p.R, R0p, f, fuv, fstar);
}

TimeBound timeT1(const RemainderBook& book, const EstimateParams& p) {
  const auto cond = checkConditions(book, p);
  if (cond.at("cond1") != CondStatus::Holds) return TimeBound::undefined("smallness condition not certified");
  if (cond.at("cond3") != CondStatus::Holds) return TimeBound::undefined("second smallness not certified");
  const Interval rho = rhoOf(p.alpha, p.R);
  if (!tailConverges(book.normalForm(), rho)) return TimeBound::undefined("tail estimate diverges");
  const NormBook nb = normBook(book, p, rho);
  return t1FromNorms(p.n, p.alpha, p.a, p.R, nb.f0, nb.f, nb.fuv, nb.fstar);
}

ActionVariation actionVariationBound(const RemainderBook& book, const EstimateParams& p, double T) {
  const auto cond = checkConditions(book, p);
  if (cond.at("cond1") != CondStatus::Holds) throw std::domain_error("smallness condition not certified");
  const Interval rho = rhoOf(p.alpha, p.R);
  if (!tailConverges(book.normalForm(), rho)) throw DomainError("tail estimate diverges");
  const NormBook nb = normBook(book, p, rho);
  const Interval one(1.0), two(2.0);
  const Interval k = one + two * p.alpha;
  ActionVariation v;
  v.psiBound = (Interval(8.0) * k / (p.alpha * p.a) * nb.f0).hi();
  v.rate = (Interval(64.0 * p.n) * k / (p.a * sqr(p.R) * pow(p.alpha, 3)) * nb.f0 * nb.f + two / p.alpha * nb.fuv +
            two / p.alpha * nb.fstar)
               .hi();
  v.classicalRate = (two * (one + p.alpha) / p.alpha * nb.f).hi();
  v.improved = addUp(mulUp(2.0, v.psiBound), mulUp(v.rate, T));
  v.classical = mulUp(v.classicalRate, T);
  v.crossover = v.classicalRate > v.rate ? rounding::divUp(mulUp(2.0, v.psiBound), rounding::subDown(v.classicalRate, v.rate))
                                         : kInf;
  return v;
}

Interval resonantTermBound(const RemainderBook& book, const EstimateParams& p, int K, long long lambdaCount) {
  if (K < 1) throw std::invalid_argument("K must be positive");
  if (lambdaCount == 0) return Interval(0.0);
  return Interval(static_cast<double>(lambdaCount)) * pow(Interval(2.0) * p.R / p.R0, std::max(K, p.N + 1)) *
         book.explicitSums().norm(p.R0);
}

// ---------------------------------------------------------------------------
// Scan.

ScanSetup prepareScan(const NormalForm& nf, const Interval& alpha) {
  if (!nf.bN) throw std::invalid_argument("scan requires a tail parameter bN (or R0)");
  ScanSetup s;
  s.alpha = alpha;
  // bN = 0 means the Hamiltonian is a polynomial of degree <= M.
  s.R0 = nf.bN->hi() == 0.0 ? Interval(std::numeric_limits<double>::max(), kInf) : Interval(1.0) / *nf.bN;
  s.L = computeL(effectiveZ(nf), s.R0);
  // An empty remainder is invariant under every sign flip; its masks carry no information.
  const SeriesWZ nd = nf.remainder.nonDiagonalPart();
  s.minDivisor = minDivisor(nf.N, nf.M, nf.omega, nd.isZero() ? std::vector<unsigned>{} : paritySymmetries(nd));
  return s;
}

StabilityReport evaluateRadius(const RemainderBook& book, const ScanSetup& setup, const Interval& R) {
  const NormalForm& nf = book.normalForm();
  StabilityReport rep;
  rep.R = R;
  rep.minDivisor = setup.minDivisor;
  rep.a = chooseA(R, setup.L, nf.M, setup.alpha, setup.minDivisor);

  EstimateParams p;
  p.n = nf.n;
  p.N = nf.N;
  p.M = nf.M;
  p.alpha = setup.alpha;
  p.a = rep.a.a;
  p.R = R;
  p.R0 = setup.R0;
  p.omega = nf.omega;
  p.L = setup.L;

  const Interval rho = rhoOf(p.alpha, R);
  rep.norms = normBook(book, p, rho);
  rep.tailDiverges = !rep.norms.tailFinite;
  rep.conditions = checkConditions(book, p);
  rep.Tc = rep.tailDiverges ? TimeBound::undefined("tail estimate diverges") : classicalTime(book, p);
  const bool inDomain = R.hi() <= (setup.R0 / Interval(2.0)).lo();
  if (!inDomain) {
    rep.T0 = TimeBound::undefined("R exceeds R0/2");
    rep.T1 = TimeBound::undefined("R exceeds R0/2");
  } else {
    rep.T0 = timeT0(book, p);
    rep.T1 = timeT1(book, p);
  }
  return rep;
}

}  // namespace bnf
