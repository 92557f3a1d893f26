#include "bnf/cpoly.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace bnf {

using namespace rounding;

int MultiIndex::degree() const {
  int d = 0;
  for (int x : h) d += x;
  for (int x : k) d += x;
  return d;
}

std::vector<int> MultiIndex::difference() const {
  std::vector<int> nu(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) nu[j] = h[j] - k[j];
  return nu;
}

Packed MultiIndex::pack() const {
  if (h.size() != k.size()) throw DimensionError("multi-index halves differ in length");
  const int n = dim();
  if (2 * n > kMaxVariables) throw DimensionError("at most 4 degrees of freedom are supported");
  if (degree() > kMaxDegree) throw DimensionError("multi-index degree exceeds 255");
  Packed e = 0;
  for (int j = 0; j < n; ++j) {
    if (h[j] < 0 || k[j] < 0) throw DimensionError("negative exponent in multi-index");
    e = withExponent(e, j, h[j]);
    e = withExponent(e, n + j, k[j]);
  }
  return e;
}

MultiIndex MultiIndex::unpack(Packed e, int n) {
  MultiIndex m;
  m.h.resize(n);
  m.k.resize(n);
  for (int j = 0; j < n; ++j) {
    m.h[j] = exponentOf(e, j);
    m.k[j] = exponentOf(e, n + j);
  }
  return m;
}

ComplexInterval iPower(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0:
      return {Interval(1.0), Interval(0.0)};
    case 1:
      return {Interval(0.0), Interval(1.0)};
    case 2:
      return {Interval(-1.0), Interval(0.0)};
    default:
      return {Interval(0.0), Interval(-1.0)};
  }
}

// ---------------------------------------------------------------------------

SeriesWZ::SeriesWZ(int n, int maxDegree) : n_(n), maxDeg_(maxDegree) {
  if (n < 1 || 2 * n > kMaxVariables) throw DimensionError("series dimension must be 1..4");
  if (maxDegree < 0 || maxDegree > kMaxDegree) throw DimensionError("series degree cap must be 0..255");
  table_ = MonomialTable::get(2 * n);
  buckets_.resize(maxDegree + 1);
}

Packed SeriesWZ::checkedPack(const MultiIndex& m) const {
  if (m.dim() != n_) throw DimensionError("multi-index dimension does not match series");
  return m.pack();
}

void SeriesWZ::requireSame(const SeriesWZ& o) const {
  if (o.n_ != n_) throw DimensionError("series dimensions differ");
}

ComplexInterval SeriesWZ::coeff(Packed e) const {
  const int d = totalDegree(e);
  if (d > maxDeg_ || buckets_[d].empty()) return {};
  return buckets_[d][table_->rank(e, d)];
}

void SeriesWZ::setCoeff(Packed e, const ComplexInterval& c) {
  const int d = totalDegree(e);
  if (d > maxDeg_) throw DimensionError("term degree exceeds series degree cap");
  auto& b = mutableBucket(d);
  b[table_->rank(e, d)] = c;
}

void SeriesWZ::addCoeff(Packed e, const ComplexInterval& c) {
  const int d = totalDegree(e);
  if (d > maxDeg_ || c.isZero()) return;
  mutableBucket(d)[table_->rank(e, d)] += c;
}

const std::vector<ComplexInterval>& SeriesWZ::bucket(int degree) const {
  static const std::vector<ComplexInterval> kEmpty;
  if (degree < 0 || degree > maxDeg_) return kEmpty;
  return buckets_[degree];
}

std::vector<ComplexInterval>& SeriesWZ::mutableBucket(int degree) {
  auto& b = buckets_.at(degree);
  if (b.empty()) b.assign(table_->count(degree), ComplexInterval());
  return b;
}

bool SeriesWZ::isZero() const { return termCount() == 0; }

std::size_t SeriesWZ::termCount() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) {
    for (const auto& c : b) n += c.isZero() ? 0 : 1;
  }
  return n;
}

int SeriesWZ::minDegree() const {
  for (int d = 0; d <= maxDeg_; ++d) {
    for (const auto& c : buckets_[d]) {
      if (!c.isZero()) return d;
    }
  }
  return -1;
}

int SeriesWZ::topDegree() const {
  for (int d = maxDeg_; d >= 0; --d) {
    for (const auto& c : buckets_[d]) {
      if (!c.isZero()) return d;
    }
  }
  return -1;
}

std::vector<Term> SeriesWZ::terms(int degree) const {
  std::vector<Term> out;
  if (degree < 0 || degree > maxDeg_ || buckets_[degree].empty()) return out;
  const auto& b = buckets_[degree];
  const auto& mons = table_->monomials(degree);
  for (std::size_t r = 0; r < b.size(); ++r) {
    if (!b[r].isZero()) out.push_back({mons[r], b[r]});
  }
  return out;
}

void SeriesWZ::forEachTerm(const std::function<void(Packed, const ComplexInterval&)>& fn) const {
  for (int d = 0; d <= maxDeg_; ++d) {
    if (buckets_[d].empty()) continue;
    const auto& mons = table_->monomials(d);
    const auto& b = buckets_[d];
    for (std::size_t r = 0; r < b.size(); ++r) {
      if (!b[r].isZero()) fn(mons[r], b[r]);
    }
  }
}

SeriesWZ SeriesWZ::degreeRange(int lo, int hi) const {
  SeriesWZ out(n_, maxDeg_);
  for (int d = std::max(lo, 0); d <= std::min(hi, maxDeg_); ++d) out.buckets_[d] = buckets_[d];
  return out;
}

SeriesWZ SeriesWZ::homogeneous(int degree) const { return degreeRange(degree, degree); }

SeriesWZ SeriesWZ::truncated(int cap) const { return degreeRange(0, cap); }

SeriesWZ SeriesWZ::withMaxDegree(int maxDegree) const {
  SeriesWZ out(n_, maxDegree);
  for (int d = 0; d <= std::min(maxDegree, maxDeg_); ++d) out.buckets_[d] = buckets_[d];
  return out;
}

SeriesWZ SeriesWZ::filtered(const std::function<bool(Packed)>& keep) const {
  SeriesWZ out(n_, maxDeg_);
  for (int d = 0; d <= maxDeg_; ++d) {
    if (buckets_[d].empty()) continue;
    const auto& mons = table_->monomials(d);
    const auto& b = buckets_[d];
    for (std::size_t r = 0; r < b.size(); ++r) {
      if (!b[r].isZero() && keep(mons[r])) out.mutableBucket(d)[r] = b[r];
    }
  }
  return out;
}

namespace {
bool diagonal(Packed e, int n) {
  for (int j = 0; j < n; ++j) {
    if (exponentOf(e, j) != exponentOf(e, n + j)) return false;
  }
  return true;
}

Packed swapHalves(Packed e, int n) {
  const Packed mask = (Packed{1} << (8 * n)) - 1;
  return ((e & mask) << (8 * n)) | (e >> (8 * n));
}
}  // namespace

SeriesWZ SeriesWZ::diagonalPart() const {
  const int n = n_;
  return filtered([n](Packed e) { return diagonal(e, n); });
}

SeriesWZ SeriesWZ::nonDiagonalPart() const {
  const int n = n_;
  return filtered([n](Packed e) { return !diagonal(e, n); });
}

SeriesWZ& SeriesWZ::operator+=(const SeriesWZ& o) {
  requireSame(o);
  for (int d = 0; d <= std::min(maxDeg_, o.maxDeg_); ++d) {
    const auto& ob = o.buckets_[d];
    if (ob.empty()) continue;
    if (buckets_[d].empty()) {
      buckets_[d] = ob;
      continue;
    }
    auto& b = buckets_[d];
    for (std::size_t r = 0; r < ob.size(); ++r) {
      if (!ob[r].isZero()) b[r] += ob[r];
    }
  }
  return *this;
}

SeriesWZ& SeriesWZ::operator-=(const SeriesWZ& o) {
  requireSame(o);
  for (int d = 0; d <= std::min(maxDeg_, o.maxDeg_); ++d) {
    const auto& ob = o.buckets_[d];
    if (ob.empty()) continue;
    auto& b = mutableBucket(d);
    for (std::size_t r = 0; r < ob.size(); ++r) {
      if (!ob[r].isZero()) b[r] -= ob[r];
    }
  }
  return *this;
}

SeriesWZ& SeriesWZ::operator*=(const ComplexInterval& s) {
  for (auto& b : buckets_) {
    for (auto& c : b) {
      if (!c.isZero()) c = c * s;
    }
  }
  return *this;
}

SeriesWZ& SeriesWZ::operator/=(const Interval& s) {
  if (s.containsZero()) throw IntervalError("series division by an interval containing zero");
  for (auto& b : buckets_) {
    for (auto& c : b) {
      if (!c.isZero()) c = c / s;
    }
  }
  return *this;
}

bool SeriesWZ::realitySymmetric() const {
  bool ok = true;
  forEachTerm([&](Packed e, const ComplexInterval& c) {
    const int d = totalDegree(e);
    const ComplexInterval expected = coeff(swapHalves(e, n_)).conj() * iPower(d);
    if (!(c - expected).containsZero()) ok = false;
  });
  return ok;
}

SeriesWZ SeriesWZ::monomial(int n, const MultiIndex& m, const ComplexInterval& c, int maxDegree) {
  SeriesWZ s(n, maxDegree);
  s.setCoeff(m, c);
  return s;
}

SeriesWZ SeriesWZ::action(int n, int j, int maxDegree) {
  SeriesWZ s(n, maxDegree);
  s.setCoeff(unitExponent(j) | unitExponent(n + j), ComplexInterval::i());
  return s;
}

SeriesWZ SeriesWZ::variable(int n, int v, int maxDegree) {
  SeriesWZ s(n, maxDegree);
  s.setCoeff(unitExponent(v), ComplexInterval(1.0));
  return s;
}

SeriesWZ operator+(const SeriesWZ& a, const SeriesWZ& b) {
  SeriesWZ r = a;
  r += b;
  return r;
}

SeriesWZ operator-(const SeriesWZ& a, const SeriesWZ& b) {
  SeriesWZ r = a;
  r -= b;
  return r;
}

SeriesWZ operator-(const SeriesWZ& a) {
  SeriesWZ r = a;
  r *= ComplexInterval(-1.0);
  return r;
}

SeriesWZ operator*(const ComplexInterval& s, const SeriesWZ& a) {
  SeriesWZ r = a;
  r *= s;
  return r;
}

SeriesWZ add(const SeriesWZ& f, const SeriesWZ& g) { return f + g; }

// ---------------------------------------------------------------------------
// Products and brackets.

namespace {

std::atomic<int> gThreads{static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())))};

template <class Fn>
void forEachOutputDegree(int cap, Fn fn) {
  const int threads = std::min(gThreads.load(), cap + 1);
  if (threads <= 1) {
    for (int d = cap; d >= 0; --d) fn(d);
    return;
  }
  // Highest degrees are the most expensive; hand them out first.
  std::atomic<int> next{cap};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int d = next.fetch_sub(1); d >= 0; d = next.fetch_sub(1)) fn(d);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::vector<Term>> termLists(const SeriesWZ& f) {
  std::vector<std::vector<Term>> out(f.maxDegree() + 1);
  for (int d = 0; d <= f.maxDegree(); ++d) out[d] = f.terms(d);
  return out;
}

void warmTable(const MonomialTable& t, int cap) {
  for (int d = 0; d <= cap; ++d) t.monomials(d);
}

}  // namespace

void setSeriesThreads(int threads) { gThreads = std::max(1, threads); }
int seriesThreads() { return gThreads.load(); }

SeriesWZ mulTruncated(const SeriesWZ& f, const SeriesWZ& g, int degCap) {
  if (f.dim() != g.dim()) throw DimensionError("series dimensions differ");
  SeriesWZ out(f.dim(), degCap);
  const auto ft = termLists(f);
  const auto gt = termLists(g);
  const MonomialTable& table = out.table();
  warmTable(table, degCap);
  // Allocate the output buckets up front so workers never resize shared state.
  std::vector<bool> used(degCap + 1, false);
  for (std::size_t a = 0; a < ft.size(); ++a) {
    for (std::size_t b = 0; b < gt.size(); ++b) {
      if (!ft[a].empty() && !gt[b].empty() && static_cast<int>(a + b) <= degCap) used[a + b] = true;
    }
  }
  for (int d = 0; d <= degCap; ++d) {
    if (used[d]) out.mutableBucket(d);
  }
  forEachOutputDegree(degCap, [&](int d) {
    if (!used[d]) return;
    auto& bucket = out.mutableBucket(d);
    for (int da = 0; da <= d && da < static_cast<int>(ft.size()); ++da) {
      const int db = d - da;
      if (db >= static_cast<int>(gt.size())) continue;
      for (const Term& a : ft[da]) {
        for (const Term& b : gt[db]) bucket[table.rank(a.e + b.e, d)] += a.c * b.c;
      }
    }
  });
  return out;
}

SeriesWZ poissonBracket(const SeriesWZ& f, const SeriesWZ& g, int degCap) {
  if (f.dim() != g.dim()) throw DimensionError("series dimensions differ");
  const int n = f.dim();
  SeriesWZ out(n, degCap);
  const auto ft = termLists(f);
  const auto gt = termLists(g);
  const MonomialTable& table = out.table();
  warmTable(table, degCap);
  std::vector<bool> used(degCap + 1, false);
  for (std::size_t a = 0; a < ft.size(); ++a) {
    for (std::size_t b = 0; b < gt.size(); ++b) {
      const int d = static_cast<int>(a + b) - 2;
      if (!ft[a].empty() && !gt[b].empty() && d >= 0 && d <= degCap) used[d] = true;
    }
  }
  for (int d = 0; d <= degCap; ++d) {
    if (used[d]) out.mutableBucket(d);
  }
  Packed pairMask[kMaxVariables / 2];
  for (int j = 0; j < n; ++j) pairMask[j] = unitExponent(j) + unitExponent(n + j);

  forEachOutputDegree(degCap, [&](int d) {
    if (!used[d]) return;
    auto& bucket = out.mutableBucket(d);
    for (int da = 1; da <= d + 1 && da < static_cast<int>(ft.size()); ++da) {
      const int db = d + 2 - da;
      if (db < 1 || db >= static_cast<int>(gt.size())) continue;
      for (const Term& a : ft[da]) {
        int aw[kMaxVariables / 2], az[kMaxVariables / 2];
        for (int j = 0; j < n; ++j) {
          aw[j] = exponentOf(a.e, j);
          az[j] = exponentOf(a.e, n + j);
        }
        for (const Term& b : gt[db]) {
          const Packed sum = a.e + b.e;
          bool haveProduct = false;
          ComplexInterval prod;
          for (int j = 0; j < n; ++j) {
            const int m = aw[j] * exponentOf(b.e, n + j) - az[j] * exponentOf(b.e, j);
            if (m == 0) continue;
            if (!haveProduct) {
              prod = a.c * b.c;
              haveProduct = true;
            }
            bucket[table.rank(sum - pairMask[j], d)] += prod * Interval(static_cast<double>(m));
          }
        }
      }
    }
  });
  return out;
}

SeriesWZ derivative(const SeriesWZ& f, int v) {
  if (v < 0 || v >= f.variables()) throw DimensionError("derivative variable out of range");
  SeriesWZ out(f.dim(), std::max(f.maxDegree() - 1, 0));
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    const int ev = exponentOf(e, v);
    if (ev == 0) return;
    out.addCoeff(e - unitExponent(v), c * Interval(static_cast<double>(ev)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Norms.

std::vector<double> degreeModuli(const SeriesWZ& f) {
  std::vector<double> s(f.maxDegree() + 1, 0.0);
  for (int d = 0; d <= f.maxDegree(); ++d) {
    for (const auto& c : f.bucket(d)) {
      if (!c.isZero()) s[d] = addUp(s[d], modulusUpper(c));
    }
  }
  return s;
}

double weightedNormUpper(const std::vector<double>& s, double rho) {
  double acc = 0.0;
  for (int d = static_cast<int>(s.size()) - 1; d >= 0; --d) acc = addUp(mulUp(acc, rho), s[d]);
  return acc;
}

Interval polyNorm(const SeriesWZ& f, const Interval& R) {
  if (!(R.lo() > 0.0)) throw IntervalError("norm radius must be positive");
  double hi = weightedNormUpper(degreeModuli(f), R.hi());
  std::vector<double> low(f.maxDegree() + 1, 0.0);
  for (int d = 0; d <= f.maxDegree(); ++d) {
    for (const auto& c : f.bucket(d)) {
      if (!c.isZero()) low[d] = addDown(low[d], modulusLower(c));
    }
  }
  double lo = 0.0;
  for (int d = f.maxDegree(); d >= 0; --d) lo = addDown(mulDown(lo, R.lo()), low[d]);
  return Interval(lo, hi);
}

SeriesWZ project(const SeriesWZ& f, IndexClass cls, const IndexClassifier& classify) {
  return f.filtered([&](Packed e) { return classify(e) == cls; });
}

// ---------------------------------------------------------------------------
// Linear substitution.

SeriesWZ linearSubstitute(const SeriesWZ& f, const LinearMap& A) {
  const int V = f.variables();
  const int n = f.dim();
  if (static_cast<int>(A.size()) != V) throw DimensionError("substitution matrix has wrong size");
  for (const auto& row : A) {
    if (static_cast<int>(row.size()) != V) throw DimensionError("substitution matrix has wrong size");
  }
  const int cap = std::max(f.topDegree(), 0);
  std::vector<SeriesWZ> forms;
  for (int v = 0; v < V; ++v) {
    SeriesWZ L(n, cap);
    for (int u = 0; u < V; ++u) {
      if (!A[v][u].isZero()) L.setCoeff(unitExponent(u), A[v][u]);
    }
    forms.push_back(std::move(L));
  }
  // powers[v][e] = forms[v]^e, built on demand.
  std::vector<std::vector<SeriesWZ>> powers(V);
  auto power = [&](int v, int e) -> const SeriesWZ& {
    auto& pv = powers[v];
    if (pv.empty()) {
      SeriesWZ one(n, cap);
      one.setCoeff(0, ComplexInterval(1.0));
      pv.push_back(std::move(one));
    }
    while (static_cast<int>(pv.size()) <= e) pv.push_back(mulTruncated(pv.back(), forms[v], cap));
    return pv[e];
  };
  SeriesWZ out(n, f.maxDegree());
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    SeriesWZ acc(n, cap);
    acc.setCoeff(0, c);
    for (int v = 0; v < V; ++v) {
      const int ev = exponentOf(e, v);
      if (ev > 0) acc = mulTruncated(acc, power(v, ev), cap);
    }
    out += acc.withMaxDegree(f.maxDegree());
  });
  return out;
}

LinearMap complexToReal(int n) {
  const Interval s = constants::sqrt2() / Interval(2.0);
  LinearMap A(2 * n, std::vector<ComplexInterval>(2 * n));
  for (int j = 0; j < n; ++j) {
    A[j][j] = ComplexInterval(Interval(0.0), s);
    A[j][n + j] = ComplexInterval(s);
    A[n + j][j] = ComplexInterval(s);
    A[n + j][n + j] = ComplexInterval(Interval(0.0), s);
  }
  return A;
}

LinearMap realToComplex(int n) {
  const Interval s = constants::sqrt2() / Interval(2.0);
  LinearMap A(2 * n, std::vector<ComplexInterval>(2 * n));
  for (int j = 0; j < n; ++j) {
    A[j][j] = ComplexInterval(Interval(0.0), -s);
    A[j][n + j] = ComplexInterval(s);
    A[n + j][j] = ComplexInterval(s);
    A[n + j][n + j] = ComplexInterval(Interval(0.0), -s);
  }
  return A;
}

// ---------------------------------------------------------------------------
// Norm inequalities.

namespace {
void checkRange(double alpha, double beta, double R, double R0) {
  if (!(alpha >= 0.0 && beta > 0.0 && R > 0.0 && alpha + beta <= (R0 - R) / R)) {
    throw std::invalid_argument("norm inequality requires alpha, beta >= 0 and 0 < alpha+beta <= (R0-R)/R");
  }
}
Interval radius(double factor, double R) { return Interval(factor) * Interval(R); }
}  // namespace

NormInequality derivativeNormCheck(const SeriesWZ& f, int v, double alpha, double beta, double R, double R0) {
  checkRange(alpha, beta, R, R0);
  const Interval lhs = polyNorm(derivative(f, v), radius(1.0 + alpha, R));
  const Interval rhs = polyNorm(f, radius(1.0 + alpha + beta, R)) / (Interval(beta) * Interval(R));
  return {lhs, rhs};
}

NormInequality bracketNormCheck(const SeriesWZ& f, const SeriesWZ& g, double alpha, double beta, double R,
                                double R0) {
  checkRange(alpha, beta, R, R0);
  const int cap = std::max(0, f.topDegree() + g.topDegree() - 2);
  const Interval lhs = polyNorm(poissonBracket(f, g, cap), radius(1.0 + alpha, R));
  const Interval rho = radius(1.0 + alpha + beta, R);
  const Interval br = Interval(beta) * Interval(R);
  const Interval rhs = Interval(2.0 * f.dim()) / sqr(br) * polyNorm(f, rho) * polyNorm(g, rho);
  return {lhs, rhs};
}

NormInequality actionBracketNormCheck(const SeriesWZ& f, int j, double alpha, double beta, double R, double R0) {
  checkRange(alpha, beta, R, R0);
  const SeriesWZ I = SeriesWZ::action(f.dim(), j, 2);
  const Interval lhs = polyNorm(poissonBracket(I, f, std::max(f.topDegree(), 0)), radius(1.0 + alpha, R));
  const Interval rhs =
      Interval(2.0) * (Interval(1.0) + Interval(alpha)) / Interval(beta) * polyNorm(f, radius(1.0 + alpha + beta, R));
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Action polynomials.

int ActionPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

Interval ActionPoly::coeff(const std::vector<int>& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Interval(0.0) : it->second;
}

void ActionPoly::addCoeff(const std::vector<int>& e, const Interval& c) {
  if (static_cast<int>(e.size()) != n_) throw DimensionError("action exponent has wrong length");
  if (c.isZero()) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) it->second += c;
}

Interval ActionPoly::evaluate(const std::vector<Interval>& I) const {
  if (static_cast<int>(I.size()) != n_) throw DimensionError("action vector has wrong length");
  Interval acc(0.0);
  for (const auto& [e, c] : terms_) {
    Interval t = c;
    for (int j = 0; j < n_; ++j) {
      if (e[j] > 0) t *= pow(I[j], e[j]);
    }
    acc += t;
  }
  return acc;
}

ActionPoly ActionPoly::derivative(int j) const {
  ActionPoly out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[j] == 0) continue;
    auto e2 = e;
    e2[j] -= 1;
    out.addCoeff(e2, c * Interval(static_cast<double>(e[j])));
  }
  return out;
}

SeriesWZ ActionPoly::toSeries(int maxDegree) const {
  SeriesWZ out(n_, maxDegree);
  for (const auto& [e, c] : terms_) {
    MultiIndex m{e, e};
    if (m.degree() > maxDegree) continue;
    int s = 0;
    for (int x : e) s += x;
    out.addCoeff(m.pack(), ComplexInterval(c) * iPower(s));
  }
  return out;
}

ActionPoly toActionPoly(const SeriesWZ& diagonalSeries) {
  const int n = diagonalSeries.dim();
  ActionPoly Z(n);
  diagonalSeries.forEachTerm([&](Packed e, const ComplexInterval& c) {
    const MultiIndex m = MultiIndex::unpack(e, n);
    if (!m.isDiagonal()) throw DimensionError("toActionPoly requires a diagonal series");
    int s = 0;
    for (int x : m.h) s += x;
    const ComplexInterval v = c * iPower(-s);
    if (!v.im().containsZero()) throw IntervalError("diagonal coefficient is not real in the actions");
    Z.addCoeff(m.h, v.re());
  });
  return Z;
}

// ---------------------------------------------------------------------------
// Text I/O.

std::string formatEndpoint(double x) {
  char buf[64];
  if (x == 0.0) return std::signbit(x) ? "-0x0p+0" : "0x0p+0";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

void writeSeries(std::ostream& os, const SeriesWZ& f) {
  os << "n=" << f.dim() << " degmax=" << f.maxDegree() << "\n";
  const int n = f.dim();
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    for (int v = 0; v < 2 * n; ++v) os << exponentOf(e, v) << ' ';
    os << formatEndpoint(c.re().lo()) << ' ' << formatEndpoint(c.re().hi()) << ' ' << formatEndpoint(c.im().lo())
       << ' ' << formatEndpoint(c.im().hi()) << "\n";
  });
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

bool blankOrComment(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

int parseInt(const std::string& s, int lineNo) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(lineNo) + ": bad integer '" + s + "'");
  }
  return v;
}

Interval parseRange(const std::string& lo, const std::string& hi, int lineNo) {
  try {
    const Interval a = parseOutward(lo), b = parseOutward(hi);
    if (a.lo() > b.hi()) throw ParseError("line " + std::to_string(lineNo) + ": interval with lo > hi");
    return Interval(a.lo(), b.hi());
  } catch (const IntervalError& e) {
    throw ParseError("line " + std::to_string(lineNo) + ": " + e.what());
  }
}

}  // namespace

SeriesWZ readSeriesBody(std::istream& is, int n, int degmax, int& lineNo) {
  SeriesWZ f(n, degmax);
  std::string line;
  while (is.peek() != EOF) {
    const auto pos = is.tellg();
    if (!std::getline(is, line)) break;
    ++lineNo;
    if (blankOrComment(line)) continue;
    if (line.find('[') != std::string::npos || line.find('=') != std::string::npos) {
      // Start of the next section in a composite file.
      is.seekg(pos);
      --lineNo;
      break;
    }
    const auto tk = tokens(line);
    if (static_cast<int>(tk.size()) != 2 * n + 4) {
      throw ParseError("line " + std::to_string(lineNo) + ": expected " + std::to_string(2 * n + 4) + " fields, got " +
                       std::to_string(tk.size()));
    }
    MultiIndex m;
    m.h.resize(n);
    m.k.resize(n);
    int deg = 0;
    for (int j = 0; j < 2 * n; ++j) {
      const int x = parseInt(tk[j], lineNo);
      if (x < 0) throw ParseError("line " + std::to_string(lineNo) + ": negative exponent");
      (j < n ? m.h[j] : m.k[j - n]) = x;
      deg += x;
    }
    if (deg > degmax) {
      throw ParseError("line " + std::to_string(lineNo) + ": degree " + std::to_string(deg) + " exceeds degmax " +
                       std::to_string(degmax));
    }
    const Interval re = parseRange(tk[2 * n], tk[2 * n + 1], lineNo);
    const Interval im = parseRange(tk[2 * n + 2], tk[2 * n + 3], lineNo);
    f.addCoeff(m.pack(), ComplexInterval(re, im));
  }
  return f;
}

SeriesWZ readSeries(std::istream& is) {
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (blankOrComment(line)) continue;
    int n = -1, degmax = -1;
    for (const auto& t : tokens(line)) {
      if (t.rfind("n=", 0) == 0) n = parseInt(t.substr(2), lineNo);
      else if (t.rfind("degmax=", 0) == 0) degmax = parseInt(t.substr(7), lineNo);
      else throw ParseError("line " + std::to_string(lineNo) + ": unexpected header field '" + t + "'");
    }
    if (n < 1 || 2 * n > kMaxVariables) throw ParseError("line " + std::to_string(lineNo) + ": bad dimension");
    if (degmax < 0 || degmax > kMaxDegree) throw ParseError("line " + std::to_string(lineNo) + ": bad degmax");
    return readSeriesBody(is, n, degmax, lineNo);
  }
  throw ParseError("missing series header");
}

}  // namespace bnf
