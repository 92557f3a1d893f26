#pragma once

// Truncated power series in the complex Birkhoff variables (w, z) in C^n x C^n
// with rectangular interval coefficients.
//
// Variables are ordered (w_1..w_n, z_1..z_n); a monomial w^h z^k is a packed
// exponent word holding h in bytes 0..n-1 and k in bytes n..2n-1. Each total
// degree has its own dense bucket indexed by MonomialTable rank; a coefficient
// equal to the exact zero rectangle means "no term". Buckets are allocated on
// first write, so series stay logically sparse.
//
// The same container holds real-variable polynomials (for instance H(y, x)
// before the mode change); the w/z naming then just labels the two halves.

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnf/monomial_table.hpp"
#include "bnf/rint.hpp"

namespace bnf {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MultiIndex {
  std::vector<int> h;
  std::vector<int> k;

  int dim() const { return static_cast<int>(h.size()); }
  int degree() const;
  bool isDiagonal() const { return h == k; }
  // h - k.
  std::vector<int> difference() const;

  Packed pack() const;
  static MultiIndex unpack(Packed e, int n);

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.h == b.h && a.k == b.k; }
};

struct Term {
  Packed e;
  ComplexInterval c;
};

// i^m for integer m.
ComplexInterval iPower(int m);

class SeriesWZ {
 public:
  SeriesWZ() = default;
  SeriesWZ(int n, int maxDegree);

  int dim() const { return n_; }
  int variables() const { return 2 * n_; }
  int maxDegree() const { return maxDeg_; }
  const MonomialTable& table() const { return *table_; }

  ComplexInterval coeff(Packed e) const;
  ComplexInterval coeff(const MultiIndex& m) const { return coeff(checkedPack(m)); }
  // Terms above maxDegree are silently dropped by addCoeff and rejected by setCoeff.
  void setCoeff(Packed e, const ComplexInterval& c);
  void setCoeff(const MultiIndex& m, const ComplexInterval& c) { setCoeff(checkedPack(m), c); }
  void addCoeff(Packed e, const ComplexInterval& c);

  bool isZero() const;
  std::size_t termCount() const;
  // Smallest / largest degree carrying a term; -1 for the zero series.
  int minDegree() const;
  int topDegree() const;

  // Nonzero terms of one degree in rank order.
  std::vector<Term> terms(int degree) const;
  // Visits every nonzero term in graded-lexicographic order.
  void forEachTerm(const std::function<void(Packed, const ComplexInterval&)>& fn) const;

  SeriesWZ homogeneous(int degree) const;
  SeriesWZ degreeRange(int lo, int hi) const;
  SeriesWZ truncated(int cap) const;
  SeriesWZ diagonalPart() const;
  SeriesWZ nonDiagonalPart() const;
  SeriesWZ withMaxDegree(int maxDegree) const;
  // Terms kept when keep(e) is true.
  SeriesWZ filtered(const std::function<bool(Packed)>& keep) const;

  SeriesWZ& operator+=(const SeriesWZ& o);
  SeriesWZ& operator-=(const SeriesWZ& o);
  SeriesWZ& operator*=(const ComplexInterval& s);
  SeriesWZ& operator/=(const Interval& s);

  // Direct bucket access for the inner loops of normalization.
  const std::vector<ComplexInterval>& bucket(int degree) const;
  std::vector<ComplexInterval>& mutableBucket(int degree);

  // c_hk = conj(c_kh) i^{|h|+|k|} within enclosures: the series is real on
  // the reality surface conj(w) = i z, i.e. it comes from a real function of (p, q).
  bool realitySymmetric() const;

  static SeriesWZ monomial(int n, const MultiIndex& m, const ComplexInterval& c, int maxDegree);
  // I_j = i w_j z_j.
  static SeriesWZ action(int n, int j, int maxDegree);
  static SeriesWZ variable(int n, int v, int maxDegree);

 private:
  Packed checkedPack(const MultiIndex& m) const;
  void requireSame(const SeriesWZ& o) const;

  int n_ = 0;
  int maxDeg_ = -1;
  std::shared_ptr<const MonomialTable> table_;
  std::vector<std::vector<ComplexInterval>> buckets_;
};

SeriesWZ operator+(const SeriesWZ& a, const SeriesWZ& b);
SeriesWZ operator-(const SeriesWZ& a, const SeriesWZ& b);
SeriesWZ operator-(const SeriesWZ& a);
SeriesWZ operator*(const ComplexInterval& s, const SeriesWZ& a);

SeriesWZ add(const SeriesWZ& f, const SeriesWZ& g);
// Cauchy product with every term of degree > degCap discarded.
SeriesWZ mulTruncated(const SeriesWZ& f, const SeriesWZ& g, int degCap);
// {f, g} = sum_j (d_{w_j} f d_{z_j} g - d_{z_j} f d_{w_j} g), truncated at degCap.
SeriesWZ poissonBracket(const SeriesWZ& f, const SeriesWZ& g, int degCap);
// Partial derivative with respect to variable v (0..2n-1).
SeriesWZ derivative(const SeriesWZ& f, int v);

// Worker threads used by products and brackets (1 = sequential).
void setSeriesThreads(int threads);
int seriesThreads();

// ||f||_R = sum |c_hk| R^{|h|+|k|}. hi() is a certified upper bound; lo() a
// certified lower bound of the same quantity.
Interval polyNorm(const SeriesWZ& f, const Interval& R);
// Per-degree sums of coefficient moduli (upper bounds): index d holds sum over degree d.
std::vector<double> degreeModuli(const SeriesWZ& f);
// Upper bound on sum_d s[d] rho^d.
double weightedNormUpper(const std::vector<double>& s, double rho);

// Partition classes for remainder terms (see estimator::classifyIndex).
enum class IndexClass { DiagonalOrLow, NonResonant, Resonant, Ultraviolet };
using IndexClassifier = std::function<IndexClass(Packed)>;
SeriesWZ project(const SeriesWZ& f, IndexClass cls, const IndexClassifier& classify);

// Linear substitution f(A y): variable v is replaced by sum_u A[v][u] y_u.
// A is (2n)x(2n). The result keeps f's degree structure.
using LinearMap = std::vector<std::vector<ComplexInterval>>;
SeriesWZ linearSubstitute(const SeriesWZ& f, const LinearMap& A);
// Matrices of the complexification: (p, q) = C (w, z) and its inverse.
LinearMap complexToReal(int n);
LinearMap realToComplex(int n);

// Both sides of a norm inequality, for test harnesses.
struct NormInequality {
  Interval lhs;
  Interval rhs;
  bool holds() const { return lhs.hi() <= rhs.lo(); }
};
// ||d_v f||_{(1+alpha)R} <= ||f||_{(1+alpha+beta)R} / (beta R).
NormInequality derivativeNormCheck(const SeriesWZ& f, int v, double alpha, double beta, double R, double R0);
// ||{f,g}||_{(1+alpha)R} <= 2n/(beta^2 R^2) ||f|| ||g|| at (1+alpha+beta)R.
NormInequality bracketNormCheck(const SeriesWZ& f, const SeriesWZ& g, double alpha, double beta, double R,
                                double R0);
// ||{I_j,f}||_{(1+alpha)R} <= 2(1+alpha)/beta ||f||_{(1+alpha+beta)R}.
NormInequality actionBracketNormCheck(const SeriesWZ& f, int j, double alpha, double beta, double R, double R0);

// Real polynomial in the actions I_1..I_n.
class ActionPoly {
 public:
  ActionPoly() = default;
  explicit ActionPoly(int n) : n_(n) {}

  int dim() const { return n_; }
  int degree() const;
  const std::map<std::vector<int>, Interval>& terms() const { return terms_; }
  Interval coeff(const std::vector<int>& e) const;
  void addCoeff(const std::vector<int>& e, const Interval& c);

  Interval evaluate(const std::vector<Interval>& I) const;
  // dZ/dI_j.
  ActionPoly derivative(int j) const;
  // Z(i w z) as a series in (w, z).
  SeriesWZ toSeries(int maxDegree) const;

 private:
  int n_ = 0;
  std::map<std::vector<int>, Interval> terms_;
};

// Diagonal terms c (wz)^h = c (-i)^{|h|} I^h. Throws IntervalError when an
// imaginary part excludes zero (the diagonal part is not real).
ActionPoly toActionPoly(const SeriesWZ& diagonal);

// Text format: header "n=<dim> degmax=<D>", then one term per line
// "h1 .. hn k1 .. kn re_lo re_hi im_lo im_hi". Lines starting with '#' are
// comments. Endpoints are written as exact hexadecimal floats.
void writeSeries(std::ostream& os, const SeriesWZ& f);
SeriesWZ readSeries(std::istream& is);
// Reads the term lines that follow an already-consumed header.
SeriesWZ readSeriesBody(std::istream& is, int n, int degmax, int& lineNo);
std::string formatEndpoint(double x);

}  // namespace bnf
