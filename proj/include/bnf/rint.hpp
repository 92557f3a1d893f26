#pragma once

// Outward-rounded interval arithmetic over the reals and rectangular complex
// intervals. Every operation returns an enclosure of the exact result set.
//
// Rounding is realized without touching the floating-point environment: each
// operation is evaluated in round-to-nearest, the exact error is recovered with
// an error-free transformation (TwoSum / FMA), and the endpoint is moved one
// ulp outward only when the result was inexact. Exact results (in particular
// products with an exact zero) stay exact.

#include <cmath>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bnf {

class IntervalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace rounding {

inline double nextUp(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double nextDown(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

double addDown(double a, double b);
double addUp(double a, double b);
double subDown(double a, double b);
double subUp(double a, double b);
double mulDown(double a, double b);
double mulUp(double a, double b);
double divDown(double a, double b);
double divUp(double a, double b);
double sqrtDown(double a);
double sqrtUp(double a);

}  // namespace rounding

class Interval {
 public:
  constexpr Interval() : lo_(0.0), hi_(0.0) {}
  // A double is a point interval: the value is taken as exactly representable.
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT(implicit)
  Interval(double lo, double hi);

  static constexpr Interval empty() {
    Interval r;
    r.lo_ = std::numeric_limits<double>::infinity();
    r.hi_ = -std::numeric_limits<double>::infinity();
    return r;
  }
  static constexpr Interval entire() {
    Interval r;
    r.lo_ = -std::numeric_limits<double>::infinity();
    r.hi_ = std::numeric_limits<double>::infinity();
    return r;
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  bool isEmpty() const { return lo_ > hi_; }
  bool isZero() const { return lo_ == 0.0 && hi_ == 0.0; }
  bool isPoint() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool containsZero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool subsetOf(const Interval& o) const {
    return isEmpty() || (o.lo_ <= lo_ && hi_ <= o.hi_);
  }

  double mid() const;
  // Upper bound on hi - lo.
  double width() const { return rounding::subUp(hi_, lo_); }
  // max |x| over the interval.
  double mag() const { return std::fmax(std::fabs(lo_), std::fabs(hi_)); }
  // min |x| over the interval.
  double mig() const;

  // Certified comparisons: true only when the relation holds for every pair
  // of points drawn from the two intervals.
  bool certainlyLess(const Interval& o) const { return hi_ < o.lo_; }
  bool certainlyLessEq(const Interval& o) const { return hi_ <= o.lo_; }
  bool certainlyGreater(const Interval& o) const { return lo_ > o.hi_; }
  bool certainlyGreaterEq(const Interval& o) const { return lo_ >= o.hi_; }
  bool certainlyPositive() const { return lo_ > 0.0; }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend bool operator==(const Interval& a, const Interval& b) {
    return (a.isEmpty() && b.isEmpty()) || (a.lo_ == b.lo_ && a.hi_ == b.hi_);
  }

 private:
  double lo_;
  double hi_;
};

Interval operator-(const Interval& a);
Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
// Throws IntervalError when 0 lies in b.
Interval operator/(const Interval& a, const Interval& b);

// Non-throwing division: nullopt when 0 lies in b.
std::optional<Interval> divide(const Interval& a, const Interval& b);

Interval sqr(const Interval& a);
// Throws IntervalError when a.lo() < 0.
Interval sqrt(const Interval& a);
Interval pow(const Interval& a, int n);
Interval abs(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);

// Smallest interval with double endpoints containing the decimal (or C99
// hexadecimal) number spelled by `text`. Throws IntervalError on bad syntax.
Interval parseOutward(std::string_view text);

// Directed log10 bounds. log10 is not correctly rounded in libm; the result
// is pushed outward by a few ulps, which covers the documented error of
// glibc's implementation.
double log10Down(double x);
double log10Up(double x);

std::ostream& operator<<(std::ostream& os, const Interval& x);

namespace constants {
// Enclosures built from two-sided 40-digit decimal bounds.
Interval sqrt2();
Interval pi();
}  // namespace constants

class ComplexInterval {
 public:
  constexpr ComplexInterval() = default;
  constexpr ComplexInterval(const Interval& re) : re_(re) {}  // NOLINT(implicit)
  constexpr ComplexInterval(double re) : re_(re) {}           // NOLINT(implicit)
  constexpr ComplexInterval(const Interval& re, const Interval& im) : re_(re), im_(im) {}

  static constexpr ComplexInterval i() { return {Interval(0.0), Interval(1.0)}; }

  const Interval& re() const { return re_; }
  const Interval& im() const { return im_; }

  bool isZero() const { return re_.isZero() && im_.isZero(); }
  bool isEmpty() const { return re_.isEmpty() || im_.isEmpty(); }
  bool containsZero() const { return re_.containsZero() && im_.containsZero(); }
  bool contains(double re, double im) const { return re_.contains(re) && im_.contains(im); }
  bool subsetOf(const ComplexInterval& o) const {
    return re_.subsetOf(o.re_) && im_.subsetOf(o.im_);
  }

  // Multiplication by i is exact.
  ComplexInterval timesI() const { return {-im_, re_}; }
  ComplexInterval conj() const { return {re_, -im_}; }

  ComplexInterval& operator+=(const ComplexInterval& o) {
    if (!o.re_.isZero()) re_ += o.re_;
    if (!o.im_.isZero()) im_ += o.im_;
    return *this;
  }
  ComplexInterval& operator-=(const ComplexInterval& o) {
    if (!o.re_.isZero()) re_ -= o.re_;
    if (!o.im_.isZero()) im_ -= o.im_;
    return *this;
  }

  friend bool operator==(const ComplexInterval& a, const ComplexInterval& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  Interval re_{};
  Interval im_{};
};

ComplexInterval operator-(const ComplexInterval& a);
ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const ComplexInterval& a, const Interval& b);
ComplexInterval operator*(const Interval& a, const ComplexInterval& b);
// Division by a real interval; throws IntervalError when 0 lies in b.
ComplexInterval operator/(const ComplexInterval& a, const Interval& b);

// Upper bound on |z| over the rectangle, rounded up.
double modulusUpper(const ComplexInterval& c);
// Lower bound on |z| over the rectangle (distance to the origin), rounded down.
double modulusLower(const ComplexInterval& c);

std::ostream& operator<<(std::ostream& os, const ComplexInterval& c);

}  // namespace bnf
