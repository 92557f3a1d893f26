#include "bnf/rint.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <vector>

namespace bnf {

namespace rounding {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();
// Below this magnitude the FMA residual of a product may not be representable.
constexpr double kTiny = 0x1p-969;

// Exact error of s = fl(a + b) (Knuth TwoSum); valid for finite s.
inline double twoSumError(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double overflowDown(double s) { return s == kInf ? kMax : s; }
inline double overflowUp(double s) { return s == -kInf ? -kMax : s; }

}  // namespace

double addDown(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflowDown(s) : s;
  }
  return twoSumError(a, b, s) < 0.0 ? nextDown(s) : s;
}

double addUp(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflowUp(s) : s;
  }
  return twoSumError(a, b, s) > 0.0 ? nextUp(s) : s;
}

double subDown(double a, double b) { return addDown(a, -b); }
double subUp(double a, double b) { return addUp(a, -b); }

double mulDown(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflowDown(p) : p;
  }
  if (std::fabs(p) < kTiny) return nextDown(p);
  return std::fma(a, b, -p) < 0.0 ? nextDown(p) : p;
}

double mulUp(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflowUp(p) : p;
  }
  if (std::fabs(p) < kTiny) return nextUp(p);
  return std::fma(a, b, -p) > 0.0 ? nextUp(p) : p;
}

namespace {
// Sign of (a/b - q) where q = fl(a/b): +1, -1 or 0; 2 when undecidable.
inline int divResidualSign(double a, double b, double q) {
  if (!std::isfinite(q) || !std::isfinite(a) || !std::isfinite(b)) return 2;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return 2;
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}
}  // namespace

double divDown(double a, double b) {
  if (a == 0.0 && b != 0.0) return 0.0;
  const double q = a / b;
  if (std::isinf(q) && std::isfinite(a) && std::isfinite(b) && b != 0.0) return overflowDown(q);
  if (std::isinf(b) && std::isfinite(a)) return q == 0.0 ? (((a > 0) == (b > 0)) ? 0.0 : -0.0) : q;
  const int s = divResidualSign(a, b, q);
  if (s == 0 || s == 1) return q;
  if (s == -1) return nextDown(q);
  return std::isfinite(q) ? nextDown(q) : q;
}

double divUp(double a, double b) {
  if (a == 0.0 && b != 0.0) return 0.0;
  const double q = a / b;
  if (std::isinf(q) && std::isfinite(a) && std::isfinite(b) && b != 0.0) return overflowUp(q);
  if (std::isinf(b) && std::isfinite(a)) return q;
  const int s = divResidualSign(a, b, q);
  if (s == 0 || s == -1) return q;
  if (s == 1) return nextUp(q);
  return std::isfinite(q) ? nextUp(q) : q;
}

double sqrtDown(double a) {
  if (a <= 0.0) return 0.0;
  const double s = std::sqrt(a);
  if (!std::isfinite(s)) return s;
  if (a < kTiny) return nextDown(s);
  return std::fma(-s, s, a) < 0.0 ? nextDown(s) : s;
}

double sqrtUp(double a) {
  if (a <= 0.0) return 0.0;
  const double s = std::sqrt(a);
  if (!std::isfinite(s)) return s;
  if (a < kTiny) return nextUp(s);
  return std::fma(-s, s, a) > 0.0 ? nextUp(s) : s;
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw IntervalError("interval endpoint is NaN");
  if (lo > hi) throw IntervalError("interval with lo > hi");
}

double Interval::mid() const {
  if (isEmpty()) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(lo_) && std::isinf(hi_)) return 0.0;
  if (std::isinf(lo_)) return -std::numeric_limits<double>::max();
  if (std::isinf(hi_)) return std::numeric_limits<double>::max();
  return 0.5 * lo_ + 0.5 * hi_;
}

double Interval::mig() const {
  if (lo_ > 0.0) return lo_;
  if (hi_ < 0.0) return -hi_;
  return 0.0;
}

Interval operator-(const Interval& a) {
  if (a.isEmpty()) return a;
  Interval r(-a.hi(), -a.lo());
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  return Interval(addDown(a.lo(), b.lo()), addUp(a.hi(), b.hi()));
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  return Interval(subDown(a.lo(), b.hi()), subUp(a.hi(), b.lo()));
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  if (al >= 0.0) {
    if (bl >= 0.0) return Interval(mulDown(al, bl), mulUp(ah, bh));
    if (bh <= 0.0) return Interval(mulDown(ah, bl), mulUp(al, bh));
    return Interval(mulDown(ah, bl), mulUp(ah, bh));
  }
  if (ah <= 0.0) {
    if (bl >= 0.0) return Interval(mulDown(al, bh), mulUp(ah, bl));
    if (bh <= 0.0) return Interval(mulDown(ah, bh), mulUp(al, bl));
    return Interval(mulDown(al, bh), mulUp(al, bl));
  }
  if (bl >= 0.0) return Interval(mulDown(al, bh), mulUp(ah, bh));
  if (bh <= 0.0) return Interval(mulDown(ah, bl), mulUp(al, bl));
  return Interval(std::fmin(mulDown(al, bh), mulDown(ah, bl)),
                  std::fmax(mulUp(al, bl), mulUp(ah, bh)));
}

std::optional<Interval> divide(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  if (b.containsZero()) return std::nullopt;
  const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  if (bl > 0.0) {
    if (al >= 0.0) return Interval(divDown(al, bh), divUp(ah, bl));
    if (ah <= 0.0) return Interval(divDown(al, bl), divUp(ah, bh));
    return Interval(divDown(al, bl), divUp(ah, bl));
  }
  if (al >= 0.0) return Interval(divDown(ah, bh), divUp(al, bl));
  if (ah <= 0.0) return Interval(divDown(ah, bl), divUp(al, bh));
  return Interval(divDown(ah, bh), divUp(al, bh));
}

Interval operator/(const Interval& a, const Interval& b) {
  auto q = divide(a, b);
  if (!q) throw IntervalError("division by an interval containing zero");
  return *q;
}

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

Interval sqr(const Interval& a) {
  if (a.isEmpty()) return a;
  const double m = a.mig(), M = a.mag();
  return Interval(mulDown(m, m), mulUp(M, M));
}

Interval sqrt(const Interval& a) {
  if (a.isEmpty()) return a;
  if (a.lo() < 0.0) throw IntervalError("sqrt of an interval with negative lower bound");
  return Interval(sqrtDown(a.lo()), sqrtUp(a.hi()));
}

namespace {
double powUpNonneg(double x, int n) {
  double r = 1.0;
  double b = x;
  while (n > 0) {
    if (n & 1) r = mulUp(r, b);
    n >>= 1;
    if (n) b = mulUp(b, b);
  }
  return r;
}
double powDownNonneg(double x, int n) {
  double r = 1.0;
  double b = x;
  while (n > 0) {
    if (n & 1) r = mulDown(r, b);
    n >>= 1;
    if (n) b = mulDown(b, b);
  }
  return r;
}
}  // namespace

Interval pow(const Interval& a, int n) {
  if (a.isEmpty()) return a;
  if (n < 0) return Interval(1.0) / pow(a, -n);
  if (n == 0) return Interval(1.0);
  if (n % 2 == 0) return Interval(powDownNonneg(a.mig(), n), powUpNonneg(a.mag(), n));
  auto down = [n](double x) { return x >= 0 ? powDownNonneg(x, n) : -powUpNonneg(-x, n); };
  auto up = [n](double x) { return x >= 0 ? powUpNonneg(x, n) : -powDownNonneg(-x, n); };
  return Interval(down(a.lo()), up(a.hi()));
}

Interval abs(const Interval& a) {
  if (a.isEmpty()) return a;
  return Interval(a.mig(), a.mag());
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.isEmpty()) return b;
  if (b.isEmpty()) return a;
  return Interval(std::fmin(a.lo(), b.lo()), std::fmax(a.hi(), b.hi()));
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  const double lo = std::fmax(a.lo(), b.lo());
  const double hi = std::fmin(a.hi(), b.hi());
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

Interval max(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  return Interval(std::fmax(a.lo(), b.lo()), std::fmax(a.hi(), b.hi()));
}

Interval min(const Interval& a, const Interval& b) {
  if (a.isEmpty() || b.isEmpty()) return Interval::empty();
  return Interval(std::fmin(a.lo(), b.lo()), std::fmin(a.hi(), b.hi()));
}

// ---------------------------------------------------------------------------
// Decimal parsing with outward rounding.

namespace {

// value = (negative ? -1 : 1) * 0.d1d2d3... * 10^exponent, d1 != 0 unless zero.
struct Decimal {
  bool negative = false;
  std::string digits;
  long exponent = 0;
  bool isZero() const { return digits.empty(); }
};

std::optional<Decimal> parseDecimal(std::string_view s) {
  Decimal d;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) d.negative = s[i++] == '-';
  std::string mant;
  long pointPos = -1;
  bool any = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mant.push_back(c);
      any = true;
    } else if (c == '.' && pointPos < 0) {
      pointPos = static_cast<long>(mant.size());
    } else {
      break;
    }
  }
  if (!any) return std::nullopt;
  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::string es(s.substr(i));
    if (es.empty()) return std::nullopt;
    char* end = nullptr;
    exp10 = std::strtol(es.c_str(), &end, 10);
    if (end == es.c_str() || *end != '\0') return std::nullopt;
    i = s.size();
  }
  if (i != s.size()) return std::nullopt;
  if (pointPos < 0) pointPos = static_cast<long>(mant.size());
  std::size_t first = mant.find_first_not_of('0');
  if (first == std::string::npos) return d;  // zero
  std::size_t last = mant.find_last_not_of('0');
  d.digits = mant.substr(first, last - first + 1);
  d.exponent = pointPos - static_cast<long>(first) + exp10;
  return d;
}

// Exact decimal expansion of a finite double.
Decimal exactDecimal(double x) {
  std::vector<char> buf(1200);
  std::snprintf(buf.data(), buf.size(), "%.1100e", x);
  return *parseDecimal(buf.data());
}

// Compare |a| with |b|.
int compareMagnitude(const Decimal& a, const Decimal& b) {
  if (a.isZero() || b.isZero()) return (a.isZero() ? 0 : 1) - (b.isZero() ? 0 : 1);
  if (a.exponent != b.exponent) return a.exponent < b.exponent ? -1 : 1;
  const std::size_t n = std::max(a.digits.size(), b.digits.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char ca = i < a.digits.size() ? a.digits[i] : '0';
    const char cb = i < b.digits.size() ? b.digits[i] : '0';
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

int compareSigned(const Decimal& a, const Decimal& b) {
  const int sa = a.isZero() ? 0 : (a.negative ? -1 : 1);
  const int sb = b.isZero() ? 0 : (b.negative ? -1 : 1);
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  const int m = compareMagnitude(a, b);
  return sa > 0 ? m : -m;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Interval parseOutward(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw IntervalError("empty numeric literal");
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return Interval(std::numeric_limits<double>::infinity());
  if (lower == "-inf" || lower == "-infinity") return Interval(-std::numeric_limits<double>::infinity());

  const bool hex = lower.find("0x") != std::string::npos;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IntervalError("malformed numeric literal: " + s);

  if (hex) {
    // strtod on hex is correctly rounded; the literal is exact when its
    // mantissa carries at most 53 significant bits and x is normal.
    std::string mant;
    for (std::size_t p = lower.find("0x") + 2; p < lower.size() && lower[p] != 'p'; ++p) {
      if (std::isxdigit(static_cast<unsigned char>(lower[p]))) mant.push_back(lower[p]);
    }
    const auto first = mant.find_first_not_of('0');
    if (first == std::string::npos) return Interval(x);
    mant = mant.substr(first, mant.find_last_not_of('0') - first + 1);
    const int lead = std::stoi(mant.substr(0, 1), nullptr, 16);
    const int bits = 4 * static_cast<int>(mant.size() - 1) + (lead >= 8 ? 4 : lead >= 4 ? 3 : lead >= 2 ? 2 : 1);
    if (bits <= 53 && std::isnormal(x)) return Interval(x);
    return Interval(nextDown(x), nextUp(x));
  }

  auto dec = parseDecimal(s);
  if (!dec) throw IntervalError("malformed numeric literal: " + s);
  if (std::isinf(x)) {
    const double big = std::numeric_limits<double>::max();
    return x > 0 ? Interval(big, x) : Interval(x, -big);
  }
  const int c = compareSigned(exactDecimal(x), *dec);
  if (c == 0) return Interval(x);
  if (c > 0) return Interval(nextDown(x), x);
  return Interval(x, nextUp(x));
}

double log10Down(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;
  double r = std::log10(x);
  for (int i = 0; i < 4; ++i) r = nextDown(r);
  return r;
}

double log10Up(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;
  double r = std::log10(x);
  for (int i = 0; i < 4; ++i) r = nextUp(r);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  if (x.isEmpty()) return os << "[empty]";
  char buf[80];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", x.lo(), x.hi());
  return os << buf;
}

namespace constants {

Interval sqrt2() {
  static const Interval v = hull(parseOutward("1.414213562373095048801688724209698078569"),
                                 parseOutward("1.414213562373095048801688724209698078570"));
  return v;
}

Interval pi() {
  static const Interval v = hull(parseOutward("3.141592653589793238462643383279502884197"),
                                 parseOutward("3.141592653589793238462643383279502884198"));
  return v;
}

}  // namespace constants

// ---------------------------------------------------------------------------
// Complex rectangles.

ComplexInterval operator-(const ComplexInterval& a) { return {-a.re(), -a.im()}; }

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
  ComplexInterval r = a;
  r += b;
  return r;
}

ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
  ComplexInterval r = a;
  r -= b;
  return r;
}

ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
  // Purely real or purely imaginary operands are the common case in Birkhoff
  // series; they need one or two real products instead of four.
  if (a.im().isZero()) {
    if (b.im().isZero()) return {a.re() * b.re(), Interval(0.0)};
    if (b.re().isZero()) return {Interval(0.0), a.re() * b.im()};
    return {a.re() * b.re(), a.re() * b.im()};
  }
  if (a.re().isZero()) {
    if (b.im().isZero()) return {Interval(0.0), a.im() * b.re()};
    if (b.re().isZero()) return {-(a.im() * b.im()), Interval(0.0)};
    return {-(a.im() * b.im()), a.im() * b.re()};
  }
  if (b.im().isZero()) return {a.re() * b.re(), a.im() * b.re()};
  if (b.re().isZero()) return {-(a.im() * b.im()), a.re() * b.im()};
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

ComplexInterval operator*(const ComplexInterval& a, const Interval& b) {
  return {a.re().isZero() ? Interval(0.0) : a.re() * b, a.im().isZero() ? Interval(0.0) : a.im() * b};
}

ComplexInterval operator*(const Interval& a, const ComplexInterval& b) { return b * a; }

ComplexInterval operator/(const ComplexInterval& a, const Interval& b) {
  if (b.containsZero()) throw IntervalError("division by an interval containing zero");
  return {a.re().isZero() ? Interval(0.0) : a.re() / b, a.im().isZero() ? Interval(0.0) : a.im() / b};
}

double modulusUpper(const ComplexInterval& c) {
  const double r = c.re().mag();
  const double i = c.im().mag();
  if (i == 0.0) return r;
  if (r == 0.0) return i;
  return sqrtUp(addUp(mulUp(r, r), mulUp(i, i)));
}

double modulusLower(const ComplexInterval& c) {
  const double r = c.re().mig();
  const double i = c.im().mig();
  if (i == 0.0) return r;
  if (r == 0.0) return i;
  return sqrtDown(addDown(mulDown(r, r), mulDown(i, i)));
}

std::ostream& operator<<(std::ostream& os, const ComplexInterval& c) {
  return os << "(" << c.re() << " + i" << c.im() << ")";
}

}  // namespace bnf
