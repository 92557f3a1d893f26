#include "bnf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "bnf/rint.hpp"

namespace bnf {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

Rational dotExact(const std::vector<double>& omega, const std::vector<int>& nu) {
  Rational s = 0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] != 0) s += Rational(omega[j]) * nu[j];
  }
  return s;
}

Rational dotExact(const std::vector<Rational>& omega, long long n1, long long n2, long long n3) {
  return omega[0] * n1 + omega[1] * n2 + omega[2] * n3;
}

BigInt floorOf(const Rational& x) {
  BigInt q = numerator(x) / denominator(x);
  if (x < 0 && q * denominator(x) != numerator(x)) --q;
  return q;
}

bool isInteger(const Rational& x) { return denominator(x) == 1; }

// Visits every nu with |nu| = K in lexicographic order.
template <class Fn>
void forEachShellVector(int n, int K, Fn&& fn) {
  std::vector<int> nu(n, 0);
  auto rec = [&](auto&& self, int v, int rem) -> void {
    if (v == n - 1) {
      if (rem == 0) {
        nu[v] = 0;
        fn(nu);
      } else {
        nu[v] = -rem;
        fn(nu);
        nu[v] = rem;
        fn(nu);
      }
      return;
    }
    for (int x = -rem; x <= rem; ++x) {
      nu[v] = x;
      self(self, v + 1, rem - std::abs(x));
    }
  };
  if (n == 0) return;
  rec(rec, 0, K);
}

std::vector<Rational> exactOmega(const std::vector<double>& omega) {
  std::vector<Rational> r;
  for (double w : omega) r.emplace_back(w);
  return r;
}

// Sector count of the closed form for frequencies in exact form.
long long sectorCount(const std::vector<Rational>& om, const Rational& a, int J, int K, int sector) {
  const int w = sector == 0 ? 1 : -1;
  Rational a1, a2;
  if (sector == 0) {
    a1 = dotExact(om, 0, J, K - J);
    a2 = dotExact(om, 1 - J, -1, J - K);
  } else {
    a1 = dotExact(om, 1, 1 - J, K - J);
    a2 = dotExact(om, -J, 0, J - K);
  }
  const Rational aJK = std::max({Rational(0), a1, a2});
  const Rational D = om[0] - w * om[1];
  if (aJK > 0 && a <= aJK) return 0;  // case (i)
  if (D == 0) return J;               // case (iii)
  const Rational x1 = (a - a1) / D;
  const Rational x2 = (a - a2) / D;
  const Rational x3 = (-a - a1) / D;
  const BigInt n0 = J;
  const BigInt n1 = isInteger(x1) ? floorOf(x1) : floorOf(x1) + 1;
  const BigInt n2 = isInteger(x2) ? floorOf(x2) : floorOf(x2) + 1;
  const BigInt n3 = isInteger(x1) ? std::max(BigInt(floorOf(x1) - floorOf(x3) - 1), BigInt(0))
                                  : BigInt(floorOf(x1) - floorOf(x3));
  const BigInt m = std::min({n0, n1, n2, n3});
  return m.convert_to<long long>();
}

long long mExact(const std::vector<Rational>& om, const Rational& a, int J, int K) {
  if (J == 0) return abs(om[2]) * K < a ? 1 : 0;
  const std::vector<Rational> rev = {om[0], om[1], -om[2]};
  long long s = 0;
  for (int sector = 0; sector < 2; ++sector) s += sectorCount(om, a, J, K, sector) + sectorCount(rev, a, J, K, sector);
  return s;
}

void requireNormalized3(const std::vector<double>& omega) {
  if (omega.size() != 3) throw std::invalid_argument("closed form requires n = 3");
  if (!isNormalized(omega)) throw std::invalid_argument("closed form requires normalized frequencies");
}

}  // namespace

bool nearResonant(const std::vector<double>& omega, const std::vector<int>& nu, double a) {
  Interval s(0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] != 0) s += Interval(omega[j]) * Interval(static_cast<double>(nu[j]));
  }
  const Interval m = abs(s);
  if (m.hi() < a) return true;
  if (m.lo() >= a) return false;
  return abs(dotExact(omega, nu)) < Rational(a);
}

LatticeCount bruteForceCount(const LatticeSpec& spec, bool withWitnesses) {
  if (spec.K < 1) throw std::invalid_argument("K must be positive");
  LatticeCount out;
  forEachShellVector(static_cast<int>(spec.omega.size()), spec.K, [&](const std::vector<int>& nu) {
    if (!nearResonant(spec.omega, nu, spec.a)) return;
    ++out.count;
    if (withWitnesses) out.witnesses.push_back(nu);
  });
  return out;
}

bool isNormalized(const std::vector<double>& omega) {
  if (omega.empty() || !(omega[0] > 0.0)) return false;
  for (std::size_t j = 1; j < omega.size(); ++j) {
    if (std::fabs(omega[j - 1]) < std::fabs(omega[j])) return false;
  }
  return true;
}

NormalizedOmega normalizeOmega(const std::vector<double>& omega) {
  if (std::all_of(omega.begin(), omega.end(), [](double x) { return x == 0.0; })) {
    throw std::invalid_argument("frequency vector must be nonzero");
  }
  NormalizedOmega r;
  r.perm.resize(omega.size());
  std::iota(r.perm.begin(), r.perm.end(), 0);
  std::stable_sort(r.perm.begin(), r.perm.end(),
                   [&](int i, int j) { return std::fabs(omega[i]) > std::fabs(omega[j]); });
  r.sign = omega[r.perm[0]] > 0.0 ? 1 : -1;
  for (int i : r.perm) r.omega.push_back(r.sign * omega[i]);
  return r;
}

long long closedFormSector(const std::vector<double>& omega, double a, int J, int K, int sector) {
  requireNormalized3(omega);
  if (J < 1 || J > K) throw std::invalid_argument("sector counts need 1 <= J <= K");
  return sectorCount(exactOmega(omega), Rational(a), J, K, sector);
}

long long closedFormM(const std::vector<double>& omega, double a, int J, int K) {
  requireNormalized3(omega);
  return mExact(exactOmega(omega), Rational(a), J, K);
}

long long closedFormCount3(const LatticeSpec& spec) {
  requireNormalized3(spec.omega);
  if (spec.K < 1) throw std::invalid_argument("K must be positive");
  if (!(spec.a > 0.0)) throw std::invalid_argument("a must be positive");
  const auto om = exactOmega(spec.omega);
  const Rational a(spec.a);
  long long total = 0;
  for (int J = 0; J <= spec.K; ++J) total += (J == spec.K ? 1 : 2) * mExact(om, a, J, spec.K);
  return total;
}

SymmetryReport symmetryDecomposition(const LatticeSpec& spec) {
  if (spec.omega.size() != 3) throw std::invalid_argument("symmetry decomposition requires n = 3");
  const int K = spec.K;
  auto decompose = [&](const std::vector<double>& om) {
    std::vector<SectorCounts> byJ(K + 1);
    for (int J = 0; J <= K; ++J) byJ[J].J = J;
    forEachShellVector(3, K, [&](const std::vector<int>& nu) {
      if (!nearResonant(om, nu, spec.a)) return;
      const int J = std::abs(nu[0]) + std::abs(nu[1]);
      auto& c = byJ[J];
      if (nu[2] < 0) ++c.minus;
      if (nu[2] == 0) ++c.zero;
      if (nu[2] > 0) ++c.plus;
      if (nu[2] < 0 || J == 0) return;
      if (nu[0] >= 0 && nu[1] > 0) ++c.pp;
      if (nu[0] > 0 && nu[1] <= 0) ++c.pm;
      if (nu[0] < 0 && nu[1] >= 0) ++c.mp;
      if (nu[0] <= 0 && nu[1] < 0) ++c.mm;
    });
    return byJ;
  };
  SymmetryReport r;
  r.byJ = decompose(spec.omega);
  r.byJReversed = decompose({spec.omega[0], spec.omega[1], -spec.omega[2]});
  r.consistent = true;
  for (int J = 0; J <= K; ++J) {
    const auto& c = r.byJ[J];
    const auto& v = r.byJReversed[J];
    r.total += c.minus + c.zero + c.plus;
    if (c.minus != c.plus) r.consistent = false;
    if (J > 0 && (c.mm != v.pp || c.mp != v.pm)) r.consistent = false;
    const long long sectors = c.pp + c.pm + c.mp + c.mm;
    if (J > 0 && sectors != (J == K ? c.zero : c.plus)) r.consistent = false;
  }
  if (r.total != bruteForceCount(spec).count) r.consistent = false;
  return r;
}

std::uint64_t shellCount(int n, int K) {
  if (K == 0) return 1;
  // sum_j 2^j C(n, j) C(K-1, j-1): choose j nonzero coordinates, their signs
  // and a composition of K into j positive parts.
  auto binom = [](int a, int b) -> std::uint64_t {
    if (b < 0 || b > a) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  std::uint64_t total = 0;
  for (int j = 1; j <= std::min(n, K); ++j) total += (std::uint64_t{1} << j) * binom(n, j) * binom(K - 1, j - 1);
  return total;
}

}  // namespace bnf
