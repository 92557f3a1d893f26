#include "doctest.h"

#include <sstream>

#include "bnf/cpoly.hpp"
#include "test_support.hpp"

using namespace bnf;
using bnf::testing::randomSeries;

namespace {

MultiIndex idx(std::vector<int> h, std::vector<int> k) { return MultiIndex{std::move(h), std::move(k)}; }

bool enclosesPoint(const ComplexInterval& c, double re, double im) { return c.contains(re, im); }

}  // namespace

TEST_CASE("product of w1 and z1 is the monomial w1 z1") {
  const auto w1 = SeriesWZ::variable(2, 0, 2);
  const auto z1 = SeriesWZ::variable(2, 2, 2);
  const auto p = mulTruncated(w1, z1, 2);
  CHECK(p.termCount() == 1);
  CHECK(p.coeff(idx({1, 0}, {1, 0})) == ComplexInterval(1.0));
}

TEST_CASE("product with zero and degree cap") {
  const auto w1 = SeriesWZ::variable(2, 0, 2);
  const auto z2 = SeriesWZ::variable(2, 3, 2);
  CHECK(mulTruncated(w1, SeriesWZ(2, 2), 2).isZero());
  const auto p = mulTruncated(w1 + z2, w1 - z2, 2);
  CHECK(p.termCount() == 2);
  CHECK(p.coeff(idx({2, 0}, {0, 0})) == ComplexInterval(1.0));
  CHECK(p.coeff(idx({0, 0}, {0, 2})) == ComplexInterval(-1.0));
  CHECK(mulTruncated(w1, w1, 1).isZero());
}

TEST_CASE("dimension mismatch throws") {
  CHECK_THROWS_AS(add(SeriesWZ(2, 3), SeriesWZ(3, 3)), DimensionError);
  CHECK_THROWS_AS(poissonBracket(SeriesWZ(2, 3), SeriesWZ(3, 3), 3), DimensionError);
}

TEST_CASE("canonical pair and action brackets") {
  const auto w1 = SeriesWZ::variable(2, 0, 4);
  const auto z1 = SeriesWZ::variable(2, 2, 4);
  const auto b = poissonBracket(w1, z1, 4);
  CHECK(b.termCount() == 1);
  CHECK(b.coeff(idx({0, 0}, {0, 0})) == ComplexInterval(1.0));

  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      const auto ij = SeriesWZ::action(2, j, 4);
      const auto il = SeriesWZ::action(2, l, 4);
      const auto br = poissonBracket(ij, il, 4);
      br.forEachTerm([](Packed, const ComplexInterval& c) { CHECK(c.containsZero()); });
    }
  }
}

TEST_CASE("bracket of an action with a monomial multiplies by i(k_j - h_j)") {
  const auto m = idx({2, 1}, {0, 3});
  const ComplexInterval c(Interval(0.5), Interval(-0.25));
  const auto f = SeriesWZ::monomial(2, m, c, 8);
  for (int j = 0; j < 2; ++j) {
    const auto br = poissonBracket(SeriesWZ::action(2, j, 8), f, 8);
    const double factor = m.k[j] - m.h[j];
    // i factor (0.5 - 0.25 i) = factor (0.25 + 0.5 i)
    CHECK(enclosesPoint(br.coeff(m), 0.25 * factor, 0.5 * factor));
    CHECK(br.termCount() == (factor == 0.0 ? 0u : 1u));
  }
}

TEST_CASE("bracket is antisymmetric") {
  std::mt19937_64 rng(7);
  const auto f = randomSeries(2, 2, 4, 0.3, rng);
  poissonBracket(f, f, 8).forEachTerm([](Packed, const ComplexInterval& c) { CHECK(c.containsZero()); });
}

TEST_CASE("polyNorm of simple series") {
  CHECK(polyNorm(SeriesWZ(2, 3), Interval(0.7)).isZero());
  const auto f = SeriesWZ::monomial(2, idx({1, 0}, {0, 1}), ComplexInterval(2.0), 3);
  const Interval nrm = polyNorm(f, Interval(0.3));
  CHECK(nrm.contains(2.0 * 0.3 * 0.3));
  CHECK(nrm.width() < 1e-15);
}

TEST_CASE("polyNorm scales homogeneously and is submultiplicative") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = randomSeries(2, 3, 3, 0.5, rng);
    const auto g = randomSeries(2, 1, 3, 0.5, rng);
    const Interval R(0.4);
    const Interval scaled = polyNorm(f, Interval(2.0) * R);
    const Interval expected = Interval(8.0) * polyNorm(f, R);
    CHECK(scaled.lo() <= expected.hi());
    CHECK(expected.lo() <= scaled.hi());
    const auto fg = mulTruncated(f, g, 6);
    CHECK(polyNorm(fg, R).lo() <= (polyNorm(f, R) * polyNorm(g, R)).hi());
  }
}

TEST_CASE("project partitions the terms") {
  std::mt19937_64 rng(3);
  const auto f = randomSeries(2, 2, 5, 0.4, rng);
  const IndexClassifier cls = [](Packed e) {
    const int d = totalDegree(e);
    if (d <= 2) return IndexClass::DiagonalOrLow;
    if (d == 3) return IndexClass::NonResonant;
    if (d == 4) return IndexClass::Resonant;
    return IndexClass::Ultraviolet;
  };
  SeriesWZ sum(2, 5);
  std::size_t count = 0;
  for (auto c : {IndexClass::DiagonalOrLow, IndexClass::NonResonant, IndexClass::Resonant, IndexClass::Ultraviolet}) {
    const auto part = project(f, c, cls);
    count += part.termCount();
    sum += part;
  }
  CHECK(count == f.termCount());
  f.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(c.subsetOf(sum.coeff(e))); });
  CHECK(project(SeriesWZ::action(2, 0, 5), IndexClass::NonResonant, cls).isZero());
}

TEST_CASE("linear substitution: identity and complexification round trip") {
  std::mt19937_64 rng(5);
  const auto f = randomSeries(2, 1, 3, 0.5, rng);
  LinearMap id(4, std::vector<ComplexInterval>(4, ComplexInterval(0.0)));
  for (int v = 0; v < 4; ++v) id[v][v] = ComplexInterval(1.0);
  const auto g = linearSubstitute(f, id);
  f.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(c.subsetOf(g.coeff(e))); });

  const auto back = linearSubstitute(linearSubstitute(f, complexToReal(2)), realToComplex(2));
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    const ComplexInterval b = back.coeff(e);
    CHECK(b.re().contains(c.re().mid()));
    CHECK(b.im().contains(c.im().mid()));
  });
}

TEST_CASE("series text round trip is exact") {
  std::mt19937_64 rng(9);
  const auto f = randomSeries(3, 0, 4, 0.2, rng);
  std::stringstream ss;
  writeSeries(ss, f);
  const auto g = readSeries(ss);
  CHECK(g.termCount() == f.termCount());
  f.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(g.coeff(e) == c); });
}

TEST_CASE("malformed series text is rejected") {
  std::istringstream bad("n=2 degmax=3\n1 0 0\n");
  CHECK_THROWS_AS(readSeries(bad), ParseError);
}

TEST_CASE("derivative lemma on a single monomial") {
  const auto f = SeriesWZ::monomial(1, idx({5}, {0}), ComplexInterval(1.0), 5);
  const auto chk = derivativeNormCheck(f, 0, 0.1, 0.2, 0.5, 1.0);
  CHECK(chk.holds());
  CHECK(chk.lhs.contains(5.0 * std::pow(0.55, 4)));
}

TEST_CASE("norm lemmas hold on random series over the alpha-beta grid") {
  const double grid[] = {0.05, 0.1, 0.25, 0.5};
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (double alpha : grid) {
    for (double beta : grid) {
      for (int trial = 0; trial < 100; ++trial) {
        const auto f = randomSeries(2, 1, 6, 0.15, rng);
        const auto g = randomSeries(2, 1, 4, 0.2, rng);
        const double R = 0.5;
        const double R0 = 1.0;
        const int v = trial % 4;
        CHECK(derivativeNormCheck(f, v, alpha, beta, R, R0).holds());
        CHECK(bracketNormCheck(f, g, alpha, beta, R, R0).holds());
        CHECK(actionBracketNormCheck(f, trial % 2, alpha, beta, R, R0).holds());
        ++checked;
      }
    }
  }
  CHECK(checked == 1600);
}

TEST_CASE("norm check helpers reject parameters outside the domain") {
  const auto f = SeriesWZ::variable(1, 0, 2);
  CHECK_THROWS_AS(derivativeNormCheck(f, 0, 0.5, 0.6, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("power-law bound for series starting at degree N+1") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int N = 2 + trial % 4;
    const auto f = randomSeries(2, N + 1, N + 4, 0.3, rng);
    const Interval R0(0.9);
    const Interval R(0.1 + 0.003 * trial);
    const Interval lhs = polyNorm(f, Interval(2.0) * R);
    const Interval rhs = pow(Interval(2.0) * R / R0, N + 1) * polyNorm(f, R0);
    CHECK(lhs.hi() <= rhs.lo() * (1.0 + 1e-12));
  }
}

TEST_CASE("reality symmetry of a real Hamiltonian") {
  // (p^2 + q^2)/2 and p^3 mapped to (w, z).
  SeriesWZ h(1, 3);
  h.setCoeff(idx({2}, {0}), ComplexInterval(0.5));
  h.setCoeff(idx({0}, {2}), ComplexInterval(0.5));
  h.setCoeff(idx({3}, {0}), ComplexInterval(1.0));
  const auto wz = linearSubstitute(h, complexToReal(1));
  CHECK(wz.realitySymmetric());
  SeriesWZ bad(1, 2);
  bad.setCoeff(idx({2}, {0}), ComplexInterval(1.0));
  CHECK_FALSE(bad.realitySymmetric());
}

TEST_CASE("ActionPoly derivative and series form") {
  ActionPoly Z(2);
  Z.addCoeff({1, 0}, Interval(2.0));
  Z.addCoeff({1, 1}, Interval(3.0));
  const auto d = Z.derivative(0);
  CHECK(d.coeff({0, 0}) == Interval(2.0));
  CHECK(d.coeff({0, 1}) == Interval(3.0));
  // 3 I1 I2 = 3 (i)^2 w1 z1 w2 z2 = -3 w1 w2 z1 z2
  const auto s = Z.toSeries(4);
  CHECK(enclosesPoint(s.coeff(idx({1, 1}, {1, 1})), -3.0, 0.0));
  CHECK(enclosesPoint(s.coeff(idx({1, 0}, {1, 0})), 0.0, 2.0));
  const auto back = toActionPoly(s.diagonalPart());
  CHECK(back.coeff({1, 1}).contains(3.0));
}
