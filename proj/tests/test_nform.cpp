#include "doctest.h"

#include <cmath>
#include <sstream>

#include "bnf/fpu.hpp"
#include "bnf/nform.hpp"

using namespace bnf;

namespace {

SeriesWZ oneDofCubic(double omega, double c, int maxDegree) {
  SeriesWZ H = quadraticPart({Interval(omega)}, maxDegree);
  H.setCoeff(MultiIndex{{3}, {0}}, ComplexInterval(c));
  H.setCoeff(MultiIndex{{0}, {3}}, ComplexInterval(c));
  return H;
}

}  // namespace

TEST_CASE("purely quadratic Hamiltonian is already normal") {
  const std::vector<Interval> om = {Interval(1.0), constants::sqrt2()};
  const NormalForm nf = normalize(quadraticPart(om, 6), om, 4, 6);
  CHECK(nf.remainder.isZero());
  CHECK(nf.Z.coeff({1, 0}) == om[0]);
  CHECK(nf.Z.coeff({0, 1}) == om[1]);
  CHECK(nf.Z.terms().size() == 2);
  for (const auto& g : nf.generators) CHECK(g.isZero());
}

TEST_CASE("one degree of freedom with a cubic term: degree-4 remainder") {
  // chi_3 = c/(3 i Omega) (w^3 - z^3); the degree-4 part of exp(L_chi) H is
  // (1/2){f3, chi_3} = 3 i c^2 / Omega w^2 z^2.
  const double omega = 1.3, c = 0.2;
  const NormalForm nf = normalize(oneDofCubic(omega, c, 4), {Interval(omega)}, 3, 4);
  CHECK(nf.Z.terms().size() == 1);
  CHECK(nf.Z.coeff({1}) == Interval(omega));
  CHECK(nf.remainder.termCount() == 1);
  const ComplexInterval r = nf.remainder.coeff(MultiIndex{{2}, {2}});
  CHECK(r.re().containsZero());
  CHECK(r.im().contains(3.0 * c * c / omega));
  CHECK(r.im().width() < 1e-15);
  // chi_3 itself.
  const ComplexInterval chi = nf.generators.at(0).coeff(MultiIndex{{3}, {0}});
  CHECK(chi.im().contains(-c / (3.0 * omega)));
}

TEST_CASE("generators solve the homological equation") {
  const Model m = buildFPU3();
  const NormalForm nf = normalize(m.H, m.omega, 5, 6);
  const SeriesWZ Z2 = quadraticPart(m.omega, 6);
  // {Z2, chi_3} + f_3 encloses zero.
  const SeriesWZ lhs = poissonBracket(Z2, nf.generators.at(0), 3) + m.H.homogeneous(3).withMaxDegree(3);
  lhs.forEachTerm([](Packed, const ComplexInterval& c) { CHECK(c.containsZero()); });
}

TEST_CASE("FPU normal form invariants") {
  const Model m = buildFPU3();
  const NormalForm nf = normalize(m.H, m.omega, 6, 9);
  CHECK(nf.remainder.minDegree() >= 7);
  CHECK(nf.remainder.topDegree() <= 9);
  CHECK(nf.remainder.realitySymmetric());
  const SeriesWZ zs = nf.Z.toSeries(9);
  for (int j = 0; j < 3; ++j) {
    poissonBracket(SeriesWZ::action(3, j, 9), zs, 9).forEachTerm([](Packed, const ComplexInterval& c) {
      CHECK(c.containsZero());
    });
  }
  // Odd degrees of Z vanish for the FPU model: Z has terms of even degree in (w, z) only.
  CHECK(nf.Z.degree() == 3);
}

TEST_CASE("Z agrees between the two normalization paths") {
  const Model m = buildFPU3();
  const NormalForm nf = normalize(m.H, m.omega, 6, 7);
  const ActionPoly alt = normalizeZExplicit(m.H, m.omega, 6);
  CHECK(alt.terms().size() == nf.Z.terms().size());
  for (const auto& [e, c] : nf.Z.terms()) {
    const Interval d = alt.coeff(e);
    CHECK(d.lo() <= c.hi());
    CHECK(c.lo() <= d.hi());
  }
}

TEST_CASE("resonance and malformed input are rejected") {
  const std::vector<Interval> om = {Interval(1.0), Interval(2.0)};
  SeriesWZ H = quadraticPart(om, 4);
  H.setCoeff(MultiIndex{{2, 0}, {0, 1}}, ComplexInterval(0.1));
  H.setCoeff(MultiIndex{{0, 1}, {2, 0}}, ComplexInterval(0.1));
  try {
    normalize(H, om, 3, 4);
    CHECK(false);
  } catch (const ResonanceError& e) {
    CHECK(e.divisor().containsZero());
    CHECK(((e.index().h == std::vector<int>{2, 0}) || (e.index().h == std::vector<int>{0, 1})));
  }
  SeriesWZ noQuad(2, 4);
  noQuad.setCoeff(MultiIndex{{3, 0}, {0, 0}}, ComplexInterval(1.0));
  CHECK_THROWS_AS(normalize(noQuad, om, 3, 4), std::invalid_argument);
}

TEST_CASE("tail bound") {
  const Interval bN = Interval(1.0) / parseOutward("8.700956e-02");
  const Interval rho = Interval(2.0) * parseOutward("5e-4") * parseOutward("1.4");
  const Interval t = tailNorm(bN, 27, rho);
  CHECK(t.lo() > 0.0);
  CHECK(std::isfinite(t.hi()));
  // Strictly decreasing in M, monotone in rho.
  for (int M = 10; M < 30; ++M) CHECK(tailNorm(bN, M + 1, rho).hi() < tailNorm(bN, M, rho).lo());
  CHECK(tailNorm(bN, 27, Interval(0.5) * rho).hi() < t.lo());
  CHECK(tailNorm(bN, 27, Interval(1e-300)).hi() < 1e-300);
  // Divergence exactly at bN rho >= 1.
  CHECK_THROWS_AS(tailNorm(Interval(2.0), 5, Interval(0.5)), DomainError);
  CHECK_NOTHROW(tailNorm(Interval(2.0), 5, Interval(std::nextafter(0.5, 0.0))));
}

TEST_CASE("estimateBN") {
  NormalForm nf;
  nf.n = 1;
  nf.N = 3;
  nf.M = 5;
  nf.remainder = SeriesWZ(1, 5);
  CHECK(estimateBN(nf).hi() == 0.0);
  nf.remainder.setCoeff(MultiIndex{{3}, {2}}, ComplexInterval(Interval(0.0), Interval(32.0)));
  const Interval b = estimateBN(nf, 1.5);
  // 32^(1/5) * 1.5, nudged upward.
  CHECK(b.lo() >= 3.0);
  CHECK(b.hi() - 3.0 < 1e-14);
}

TEST_CASE("normal form save and load") {
  const Model m = buildFPU3();
  NormalForm nf = normalize(m.H, m.omega, 4, 6);
  nf.bN = parseOutward("11.49");
  nf.certifiedTail = true;
  std::stringstream ss;
  saveNormalForm(ss, nf);
  const NormalForm back = loadNormalForm(ss);
  CHECK(back.N == 4);
  CHECK(back.M == 6);
  CHECK(back.certifiedTail);
  REQUIRE(back.bN.has_value());
  CHECK(*back.bN == *nf.bN);
  CHECK(back.remainder.termCount() == nf.remainder.termCount());
  nf.remainder.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(back.remainder.coeff(e) == c); });
  for (const auto& [e, c] : nf.Z.terms()) CHECK(back.Z.coeff(e) == c);
}
