#pragma once

#include <random>

#include "bnf/cpoly.hpp"

namespace bnf::testing {

// Random series with point coefficients, each monomial of degree
// minDeg..maxDeg kept with probability density.
inline SeriesWZ randomSeries(int n, int minDeg, int maxDeg, double density, std::mt19937_64& rng) {
  SeriesWZ f(n, maxDeg);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  for (int d = minDeg; d <= maxDeg; ++d) {
    for (Packed e : f.table().monomials(d)) {
      if (keep(rng)) f.setCoeff(e, ComplexInterval(Interval(coef(rng)), Interval(coef(rng))));
    }
  }
  return f;
}

}  // namespace bnf::testing
