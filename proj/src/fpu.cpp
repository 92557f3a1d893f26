#include "bnf/fpu.hpp"

#include <fstream>
#include <stdexcept>

#include "bnf/nform.hpp"

namespace bnf {

namespace {

constexpr int kDof = 3;

// a + b sqrt(2) with dyadic a, b; products of the values used here are exact.
struct QSqrt2 {
  double a = 0.0;
  double b = 0.0;
  bool isZero() const { return a == 0.0 && b == 0.0; }
};
QSqrt2 operator+(QSqrt2 x, QSqrt2 y) { return {x.a + y.a, x.b + y.b}; }
QSqrt2 operator-(QSqrt2 x, QSqrt2 y) { return {x.a - y.a, x.b - y.b}; }
QSqrt2 operator*(QSqrt2 x, QSqrt2 y) { return {x.a * y.a + 2.0 * x.b * y.b, x.a * y.b + x.b * y.a}; }

// sin(j l pi / 4) for j, l in 1..3, exactly.
QSqrt2 sinTable(int j, int l) {
  switch ((j * l) % 8) {
    case 0:
    case 4:
      return {0.0, 0.0};
    case 1:
    case 3:
      return {0.0, 0.5};
    case 2:
      return {1.0, 0.0};
    case 5:
    case 7:
      return {0.0, -0.5};
    default:
      return {-1.0, 0.0};
  }
}

Interval toInterval(QSqrt2 x) {
  if (x.b == 0.0) return Interval(x.a);
  return Interval(x.a) + Interval(x.b) * constants::sqrt2();
}

// Difference x_{j+1} - x_j of the mode shapes, as a function of mode a:
// D[j][a] = S[j+1][a] - S[j][a] with S[0] = S[4] = 0.
QSqrt2 modeDifference(int j, int a) {
  const QSqrt2 hi = (j + 1 <= kDof) ? sinTable(a, j + 1) : QSqrt2{};
  const QSqrt2 lo = (j >= 1) ? sinTable(a, j) : QSqrt2{};
  return hi - lo;
}

// sum_j D[j][a] D[j][b] D[j][c], exact.
QSqrt2 cubicShape(int a, int b, int c) {
  QSqrt2 s;
  for (int j = 0; j <= kDof; ++j) s = s + modeDifference(j, a) * modeDifference(j, b) * modeDifference(j, c);
  return s;
}

}  // namespace

ModelSpec parseModelSpec(const std::string& text) {
  ModelSpec spec;
  if (text == "fpu3") return spec;
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    spec.kind = ModelSpec::Kind::File;
    spec.path = text.substr(5);
    return spec;
  }
  throw std::invalid_argument("unknown model '" + text + "' (expected fpu3 or file:<path>)");
}

std::vector<Interval> fpuFrequencies() {
  const Interval s2 = constants::sqrt2();
  return {sqrt(Interval(2.0) - s2), s2, sqrt(Interval(2.0) + s2)};
}

SeriesWZ fpuPhysicalHamiltonian(const Interval& atilde) {
  if (!atilde.certainlyPositive()) throw std::invalid_argument("alpha-tilde must be positive");
  const int n = kDof;
  SeriesWZ H(n, 3);
  // Momenta y_l occupy slots 0..2, positions x_l slots 3..5.
  for (int l = 0; l < n; ++l) H.addCoeff(unitExponent(l) * 2, ComplexInterval(0.5));
  const Interval third = atilde / Interval(3.0);
  for (int j = 0; j <= n; ++j) {
    // d_j = x_{j+1} - x_j with x_0 = x_4 = 0.
    SeriesWZ d(n, 3);
    if (j + 1 <= n) d.addCoeff(unitExponent(n + j), ComplexInterval(1.0));
    if (j >= 1) d.addCoeff(unitExponent(n + j - 1), ComplexInterval(-1.0));
    const SeriesWZ d2 = mulTruncated(d, d, 3);
    H += ComplexInterval(0.5) * d2;
    H += ComplexInterval(third) * mulTruncated(d2, d, 3);
  }
  return H;
}

LinearMap fpuModeMatrix() {
  const int n = kDof;
  const auto omega = fpuFrequencies();
  const Interval invSqrt2 = constants::sqrt2() / Interval(2.0);
  LinearMap A(2 * n, std::vector<ComplexInterval>(2 * n));
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) {
      const Interval s = toInterval(sinTable(j + 1, l + 1));
      if (s.isZero()) continue;
      const Interval root = sqrt(omega[j]);
      A[l][j] = ComplexInterval(invSqrt2 * root * s);
      A[n + l][n + j] = ComplexInterval(invSqrt2 / root * s);
    }
  }
  return A;
}

std::vector<std::vector<Interval>> symplecticDefect(const LinearMap& A) {
  const int V = static_cast<int>(A.size());
  const int n = V / 2;
  // J pairs slot j (momentum) with slot n + j (position).
  auto J = [n](int r, int c) -> double {
    if (r < n && c == r + n) return 1.0;
    if (r >= n && c == r - n) return -1.0;
    return 0.0;
  };
  std::vector<std::vector<Interval>> D(V, std::vector<Interval>(V, Interval(0.0)));
  for (int r = 0; r < V; ++r) {
    for (int c = 0; c < V; ++c) {
      Interval s(0.0);
      for (int a = 0; a < V; ++a) {
        for (int b = 0; b < V; ++b) {
          const double jab = J(a, b);
          if (jab == 0.0) continue;
          s += A[a][r].re() * A[b][c].re() * Interval(jab);
        }
      }
      D[r][c] = s - Interval(J(r, c));
    }
  }
  return D;
}

SeriesWZ fpuModalHamiltonian(const Interval& atilde) {
  const int n = kDof;
  SeriesWZ H = linearSubstitute(fpuPhysicalHamiltonian(atilde), fpuModeMatrix());
  // Exact zero pattern of the cubic part: the q^3 coefficient of q_a q_b q_c
  // is a nonzero factor times cubicShape(a, b, c), and no cubic term involves p.
  auto& cubic = H.mutableBucket(3);
  const auto& mons = H.table().monomials(3);
  for (std::size_t r = 0; r < cubic.size(); ++r) {
    const Packed e = mons[r];
    bool pureQ = true;
    for (int j = 0; j < n; ++j) pureQ = pureQ && exponentOf(e, j) == 0;
    bool zero = !pureQ;
    if (pureQ) {
      int idx[3], m = 0;
      for (int j = 0; j < n; ++j) {
        for (int t = 0; t < exponentOf(e, n + j); ++t) idx[m++] = j + 1;
      }
      zero = cubicShape(idx[0], idx[1], idx[2]).isZero();
    }
    if (zero) {
      if (!cubic[r].containsZero()) throw std::logic_error("FPU cubic coefficient expected to vanish does not");
      cubic[r] = ComplexInterval();
    }
  }
  return H;
}

Model buildFPU3(const Interval& atilde) {
  Model model;
  model.omega = fpuFrequencies();
  SeriesWZ H = linearSubstitute(fpuModalHamiltonian(atilde), complexToReal(kDof));
  const SeriesWZ Z2 = quadraticPart(model.omega, 3);
  (H.homogeneous(2) - Z2).forEachTerm([](Packed, const ComplexInterval& c) {
    if (!c.containsZero()) throw std::logic_error("FPU quadratic part does not match the frequencies");
  });
  model.H = Z2.withMaxDegree(3) + H.homogeneous(3);
  return model;
}

SeriesWZ loadSeries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file '" + path + "'");
  return readSeries(in);
}

Model loadModel(const ModelSpec& spec) {
  if (spec.kind == ModelSpec::Kind::Fpu3) return buildFPU3(spec.atilde);
  Model model;
  SeriesWZ H = loadSeries(spec.path);
  const int n = H.dim();
  model.omega.resize(n);
  SeriesWZ quad = H.homogeneous(2);
  for (int j = 0; j < n; ++j) {
    const Packed e = unitExponent(j) | unitExponent(n + j);
    const ComplexInterval c = quad.coeff(e);
    if (!c.re().containsZero()) throw std::invalid_argument("quadratic coefficient of I_j must be real");
    model.omega[j] = c.im();
    quad.setCoeff(e, ComplexInterval());
  }
  quad.forEachTerm([](Packed, const ComplexInterval& c) {
    if (!c.containsZero()) throw std::invalid_argument("quadratic part must be diagonal in the actions");
  });
  model.H = quadraticPart(model.omega, H.maxDegree()) + H.degreeRange(3, H.maxDegree());
  return model;
}

}  // namespace bnf
