#include "bnf/nform.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace bnf {

namespace {

std::string describe(const MultiIndex& m, const Interval& d) {
  std::ostringstream os;
  os << "resonant divisor at h=(";
  for (std::size_t j = 0; j < m.h.size(); ++j) os << (j ? "," : "") << m.h[j];
  os << ") k=(";
  for (std::size_t j = 0; j < m.k.size(); ++j) os << (j ? "," : "") << m.k[j];
  os << "): " << d << " contains 0";
  return os.str();
}

void requireOmega(const SeriesWZ& H, const std::vector<Interval>& omega) {
  if (static_cast<int>(omega.size()) != H.dim()) throw DimensionError("frequency vector does not match dimension");
}

// Checks that H has no terms below degree 2 and that its quadratic part is Z2.
void checkQuadratic(const SeriesWZ& H, const std::vector<Interval>& omega) {
  for (int d = 0; d < 2 && d <= H.maxDegree(); ++d) {
    if (!H.homogeneous(d).isZero()) throw std::invalid_argument("Hamiltonian has terms of degree below 2");
  }
  const SeriesWZ diff = H.homogeneous(2) - quadraticPart(omega, H.maxDegree());
  diff.forEachTerm([](Packed, const ComplexInterval& c) {
    if (!c.containsZero()) throw std::invalid_argument("quadratic part of H is not sum_j Omega_j i w_j z_j");
  });
}

// chi solving {Z2, chi} = -F for the non-diagonal homogeneous F.
SeriesWZ solveHomological(const SeriesWZ& F, const std::vector<Interval>& omega, int degree) {
  const int n = F.dim();
  SeriesWZ chi(n, degree);
  for (const Term& t : F.terms(degree)) {
    const Interval d = divisor(omega, t.e, n);
    if (d.containsZero()) throw ResonanceError(MultiIndex::unpack(t.e, n), d);
    // f / (i d) = -i f / d.
    const ComplexInterval minusIf(t.c.im(), -t.c.re());
    chi.setCoeff(t.e, minusIf / d);
  }
  return chi;
}

}  // namespace

ResonanceError::ResonanceError(const MultiIndex& index, const Interval& divisor)
    : std::runtime_error(describe(index, divisor)), index_(index), divisor_(divisor) {}

Interval divisor(const std::vector<Interval>& omega, const std::vector<int>& nu) {
  if (omega.size() != nu.size()) throw DimensionError("divisor: length mismatch");
  Interval s(0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] != 0) s += omega[j] * Interval(static_cast<double>(nu[j]));
  }
  return s;
}

Interval divisor(const std::vector<Interval>& omega, Packed e, int n) {
  Interval s(0.0);
  for (int j = 0; j < n; ++j) {
    const int nu = exponentOf(e, j) - exponentOf(e, n + j);
    if (nu != 0) s += omega[j] * Interval(static_cast<double>(nu));
  }
  return s;
}

SeriesWZ quadraticPart(const std::vector<Interval>& omega, int maxDegree) {
  const int n = static_cast<int>(omega.size());
  SeriesWZ z2(n, std::max(maxDegree, 2));
  for (int j = 0; j < n; ++j) {
    z2.setCoeff(unitExponent(j) | unitExponent(n + j), ComplexInterval(Interval(0.0), omega[j]));
  }
  return z2;
}

NormalForm normalize(const SeriesWZ& H, const std::vector<Interval>& omega, int N, int M) {
  requireOmega(H, omega);
  if (N < 2) throw std::invalid_argument("normalization order N must be at least 2");
  if (M < N + 1) throw std::invalid_argument("truncation M must be at least N+1");
  checkQuadratic(H, omega);
  const int n = H.dim();

  SeriesWZ G = H.withMaxDegree(M).degreeRange(3, M);
  NormalForm nf;
  nf.n = n;
  nf.N = N;
  nf.M = M;
  nf.omega = omega;

  for (int r = 3; r <= N; ++r) {
    const SeriesWZ F = G.homogeneous(r).nonDiagonalPart();
    const SeriesWZ chi = solveHomological(F, omega, r);
    nf.generators.push_back(chi);
    if (chi.isZero()) continue;

    SeriesWZ out = G;
    {
      // The degree-r non-diagonal part cancels against {Z2, chi} exactly.
      auto& b = out.mutableBucket(r);
      const auto& mons = out.table().monomials(r);
      for (std::size_t i = 0; i < b.size(); ++i) {
        bool diag = true;
        for (int j = 0; j < n && diag; ++j) diag = exponentOf(mons[i], j) == exponentOf(mons[i], n + j);
        if (!diag) b[i] = ComplexInterval();
      }
    }
    // Terms of the Lie series: sum_k L^k G / k! - sum_k L^k F / (k+1)!, which is
    // generated by C_1 = {G, chi} - F, C_k = {C_{k-1}, chi} / k.
    SeriesWZ C = poissonBracket(G.degreeRange(3, M - r + 2), chi, M);
    out += C.degreeRange(r + 1, M);
    C -= F;
    for (int k = 2;; ++k) {
      const int lo = C.minDegree();
      if (lo < 0 || lo + r - 2 > M) break;
      C = poissonBracket(C.degreeRange(lo, M - r + 2), chi, M);
      C /= Interval(static_cast<double>(k));
      out += C;
    }
    G = std::move(out);
  }

  const SeriesWZ low = G.degreeRange(3, N);
  low.forEachTerm([&](Packed e, const ComplexInterval&) {
    if (!MultiIndex::unpack(e, n).isDiagonal()) throw std::logic_error("normalization left a non-diagonal term");
  });
  nf.Z = toActionPoly(quadraticPart(omega, N) + low);
  nf.remainder = G.degreeRange(N + 1, M);
  return nf;
}

SeriesWZ lieTransform(const SeriesWZ& f, const SeriesWZ& chi, int cap) {
  SeriesWZ sum = f.withMaxDegree(cap);
  SeriesWZ term = sum;
  for (int k = 1;; ++k) {
    term = poissonBracket(term, chi, cap);
    if (term.isZero()) break;
    term /= Interval(static_cast<double>(k));
    sum += term;
  }
  return sum;
}

ActionPoly normalizeZExplicit(const SeriesWZ& H, const std::vector<Interval>& omega, int N) {
  requireOmega(H, omega);
  if (N < 2) throw std::invalid_argument("normalization order N must be at least 2");
  checkQuadratic(H, omega);
  const int n = H.dim();
  SeriesWZ cur = quadraticPart(omega, N) + H.withMaxDegree(N).degreeRange(3, N);
  for (int r = 3; r <= N; ++r) {
    const SeriesWZ F = cur.homogeneous(r).nonDiagonalPart();
    const SeriesWZ chi = solveHomological(F, omega, r);
    if (chi.isZero()) continue;
    cur = lieTransform(cur, chi, N);
    auto& b = cur.mutableBucket(r);
    const auto& mons = cur.table().monomials(r);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i].isZero() || MultiIndex::unpack(mons[i], n).isDiagonal()) continue;
      if (!b[i].containsZero()) throw std::logic_error("explicit Lie series failed to eliminate a term");
      b[i] = ComplexInterval();
    }
  }
  // Replace the quadratic part by its exact form before conversion.
  SeriesWZ low = cur.degreeRange(3, N);
  return toActionPoly(quadraticPart(omega, N) + low.diagonalPart());
}

Interval tailNorm(const Interval& bN, int M, const Interval& rho) {
  const Interval q = bN * rho;
  if (!(q.hi() < 1.0)) throw DomainError("tail estimate diverges: bN*rho >= 1");
  return pow(q, M + 1) / (Interval(1.0) - q);
}

Interval tailNorm(const NormalForm& nf, const Interval& rho) {
  if (!nf.bN) throw DomainError("normal form carries no tail parameter bN");
  return tailNorm(*nf.bN, nf.M, rho);
}

Interval estimateBN(const NormalForm& nf, double safety) {
  const auto s = degreeModuli(nf.remainder);
  double best = 0.0;
  for (int j = nf.N + 1; j <= nf.M && j < static_cast<int>(s.size()); ++j) {
    if (s[j] <= 0.0) continue;
    double v = std::pow(s[j], 1.0 / j);
    for (int u = 0; u < 4; ++u) v = rounding::nextUp(v);
    best = std::max(best, v);
  }
  return Interval(rounding::mulUp(best, safety));
}

// ---------------------------------------------------------------------------
// Serialization.

void saveNormalForm(std::ostream& os, const NormalForm& nf) {
  os << "N=" << nf.N << " M=" << nf.M;
  if (nf.bN) {
    os << " bN_lo=" << formatEndpoint(nf.bN->lo()) << " bN_hi=" << formatEndpoint(nf.bN->hi());
  } else {
    os << " bN_lo=none bN_hi=none";
  }
  os << " certified=" << (nf.certifiedTail ? 1 : 0) << "\n";
  os << "omega=";
  for (const auto& w : nf.omega) os << " " << formatEndpoint(w.lo()) << " " << formatEndpoint(w.hi());
  os << "\n[Z]\n";
  writeSeries(os, nf.Z.toSeries(std::max(2 * nf.Z.degree(), 2)));
  os << "[remainder]\n";
  writeSeries(os, nf.remainder);
  for (std::size_t i = 0; i < nf.generators.size(); ++i) {
    os << "[generator " << i + 3 << "]\n";
    writeSeries(os, nf.generators[i]);
  }
}

namespace {

std::string fieldValue(const std::string& line, const std::string& key, int lineNo) {
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) {
    if (t.rfind(key + "=", 0) == 0) return t.substr(key.size() + 1);
  }
  throw ParseError("line " + std::to_string(lineNo) + ": missing field " + key);
}

bool nextContentLine(std::istream& is, std::string& line, int& lineNo) {
  while (std::getline(is, line)) {
    ++lineNo;
    const auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos && line[p] != '#') return true;
  }
  return false;
}

SeriesWZ readSection(std::istream& is, int& lineNo) {
  std::string line;
  if (!nextContentLine(is, line, lineNo)) throw ParseError("unexpected end of file in section");
  const int n = std::stoi(fieldValue(line, "n", lineNo));
  const int degmax = std::stoi(fieldValue(line, "degmax", lineNo));
  return readSeriesBody(is, n, degmax, lineNo);
}

}  // namespace

NormalForm loadNormalForm(std::istream& is) {
  NormalForm nf;
  std::string line;
  int lineNo = 0;
  if (!nextContentLine(is, line, lineNo)) throw ParseError("empty normal form file");
  try {
    nf.N = std::stoi(fieldValue(line, "N", lineNo));
    nf.M = std::stoi(fieldValue(line, "M", lineNo));
    const std::string lo = fieldValue(line, "bN_lo", lineNo);
    const std::string hi = fieldValue(line, "bN_hi", lineNo);
    if (lo != "none") nf.bN = Interval(parseOutward(lo).lo(), parseOutward(hi).hi());
    nf.certifiedTail = fieldValue(line, "certified", lineNo) == "1";
  } catch (const std::logic_error& e) {
    throw ParseError("line " + std::to_string(lineNo) + ": bad normal form header");
  }
  if (!nextContentLine(is, line, lineNo) || line.rfind("omega=", 0) != 0) {
    throw ParseError("line " + std::to_string(lineNo) + ": expected omega line");
  }
  {
    std::istringstream ss(line.substr(6));
    std::string a, b;
    while (ss >> a >> b) nf.omega.push_back(Interval(parseOutward(a).lo(), parseOutward(b).hi()));
  }
  nf.n = static_cast<int>(nf.omega.size());
  bool haveZ = false, haveRemainder = false;
  while (nextContentLine(is, line, lineNo)) {
    if (line == "[Z]") {
      nf.Z = toActionPoly(readSection(is, lineNo));
      haveZ = true;
    } else if (line == "[remainder]") {
      nf.remainder = readSection(is, lineNo);
      haveRemainder = true;
    } else if (line.rfind("[generator ", 0) == 0) {
      nf.generators.push_back(readSection(is, lineNo));
    } else {
      throw ParseError("line " + std::to_string(lineNo) + ": unknown section '" + line + "'");
    }
  }
  if (!haveZ || !haveRemainder) throw ParseError("normal form file lacks [Z] or [remainder]");
  if (nf.Z.dim() != nf.n || nf.remainder.dim() != nf.n) throw ParseError("section dimension mismatch");
  return nf;
}

}  // namespace bnf
