// Acceptance checks: one PASS/FAIL line per criterion, numbered 1 to 10.
// Exit status is the number of failed criteria.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bnf/dyncheck.hpp"
#include "bnf/estimator.hpp"
#include "bnf/fpu.hpp"
#include "bnf/lattice.hpp"
#include "bnf/nform.hpp"
#include "test_support.hpp"

using namespace bnf;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string sci6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Reference values.
const double kTc18[8] = {23.825453, 23.191935, 22.558403, 21.924854, 21.291283, 20.657676, 20.023976, 19.389912};
const double kFirstBranch27[3] = {6.171355e-03, 8.886751e-03, 1.279692e-02};
const double kTableR0 = 8.700956e-02;

struct ScanResult {
  std::vector<double> R;
  std::vector<StabilityReport> rows;
};

ScanResult scanFpu(const NormalForm& nf) {
  const RemainderBook book(nf);
  const ScanSetup setup = prepareScan(nf, Interval(0.2));
  ScanResult out;
  double R = 5e-4;
  for (int i = 0; i < 25; ++i, R *= 1.2) {
    out.R.push_back(R);
    out.rows.push_back(evaluateRadius(book, setup, Interval(R)));
  }
  return out;
}

NormalForm fpuNormalForm(int N, int M) {
  const Model m = buildFPU3();
  const auto t0 = std::chrono::steady_clock::now();
  NormalForm nf = normalize(m.H, m.omega, N, M);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  normalized FPU N=%d M=%d in %.1f s (%zu remainder terms)\n", N, M, secs, nf.remainder.termCount());
  nf.bN = Interval(1.0) / parseOutward("8.700956e-02");
  nf.certifiedTail = true;
  return nf;
}

void criterion1() {
  using F = boost::multiprecision::cpp_bin_float_50;
  const auto om = buildFPU3().omega;
  const F two = 2, s2 = boost::multiprecision::sqrt(two);
  const F expect[3] = {boost::multiprecision::sqrt(two - s2), s2, boost::multiprecision::sqrt(two + s2)};
  const double printed[3] = {0.765366864730, 1.414213562373, 1.847759065023};
  bool ok = true;
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    ok = ok && F(om[j].lo()) <= expect[j] && expect[j] <= F(om[j].hi()) && om[j].width() <= 1e-12;
    ok = ok && std::fabs(om[j].mid() - printed[j]) < 5e-13;
    worst = std::max(worst, om[j].width());
  }
  report(1, ok, "max width " + fmt("%.2e", worst));
}

void criterion2() {
  const auto om = fpuFrequencies();
  const auto masks = paritySymmetries(buildFPU3().H);
  const auto m27 = minDivisor(9, 27, om, masks);
  const auto m18 = minDivisor(9, 18, om, masks);
  const bool witness = m27.nu == std::vector<int>{-4, 10, -6} || m27.nu == std::vector<int>{4, -10, 6};
  const bool ok = sci6(m27.value.mid()) == "5.886225e-03" && witness && sci6(m18.value.mid()) == "1.185291e-02";
  report(2, ok,
         "M=27 " + sci6(m27.value.mid()) + " at (" + std::to_string(m27.nu[0]) + "," + std::to_string(m27.nu[1]) +
             "," + std::to_string(m27.nu[2]) + "), M=18 " + sci6(m18.value.mid()));
}

void criterion3(const ScanResult& s18, const ScanResult& s27) {
  bool ok = true;
  std::string detail;
  for (const auto& r : s18.rows) ok = ok && sci6(r.a.a.hi()) == "1.185291e-02";
  int first = 0;
  double worstRel = 0.0;
  for (std::size_t i = 0; i < s27.rows.size(); ++i) {
    const auto& r = s27.rows[i];
    if (s27.R[i] < 2.76e-02) {
      ok = ok && r.a.branch == AChoice::Branch::MinDivisor && sci6(r.a.a.hi()) == "5.886225e-03";
    } else {
      const double rel = std::fabs(r.a.a.hi() / kFirstBranch27[first] - 1.0);
      worstRel = std::max(worstRel, rel);
      ok = ok && r.a.branch == AChoice::Branch::First && rel < 0.01;
      detail += " " + sci6(r.a.a.hi());
      ++first;
    }
  }
  ok = ok && first == 3;
  report(3, ok, "M=27 first-branch a:" + detail + " (max rel. dev. " + fmt("%.1e", worstRel) + ")");
}

double slope(const ScanResult& s, int i, double (*get)(const StabilityReport&)) {
  return (get(s.rows[i + 1]) - get(s.rows[i])) / std::log10(s.R[i + 1] / s.R[i]);
}
double logTc(const StabilityReport& r) { return r.Tc.log10Lower(); }
double logT1(const StabilityReport& r) { return r.T1.log10Lower(); }

void criterion4(const ScanResult& s18, const ScanResult& s27) {
  bool ok = true;
  double tcLo = 1e9, tcHi = -1e9, t18Lo = 1e9, t18Hi = -1e9, t27Lo = 1e9, t27Hi = -1e9;
  for (int i = 0; i < 7; ++i) {
    for (const ScanResult* s : {&s18, &s27}) {
      const double tc = slope(*s, i, logTc);
      tcLo = std::min(tcLo, tc);
      tcHi = std::max(tcHi, tc);
      ok = ok && std::fabs(tc + 8.0) <= 0.05;
    }
    const double t18 = slope(s18, i, logT1), t27 = slope(s27, i, logT1);
    t18Lo = std::min(t18Lo, t18);
    t18Hi = std::max(t18Hi, t18);
    t27Lo = std::min(t27Lo, t27);
    t27Hi = std::max(t27Hi, t27);
    ok = ok && std::fabs(t18 + 17.0) <= 0.1 && std::fabs(t27 + 16.0) <= 0.1;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "Tc slopes [%.4f, %.4f]; T1 slopes M=18 [%.4f, %.4f], M=27 [%.4f, %.4f]", tcLo, tcHi,
                t18Lo, t18Hi, t27Lo, t27Hi);
  report(4, ok, buf);
}

void criterion5(const ScanResult& s18, const ScanResult& s27) {
  const double tc = s27.rows[0].Tc.log10Lower();
  const double t1 = s27.rows[0].T1.log10Lower();
  double worstTc18 = 0.0;
  for (int i = 0; i < 8; ++i) worstTc18 = std::max(worstTc18, std::fabs(s18.rows[i].Tc.log10Lower() - kTc18[i]));
  const bool ok = std::fabs(tc - 23.825453) <= 1.0 && std::fabs(t1 - 43.409313) <= 1.5;
  report(5, ok,
         "log10 Tc " + fmt("%.6f", tc) + " (reference 23.825453), log10 T1 " + fmt("%.6f", t1) +
             " (reference 43.409313); M=18 Tc max dev. over 8 rows " + fmt("%.1e", worstTc18));
}

void criterion6() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ua(0.001, 0.6);
  std::uniform_int_distribution<int> uk(1, 25);
  int mismatches = 0, total = 0;
  for (int t = 0; t < 500; ++t, ++total) {
    const auto om = normalizeOmega({u(rng), u(rng), u(rng)}).omega;
    const LatticeSpec spec{om, ua(rng), uk(rng), 0};
    if (closedFormCount3(spec) != bruteForceCount(spec).count) ++mismatches;
  }
  // Knife edges: dyadic frequencies with a = |Omega.nu*| exactly, and Omega_1 = |Omega_2|.
  int knife = 0;
  const std::vector<std::vector<double>> dyadic = {
      {1.0, 0.5, 0.25}, {1.0, -0.5, 0.25}, {1.0, 0.75, -0.5}, {2.0, 1.5, 0.25}, {1.0, 0.625, 0.375}, {1.5, -1.25, 1.0}};
  for (const auto& om : dyadic) {
    for (int K = 2; K <= 9; ++K) {
      const std::vector<int> nu = {K - 1, 0, 1};
      const double a = std::fabs(om[0] * nu[0] + om[1] * nu[1] + om[2] * nu[2]);
      const LatticeSpec spec{om, a, K, 0};
      if (closedFormCount3(spec) != bruteForceCount(spec).count) ++mismatches;
      ++knife;
    }
  }
  for (const auto& om : std::vector<std::vector<double>>{{1.0, 1.0, 0.5}, {1.0, -1.0, 0.25}, {2.0, 2.0, 0.75}}) {
    for (int K : {3, 5, 8}) {
      for (double a : {0.25, 0.5, 0.6, 1.0}) {
        const LatticeSpec spec{om, a, K, 0};
        if (closedFormCount3(spec) != bruteForceCount(spec).count) ++mismatches;
        ++knife;
      }
    }
  }
  report(6, mismatches == 0 && knife >= 20,
         std::to_string(total) + " random + " + std::to_string(knife) + " knife-edge specs, " +
             std::to_string(mismatches) + " mismatches");
}

void criterion7() {
  const double grid[] = {0.05, 0.1, 0.25, 0.5};
  std::mt19937_64 rng(7);
  int checks = 0, violations = 0;
  for (double alpha : grid) {
    for (double beta : grid) {
      for (int t = 0; t < 100; ++t) {
        const auto f = bnf::testing::randomSeries(2, 1, 6, 0.15, rng);
        const auto g = bnf::testing::randomSeries(2, 1, 4, 0.2, rng);
        const bool ok = derivativeNormCheck(f, t % 4, alpha, beta, 0.5, 1.0).holds() &&
                        bracketNormCheck(f, g, alpha, beta, 0.5, 1.0).holds() &&
                        actionBracketNormCheck(f, t % 2, alpha, beta, 0.5, 1.0).holds();
        if (!ok) ++violations;
        ++checks;
      }
    }
  }
  int powerChecks = 0, powerViolations = 0;
  for (int t = 0; t < 200; ++t, ++powerChecks) {
    const int N = 2 + t % 5;
    const auto f = bnf::testing::randomSeries(2, N + 1, N + 4, 0.3, rng);
    const Interval R0(0.9), R(0.05 + 0.002 * t);
    const Interval lhs = polyNorm(f, Interval(2.0) * R);
    const Interval rhs = pow(Interval(2.0) * R / R0, N + 1) * polyNorm(f, R0);
    if (!(lhs.lo() <= rhs.hi())) ++powerViolations;
  }
  report(7, violations == 0 && powerViolations == 0,
         std::to_string(checks) + " lemma triples, " + std::to_string(violations) + " violations; " +
             std::to_string(powerChecks) + " power-law checks, " + std::to_string(powerViolations) + " violations");
}

void criterion8() {
  NormalForm toy;
  toy.n = 2;
  toy.N = 2;
  toy.M = 3;
  toy.omega = {Interval(1.0), constants::sqrt2()};
  toy.Z = ActionPoly(2);
  toy.Z.addCoeff({1, 0}, toy.omega[0]);
  toy.Z.addCoeff({0, 1}, toy.omega[1]);
  toy.Z.addCoeff({1, 1}, Interval(0.1));
  toy.remainder = SeriesWZ(2, 3);
  toy.remainder.setCoeff(MultiIndex{{2, 0}, {0, 1}}, ComplexInterval(0.3));
  toy.remainder.setCoeff(MultiIndex{{0, 1}, {2, 0}}, ComplexInterval(Interval(0.0), Interval(-0.3)));
  EstimateParams p;
  p.n = 2;
  p.N = 2;
  p.M = 3;
  p.alpha = Interval(0.2);
  p.a = Interval(0.1);
  p.R = Interval(0.1);
  p.R0 = Interval(0.2);
  p.omega = toy.omega;
  const State x0 = realInitialState({0.08, 0.05}, {0.02, -0.06});
  std::string detail;
  double prev = 1.0;
  bool ok = true;
  for (double tol : {1e-8, 1e-10, 1e-12}) {
    const double r = verifyStationaryPhaseIdentity(toy, p, x0, 10.0, tol).residual;
    ok = ok && r <= 1e-6 && r <= prev;
    prev = r;
    detail += " tol " + fmt("%.0e", tol) + ": " + fmt("%.2e", r) + ";";
  }
  report(8, ok, "residuals" + detail);
}

void criterion9() {
  const Model m = buildFPU3();
  const NormalForm nf = normalize(m.H, m.omega, 4, 8);
  EstimateParams p;
  p.n = nf.n;
  p.N = nf.N;
  p.M = nf.M;
  p.alpha = Interval(0.2);
  p.R = Interval(1e-2);
  p.R0 = Interval(2e-2);
  p.omega = nf.omega;
  p.L = computeL(effectiveZ(nf), p.R0);
  p.a = chooseA(p.R, p.L, p.M, p.alpha, minDivisor(nf.N, nf.M, nf.omega, paritySymmetries(nf.remainder))).a;
  const ConfinementReport rep = confinementCheck(nf, p, 1e3, 2, 1);
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "N=4 M=8: empirical %.2e, improved bound %.2e, classical %.2e, crossover %.1f, worst ratio %.1e, "
                "max |psi| %.2e <= %.2e",
                rep.empirical, rep.improvedAtHorizon, rep.classicalAtHorizon, rep.crossover, rep.worstRatio,
                rep.psiMax, rep.psiBound);
  report(9, rep.withinBound && rep.improvedBeatsClassical && rep.psiWithinBound, buf);
}

void criterion10(const ScanResult& s18, const ScanResult& s27, const NormalForm& nf27) {
  bool ok = true;
  int compared = 0;
  for (const ScanResult* s : {&s18, &s27}) {
    for (const auto& r : s->rows) {
      if (r.T0.defined && r.T1.defined) {
        ++compared;
        ok = ok && r.T1.lower() >= r.T0.lower();
      }
    }
  }
  // Tail strictly decreasing in M at fixed rho.
  const Interval bN = Interval(1.0) / parseOutward("8.700956e-02");
  bool tail = true;
  for (double rho : {1e-3, 1e-2, 5e-2}) {
    for (int M = 10; M < 40; ++M) tail = tail && tailNorm(bN, M + 1, Interval(rho)).hi() < tailNorm(bN, M, Interval(rho)).lo();
  }
  // Divergence flag: exact boundary with point data, and the FPU threshold R0 / (1 + 2 alpha).
  bool flag = true;
  {
    SeriesWZ f(2, 6);
    f.setCoeff(MultiIndex{{5, 0}, {0, 0}}, ComplexInterval(1e-3));
    for (double b : {16.0, std::nextafter(16.0, 0.0), std::nextafter(16.0, 32.0)}) {
      NormalForm nf;
      nf.n = 2;
      nf.N = 4;
      nf.M = 6;
      nf.omega = {Interval(1.0), constants::sqrt2()};
      nf.Z = ActionPoly(2);
      nf.Z.addCoeff({1, 0}, nf.omega[0]);
      nf.Z.addCoeff({0, 1}, nf.omega[1]);
      nf.remainder = f;
      nf.bN = Interval(b);
      ScanSetup setup;
      setup.alpha = Interval(0.5);
      setup.R0 = Interval(1.0 / 16.0);
      setup.L = Interval(0.0);
      setup.minDivisor = MinDivisor{Interval(0.1), {1, -1}};
      const RemainderBook book(nf);
      const bool diverges = evaluateRadius(book, setup, Interval(1.0 / 32.0)).tailDiverges;
      flag = flag && diverges == (b >= 16.0);
    }
  }
  {
    // FPU: the threshold R0 / (1 + 2 alpha) lies beyond the grid; probe both sides.
    const RemainderBook book(nf27);
    const ScanSetup setup = prepareScan(nf27, Interval(0.2));
    const double edge = kTableR0 / 1.4;
    flag = flag && !evaluateRadius(book, setup, Interval(edge * (1 - 1e-9))).tailDiverges;
    flag = flag && evaluateRadius(book, setup, Interval(edge * (1 + 1e-9))).tailDiverges;
  }
  report(10, ok && tail && flag && compared > 0,
         std::to_string(compared) + " rows with T1 >= T0: " + (ok ? "yes" : "no") + "; tail decreasing in M: " +
             (tail ? "yes" : "no") + "; divergence flag exact: " + (flag ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  const NormalForm nf18 = fpuNormalForm(9, 18);
  const ScanResult s18 = scanFpu(nf18);
  const NormalForm nf27 = fpuNormalForm(9, 27);
  const ScanResult s27 = scanFpu(nf27);
  criterion3(s18, s27);
  criterion4(s18, s27);
  criterion5(s18, s27);
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(s18, s27, nf27);
  return failures;
}
