#include "doctest.h"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "bnf/fpu.hpp"

using namespace bnf;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

double evalReal(const SeriesWZ& f, const std::vector<double>& x) {
  double s = 0.0;
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    double t = c.re().mid();
    for (int v = 0; v < f.variables(); ++v) t *= std::pow(x[v], exponentOf(e, v));
    s += t;
  });
  return s;
}

// H0 of the fixed-end chain with three moving particles.
double chainEnergy(const std::vector<double>& y, const std::vector<double>& x, double atilde) {
  double h = 0.0;
  for (double v : y) h += 0.5 * v * v;
  const double xs[5] = {0.0, x[0], x[1], x[2], 0.0};
  for (int l = 0; l < 4; ++l) {
    const double d = xs[l + 1] - xs[l];
    h += 0.5 * d * d + atilde / 3.0 * d * d * d;
  }
  return h;
}

}  // namespace

TEST_CASE("FPU frequencies enclose 2 sin(j pi / 8) tightly") {
  const auto om = fpuFrequencies();
  const Float50 two = 2;
  const Float50 s2 = boost::multiprecision::sqrt(two);
  const Float50 expect[3] = {boost::multiprecision::sqrt(two - s2), s2, boost::multiprecision::sqrt(two + s2)};
  for (int j = 0; j < 3; ++j) {
    CHECK(Float50(om[j].lo()) <= expect[j]);
    CHECK(expect[j] <= Float50(om[j].hi()));
    CHECK(om[j].width() <= 1e-12);
  }
  CHECK(std::fabs(om[0].mid() - 0.765366864730) < 1e-12);
  CHECK(std::fabs(om[1].mid() - 1.414213562373) < 1e-12);
  CHECK(std::fabs(om[2].mid() - 1.847759065023) < 1e-12);
}

TEST_CASE("mode map is symplectic") {
  for (const auto& row : symplecticDefect(fpuModeMatrix())) {
    for (const auto& x : row) CHECK(x.containsZero());
  }
}

TEST_CASE("modal Hamiltonian: structure and agreement with the chain energy") {
  const auto H = fpuModalHamiltonian(Interval(0.25));
  const auto om = fpuFrequencies();
  CHECK(H.minDegree() == 2);
  CHECK(H.topDegree() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(H.coeff(unitExponent(j) * 2).re().contains(0.5 * om[j].mid()));
    CHECK(H.coeff(unitExponent(3 + j) * 2).re().contains(0.5 * om[j].mid()));
  }
  // Independent mode map in double precision:
  // x_l = sum_j q_j sin(j l pi/4) / sqrt(2 Omega_j), y_l = sum_j p_j sqrt(Omega_j / 2) sin(j l pi/4).
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pq(6);
    for (double& v : pq) v = u(rng);
    std::vector<double> y(3, 0.0), x(3, 0.0);
    for (int l = 1; l <= 3; ++l) {
      for (int j = 1; j <= 3; ++j) {
        const double s = std::sin(j * l * M_PI / 4.0);
        const double w = 2.0 * std::sin(j * M_PI / 8.0);
        y[l - 1] += pq[j - 1] * std::sqrt(w / 2.0) * s;
        x[l - 1] += pq[3 + j - 1] * s / std::sqrt(2.0 * w);
      }
    }
    CHECK(evalReal(H, pq) == doctest::Approx(chainEnergy(y, x, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("complexified FPU Hamiltonian") {
  const Model m = buildFPU3();
  CHECK(m.H.realitySymmetric());
  CHECK(m.H.minDegree() == 2);
  CHECK(m.H.topDegree() == 3);
  CHECK_FALSE(m.H.homogeneous(3).isZero());
  for (int j = 0; j < 3; ++j) {
    const ComplexInterval c = m.H.coeff(unitExponent(j) | unitExponent(3 + j));
    CHECK(c.im().subsetOf(m.omega[j]));
  }
}

TEST_CASE("model specs") {
  CHECK(parseModelSpec("fpu3").kind == ModelSpec::Kind::Fpu3);
  const auto s = parseModelSpec("file:/tmp/h.txt");
  CHECK(s.kind == ModelSpec::Kind::File);
  CHECK(s.path == "/tmp/h.txt");
  CHECK_THROWS(parseModelSpec("beta"));
  CHECK_THROWS_AS(buildFPU3(Interval(0.0)), std::invalid_argument);
}

TEST_CASE("series files: empty, hand-written fixture, round trip and errors") {
  const std::string path = "bnf_test_fpu_series.txt";
  {
    std::ofstream f(path);
    f << "n=1 degmax=3\n";
  }
  CHECK(loadSeries(path).isZero());
  {
    std::ofstream f(path);
    f << "# 1-dof oscillator with a cubic term\n"
      << "n=1 degmax=3\n"
      << "1 1 0 0 1.5 1.5\n"
      << "3 0 0.25 0.25 0 0\n";
  }
  SeriesWZ expect(1, 3);
  expect.setCoeff(MultiIndex{{1}, {1}}, ComplexInterval(Interval(0.0), Interval(1.5)));
  expect.setCoeff(MultiIndex{{3}, {0}}, ComplexInterval(0.25));
  const auto got = loadSeries(path);
  CHECK(got.termCount() == 2);
  expect.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(got.coeff(e) == c); });

  const Model m = loadModel(parseModelSpec("file:" + path));
  CHECK(m.omega.size() == 1);
  CHECK(m.omega[0] == Interval(1.5));

  {
    std::ofstream f(path);
    writeSeries(f, buildFPU3().H);
  }
  const auto back = loadSeries(path);
  buildFPU3().H.forEachTerm([&](Packed e, const ComplexInterval& c) { CHECK(back.coeff(e) == c); });

  {
    std::ofstream f(path);
    f << "n=1 degmax=2\n3 0 1 1 0 0\n";
  }
  CHECK_THROWS(loadSeries(path));
  {
    std::ofstream f(path);
    f << "n=1 degmax=3\n1 x 0 0 0 0\n";
  }
  try {
    loadSeries(path);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::remove(path.c_str());
}
