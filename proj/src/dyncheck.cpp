#include "bnf/dyncheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

namespace bnf {

namespace {

using RealState = std::vector<double>;
const Complex kI(0.0, 1.0);

RealState toReal(const State& x) {
  RealState r(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    r[2 * i] = x[i].real();
    r[2 * i + 1] = x[i].imag();
  }
  return r;
}

State toComplex(const RealState& r) {
  State x(r.size() / 2);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Complex(r[2 * i], r[2 * i + 1]);
  return x;
}

Complex mid(const ComplexInterval& c) { return Complex(c.re().mid(), c.im().mid()); }

double supNorm(const State& x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

// Z(I) with midpoint coefficients: value, gradient and Hessian at complex I.
struct ActionEval {
  int n = 0;
  std::vector<std::vector<int>> exps;
  std::vector<double> coeffs;

  explicit ActionEval(const ActionPoly& Z) : n(Z.dim()) {
    for (const auto& [e, c] : Z.terms()) {
      exps.push_back(e);
      coeffs.push_back(c.mid());
    }
  }

  static Complex ipow(Complex x, int e) {
    Complex r(1.0);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }

  void frequencies(const std::vector<Complex>& I, std::vector<Complex>& omega,
                   std::vector<std::vector<Complex>>& hess) const {
    omega.assign(n, Complex(0.0));
    hess.assign(n, std::vector<Complex>(n, Complex(0.0)));
    for (std::size_t t = 0; t < exps.size(); ++t) {
      const auto& e = exps[t];
      for (int i = 0; i < n; ++i) {
        if (e[i] == 0) continue;
        Complex di = coeffs[t] * static_cast<double>(e[i]);
        for (int l = 0; l < n; ++l) di *= ipow(I[l], l == i ? e[l] - 1 : e[l]);
        omega[i] += di;
        for (int j = 0; j < n; ++j) {
          const int ej = j == i ? e[j] - 1 : e[j];
          if (ej == 0) continue;
          Complex dij = coeffs[t] * static_cast<double>(e[i]) * static_cast<double>(ej);
          for (int l = 0; l < n; ++l) {
            int el = e[l] - (l == i ? 1 : 0) - (l == j ? 1 : 0);
            dij *= ipow(I[l], el);
          }
          hess[i][j] += dij;
        }
      }
    }
  }
};

// Terms of f0 with their lattice vector, for psi and {I_j, f0}.
struct PsiTerm {
  std::vector<int> h, k, nu;
  Complex c;
};

Complex monomial(const State& x, const PsiTerm& t, int n, std::vector<Complex>* grad) {
  Complex m(1.0);
  for (int j = 0; j < n; ++j) m *= ActionEval::ipow(x[j], t.h[j]) * ActionEval::ipow(x[n + j], t.k[j]);
  if (grad) {
    grad->assign(2 * n, Complex(0.0));
    for (int v = 0; v < 2 * n; ++v) {
      const int e = v < n ? t.h[v] : t.k[v - n];
      if (e == 0) continue;
      Complex g = static_cast<double>(e);
      for (int u = 0; u < 2 * n; ++u) {
        const int eu = (u < n ? t.h[u] : t.k[u - n]) - (u == v ? 1 : 0);
        g *= ActionEval::ipow(x[u], eu);
      }
      (*grad)[v] = g;
    }
  }
  return m;
}

// Non-resonant non-diagonal remainder terms.
std::vector<PsiTerm> nonResonantTerms(const SeriesWZ& f, const EstimateParams& p, int n) {
  std::vector<PsiTerm> f0;
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    const MultiIndex m = MultiIndex::unpack(e, n);
    if (classifyIndex(m, p) != IndexClass::NonResonant) return;
    f0.push_back({m.h, m.k, m.difference(), mid(c)});
  });
  return f0;
}

// max_j |psi_j(x)|.
double psiSup(const ActionEval& zeval, const std::vector<PsiTerm>& f0, const State& x, int n) {
  std::vector<Complex> omega, psi(n, Complex(0.0));
  std::vector<std::vector<Complex>> hess;
  zeval.frequencies(actionsOf(x), omega, hess);
  for (const auto& term : f0) {
    const Complex mono = monomial(x, term, n, nullptr);
    Complex D(0.0);
    for (int l = 0; l < n; ++l) D += omega[l] * static_cast<double>(term.nu[l]);
    for (int j = 0; j < n; ++j) psi[j] += term.c * static_cast<double>(term.k[j] - term.h[j]) * mono / D;
  }
  double sup = 0.0;
  for (const Complex& v : psi) sup = std::max(sup, std::abs(v));
  return sup;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial evaluation.

PolyEval::PolyEval(const SeriesWZ& f) : n_(f.dim()) {
  const int V = 2 * n_;
  f.forEachTerm([&](Packed e, const ComplexInterval& c) {
    for (int v = 0; v < V; ++v) {
      const int ev = exponentOf(e, v);
      exps_.push_back(static_cast<std::uint8_t>(ev));
      maxExp_ = std::max(maxExp_, ev);
    }
    coeffs_.push_back(mid(c));
  });
  pow_.resize(static_cast<std::size_t>(V) * (maxExp_ + 1));
}

void PolyEval::powers(const State& x) const {
  const int V = 2 * n_;
  for (int v = 0; v < V; ++v) {
    Complex* row = &pow_[static_cast<std::size_t>(v) * (maxExp_ + 1)];
    row[0] = 1.0;
    for (int e = 1; e <= maxExp_; ++e) row[e] = row[e - 1] * x[v];
  }
}

Complex PolyEval::value(const State& x) const {
  const int V = 2 * n_;
  powers(x);
  Complex s(0.0);
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    Complex m = coeffs_[t];
    for (int v = 0; v < V; ++v) m *= pow_[static_cast<std::size_t>(v) * (maxExp_ + 1) + exps_[t * V + v]];
    s += m;
  }
  return s;
}

void PolyEval::gradient(const State& x, std::vector<Complex>& grad) const {
  const int V = 2 * n_;
  powers(x);
  grad.assign(V, Complex(0.0));
  std::vector<Complex> f(V), prefix(V + 1), suffix(V + 1);
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    const std::uint8_t* e = &exps_[t * V];
    for (int v = 0; v < V; ++v) f[v] = pow_[static_cast<std::size_t>(v) * (maxExp_ + 1) + e[v]];
    prefix[0] = coeffs_[t];
    for (int v = 0; v < V; ++v) prefix[v + 1] = prefix[v] * f[v];
    suffix[V] = 1.0;
    for (int v = V - 1; v >= 0; --v) suffix[v] = suffix[v + 1] * f[v];
    for (int v = 0; v < V; ++v) {
      if (e[v] == 0) continue;
      grad[v] += prefix[v] * suffix[v + 1] * static_cast<double>(e[v]) *
                 pow_[static_cast<std::size_t>(v) * (maxExp_ + 1) + e[v] - 1];
    }
  }
}

DomainExit::DomainExit(double time, double radius)
    : std::runtime_error("trajectory left D(" + std::to_string(radius) + ") at t=" + std::to_string(time)),
      time_(time) {}

// ---------------------------------------------------------------------------
// Integration.

State realInitialState(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionError("p and q must have the same length");
  const int n = static_cast<int>(p.size());
  const double s = std::sqrt(2.0);
  State x(2 * n);
  for (int j = 0; j < n; ++j) {
    x[j] = Complex(p[j], q[j]) / (kI * s);
    x[n + j] = Complex(p[j], -q[j]) / s;
  }
  return x;
}

double realityResidual(const State& x) {
  const std::size_t n = x.size() / 2;
  double r = 0.0;
  for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::abs(std::conj(x[j]) - kI * x[n + j]));
  return r;
}

std::vector<Complex> actionsOf(const State& x) {
  const std::size_t n = x.size() / 2;
  std::vector<Complex> I(n);
  for (std::size_t j = 0; j < n; ++j) I[j] = kI * x[j] * x[n + j];
  return I;
}

Trajectory integrateAt(const SeriesWZ& H, const State& initial, const std::vector<double>& times, double tol) {
  namespace odeint = boost::numeric::odeint;
  const int n = H.dim();
  if (static_cast<int>(initial.size()) != 2 * n) throw DimensionError("initial state has the wrong dimension");
  if (times.empty() || times.front() != 0.0) throw std::invalid_argument("record times must start at 0");
  if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("record times must increase");
  const PolyEval eval(H);
  std::vector<Complex> grad;
  auto rhs = [&](const RealState& r, RealState& dr, double) {
    const State x = toComplex(r);
    eval.gradient(x, grad);
    State dx(2 * n);
    for (int j = 0; j < n; ++j) {
      dx[j] = grad[n + j];
      dx[n + j] = -grad[j];
    }
    dr = toReal(dx);
  };
  Trajectory tr;
  auto observe = [&](const RealState& r, double t) {
    const State x = toComplex(r);
    tr.times.push_back(t);
    tr.states.push_back(x);
    std::vector<double> I;
    for (const auto& v : actionsOf(x)) I.push_back(v.real());
    tr.actions.push_back(I);
    tr.energy.push_back(eval.value(x).real());
    tr.realityResidual.push_back(realityResidual(x));
  };
  RealState r = toReal(initial);
  const double scale = std::max(supNorm(initial), 1e-300);
  odeint::bulirsch_stoer_dense_out<RealState> stepper(tol * scale, tol);
  const double dt = times.size() > 1 ? std::min(0.1, times.back() / 100.0) : 0.1;
  odeint::integrate_times(stepper, rhs, r, times.begin(), times.end(), dt > 0.0 ? dt : 0.1, observe);
  return tr;
}

Trajectory integrate(const SeriesWZ& H, const State& initial, double tEnd, int samples, double tol) {
  if (samples < 1 || !(tEnd > 0.0)) throw std::invalid_argument("need tEnd > 0 and at least one sample");
  std::vector<double> times(samples + 1);
  for (int i = 0; i <= samples; ++i) times[i] = tEnd * i / samples;
  times.back() = tEnd;
  return integrateAt(H, initial, times, tol);
}

SeriesWZ normalFormHamiltonian(const NormalForm& nf) {
  const int maxDeg = std::max(nf.remainder.maxDegree(), 2 * std::max(nf.Z.degree(), 1));
  return nf.Z.toSeries(maxDeg) + nf.remainder.withMaxDegree(maxDeg);
}

// ---------------------------------------------------------------------------
// Stationary-phase identity.

IdentityCheck verifyStationaryPhaseIdentity(const NormalForm& nf, const EstimateParams& p, const State& initial,
                                            double t, double tol, int panels) {
  const int n = nf.n;
  if (static_cast<int>(initial.size()) != 2 * n) throw DimensionError("initial state has the wrong dimension");
  if (panels < 1 || !(t > 0.0)) throw std::invalid_argument("need t > 0 and at least one panel");

  const ActionEval zeval(effectiveZ(nf));
  const SeriesWZ f = nf.remainder.nonDiagonalPart();
  const PolyEval feval(f);
  const std::vector<PsiTerm> f0 = nonResonantTerms(f, p, n);

  // Gauss-Legendre nodes on every panel.
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> unitNodes, unitWeights;
  for (std::size_t i = 0; i < Gauss::abscissa().size(); ++i) {
    const double x = Gauss::abscissa()[i];
    const double w = Gauss::weights()[i];
    unitNodes.push_back(x);
    unitWeights.push_back(w);
    if (x != 0.0) {
      unitNodes.push_back(-x);
      unitWeights.push_back(w);
    }
  }
  std::vector<std::pair<double, double>> nodes;
  const double h = t / panels;
  for (int k = 0; k < panels; ++k) {
    const double c = (k + 0.5) * h;
    for (std::size_t i = 0; i < unitNodes.size(); ++i) nodes.emplace_back(c + 0.5 * h * unitNodes[i], 0.5 * h * unitWeights[i]);
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> times = {0.0};
  for (const auto& nd : nodes) times.push_back(nd.first);
  times.push_back(t);

  const Trajectory tr = integrateAt(normalFormHamiltonian(nf), initial, times, tol);
  const double radius = ((Interval(1.0) + p.alpha) * p.R).hi();
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    if (supNorm(tr.states[i]) > radius) throw DomainExit(tr.times[i], radius);
  }

  std::vector<Complex> omega, fgrad, mgrad;
  std::vector<std::vector<Complex>> hess;
  // psi_j and, when requested, {psi_j, f} and {I_j, f0} at one state.
  auto evaluate = [&](const State& x, std::vector<Complex>& psi, std::vector<Complex>* bracket,
                      std::vector<Complex>* iBracket) {
    const std::vector<Complex> I = actionsOf(x);
    zeval.frequencies(I, omega, hess);
    psi.assign(n, Complex(0.0));
    std::vector<std::vector<Complex>> dpsi;
    if (bracket) dpsi.assign(n, std::vector<Complex>(2 * n, Complex(0.0)));
    if (iBracket) iBracket->assign(n, Complex(0.0));
    for (const auto& term : f0) {
      const Complex mono = monomial(x, term, n, bracket ? &mgrad : nullptr);
      Complex D(0.0);
      for (int l = 0; l < n; ++l) D += omega[l] * static_cast<double>(term.nu[l]);
      std::vector<Complex> dD;
      if (bracket) {
        dD.assign(2 * n, Complex(0.0));
        for (int m = 0; m < n; ++m) {
          Complex s(0.0);
          for (int l = 0; l < n; ++l) s += static_cast<double>(term.nu[l]) * hess[l][m];
          dD[m] = s * kI * x[n + m];
          dD[n + m] = s * kI * x[m];
        }
      }
      for (int j = 0; j < n; ++j) {
        const double kh = term.k[j] - term.h[j];
        if (kh == 0.0) continue;
        const Complex w = term.c * kh;
        psi[j] += w * mono / D;
        if (iBracket) (*iBracket)[j] += kI * w * mono;
        if (bracket) {
          for (int v = 0; v < 2 * n; ++v) dpsi[j][v] += w * (mgrad[v] / D - mono * dD[v] / (D * D));
        }
      }
    }
    if (bracket) {
      feval.gradient(x, fgrad);
      bracket->assign(n, Complex(0.0));
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) (*bracket)[j] += dpsi[j][m] * fgrad[n + m] - dpsi[j][n + m] * fgrad[m];
      }
    }
  };

  std::vector<Complex> lhs(n, Complex(0.0)), rhsInt(n, Complex(0.0));
  std::vector<Complex> psi, br, ib;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    evaluate(tr.states[i + 1], psi, &br, &ib);
    for (int j = 0; j < n; ++j) {
      lhs[j] += nodes[i].second * ib[j];
      rhsInt[j] += nodes[i].second * br[j];
    }
  }
  std::vector<Complex> psi0, psiT;
  evaluate(tr.states.front(), psi0, nullptr, nullptr);
  evaluate(tr.states.back(), psiT, nullptr, nullptr);
  IdentityCheck out;
  for (int j = 0; j < n; ++j) {
    const Complex rhs = psiT[j] - psi0[j] - rhsInt[j];
    out.lhs.push_back(std::abs(lhs[j]));
    out.residual = std::max(out.residual, std::abs(lhs[j] - rhs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Confinement.

ConfinementReport confinementCheck(const NormalForm& nf, const EstimateParams& p, double horizon, int samples,
                                   unsigned seed, double tol) {
  if (samples < 1 || !(horizon > 0.0)) throw std::invalid_argument("need a positive horizon and samples");
  const int n = nf.n;
  const RemainderBook book(nf);
  const SeriesWZ H = normalFormHamiltonian(nf);
  const double R = p.R.lo();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 1.0), phase(0.0, 2.0 * M_PI);
  constexpr int kRecords = 200;
  std::vector<double> times(kRecords + 1);
  for (int i = 0; i <= kRecords; ++i) times[i] = horizon * i / kRecords;

  const ActionEval zeval(effectiveZ(nf));
  const std::vector<PsiTerm> f0 = nonResonantTerms(nf.remainder.nonDiagonalPart(), p, n);

  ConfinementReport rep;
  std::vector<double> bound(kRecords + 1);
  for (int i = 0; i <= kRecords; ++i) bound[i] = actionVariationBound(book, p, times[i]).improved;
  rep.withinBound = true;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> pp(n), qq(n);
    for (int j = 0; j < n; ++j) {
      // |w_j| = r.
      const double r = R * radius(rng), th = phase(rng);
      pp[j] = std::sqrt(2.0) * r * std::cos(th);
      qq[j] = std::sqrt(2.0) * r * std::sin(th);
    }
    const Trajectory tr = integrateAt(H, realInitialState(pp, qq), times, tol);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      double dev = 0.0;
      for (int j = 0; j < n; ++j) dev = std::max(dev, std::fabs(tr.actions[i][j] - tr.actions[0][j]));
      rep.empirical = std::max(rep.empirical, dev);
      if (bound[i] > 0.0) rep.worstRatio = std::max(rep.worstRatio, dev / bound[i]);
      if (dev > bound[i]) rep.withinBound = false;
      rep.psiMax = std::max(rep.psiMax, psiSup(zeval, f0, tr.states[i], n));
    }
  }
  const ActionVariation at = actionVariationBound(book, p, horizon);
  rep.psiBound = at.psiBound;
  rep.psiWithinBound = rep.psiMax <= rep.psiBound;
  rep.improvedAtHorizon = at.improved;
  rep.classicalAtHorizon = at.classical;
  rep.crossover = at.crossover;
  rep.improvedBeatsClassical = std::isfinite(at.crossover);
  if (rep.improvedBeatsClassical) {
    for (double factor : {1.001, 2.0, 10.0, 1e3, 1e6}) {
      const ActionVariation v = actionVariationBound(book, p, at.crossover * factor);
      if (v.improved > v.classical) rep.improvedBeatsClassical = false;
    }
  }
  return rep;
}

void writeTrajectoryCsv(std::ostream& os, const Trajectory& tr) {
  const std::size_t n = tr.actions.empty() ? 0 : tr.actions.front().size();
  os << "t";
  for (std::size_t j = 1; j <= n; ++j) os << ",I_" << j;
  os << ",H,reality_residual\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    os << tr.times[i];
    for (double v : tr.actions[i]) os << "," << v;
    os << "," << tr.energy[i] << "," << tr.realityResidual[i] << "\n";
  }
}

}  // namespace bnf
