#pragma once

// Floating-point integration of Hamilton's equations in the (w, z) variables,
// used to falsify implementation errors: the stationary-phase identity along
// trajectories and empirical action confinement against certified bounds.
// Nothing here is certified; coefficients are interval midpoints.

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "bnf/cpoly.hpp"
#include "bnf/estimator.hpp"
#include "bnf/nform.hpp"

namespace bnf {

using Complex = std::complex<double>;
// (w_1..w_n, z_1..z_n).
using State = std::vector<Complex>;

// Midpoint evaluation of a series and its gradient.
class PolyEval {
 public:
  PolyEval() = default;
  explicit PolyEval(const SeriesWZ& f);

  int dim() const { return n_; }
  bool empty() const { return coeffs_.empty(); }
  Complex value(const State& x) const;
  // grad[v] = d f / d x_v for v = 0..2n-1.
  void gradient(const State& x, std::vector<Complex>& grad) const;

 private:
  void powers(const State& x) const;

  int n_ = 0;
  int maxExp_ = 0;
  std::vector<std::uint8_t> exps_;  // 2n per term
  std::vector<Complex> coeffs_;
  mutable std::vector<Complex> pow_;
};

class DomainExit : public std::runtime_error {
 public:
  DomainExit(double time, double radius);
  double time() const { return time_; }

 private:
  double time_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  // Real parts of I_j = i w_j z_j.
  std::vector<std::vector<double>> actions;
  std::vector<double> energy;
  std::vector<double> realityResidual;
};

// w = (p + i q)/(i sqrt 2), z = (p - i q)/sqrt 2.
State realInitialState(const std::vector<double>& p, const std::vector<double>& q);
// max_j |conj(w_j) - i z_j|.
double realityResidual(const State& x);
std::vector<Complex> actionsOf(const State& x);

// Dense-output Bulirsch-Stoer integration of dw/dt = dH/dz, dz/dt = -dH/dw,
// recorded at the given increasing times (the first must be 0).
Trajectory integrateAt(const SeriesWZ& H, const State& initial, const std::vector<double>& times, double tol);
// samples + 1 equally spaced records on [0, tEnd].
Trajectory integrate(const SeriesWZ& H, const State& initial, double tEnd, int samples, double tol);

// Z(iwz) + remainder: the truncated normal-form Hamiltonian.
SeriesWZ normalFormHamiltonian(const NormalForm& nf);

struct IdentityCheck {
  std::vector<double> lhs;  // |int {I_j, f0}| per j, for scale
  double residual = 0.0;    // max_j |LHS_j - RHS_j|
};

// Both sides of
//   int_0^t {I_j, f0} = psi_j(t) - psi_j(0) - int_0^t {psi_j, f}
// along the trajectory of the normal-form Hamiltonian, with the integrals by
// composite Gauss-Legendre quadrature on the dense output. Throws DomainExit
// when the trajectory leaves D(R(1+alpha)).
IdentityCheck verifyStationaryPhaseIdentity(const NormalForm& nf, const EstimateParams& p, const State& initial,
                                            double t, double tol, int panels = 64);

struct ConfinementReport {
  double empirical = 0.0;       // max_{j, t, samples} |I_j(t) - I_j(0)|
  double worstRatio = 0.0;      // max of empirical / improved bound over record times
  double improvedAtHorizon = 0.0;
  double classicalAtHorizon = 0.0;
  double crossover = 0.0;
  bool withinBound = false;
  // improved <= classical on a grid of times past the crossover.
  bool improvedBeatsClassical = false;
  double psiMax = 0.0;    // max_{j, t, samples} |psi_j(w(t), z(t))|
  double psiBound = 0.0;  // certified sup |psi_0|
  bool psiWithinBound = false;
};

// Random real initial data with |w_j| = |z_j| <= R, integrated to the horizon.
ConfinementReport confinementCheck(const NormalForm& nf, const EstimateParams& p, double horizon, int samples,
                                   unsigned seed, double tol = 1e-12);

// Columns t, I_1..I_n, H, reality_residual.
void writeTrajectoryCsv(std::ostream& os, const Trajectory& tr);

}  // namespace bnf
