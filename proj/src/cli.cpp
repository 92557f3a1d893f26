#include "bnf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "bnf/dyncheck.hpp"
#include "bnf/estimator.hpp"
#include "bnf/fpu.hpp"
#include "bnf/lattice.hpp"
#include "bnf/nform.hpp"

namespace bnf {

namespace {

struct RunConfig {
  std::string model = "fpu3";
  std::string nfPath;
  int N = 9;
  int M = 27;
  std::string alpha = "0.2";
  std::string grid = "5e-4:1.2:25";
  std::string R0;
  std::string bN;
  std::string atilde = "0.25";
  std::string out;
  double safety = 1.0;
  // resonances
  std::string omega;
  std::string a;
  int Kmax = 0;
  // verify
  std::string R = "1e-2";
  double horizon = 1e3;
  int samples = 2;
  double tol = 1e-12;
  unsigned seed = 1;
  std::string trajectory;
};

struct Grid {
  double start = 0.0;
  double factor = 0.0;
  int count = 0;
};

Grid parseGrid(const std::string& text) {
  Grid g;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> g.start >> c1 >> g.factor >> c2 >> g.count) || c1 != ':' || c2 != ':') {
    throw std::invalid_argument("grid must be start:factor:count");
  }
  if (!(g.start > 0.0) || !(g.factor > 1.0) || g.count < 1) {
    throw std::invalid_argument("grid needs start > 0, factor > 1 and count >= 1");
  }
  return g;
}

std::vector<double> parseList(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

// Prepends the key=value lines of a config file to the argument list so that
// explicit flags, which come later, take precedence.
std::vector<std::string> expandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> fromFile;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) continue;
      fromFile.push_back("--" + key);
      fromFile.push_back(value);
    }
  }
  // Insert after the subcommand name.
  if (!out.empty() && !fromFile.empty()) out.insert(out.begin() + 1, fromFile.begin(), fromFile.end());
  return out;
}

void requireOrders(const RunConfig& cfg) {
  if (cfg.N < 2) throw std::invalid_argument("N must be at least 2");
  if (cfg.M < cfg.N + 1) throw std::invalid_argument("M must be at least N+1");
}

// Loads or computes the normal form and attaches the tail parameter.
NormalForm obtainNormalForm(const RunConfig& cfg, std::ostream& err) {
  NormalForm nf;
  if (!cfg.nfPath.empty()) {
    std::ifstream in(cfg.nfPath);
    if (!in) throw std::runtime_error("cannot open normal form file '" + cfg.nfPath + "'");
    nf = loadNormalForm(in);
  } else {
    requireOrders(cfg);
    ModelSpec spec = parseModelSpec(cfg.model);
    spec.atilde = parseOutward(cfg.atilde);
    const Model model = loadModel(spec);
    nf = normalize(model.H, model.omega, cfg.N, cfg.M);
  }
  if (!cfg.R0.empty()) {
    nf.bN = Interval(1.0) / parseOutward(cfg.R0);
    nf.certifiedTail = true;
  } else if (!cfg.bN.empty()) {
    nf.bN = parseOutward(cfg.bN);
    nf.certifiedTail = true;
  } else if (!nf.bN) {
    nf.bN = estimateBN(nf, cfg.safety);
    nf.certifiedTail = false;
    err << "note: bN estimated from the remainder (uncertified): " << formatDirected(nf.bN->hi(), true, 7, true)
        << "\n";
  }
  return nf;
}

struct Output {
  std::ofstream file;
  std::ostream* stream;
  Output(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

int cmdNormalize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const NormalForm nf = obtainNormalForm(cfg, err);
  const Interval estimate = estimateBN(nf, cfg.safety);
  out << "N=" << nf.N << " M=" << nf.M << " n=" << nf.n << "\n";
  out << "remainder_terms=" << nf.remainder.termCount() << "\n";
  out << "bN_estimate=" << formatDirected(estimate.hi(), true, 7, true) << " (uncertified)\n";
  if (nf.bN && nf.certifiedTail) out << "bN_injected=" << formatDirected(nf.bN->hi(), true, 7, true) << "\n";
  out << "Z:\n";
  for (const auto& [e, c] : nf.Z.terms()) {
    out << " ";
    for (int x : e) out << " " << x;
    out << "  [" << formatDirected(c.lo(), false, 17, true) << ", " << formatDirected(c.hi(), true, 17, true)
        << "]\n";
  }
  const auto s = degreeModuli(nf.remainder);
  out << "remainder moduli by degree (upper bounds):\n";
  for (int d = nf.N + 1; d < static_cast<int>(s.size()); ++d) {
    out << "  " << d << " " << formatDirected(s[d], true, 7, true) << "\n";
  }
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out);
    if (!file) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
    saveNormalForm(file, nf);
  }
  return kExitOk;
}

int cmdScan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Grid grid = parseGrid(cfg.grid);
  const NormalForm nf = obtainNormalForm(cfg, err);
  const Interval alpha = parseOutward(cfg.alpha);
  if (!(alpha.lo() > 0.0 && alpha.hi() <= 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2]");
  const RemainderBook book(nf);
  const ScanSetup setup = prepareScan(nf, alpha);

  Output o(cfg.out, out);
  std::ostream& os = *o;
  os << "# log10_T* are lower bounds rounded down; norm_* are upper bounds rounded up\n";
  os << "R,a,branch,log10_Tc,log10_T0,log10_T1,norm_f0,norm_fstar,norm_fuv,cond1,cond2,cond3\n";
  bool certified = nf.certifiedTail;
  double R = grid.start;
  for (int i = 0; i < grid.count; ++i, R *= grid.factor) {
    const StabilityReport rep = evaluateRadius(book, setup, Interval(R));
    char rbuf[32], abuf[32];
    std::snprintf(rbuf, sizeof rbuf, "%.6e", R);
    std::snprintf(abuf, sizeof abuf, "%.6e", rep.a.a.hi());
    auto logCell = [](const TimeBound& t) { return formatDirected(t.log10Lower(), false, 6, false); };
    auto normCell = [](const Interval& x) { return formatDirected(x.hi(), true, 7, true); };
    os << rbuf << "," << abuf << "," << toString(rep.a.branch) << "," << logCell(rep.Tc) << "," << logCell(rep.T0)
       << "," << logCell(rep.T1) << "," << normCell(rep.norms.f0) << "," << normCell(rep.norms.fstar) << ","
       << (rep.tailDiverges ? std::string("diverges") : normCell(rep.norms.fuv)) << ","
       << toString(rep.conditions.at("cond1")) << "," << toString(rep.conditions.at("cond2")) << ","
       << toString(rep.conditions.at("cond3")) << "\n";
    if (rep.tailDiverges) {
      err << "R=" << rbuf << ": tail estimate diverges (bN R (1+2 alpha) >= 1)\n";
      certified = false;
    } else if (!rep.T1.defined) {
      err << "R=" << rbuf << ": T1 undefined: " << rep.T1.reason << "\n";
      certified = false;
    }
  }
  return certified ? kExitOk : kExitUncertified;
}

int cmdResonances(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<double> omega;
  if (!cfg.omega.empty()) {
    omega = parseList(cfg.omega);
  } else {
    for (const auto& w : fpuFrequencies()) omega.push_back(w.mid());
  }
  double a = 0.0;
  if (!cfg.a.empty()) {
    a = std::stod(cfg.a);
  } else {
    requireOrders(cfg);
    std::vector<Interval> om;
    for (double w : omega) om.emplace_back(w);
    // The FPU Hamiltonian's parity symmetries restrict the admissible divisors.
    std::vector<unsigned> masks;
    if (cfg.omega.empty()) masks = paritySymmetries(buildFPU3().H);
    a = minDivisor(cfg.N, cfg.M, om, masks).value.lo();
  }
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  const int Kmax = cfg.Kmax > 0 ? cfg.Kmax : cfg.M;
  const int n = static_cast<int>(omega.size());
  std::vector<double> normalized = omega;
  if (n == 3) normalized = normalizeOmega(omega).omega;

  Output o(cfg.out, out);
  std::ostream& os = *o;
  os << "K,count,count_total_shell,ratio\n";
  bool agree = true;
  for (int K = 1; K <= Kmax; ++K) {
    LatticeSpec spec{normalized, a, K, cfg.M};
    const long long brute = bruteForceCount(spec).count;
    long long count = brute;
    if (n == 3) {
      count = closedFormCount3(spec);
      if (count != brute) {
        err << "K=" << K << ": closed form " << count << " disagrees with enumeration " << brute << "\n";
        agree = false;
      }
    }
    const auto shell = shellCount(n, K);
    char rbuf[32];
    std::snprintf(rbuf, sizeof rbuf, "%.6e", static_cast<double>(count) / static_cast<double>(shell));
    os << K << "," << count << "," << shell << "," << rbuf << "\n";
  }
  return agree ? kExitOk : kExitFailure;
}

int cmdVerify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  bool ok = true;
  // Stationary-phase identity on a two-degree-of-freedom toy normal form.
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
  toy.remainder.setCoeff(MultiIndex{{2, 0}, {0, 1}}, ComplexInterval(Interval(0.3)));
  toy.remainder.setCoeff(MultiIndex{{0, 1}, {2, 0}}, ComplexInterval(Interval(0.0), Interval(-0.3)));
  EstimateParams tp;
  tp.n = 2;
  tp.N = 2;
  tp.M = 3;
  tp.alpha = Interval(0.2);
  tp.a = Interval(0.1);
  tp.R = Interval(0.1);
  tp.R0 = Interval(0.2);
  tp.omega = toy.omega;
  const State x0 = realInitialState({0.08, 0.05}, {0.02, -0.06});
  const IdentityCheck coarse = verifyStationaryPhaseIdentity(toy, tp, x0, 10.0, 1e-8);
  const IdentityCheck fine = verifyStationaryPhaseIdentity(toy, tp, x0, 10.0, 1e-10);
  const bool idOk = fine.residual <= 1e-6 && fine.residual <= coarse.residual;
  out << "identity residual tol=1e-8: " << formatDirected(coarse.residual, true, 3, true)
      << "  tol=1e-10: " << formatDirected(fine.residual, true, 3, true) << "  " << (idOk ? "PASS" : "FAIL") << "\n";
  ok = ok && idOk;

  // Confinement on the truncated normal form of the model. The integrated
  // system has no tail, so the bounds use bN = 0 and R0 = 2R.
  requireOrders(cfg);
  ModelSpec spec = parseModelSpec(cfg.model);
  spec.atilde = parseOutward(cfg.atilde);
  const Model model = loadModel(spec);
  const NormalForm nf = normalize(model.H, model.omega, cfg.N, cfg.M);
  EstimateParams p;
  p.n = nf.n;
  p.N = nf.N;
  p.M = nf.M;
  p.alpha = parseOutward(cfg.alpha);
  p.R = parseOutward(cfg.R);
  p.R0 = Interval(2.0) * p.R;
  p.omega = nf.omega;
  p.L = computeL(effectiveZ(nf), p.R0);
  p.a = chooseA(p.R, p.L, p.M, p.alpha, minDivisor(nf.N, nf.M, nf.omega, paritySymmetries(nf.remainder))).a;
  const RemainderBook book(nf);
  const auto cond = checkConditions(book, p);
  if (cond.at("cond1") != CondStatus::Holds) {
    err << "smallness condition not certified at R=" << cfg.R << "\n";
    return kExitUncertified;
  }
  const ConfinementReport rep = confinementCheck(nf, p, cfg.horizon, cfg.samples, cfg.seed, cfg.tol);
  out << "confinement R=" << cfg.R << " t=" << cfg.horizon << ": empirical "
      << formatDirected(rep.empirical, true, 3, true) << "  improved bound "
      << formatDirected(rep.improvedAtHorizon, false, 3, true) << "  classical bound "
      << formatDirected(rep.classicalAtHorizon, false, 3, true) << "  crossover "
      << formatDirected(rep.crossover, true, 3, true) << "  " << (rep.withinBound ? "PASS" : "FAIL") << "\n";
  out << "improved below classical past crossover: " << (rep.improvedBeatsClassical ? "PASS" : "FAIL") << "\n";
  out << "psi along runs: " << formatDirected(rep.psiMax, true, 3, true) << " <= bound "
      << formatDirected(rep.psiBound, false, 3, true) << "  " << (rep.psiWithinBound ? "PASS" : "FAIL") << "\n";
  ok = ok && rep.withinBound && rep.improvedBeatsClassical && rep.psiWithinBound;

  if (!cfg.trajectory.empty()) {
    std::vector<double> pp(nf.n, 0.0), qq(nf.n, 0.0);
    for (int j = 0; j < nf.n; ++j) pp[j] = std::sqrt(2.0) * 0.9 * p.R.lo();
    const Trajectory tr = integrate(normalFormHamiltonian(nf), realInitialState(pp, qq), cfg.horizon, 1000, cfg.tol);
    std::ofstream file(cfg.trajectory);
    if (!file) throw std::runtime_error("cannot open trajectory file '" + cfg.trajectory + "'");
    writeTrajectoryCsv(file, tr);
  }
  return ok ? kExitOk : kExitFailure;
}

void addModelOptions(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model, "fpu3 or file:<path>");
  cmd->add_option("--N", cfg.N, "normalization order");
  cmd->add_option("--M", cfg.M, "remainder truncation degree");
  cmd->add_option("--atilde", cfg.atilde, "FPU cubic coupling");
  cmd->add_option("--out", cfg.out, "output file");
}

void addTailOptions(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--nf", cfg.nfPath, "load a saved normal form instead of normalizing");
  cmd->add_option("--R0", cfg.R0, "analyticity radius; sets bN = 1/R0");
  cmd->add_option("--bN", cfg.bN, "tail parameter");
  cmd->add_option("--safety", cfg.safety, "safety factor of the built-in bN estimate");
}

std::string dropNegativeZero(std::string s) {
  if (s[0] == '-' && s.find_first_of("123456789") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace

std::string formatDirected(double x, bool up, int digits, bool sci) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, sci ? "%.*e" : "%.*f", sci ? digits - 1 : digits, x);
  // The decimal d lies in the enclosure e; when e is not a point its
  // endpoints are adjacent doubles, so d >= x exactly iff e.lo >= x.
  const Interval e = parseOutward(buf);
  const bool adjust = up ? e.lo() < x : e.hi() > x;
  if (!adjust) return dropNegativeZero(buf);
  // Step the last printed digit once in the required direction.
  std::string s = buf;
  const bool neg = s[0] == '-';
  if (neg) s.erase(0, 1);
  int exp10 = 0;
  if (sci) {
    const auto epos = s.find('e');
    exp10 = std::stoi(s.substr(epos + 1));
    s.erase(epos);
  }
  const auto dot = s.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
  if (dot != std::string::npos) s.erase(dot, 1);
  long long m = std::stoll(s);
  // Moving up for positive values (or down for negative) grows |m|.
  m += (up != neg) ? 1 : -1;
  char out[64];
  if (sci) {
    long long top = 1;
    for (int i = 0; i < digits; ++i) top *= 10;
    if (m >= top) {
      m /= 10;
      ++exp10;
    } else if (m < top / 10 && m > 0) {
      m = m * 10 + 9;
      --exp10;
    }
    std::string digitsStr = std::to_string(m);
    std::string mant = digitsStr.substr(0, 1);
    if (digitsStr.size() > 1) mant += "." + digitsStr.substr(1);
    std::snprintf(out, sizeof out, "%s%se%c%02d", neg ? "-" : "", mant.c_str(), exp10 < 0 ? '-' : '+', std::abs(exp10));
  } else {
    long long scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    const bool negOut = neg && m != 0;
    if (decimals == 0) {
      std::snprintf(out, sizeof out, "%s%lld", negOut ? "-" : "", m);
    } else {
      std::snprintf(out, sizeof out, "%s%lld.%0*lld", negOut ? "-" : "", m / scale, decimals, m % scale);
    }
  }
  return dropNegativeZero(out);
}

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Birkhoff normal forms and certified stability times"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* normalizeCmd = app.add_subcommand("normalize", "compute the normal form and report Z and the remainder");
  addModelOptions(normalizeCmd, cfg);
  addTailOptions(normalizeCmd, cfg);

  auto* scanCmd = app.add_subcommand("scan", "stability times over a grid of radii");
  addModelOptions(scanCmd, cfg);
  addTailOptions(scanCmd, cfg);
  scanCmd->add_option("--alpha", cfg.alpha, "domain enlargement parameter in (0, 1/2]");
  scanCmd->add_option("--grid", cfg.grid, "radii start:factor:count");

  auto* resCmd = app.add_subcommand("resonances", "count near-resonant lattice vectors per shell");
  resCmd->add_option("--omega", cfg.omega, "comma-separated frequencies (default: FPU)");
  resCmd->add_option("--a", cfg.a, "threshold (default: minimum divisor for N, M)");
  resCmd->add_option("--N", cfg.N, "normalization order");
  resCmd->add_option("--M", cfg.M, "remainder truncation degree");
  resCmd->add_option("--Kmax", cfg.Kmax, "largest shell (default: M)");
  resCmd->add_option("--out", cfg.out, "output file");

  auto* verifyCmd = app.add_subcommand("verify", "integrate trajectories against the identity and the bounds");
  cfg.N = 9;
  addModelOptions(verifyCmd, cfg);
  verifyCmd->add_option("--alpha", cfg.alpha, "domain enlargement parameter in (0, 1/2]");
  verifyCmd->add_option("--R", cfg.R, "initial radius");
  verifyCmd->add_option("--horizon", cfg.horizon, "integration time");
  verifyCmd->add_option("--samples", cfg.samples, "number of initial data");
  verifyCmd->add_option("--seed", cfg.seed, "random seed");
  verifyCmd->add_option("--tol", cfg.tol, "integrator tolerance");
  verifyCmd->add_option("--trajectory", cfg.trajectory, "CSV dump of one trajectory");

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    args = expandConfig(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!args.empty() && args.front() == "verify") {
      // Smaller default orders keep trajectory integration cheap.
      cfg.N = 4;
      cfg.M = 8;
    }
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*normalizeCmd) return cmdNormalize(cfg, out, err);
    if (*scanCmd) return cmdScan(cfg, out, err);
    if (*resCmd) return cmdResonances(cfg, out, err);
    return cmdVerify(cfg, out, err);
  } catch (const ResonanceError& e) {
    err << "resonance: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace bnf
