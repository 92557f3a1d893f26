#pragma once

// Model construction: the three-degree-of-freedom FPU alpha chain with fixed
// ends, and ingestion of Hamiltonians from series files.

#include <string>
#include <vector>

#include "bnf/cpoly.hpp"
#include "bnf/rint.hpp"

namespace bnf {

struct ModelSpec {
  enum class Kind { Fpu3, File };
  Kind kind = Kind::Fpu3;
  Interval atilde = Interval(0.25);
  std::string path;
};

// Parses "fpu3" or "file:<path>".
ModelSpec parseModelSpec(const std::string& text);

struct Model {
  // H in (w, z) with quadratic part exactly sum_j Omega_j i w_j z_j.
  SeriesWZ H;
  std::vector<Interval> omega;
};

// Omega_j = 2 sin(j pi / 8) = sqrt(2 -+ sqrt 2), sqrt 2.
std::vector<Interval> fpuFrequencies();

// H0(y, x) of the chain as a series in (y_1..y_3, x_1..x_3).
SeriesWZ fpuPhysicalHamiltonian(const Interval& atilde);

// (y, x) = A (p, q): the normal-mode change of variables.
LinearMap fpuModeMatrix();

// A^T J A - J, entrywise; every entry encloses 0 when A is symplectic.
std::vector<std::vector<Interval>> symplecticDefect(const LinearMap& A);

// H(p, q) after the mode change and cleanup of exact zeros.
SeriesWZ fpuModalHamiltonian(const Interval& atilde);

Model buildFPU3(const Interval& atilde = Interval(0.25));

// Reads a Hamiltonian in the series text format; frequencies are read off the
// quadratic part, which must be diagonal.
SeriesWZ loadSeries(const std::string& path);
Model loadModel(const ModelSpec& spec);

}  // namespace bnf
