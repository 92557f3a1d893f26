#pragma once

// Graded-lexicographic monomial indexing for series in up to eight variables.
//
// An exponent vector is packed into a 64-bit word, one byte per variable
// (variable v occupies bits 8v..8v+7). Within a fixed total degree the
// monomials are ordered lexicographically ascending on the exponent vector and
// each one has a dense rank, so a homogeneous component can be stored as a
// plain array.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace bnf {

using Packed = std::uint64_t;

constexpr int kMaxVariables = 8;
constexpr int kMaxDegree = 255;

inline int exponentOf(Packed e, int v) { return static_cast<int>((e >> (8 * v)) & 0xffu); }
inline Packed unitExponent(int v) { return Packed{1} << (8 * v); }
inline Packed withExponent(Packed e, int v, int value) {
  return (e & ~(Packed{0xff} << (8 * v))) | (static_cast<Packed>(value) << (8 * v));
}
inline int totalDegree(Packed e) {
  int d = 0;
  for (; e != 0; e >>= 8) d += static_cast<int>(e & 0xffu);
  return d;
}

class MonomialTable {
 public:
  // Shared, process-wide table for the given number of variables.
  static std::shared_ptr<const MonomialTable> get(int variables);

  explicit MonomialTable(int variables);

  int variables() const { return vars_; }
  // Number of monomials of total degree d.
  std::size_t count(int degree) const;
  // Position of e among the degree-d monomials (d must equal totalDegree(e)).
  std::size_t rank(Packed e, int degree) const {
    std::size_t r = 0;
    int rem = degree;
    for (int v = 0; v + 1 < vars_; ++v) {
      const int ev = exponentOf(e, v);
      r += prefix_[offset(vars_ - v, rem, ev)];
      rem -= ev;
    }
    return r;
  }
  // Degree-d monomials in rank order; built on first use, safe to call concurrently.
  const std::vector<Packed>& monomials(int degree) const;

 private:
  std::size_t offset(int u, int d, int e) const {
    return (static_cast<std::size_t>(u) * (kMaxDegree + 1) + static_cast<std::size_t>(d)) * (kMaxDegree + 2) +
           static_cast<std::size_t>(e);
  }

  int vars_;
  // binom_[u][d]: monomials of degree d in u variables.
  std::vector<std::uint64_t> binom_;
  // prefix_[u][d][e]: monomials of degree d in u variables whose first exponent is < e.
  std::vector<std::uint64_t> prefix_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<std::vector<Packed>>> lists_;
};

}  // namespace bnf
