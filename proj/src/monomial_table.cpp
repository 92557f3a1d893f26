#include "bnf/monomial_table.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace bnf {

std::shared_ptr<const MonomialTable> MonomialTable::get(int variables) {
  static std::mutex registryMutex;
  static std::map<int, std::shared_ptr<const MonomialTable>> registry;
  std::lock_guard<std::mutex> lock(registryMutex);
  auto it = registry.find(variables);
  if (it != registry.end()) return it->second;
  auto table = std::make_shared<const MonomialTable>(variables);
  registry.emplace(variables, table);
  return table;
}

MonomialTable::MonomialTable(int variables) : vars_(variables) {
  if (variables < 1 || variables > kMaxVariables) {
    throw std::invalid_argument("monomial table supports 1.." + std::to_string(kMaxVariables) + " variables");
  }
  const std::size_t stride = kMaxDegree + 1;
  binom_.assign(static_cast<std::size_t>(vars_ + 1) * stride, 0);
  for (int d = 0; d <= kMaxDegree; ++d) binom_[1 * stride + d] = 1;
  for (int u = 2; u <= vars_; ++u) {
    for (int d = 0; d <= kMaxDegree; ++d) {
      std::uint64_t s = 0;
      for (int t = 0; t <= d; ++t) s += binom_[(u - 1) * stride + (d - t)];
      binom_[u * stride + d] = s;
    }
  }
  prefix_.assign(static_cast<std::size_t>(vars_ + 1) * stride * (kMaxDegree + 2), 0);
  for (int u = 2; u <= vars_; ++u) {
    for (int d = 0; d <= kMaxDegree; ++d) {
      std::uint64_t s = 0;
      for (int e = 0; e <= d + 1 && e <= kMaxDegree + 1; ++e) {
        prefix_[offset(u, d, e)] = s;
        if (e <= d) s += binom_[(u - 1) * stride + (d - e)];
      }
    }
  }
  lists_.resize(kMaxDegree + 1);
}

std::size_t MonomialTable::count(int degree) const {
  if (degree < 0 || degree > kMaxDegree) throw std::out_of_range("monomial degree out of range");
  return static_cast<std::size_t>(binom_[static_cast<std::size_t>(vars_) * (kMaxDegree + 1) + degree]);
}

namespace {
void enumerate(int vars, int v, int remaining, Packed prefix, std::vector<Packed>& out) {
  if (v == vars - 1) {
    out.push_back(withExponent(prefix, v, remaining));
    return;
  }
  for (int e = 0; e <= remaining; ++e) enumerate(vars, v + 1, remaining - e, withExponent(prefix, v, e), out);
}
}  // namespace

const std::vector<Packed>& MonomialTable::monomials(int degree) const {
  if (degree < 0 || degree > kMaxDegree) throw std::out_of_range("monomial degree out of range");
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = lists_[degree];
  if (!slot) {
    auto list = std::make_unique<std::vector<Packed>>();
    list->reserve(count(degree));
    enumerate(vars_, 0, degree, 0, *list);
    slot = std::move(list);
  }
  return *slot;
}

}  // namespace bnf
