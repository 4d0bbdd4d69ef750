#pragma once

// Massey powers <t,...,t> of a degree-1 class computed directly in the bar
// cochains from a defining system. Independent of the transfer data; used as a
// cross-check for the transferred higher products.

#include <ainf/bar_cochains.hpp>

#include <optional>

namespace ainf {

/// k-fold Massey power of the degree-1 class `cls`. Since every entry a(i,j) of
/// the defining system has degree 1 it depends only on j - i, so A_1 = t and
/// δA_j = Σ_{l<j} A_l A_{j-l}. Returns class coordinates of Σ_{l<k} A_l A_{k-l}
/// in H^2, or nothing when the defining system does not exist. Each A_j is the
/// solution with free variables zero.
inline std::optional<FpVector> massey_power(const Cohomology& H, std::size_t cls, int k) {
  const auto& bc = H.complex();
  const auto& c = H.classes().at(cls);
  if (c.degree != 1) throw std::invalid_argument("Massey powers are only defined here for degree-1 classes");
  if (k < 2) throw std::invalid_argument("Massey power needs at least two entries");
  if (H.top_degree() < 2) throw std::out_of_range("Massey power needs cohomology through degree 2");
  const auto& f = bc.field();
  std::vector<FpVector> A{FpVector{}, c.representative};
  auto sum_products = [&](int j) {
    FpVector acc(bc.dim(2), 0);
    for (int l = 1; l < j; ++l) {
      auto pr = bc.product(1, A[l], 1, A[j - l]);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = f.add(acc[i], pr[i]);
    }
    return acc;
  };
  for (int j = 2; j < k; ++j) {
    auto rhs = sum_products(j);
    auto sol = solve(bc.differential(1), rhs);
    if (!sol) return std::nullopt;
    A.push_back(std::move(*sol));
  }
  return H.coordinates(2, sum_products(k));
}

}  // namespace ainf
