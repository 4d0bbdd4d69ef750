// Bar cohomology of mu_3 x| Z/2 (the symmetric group S_3 at p = 3) against the
// W-invariants of Lambda(t) (x) F_3[x]. Optional argument: degree cap.

#include <ainf/formality_lab.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace ainf;
  int cap = argc > 1 ? std::atoi(argv[1]) : 6;
  auto spec = GroupSpec::semidirect(3, {1}, WeylPart::inversion(1));

  auto choice = equivariant_splitting(spec, 1);
  GradedGroupAlgebra torus(GroupSpec::cyclic(3, 1));
  std::cout << "equivariant lift of X:";
  for (std::size_t i = 0; i < torus.dim(); ++i)
    if (auto c = choice.level(1)[0][i]) std::cout << " " << c << "*" << torus.label(i);
  std::cout << "\n";

  auto c = compare_finite_vs_invariants(spec, cap);
  std::cout << "degree  bar  invariants\n";
  for (int d = 0; d <= cap; ++d) std::cout << "  " << d << "     " << c.bar_dims[d] << "    " << c.invariant_dims[d] << "\n";
  std::cout << (c.agree() ? "agree" : "MISMATCH") << "\n";
  return c.agree() ? 0 : 1;
}
