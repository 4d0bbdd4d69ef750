// W-invariants of the colimit model F_3[x, y] under inversion, and the
// formality certificate that follows from the doubling law.

#include <ainf/formality_lab.hpp>

#include <iostream>

int main() {
  using namespace ainf;
  auto model = ColimitModel::from_spec(3, 2, WeylPart::inversion(2), 8);
  auto rep = invariant_dims(model.ring(), model.truncation);

  std::cout << "degree  ambient  invariant\n";
  for (int d = 0; d <= model.truncation; ++d)
    std::cout << "  " << d << "       " << rep.ambient_dims[d] << "        " << rep.dims[d] << "\n";

  std::cout << "minimal generators (complete below degree " << rep.complete_below << "):";
  for (const auto& g : rep.generators) std::cout << " " << g.label;
  std::cout << "\n";

  auto cert = certify_by_doubling(rep.space(), "invariants of F_3[x,y] under inversion");
  std::cout << verdict_name(cert.verdict) << "\n  " << cert.derivation << "\n";
}
