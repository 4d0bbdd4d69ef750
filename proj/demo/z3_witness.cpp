// Transfers the bar cochains of Z/3 onto H*(BZ/3; F_3) and prints the first
// higher operation, next to the Massey product computed from a defining system.

#include <ainf/formality_lab.hpp>
#include <ainf/htt_engine.hpp>
#include <ainf/massey.hpp>

#include <iostream>

int main() {
  using namespace ainf;
  auto alg = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(GroupSpec::cyclic(3, 1)));
  auto td = build_sdr(build_bar(alg, 7));
  std::cout << "SDR identity failures: " << verify_sdr(td).size() << "\n";

  auto ai = transfer(td, 4, 6);
  for (const auto& b : ai.space().basis()) std::cout << "  " << b.label << " (" << b.coh_degree << ", " << b.int_degree << ")\n";

  if (auto w = nonformality_witness(ai)) {
    std::cout << "m" << w->arity << "(";
    for (std::size_t i = 0; i < w->inputs.size(); ++i) std::cout << (i ? "," : "") << w->inputs[i];
    std::cout << ") = " << w->scalar << "*" << w->output << "\n";
  }
  const auto& H = td.cohomology();
  auto m = massey_power(H, H.space().index_of("t"), 3);
  std::cout << "<t,t,t> = " << (*m)[H.space().index_of("x")] << "*x\n";
  std::cout << "Stasheff violations through arity 5: " << check_stasheff(ai).size() << "\n";

  auto cert = certify_by_doubling(ai.space(), "H*(BZ/3;F_3)");
  std::cout << verdict_name(cert.verdict) << ": " << cert.violators.front() << "\n";
}
