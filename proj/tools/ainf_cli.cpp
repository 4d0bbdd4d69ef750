// ainf: command-line front end for the experiment runner.

#include <ainf/runner.hpp>
#include <ainf/verify_suite.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
  CLI::App app{"A-infinity structures on mod-p cohomology of finite torus approximations"};
  app.require_subcommand(1);

  ainf::ExperimentConfig cfg;
  std::uint32_t p = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec, "group spec, e.g. semidirect(torus(3,1,2), inversion)")->required();
    sub->add_option("--p", p, "prime (optional, must match the spec)");
    sub->add_option("--max-degree", cfg.max_degree, "cohomological degree cap")->capture_default_str();
    sub->add_option("--max-arity", cfg.max_arity, "arity cap for transferred operations")->capture_default_str();
    sub->add_option("--format", cfg.format, "json or text")->capture_default_str();
    sub->add_option("--cache-dir", cfg.cache_dir, "directory for cached results");
    sub->add_option("--budget", cfg.budget, "bar complex word budget per degree")->capture_default_str();
  };
  const std::map<std::string, std::string> about{
      {"cohomology", "mod-p cohomology classes and cup products"},
      {"restriction", "restriction from depth n to depth n-1"},
      {"transfer", "transferred A-infinity operations with Stasheff checks"},
      {"certificate", "formality certificate (doubling test or witness)"},
      {"invariants", "W-invariants of the polynomial model"},
      {"compare", "bar cohomology against W-invariants"},
      {"splitting", "equivariant lifts of the torus generators"}};
  for (const auto& name : ainf::runner_commands()) add_common(app.add_subcommand(name, about.at(name)));
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : ainf::kUsage;
  }

  if (verify->parsed()) {
    bool ok = true;
    for (const auto& r : ainf::verify_suite()) {
      std::cout << ainf::format_criterion(r) << std::endl;
      ok = ok && r.passed;
    }
    return ok ? ainf::kOk : ainf::kVerifyFailed;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (p) cfg.p = p;
  auto result = ainf::run(cfg);
  std::cout << ainf::render(result, cfg.format);
  std::fprintf(stderr, "exit=%d cacheHits=%zu time=%.3fs\n", result.exit_code, result.cache_hits, result.seconds);
  return result.exit_code;
}
