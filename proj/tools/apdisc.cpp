#include <CLI11.hpp>

#include <iostream>

#include "apdisc/commands.hpp"

int main(int argc, char** argv) {
  using namespace apdisc;
  CLI::App app{"Discrepancy of arithmetic progressions: bounds, certificates and colorings"};
  app.require_subcommand(1);

  Config config;
  std::string box, polytope, shift;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--box", box, "box sides, e.g. 16,16");
    sub->add_option("--polytope", polytope, "polytope file")->check(CLI::ExistingFile);
    sub->add_option("--shift", shift, "shift r1,r2,... (rationals p or p/q)");
    sub->add_option("--seed", config.seed, "random seed")->capture_default_str();
    sub->add_option("--out", config.out, "write the report here instead of stdout");
    sub->add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--max-sets", config.max_sets, "guard on materialized sets")->capture_default_str();
    sub->add_option("--max-scan", config.max_scan, "guard on lattice scans")->capture_default_str();
    sub->add_option("--brute-max-n", config.brute_max_n, "largest universe for exhaustive search")->capture_default_str();
  };

  const char* commands[][2] = {
      {"bound", "f(N) or f(K) with zeta breakpoints"},
      {"cert", "factorization certificates with residuals"},
      {"color", "Gram-Schmidt walk coloring of all APs"},
      {"brute", "exact minimum discrepancy by exhaustive search"},
      {"lowerbound", "certified lower bound on disc(A_{v+K})"},
      {"verify", "run the property checks"},
      {"sweep", "f, walk disc and lower bound over scaled domains"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "verify") {
      sub->add_option("--lemma", config.lemma,
                      "all, lex, reduction, partition, large-sets, zeta, certificates, fourier or walk")
          ->capture_default_str();
      sub->add_flag("--inject-fault", config.inject_fault, "corrupt a certificate before checking it");
    }
    if (std::string(name) == "sweep") {
      sub->add_option("--scales", config.scales, "scale factors r")->delimiter(',');
      sub->add_option("--color-limit", config.color_limit, "largest domain to color and bound below")
          ->capture_default_str();
    }
    if (std::string(name) == "lowerbound") {
      sub->add_option("--shift-grid", config.shift_grid, "denominator of the sampled shift grid")
          ->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!box.empty()) config.box = parse_box(box);
  } catch (const UsageError& e) {
    std::cerr << "apdisc: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!polytope.empty()) config.polytope = polytope;
  if (!shift.empty()) config.shift = shift;
  return run_command(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
