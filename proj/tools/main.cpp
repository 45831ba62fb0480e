#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "pdirac/errors.hpp"
#include "run_config.hpp"

int main(int argc, char** argv) {
  using namespace pdirac::cli;
  CLI::App app{"Fourier-Galerkin toolkit for periodic Dirac operators"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  bool dump_operator = false;
  app.add_option("--M", ov.M, "truncation radius (overrides grid.M)");
  app.add_option("--S", ov.S, "quadrature resolution (overrides grid.S)");
  app.add_option("--seed", ov.seed, "random seed (overrides run.seed)");
  app.add_option("--workers", ov.workers, "worker threads (overrides run.workers)");
  app.add_option("--out", ov.out_dir, "output directory (overrides run.out)");

  const char* help[] = {"band tables over a k-grid",
                        "smallest singular value along a complex line",
                        "canonical (and optional general) gauge",
                        "coercivity, counting, relative-bound and cross-term checks",
                        "oscillatory averages A(N)",
                        "potential functionals ||W_b||, f_W, C_eps, h_W",
                        "configuration diagnostics"};
  std::string chosen;
  const auto& names = subcommands();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->fallthrough();
    if (names[i] == "bands") sub->add_flag("--dump-operator", dump_operator, "write the first fiber as operator.csv");
    sub->callback([&chosen, n = names[i]] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitSchema;
  }

  try {
    RunConfig cfg = load_config(config_path, ov);
    if (dump_operator) {
      cfg.bands.dump_operator = true;
      cfg.effective["bands"]["dump_operator"] = true;
    }
    return run(cfg, chosen, std::cout);
  } catch (const pdirac::FormatError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
