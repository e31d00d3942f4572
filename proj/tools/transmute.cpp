// transmute: command-line front end.
//
//   transmute <solve|kernel|eigen|pde|compare|bench> [--config job.json] [flags]
//
// Settings are taken from the built-in defaults, then the config file, then
// the flags; later sources win.  Exit codes: 0 ok, 2 error, 3 warnings under
// --strict.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "transmute/cli/job.hpp"

namespace tc = transmute::cli;

int main(int argc, char** argv) {
  CLI::App app{"Transmutation-operator solver for -y'' + q(x) y = w^2 y"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, q, rep, out;
  double b = 0;
  std::size_t n = 0, m = 0;
  bool strict = false;
  app.add_option("--config", config_path, "JSON job file")->check(CLI::ExistingFile);
  app.add_option("--q", q, "potential q(x), e.g. \"exp(x)\"");
  app.add_option("--b", b, "interval half-width / length");
  app.add_option("--N", n, "truncation order");
  app.add_option("--M", m, "grid intervals (even)");
  app.add_option("--rep", rep, "representation")->check(CLI::IsMember({"legendre", "laguerre", "hermite"}));
  app.add_option("--out", out, "output directory");
  app.add_flag("--strict", strict, "exit with 3 when numerical warnings were raised");

  app.add_subcommand("solve", "u(w, x) at the configured w and x");
  app.add_subcommand("kernel", "formal powers and kernel coefficients");
  app.add_subcommand("eigen", "Sturm-Liouville eigenvalues on [0, b]");
  app.add_subcommand("pde", "(Laplacian - q(x)) u = 0 with Dirichlet data, by the solution family or MFS");
  app.add_subcommand("compare", "all three representations against the reference integrator");
  app.add_subcommand("bench", "accuracy and timing against fixed-step RK4 shooting");
  CLI11_PARSE(app, argc, argv);

  tc::FlagOverrides flags;
  if (app.count("--q")) flags.q = q;
  if (app.count("--b")) flags.b = b;
  if (app.count("--N")) flags.N = n;
  if (app.count("--M")) flags.M = m;
  if (app.count("--rep")) flags.rep = rep;
  if (app.count("--out")) flags.out = out;
  flags.strict = strict;

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    const auto config = tc::parse_job_config(tc::apply_flags(text, app.get_subcommands().front()->get_name(), flags));
    return tc::run_job(config, std::cout);
  } catch (const transmute::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tc::kExitError;
  }
}
