#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "planenorm/cli.hpp"

namespace {

void add_config(CLI::App* cmd, planenorm::RunConfig& cfg) {
  cmd->add_option("--grid", cfg.grid, "sweep resolution (power of two >= 256)");
  cmd->add_option("--tol", cfg.tol, "attaining band tolerance, in (0, 1e-4]");
  cmd->add_option("--lambdas", cfg.lambdas, "lambda schedule, comma separated")->delimiter(',');
  cmd->add_option("--out", cfg.out, "output file (default stdout)");
  cmd->add_flag_function("-v,--verbose", [&cfg](std::int64_t n) { cfg.verbosity = static_cast<int>(n); },
                         "more diagnostics (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planenorm: counterexample certificates for operator norm attainment in normed planes"};
  app.require_subcommand(1);
  planenorm::RunConfig cfg;

  planenorm::ConstructArgs cons;
  auto* construct = app.add_subcommand("construct", "build, certify and verify a counterexample family");
  construct->add_option("--norm-x", cons.norm_x, "domain norm (JSON file or inline JSON)")->required();
  construct->add_option("--norm-y", cons.norm_y, "codomain norm (JSON file or inline JSON)")->required();
  construct->add_flag("--ambient", cons.ambient, "norms are ambient n-dimensional specs; use quotient and restriction");
  construct->add_option("--x0-basis", cons.x0_basis, "basis of the subspace factored out of X");
  construct->add_option("--y0-basis", cons.y0_basis, "two vectors spanning the plane inside Y");
  add_config(construct, cfg);

  std::string cert_path;
  auto* certify = app.add_subcommand("certify", "re-verify a certificate file");
  certify->add_option("certificate", cert_path, "certificate JSON")->required();

  std::string norm;
  std::vector<double> eps{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  auto* modulus = app.add_subcommand("modulus", "tabulate the modulus of convexity");
  modulus->add_option("--norm", norm, "norm (JSON file or inline JSON)")->required();
  modulus->add_option("--eps", eps, "epsilon values, comma separated")->delimiter(',');
  add_config(modulus, cfg);

  planenorm::FigureArgs fig;
  auto* figure = app.add_subcommand("figure-data", "emit curve data for plots");
  figure->add_option("--kind", fig.kind, "half-arc, gamma-eps or construction")->required();
  figure->add_option("--norm-x", fig.norm_x, "domain norm");
  figure->add_option("--norm-y", fig.norm_y, "codomain norm");
  figure->add_option("--norm", fig.norm, "norm for gamma-eps");
  figure->add_option("--eps", fig.eps, "chord length for gamma-eps");
  figure->add_option("--samples", fig.samples, "points per curve");
  add_config(figure, cfg);

  auto* john = app.add_subcommand("john", "maximal-area inscribed ellipse");
  john->add_option("--norm", norm, "norm (JSON file or inline JSON)")->required();
  john->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : planenorm::kExitValidation;
  }

  if (*construct) return planenorm::cmd_construct(cons, cfg, std::cout, std::cerr);
  if (*certify) return planenorm::cmd_certify(cert_path, std::cout, std::cerr);
  if (*modulus) return planenorm::cmd_modulus(norm, eps, cfg, std::cout, std::cerr);
  if (*figure) return planenorm::cmd_figure_data(fig, cfg, std::cout, std::cerr);
  if (*john) return planenorm::cmd_john(norm, cfg, std::cout, std::cerr);
  return planenorm::kExitValidation;
}
