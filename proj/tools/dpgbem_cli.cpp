// Command line front end: runs one adaptive experiment and writes CSV/SVG output.
#include <CLI11.hpp>

#include <dpgbem/driver.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace dpgbem;
  CLI::App app{"Adaptive DPG/BEM coupling for singularly perturbed reaction-diffusion transmission problems"};
  std::string example = "smooth";
  std::string solver = "direct";
  std::string timing = "on";
  std::string out = ".";
  RunConfig cfg;
  double theta = 0.0;
  bool quiet = false;

  app.add_option("--example", example, "smooth | singular | unknown")
      ->check(CLI::IsMember({"smooth", "singular", "unknown"}));
  app.add_option("--epsilon", cfg.eps, "diffusion parameter in (0, 1]")->capture_default_str();
  auto* theta_opt = app.add_option("--theta", theta, "marking parameter in (0, 1) (default 0.5, 0.75 for singular)");
  app.add_option("--beta", cfg.beta, "trial-to-test scaling")->capture_default_str();
  app.add_option("--max-elements", cfg.max_triangles, "stop once the mesh has more triangles")->capture_default_str();
  app.add_option("--solver", solver, "direct | krylov")->check(CLI::IsMember({"direct", "krylov"}));
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--timing", timing, "on | off; off leaves wall_seconds empty so reruns are bit-identical")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_flag("--uniform", cfg.uniform, "refine uniformly instead of adaptively");
  app.add_option("--grid", cfg.grid, "dump u_hp of the final mesh on an N x N grid (0 = off)");
  app.add_flag("--mesh-dump", cfg.mesh_dump, "write the final mesh");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.example = parse_example(example);
    cfg.solver = solver == "krylov" ? SolverKind::Krylov : SolverKind::Direct;
    cfg.timing = timing == "on";
    cfg.out = out;
    if (*theta_opt) cfg.theta = theta;
    cfg.validate();
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    const RunResult r = run(cfg, quiet ? nullptr : &std::cerr);
    if (!quiet) std::cerr << "wrote " << r.csv_path.string() << " and " << r.svg_path.string() << "\n";
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
