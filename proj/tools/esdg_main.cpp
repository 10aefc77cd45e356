#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "esdg/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* threads = std::getenv("ESDG_THREADS")) {
    const int count = std::atoi(threads);
    if (count > 0) omp_set_num_threads(count);
  }
#endif

  CLI::App app{"Entropy-stable flux-differencing DG solver for the 2D Euler equations"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* cmd_run = app.add_subcommand("run", "execute one simulation");
  cmd_run->add_option("config", run_config, "configuration file")->required();

  std::string study_config;
  CLI::App* cmd_study = app.add_subcommand("study", "run a mesh-refinement convergence study");
  cmd_study->add_option("config", study_config, "configuration file")->required();

  std::string field_path, vtk_path;
  CLI::App* cmd_export = app.add_subcommand("export-vtk", "write a field dump as legacy ASCII VTK");
  cmd_export->add_option("field", field_path, "binary field file")->required();
  cmd_export->add_option("out", vtk_path, "output .vtk path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cmd_run->parsed()) return esdg::cli_run(run_config);
  if (cmd_study->parsed()) return esdg::cli_study(study_config);
  return esdg::cli_export_vtk(field_path, vtk_path);
}
