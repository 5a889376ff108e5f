#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rtrecover/experiment.hpp"
#include "rtrecover/verify.hpp"

using namespace rtrecover;

namespace {

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
  }

  RunConfig collect() const {
    RunConfig c;
    if (!config.empty()) load_config_file(c, config);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) apply_setting(c, key, values.at(key));
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raviart-Thomas mixed FEM experiments with patch recovery"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "solve a model problem on a sequence of meshes");
  run->add_option("--config", run_flags.config, "key = value file; flags take precedence")->check(CLI::ExistingFile);
  run_flags.add(run, "problem", "1, 2 (smooth solution on the unit square) or 3 (slit square)");
  run_flags.add(run, "r", "element degree 0..3");
  run_flags.add(run, "refine", "regular | bisection | adaptive (problem 3 defaults to adaptive)");
  run_flags.add(run, "levels", "number of meshes (uniform refinement, default 5)");
  run_flags.add(run, "max-ndof", "stop before a mesh with more unknowns (adaptive default 2e5)");
  run_flags.add(run, "theta", "Dorfler bulk parameter");
  run_flags.add(run, "seed", "seed of the initial Delaunay mesh");
  run_flags.add(run, "out", "output directory");
  run_flags.add(run, "mesh", "initial mesh file (\"nv nt\", vertices, triangles)");
  run_flags.add(run, "domain", "unit-square | slit-square");
  run_flags.add(run, "initial-nt", "triangle count of the generated initial mesh");
  run_flags.add(run, "quad-degree", "exactness of the assembly and error rules");
  run_flags.add(run, "reaction", "reaction coefficient c for problems 1 and 2");

  Flags verify_flags;
  auto* verify = app.add_subcommand("verify", "randomized check of the local error identities");
  verify->add_option("--config", verify_flags.config, "key = value file")->check(CLI::ExistingFile);
  verify_flags.add(verify, "samples", "number of random triangles");
  verify_flags.add(verify, "seed", "random seed");
  verify_flags.add(verify, "aspect-max", "largest aspect ratio (longest edge / shortest altitude)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const RunConfig config = resolve(run_flags.collect());
      std::cout << "problem " << config.problem << ", RT_" << config.r << ", " << to_string(config.refine)
                << " refinement\n";
      const auto result = run_experiment(config, std::cout);
      write_outputs(config, result);
      write_orders(std::cout, result.orders);
      std::cout << "wrote " << config.out << "/{table.csv,orders.txt,convergence.svg}\n";
      return 0;
    }
    const RunConfig config = resolve(verify_flags.collect());
    VerifyOptions options;
    options.samples = config.samples;
    options.seed = config.seed;
    options.aspect_max = config.aspect_max;
    const auto report = run_verify_suite(options);
    print_verify_report(std::cout, report);
    return report.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
