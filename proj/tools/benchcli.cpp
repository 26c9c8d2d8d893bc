#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sympmor/bench.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sympmor: randomized symplectic basis generation benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand(
      "run", "Run the wave-equation benchmark and emit CSV plot data");

  std::string config_file;
  std::string grid;
  std::string nt;
  std::string seed;
  std::string basis_sizes;
  std::string out;
  std::string training_mus;
  std::string test_mus;
  std::string test_mu_range;
  std::string sketch_seeds;
  std::vector<std::string> methods;

  auto* config_opt =
      run->add_option("--config", config_file, "Key=value configuration file");
  auto* grid_opt =
      run->add_option("--grid", grid, "Grid points as AxB, e.g. 100x10");
  auto* nt_opt = run->add_option("--nt", nt, "Number of time steps");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* sizes_opt = run->add_option("--basis-sizes", basis_sizes,
                                    "Comma-separated even basis sizes (2k)");
  auto* methods_opt = run->add_option(
      "--methods", methods,
      "Method descriptors, e.g. cSVDFull or rcSVD:povs=10,qpow=1 "
      "(repeatable; ';' separates descriptors within one value)");
  auto* out_opt = run->add_option("--out", out, "Output directory for CSV files");
  auto* training_opt = run->add_option("--training-mus", training_mus,
                                       "Comma-separated training parameters");
  auto* test_opt =
      run->add_option("--test-mus", test_mus, "Number of test parameters");
  auto* range_opt = run->add_option("--test-mu-range", test_mu_range,
                                    "Test parameter range as lo,hi");
  auto* seeds_opt = run->add_option("--sketch-seeds", sketch_seeds,
                                    "Sketch repetitions for randomized methods");
  auto* paper_opt = run->add_flag(
      "--paper-scale", "Full-scale preset: grid 1000x20, nt 1000, training 1,2");

  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<std::string, std::string>> flags;
  if (paper_opt->count() > 0) flags.emplace_back("paper-scale", "true");
  if (grid_opt->count() > 0) flags.emplace_back("grid", grid);
  if (nt_opt->count() > 0) flags.emplace_back("nt", nt);
  if (seed_opt->count() > 0) flags.emplace_back("seed", seed);
  if (sizes_opt->count() > 0) flags.emplace_back("basis-sizes", basis_sizes);
  if (training_opt->count() > 0) flags.emplace_back("training-mus", training_mus);
  if (test_opt->count() > 0) flags.emplace_back("test-mus", test_mus);
  if (range_opt->count() > 0) flags.emplace_back("test-mu-range", test_mu_range);
  if (seeds_opt->count() > 0) flags.emplace_back("sketch-seeds", sketch_seeds);
  if (methods_opt->count() > 0) {
    std::string joined;
    for (const std::string& m : methods) {
      if (!joined.empty()) joined += ';';
      joined += m;
    }
    flags.emplace_back("methods", joined);
  }
  if (out_opt->count() > 0) flags.emplace_back("out", out);

  try {
    const std::optional<std::string> file =
        config_opt->count() > 0 ? std::optional<std::string>(config_file)
                                : std::nullopt;
    const sympmor::bench::ExperimentConfig cfg =
        sympmor::bench::parse_config(flags, file);
    const sympmor::bench::MethodResults results =
        sympmor::bench::run_experiment(cfg);
    sympmor::bench::emit_all_csv(cfg, results);
    return 0;
  } catch (const sympmor::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
